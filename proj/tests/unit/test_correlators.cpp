#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvscramble/correlators.hpp"

using namespace cvscramble;

namespace {

void expect_within_3sigma(const CorrelatorResult& mc, double exact) {
  EXPECT_LE(std::abs(mc.value.real() - exact), 3.0 * mc.stderr_ + 1e-12)
      << "mc " << mc.value.real() << " +- " << mc.stderr_ << " exact " << exact;
}

}  // namespace

TEST(Correlators, GaussianOtocIdentityDynamics) {
  const auto xi1 = DisplacementVector::from_alpha({1.0, 0.0});
  const auto xi2 = DisplacementVector::from_alpha({0.0, 1.0});
  const auto c = otoc_gaussian(GaussianUnitary::identity(1), xi1, xi2);
  EXPECT_LT(std::abs(c.value - std::polar(1.0, -2.0)), 1e-15);
}

TEST(Correlators, GaussianOtocHasUnitModulus) {
  Rng rng(41);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 1000; ++k) {
    const int modes = 1 + static_cast<int>(rng() % 4);
    const auto U = random_gaussian_circuit(modes, 1 + static_cast<int>(rng() % 100), rng, 0.5, 1.0);
    Vec a(2 * modes), b(2 * modes);
    for (int i = 0; i < 2 * modes; ++i) a[i] = n01(rng), b[i] = n01(rng);
    const auto c = otoc_gaussian(U, DisplacementVector(a), DisplacementVector(b));
    ASSERT_LT(std::abs(std::abs(c.value) - 1.0), 1e-12);
  }
}

TEST(Correlators, TocGaussianOnVacuum) {
  // U = I: <0| D(xi1) D(xi2) |0> = e^{-i xi1^T Omega xi2} e^{-|xi1 + xi2|^2 / 2}
  const auto a = DisplacementVector::from_alpha({0.3, 0.1});
  const auto b = DisplacementVector::from_alpha({-0.2, 0.5});
  const auto c = toc_gaussian(GaussianUnitary::identity(1), a, b, GaussianState::vacuum(1));
  const cplx expected =
      std::polar(1.0, -a.vec().dot(omega_times(b.vec()))) * std::exp(-0.5 * (a.vec() + b.vec()).squaredNorm());
  EXPECT_LT(std::abs(c.value - expected), 1e-15);
}

TEST(Correlators, CubicClosedForm) {
  const auto c = otoc_cubic({1.0, 0.0}, {1.0, 0.0}, 1.0, 1.0, 0.0);
  EXPECT_NEAR(c.magnitude, std::exp(-2.0), 1e-15);
  EXPECT_NEAR(std::arg(c.value), 4.0 - 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(otoc_cubic({0.0, 1.0}, {2.0, 0.5}, 3.0, 1.0, 2.0).magnitude, 1.0, 1e-15);
  const auto t0 = otoc_cubic({0.4, 0.3}, {0.2, -1.0}, 0.0, 1.0, 0.0);
  EXPECT_NEAR(t0.magnitude, 1.0, 1e-15);
  EXPECT_NEAR(std::arg(t0.value), 2.0 * (std::conj(cplx{0.4, 0.3}) * cplx{0.2, -1.0}).imag(), 1e-14);
  EXPECT_THROW(otoc_cubic(1.0, 1.0, 1.0, 1.0, -0.1), ParameterError);
}

TEST(Correlators, CubicFourierConsistency) {
  for (double n_th : {20.0, 100.0}) {
    for (double t : {0.01, 0.02, 0.05}) {
      const cplx al{1.0, 0.3}, be{0.7, -0.2};
      const double closed = otoc_cubic(al, be, t, 1.0, n_th).magnitude;
      const double numeric = std::abs(cubic_c2_from_c1_transform(al, be, t, 1.0, n_th));
      EXPECT_NEAR(numeric, closed, 0.02 * closed) << "n_th " << n_th << " t " << t;
    }
  }
}

TEST(Correlators, DisplacementAverage) {
  EXPECT_EQ(avg_otoc_displacement(DisplacementVector::zero(1), 2.0), 1.0);
  const double n = 3.0;
  const auto xi = DisplacementVector(Vec::Constant(2, std::sqrt(0.5 / n)));
  EXPECT_NEAR(avg_otoc_displacement(xi, n), std::exp(-1.0), 1e-15);
  // MC over probe ensemble D_n of exp(-2 i xi^T Omega xi')
  const auto e = DisplacementEnsemble::isotropic(1, n);
  Rng rng(43);
  const long N = 100000;
  double s = 0.0, s2 = 0.0;
  for (long k = 0; k < N; ++k) {
    const auto p = e.sample(rng);
    const double v = std::cos(2.0 * xi.vec().dot(omega_times(p.vec())));
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_LE(std::abs(mean - std::exp(-1.0)), 3.0 * se);
}

TEST(Correlators, QuasiClosedFormsMatchMonteCarlo) {
  const double n = 1.3;
  const long N = 100000;
  // identity
  expect_within_3sigma(avg_otoc_quasi_mc(GaussianUnitary::identity(1), 0, 0, n, N, 1), quasi_closed_identity(n));
  // squeezer
  for (double r : {0.3, 1.0}) {
    expect_within_3sigma(avg_otoc_quasi_mc(squeeze(r), 0, 0, n, N, 2), quasi_closed_squeeze(r, n));
    EXPECT_NEAR(avg_otoc_quasi(squeeze(r), 0, 0, n).magnitude, quasi_closed_squeeze(r, n), 1e-12);
  }
  // beamsplitter: same mode sees sqrt(eta), the other mode sqrt(1 - eta)
  for (double eta : {0.25, 0.6}) {
    const auto B = beamsplitter(eta);
    expect_within_3sigma(avg_otoc_quasi_mc(B, 0, 0, n, N, 3), quasi_closed_passive(std::sqrt(eta), n));
    expect_within_3sigma(avg_otoc_quasi_mc(B, 0, 1, n, N, 4), quasi_closed_passive(std::sqrt(1.0 - eta), n));
    EXPECT_NEAR(avg_otoc_quasi(B, 0, 1, n).magnitude, quasi_closed_passive(std::sqrt(1.0 - eta), n), 1e-12);
  }
  // two-mode squeezer, cross modes
  for (double r : {0.4, 1.2}) {
    expect_within_3sigma(avg_otoc_quasi_mc(two_mode_squeeze(r), 0, 1, n, N, 5), quasi_closed_two_mode_squeeze(r, n));
    EXPECT_NEAR(avg_otoc_quasi(two_mode_squeeze(r), 0, 1, n).magnitude, quasi_closed_two_mode_squeeze(r, n), 1e-12);
  }
}

TEST(Correlators, QuasiRandomCompositionsMatchMonteCarlo) {
  Rng rng(47);
  for (int k = 0; k < 5; ++k) {
    const auto U = random_gaussian_circuit(2, 8, rng, 0.6);
    const double n = 0.8;
    for (int w = 0; w < 2; ++w)
      for (int v = 0; v < 2; ++v)
        expect_within_3sigma(avg_otoc_quasi_mc(U, w, v, n, 100000, 10 + k), avg_otoc_quasi(U, w, v, n).magnitude);
  }
}

TEST(Correlators, QuasiLimits) {
  const double n = 2.0;
  EXPECT_EQ(quasi_closed_squeeze(0.0, n), quasi_closed_identity(n));
  EXPECT_EQ(quasi_closed_passive(1.0, n), quasi_closed_identity(n));
  EXPECT_EQ(quasi_closed_passive(0.0, n), 1.0);
  EXPECT_EQ(quasi_closed_two_mode_squeeze(0.0, n), 1.0);
  // B(1) keeps modes apart, B(0) swaps them
  EXPECT_NEAR(avg_otoc_quasi(beamsplitter(1.0), 0, 1, n).magnitude, 1.0, 1e-15);
  EXPECT_NEAR(avg_otoc_quasi(beamsplitter(0.0), 0, 0, n).magnitude, 1.0, 1e-15);
  EXPECT_NEAR(avg_otoc_quasi(beamsplitter(0.0), 0, 1, n).magnitude, 1.0 / (1.0 + n * n), 1e-15);
}

TEST(Correlators, FramePotentialClosedFormMatchesMonteCarlo) {
  const double n_th = 0.5;
  for (double n : {0.2, 1.0, 4.0}) {
    const auto e = DisplacementEnsemble::isotropic(1, n);
    const auto mc = frame_potential_mc(sampler_of(e), GaussianState::thermal(1, n_th), 1, 100000, 7);
    expect_within_3sigma(mc, frame_potential_gaussian(e.covariance(), n_th));
  }
  // anisotropic covariance
  Mat V(2, 2);
  V << 1.5, 0.4, 0.4, 0.3;
  const auto e = DisplacementEnsemble(DisplacementVector::zero(1), V);
  expect_within_3sigma(frame_potential_mc(sampler_of(e), GaussianState::thermal(1, 1.0), 1, 100000, 9),
                       frame_potential_gaussian(V, 1.0));
}

TEST(Correlators, FramePotentialEqualsQuasiAverage) {
  // equality of the k = 1 frame potential and the identity quasi average when n = 2(2 n_th + 1)
  for (double n_th : {0.0, 0.5, 2.0}) {
    const double n = 2.0 * (2.0 * n_th + 1.0);
    const auto e = DisplacementEnsemble::isotropic(1, n);
    EXPECT_NEAR(frame_potential_gaussian(e.covariance(), n_th), quasi_closed_identity(n), 1e-14);
    expect_within_3sigma(frame_potential_mc(sampler_of(e), GaussianState::thermal(1, n_th), 1, 100000, 13),
                         quasi_closed_identity(n));
  }
}

TEST(Correlators, FramePotentialHighTemperature) {
  const double n_th = 200.0;
  Mat V = 5.0 * Mat::Identity(2, 2);
  EXPECT_NEAR(frame_potential_gaussian(V, n_th) / frame_potential_high_temperature(V, n_th), 1.0, 1e-2);
}

TEST(Correlators, SparseEnsembleLimit) {
  // well-separated points: only coincident pairs contribute, F -> 1/M
  const int M = 10;
  std::vector<DisplacementVector> pts;
  for (int i = 0; i < M; ++i) pts.push_back(DisplacementVector::from_alpha({10.0 * i, 0.0}));
  const auto mc = frame_potential_mc(discrete_sampler(pts), GaussianState::thermal(1, 1.0), 1, 100000, 17);
  expect_within_3sigma(mc, 1.0 / M);
}

TEST(Correlators, TwiceRegulatedJ) {
  for (int N : {1, 2, 5})
    for (double n_th : {0.0, 0.1, 1.0, 10.0})
      for (double n : {0.0, 0.01, 1.0, 100.0, 1e4}) EXPECT_GE(twice_regulated_J(n, n_th, N), 1.0 - 1e-15);
  for (double n_th : {0.5, 1.0, 3.0}) EXPECT_NEAR(twice_regulated_J(100.0 * n_th, n_th, 1), 1.0, 0.01);
  EXPECT_EQ(twice_regulated_J(1.0, 0.0, 3), 1.0);
}

TEST(Correlators, HBound) {
  EXPECT_EQ(H_bound(1, GaussianState::thermal(1, 1.0)), 1.0);
  // tr sqrt(rho) for a thermal state: 1/(sqrt(n+1) - sqrt(n))
  const double n = 0.7;
  EXPECT_NEAR(trace_sqrt_rho(GaussianState::thermal(1, n)), 1.0 / (std::sqrt(n + 1) - std::sqrt(n)), 1e-12);
  EXPECT_NEAR(trace_sqrt_rho(GaussianState::vacuum(2)), 1.0, 1e-12);
  EXPECT_THROW(H_bound(3, GaussianState::vacuum(1)), ParameterError);
}

TEST(Correlators, LossChannel) {
  const auto r = loss_channel_displacement({1.0, 1.0}, 0.5, 0.0);
  EXPECT_NEAR(r.damping, std::exp(-0.5), 1e-15);
  EXPECT_LT(std::abs(r.alpha_out - std::sqrt(0.5) * cplx{1.0, 1.0}), 1e-15);
  EXPECT_EQ(loss_channel_displacement({2.0, 0.0}, 1.0, 3.0).damping, 1.0);
  EXPECT_THROW(loss_channel_displacement(1.0, 1.5, 0.0), ParameterError);
}

TEST(Correlators, LiouvilleVolume) {
  Rng rng(53);
  const auto e = DisplacementEnsemble::isotropic(2, 1.5);
  for (int k = 0; k < 50; ++k) EXPECT_LT(liouville_check(e, random_gaussian_circuit(2, 30, rng, 0.5)), 1e-8);
}

TEST(Correlators, EnsembleAverageIdentity) {
  // avg over D_n of OTOC against an ensemble with covariance V
  const Mat V = 0.5 * 1.3 * Mat::Identity(2, 2);
  EXPECT_NEAR(avg_otoc_ensemble(V, 1.3), quasi_closed_identity(1.3), 1e-14);
}

TEST(Correlators, NongaussianityMeasure) {
  const auto pt = discrete_sampler({DisplacementVector::from_alpha({1.0, 0.0})});
  GaussianDynamics g(squeeze(0.3));
  EXPECT_EQ(nongaussianity_measure(g, pt, pt, 10, 1).value.real(), 1.0);
  CubicGateDynamics c(1.0, 1.0, 0.0);
  // square of the cubic magnitude
  EXPECT_NEAR(nongaussianity_measure(c, pt, pt, 10, 1).value.real(), std::exp(-4.0), 1e-15);
  const auto im = discrete_sampler({DisplacementVector::from_alpha({0.0, 1.0})});
  EXPECT_NEAR(nongaussianity_measure(c, im, pt, 10, 1).value.real(), 1.0, 1e-15);
}

TEST(Correlators, EnsembleValidation) {
  Mat V(2, 2);
  V << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(DisplacementEnsemble(DisplacementVector::zero(1), V), ParameterError);
  EXPECT_THROW(DisplacementEnsemble::isotropic(1, 0.0), ParameterError);
}
