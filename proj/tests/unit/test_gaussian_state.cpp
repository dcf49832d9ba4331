#include <cmath>

#include <gtest/gtest.h>

#include "cvscramble/gaussian_state.hpp"

using namespace cvscramble;

namespace {

// entropy of a thermal mode with mean photon number nbar
double g(double nbar) { return nbar <= 0 ? 0.0 : (nbar + 1) * std::log(nbar + 1) - nbar * std::log(nbar); }

}  // namespace

TEST(GaussianState, VacuumAndThermal) {
  const auto v = GaussianState::vacuum(2);
  EXPECT_LT((v.sigma() - 0.5 * Mat::Identity(4, 4)).norm(), 1e-15);
  const auto t = GaussianState::thermal(1, 2.0);
  EXPECT_NEAR(t.sigma()(0, 0), 2.5, 1e-15);
  EXPECT_THROW(GaussianState::thermal(1, -1.0), ParameterError);
}

TEST(GaussianState, RejectsUnphysicalCovariance) {
  EXPECT_THROW(GaussianState(Vec::Zero(2), 0.4 * Mat::Identity(2, 2)), ParameterError);
  Mat asym = 0.5 * Mat::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(GaussianState(Vec::Zero(2), asym), ParameterError);
}

TEST(GaussianState, CoherentMean) {
  const auto c = GaussianState::coherent({{1.0, -2.0}});
  EXPECT_NEAR(c.mu()[0], std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.mu()[1], -2.0 * std::sqrt(2.0), 1e-15);
}

TEST(GaussianState, CharFnThermal) {
  const auto t = GaussianState::thermal(1, 0.7);
  const auto xi = DisplacementVector::from_alpha({0.4, -0.9});
  EXPECT_NEAR(char_fn(t, xi).real(), std::exp(-(0.7 + 0.5) * xi.vec().squaredNorm()), 1e-15);
  EXPECT_NEAR(char_fn(t, xi).imag(), 0.0, 1e-15);
}

TEST(GaussianState, CharFnCoherentIsDisplacementPhase) {
  // <gamma|D(xi)|gamma> = exp(-|xi|^2/2) exp(2i Im(gamma* alpha)) with alpha = xi_q + i xi_p
  const cplx gam{0.3, 0.8}, al{-0.5, 0.2};
  const auto c = GaussianState::coherent({gam});
  const cplx expected = std::exp(-0.5 * std::norm(al)) * std::polar(1.0, 2.0 * (std::conj(gam) * al).imag());
  EXPECT_LT(std::abs(char_fn(c, DisplacementVector::from_alpha(al)) - expected), 1e-14);
}

TEST(GaussianState, CharFnCovariance) {
  Rng rng(21);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 100; ++k) {
    const auto U = random_gaussian_circuit(2, 20, rng, 0.4, 0.5);
    const auto rho = GaussianState::thermal(2, 0.3);
    const auto out = evolve(rho, U);
    Vec x(4);
    for (int i = 0; i < 4; ++i) x[i] = 0.5 * n01(rng);
    const DisplacementVector xi(x);
    // tr[U rho U^dag D(xi)] = tr[rho U^dag D(xi) U] = phase * chi(S^{-1} xi)
    const auto e = evolve_displacement(U, xi);
    const cplx lhs = char_fn(out, xi);
    const cplx rhs = e.phase * char_fn(rho, e.xi);
    EXPECT_LT(std::abs(lhs - rhs), 1e-10);
  }
}

TEST(GaussianState, PurityPreserved) {
  Rng rng(23);
  const auto vac = GaussianState::vacuum(3);
  for (int k = 0; k < 1000; ++k) {
    const auto U = random_gaussian_circuit(3, 100, rng, 0.3);
    const auto s = evolve(vac, U);
    const double det = (2.0 * s.sigma()).determinant();
    ASSERT_NEAR(det, 1.0, 1e-8 * std::max(1.0, condition_report(s.sigma())));
  }
}

TEST(GaussianState, TwoModeSqueezedEntropy) {
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const auto s = GaussianState::two_mode_squeezed_vacuum(r);
    const double nbar = std::sinh(r) * std::sinh(r);
    EXPECT_NEAR(entanglement_entropy(s, {0}), g(nbar), 1e-10);
    EXPECT_NEAR(entanglement_entropy(s, {0}), entanglement_entropy(s, {1}), 1e-10);
  }
  EXPECT_NEAR(entanglement_entropy(GaussianState::two_mode_squeezed_vacuum(1.0), {0}), 1.6198, 1e-4);
}

TEST(GaussianState, TwoModeSqueezedSchmidtSpectrum) {
  // |TMSV> = sum_n c_n |n,n>, c_n = tanh^n r / cosh r: entropy from the Schmidt weights
  const double r = 1.0, t = std::tanh(r);
  double S = 0.0, w = 1.0 / (std::cosh(r) * std::cosh(r));
  for (int n = 0; n < 400; ++n, w *= t * t)
    if (w > 0) S -= w * std::log(w);
  EXPECT_NEAR(entanglement_entropy(GaussianState::two_mode_squeezed_vacuum(r), {0}), S, 1e-10);
}

TEST(GaussianState, EntropyComplementarySymmetry) {
  Rng rng(29);
  for (int k = 0; k < 200; ++k) {
    const auto U = random_gaussian_circuit(4, 40, rng, 0.5);
    const auto s = evolve(GaussianState::vacuum(4), U);
    const double left = entanglement_entropy(s, {0, 2});
    const double right = entanglement_entropy(s, {1, 3});
    EXPECT_GE(left, -1e-12);
    EXPECT_NEAR(left, right, 1e-8);
    EXPECT_NEAR(block_entropy(s.sigma(), 0, 2), block_entropy(s.sigma(), 2, 2), 1e-8);
  }
}

TEST(GaussianState, EntropyZeroForPureProduct) {
  const auto s = GaussianState::squeezed_vacuum(1.5).tensor(GaussianState::vacuum(1));
  EXPECT_NEAR(entanglement_entropy(s, {0}), 0.0, 1e-12);
  EXPECT_GT(entanglement_entropy(GaussianState::thermal(1, 0.1), {0}), 0.0);
}

TEST(GaussianState, SymplecticEigenvaluesThermal) {
  Rng rng(31);
  const auto U = random_gaussian_circuit(3, 30, rng, 0.5);
  const auto s = evolve(GaussianState::thermal(3, 1.5), U);
  const auto nu = symplectic_eigenvalues(s.sigma()).nu;
  for (int i = 0; i < nu.size(); ++i) EXPECT_NEAR(nu[i], 2.0, 1e-9);
}

TEST(GaussianState, ReducedAndTensor) {
  const auto a = GaussianState::coherent({{1.0, 0.0}});
  const auto b = GaussianState::squeezed_vacuum(0.5);
  const auto ab = a.tensor(b);
  EXPECT_EQ(ab.modes(), 2);
  EXPECT_LT((ab.reduced({1}).sigma() - b.sigma()).norm(), 1e-15);
  EXPECT_LT((ab.reduced({0}).mu() - a.mu()).norm(), 1e-15);
}

TEST(GaussianState, BitsConversion) { EXPECT_NEAR(nats_to_bits(std::log(2.0)), 1.0, 1e-15); }
