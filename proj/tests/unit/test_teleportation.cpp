#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvscramble/teleportation.hpp"

using namespace cvscramble;

namespace {

// Hermite functions <x|n> for [q, p] = i
std::vector<double> hermite_functions(double x, int d) {
  std::vector<double> phi(d);
  phi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (d > 1) phi[1] = std::sqrt(2.0) * x * phi[0];
  for (int n = 1; n + 1 < d; ++n)
    phi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * phi[n] - std::sqrt(double(n) / (n + 1)) * phi[n - 1];
  return phi;
}

}  // namespace

TEST(Teleportation, ScramblerIsSymplectic) {
  for (double m : {-3.0, 2.0, 5.5, 20.0}) EXPECT_LT(symplectic_defect(scrambler_from_m(m).S.mat()), 1e-9 * m * m);
}

TEST(Teleportation, IdealLimitIsExact) {
  TeleportConfig cfg;
  cfg.epr_r = 15.0;
  Rng rng(1);
  for (double m : {2.0, 5.0, 13.0}) {
    cfg.m = m;
    cfg.input = GaussianState::coherent({{0.7, -1.1}});
    for (int k = 0; k < 5; ++k) {
      const auto out = run_protocol(cfg, rng);
      EXPECT_LT((out.output.mu() - cfg.input.mu()).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT((out.output.sigma() - cfg.input.sigma()).cwiseAbs().maxCoeff(), 1e-4);
      EXPECT_GT(out.fidelity, 0.999999);
    }
  }
}

TEST(Teleportation, SqueezedInputTeleports) {
  TeleportConfig cfg;
  cfg.epr_r = 15.0;
  cfg.m = 4.0;
  cfg.input = GaussianState::squeezed_vacuum(0.8);
  Rng rng(2);
  const auto out = run_protocol(cfg, rng);
  EXPECT_LT((out.output.sigma() - cfg.input.sigma()).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Teleportation, CorrectionRoutesAgree) {
  TeleportConfig cfg;
  cfg.epr_r = 3.0;
  cfg.input = GaussianState::coherent({{0.3, 0.4}});
  for (double m : {2.0, 7.0, -4.0}) {
    cfg.m = m;
    cfg.route = CorrectionRoute::Generic;
    const auto a = run_protocol_with_outcome(cfg, 1.3, -0.6);
    cfg.route = CorrectionRoute::MFamily;
    const auto b = run_protocol_with_outcome(cfg, 1.3, -0.6);
    EXPECT_LT((a.correction - b.correction).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((a.output.mu() - b.output.mu()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Teleportation, FidelityFallsWithNoise) {
  TeleportConfig cfg;
  cfg.m = 3.0;
  cfg.input = GaussianState::coherent({{0.5, 0.0}});
  double prev = 2.0;
  for (int k = 0; k < 10; ++k) {
    cfg.noise = 0.1 * k;
    // mean fidelity over outcomes; the outcome-averaged state is what matters
    Rng rng(100);
    double f = 0.0;
    for (int s = 0; s < 50; ++s) f += run_protocol(cfg, rng).fidelity;
    f /= 50;
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(Teleportation, BellBaselineWithoutScrambler) {
  TeleportConfig cfg;
  cfg.scrambler = false;
  cfg.epr_r = 15.0;
  cfg.input = GaussianState::coherent({{-0.2, 0.9}});
  Rng rng(4);
  EXPECT_GT(run_protocol(cfg, rng).fidelity, 0.999999);
}

TEST(Teleportation, InducedError) {
  for (double m : {2.0, 6.0, 19.0}) {
    const double dQ = 0.37;
    const Vec e = induced_error(m, (Vec(2) << dQ, 0.0).finished());
    EXPECT_NEAR(std::abs(e[0]), dQ / (m + 1.0), 1e-12);
    EXPECT_NEAR(e[1], 0.0, 1e-15);
    const Vec f = induced_error(m, (Vec(2) << 0.0, dQ).finished());
    EXPECT_NEAR(std::abs(f[1]), dQ / (m - 1.0), 1e-12);
  }
  EXPECT_THROW(induced_error(1.0, Vec::Zero(2)), NumericalAbort);
}

TEST(Teleportation, GkpThreshold) {
  const double th = std::sqrt(std::numbers::pi) / 2.0;
  EXPECT_DOUBLE_EQ(gkp_threshold(), th);
  EXPECT_TRUE(gkp_correctable((Vec(2) << th - 1e-9, 0.0).finished()));
  EXPECT_FALSE(gkp_correctable((Vec(2) << 0.0, -th).finished()));
  // boundary in dQ is (m + 1) * threshold
  const double m = 5.0;
  EXPECT_TRUE(gkp_correctable(induced_error(m, (Vec(2) << 0.999 * (m + 1) * th, 0.0).finished())));
  EXPECT_FALSE(gkp_correctable(induced_error(m, (Vec(2) << 1.001 * (m + 1) * th, 0.0).finished())));
}

TEST(Teleportation, GaussianFidelity) {
  const auto a = GaussianState::coherent({{0.3, 0.1}});
  const auto b = GaussianState::coherent({{-0.2, 0.5}});
  EXPECT_NEAR(gaussian_fidelity(a, b), std::exp(-std::norm(cplx{0.5, -0.4})), 1e-12);
  EXPECT_NEAR(gaussian_fidelity(a, a), 1.0, 1e-12);
  // thermal states: F = 1/(sqrt((n+1)(m+1)) - sqrt(nm))^2
  const double n = 0.5, m = 2.0;
  const double expect = std::pow(std::sqrt((n + 1) * (m + 1)) - std::sqrt(n * m), -2.0);
  EXPECT_NEAR(gaussian_fidelity(GaussianState::thermal(1, n), GaussianState::thermal(1, m)), expect, 1e-12);
}

TEST(Teleportation, HomodyneConditioningMatchesFockOracle) {
  // two-mode squeezed vacuum at r = 1, homodyne of q on mode 0 with outcome Q
  const int d = 30;
  const double r = 1.0, t = std::tanh(r);
  const auto tmsv = GaussianState::two_mode_squeezed_vacuum(r);
  for (double Q : {-0.8, 0.0, 0.6}) {
    const auto phi = hermite_functions(Q, d);
    CVec v(d);
    for (int n = 0; n < d; ++n) v[n] = std::pow(t, n) / std::cosh(r) * phi[n];
    v.normalize();
    CMat a = CMat::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    const CMat q = (a + a.adjoint()) / std::numbers::sqrt2;
    const CMat p = (a - a.adjoint()) / cplx(0.0, std::numbers::sqrt2);
    auto ev = [&](const CMat& A) { return (v.adjoint() * A * v)(0, 0).real(); };
    const double mq = ev(q), mp = ev(p);
    Mat M = Mat::Zero(1, 4);
    M(0, 0) = 1.0;
    const auto c = condition_gaussian(tmsv, M, (Vec(1) << Q).finished(), Mat::Zero(1, 1), {1});
    EXPECT_NEAR(c.mu()[0], mq, 1e-4);
    EXPECT_NEAR(c.mu()[1], mp, 1e-4);
    EXPECT_NEAR(c.sigma()(0, 0), ev(q * q) - mq * mq, 1e-4);
    EXPECT_NEAR(c.sigma()(1, 1), ev(p * p) - mp * mp, 1e-4);
  }
}

TEST(Teleportation, Validation) {
  TeleportConfig cfg;
  cfg.m = 1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.m = 3.0;
  cfg.noise = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}
