#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "cvscramble/gaussian_state.hpp"
#include "cvscramble/random_circuits.hpp"
#include "cvscramble/symplectic.hpp"

using namespace cvscramble;

namespace {

// Dense oracles on all 2L+1 modes: the brick layer and the squeezing layer of
// time step t. A physical step is Sq * B.
Mat dense_bricks(const BrickworkCircuit& circ, int L, int t) {
  const int M = 2 * L + 1;
  Mat B = Mat::Identity(2 * M, 2 * M);
  for (int x = -L; x < L; ++x) {
    if (!BrickworkCircuit::bond_active(t, x)) continue;
    const auto u = circ.bond_unitary(t, x);
    CMat U(2, 2);
    U << u[0], u[1], u[2], u[3];
    const int i = x + L;
    B.block(2 * i, 2 * i, 4, 4) = passive_from_unitary(U);
  }
  return B;
}

Mat dense_squeezes(const BrickworkCircuit& circ, int L, int t) {
  const int M = 2 * L + 1;
  Mat Sq = Mat::Identity(2 * M, 2 * M);
  for (int x = -L; x <= L; ++x) {
    const double r = circ.squeeze(t, x);
    Sq(2 * (x + L), 2 * (x + L)) = std::exp(-r);
    Sq(2 * (x + L) + 1, 2 * (x + L) + 1) = std::exp(r);
  }
  return Sq;
}

Mat dense_step(const BrickworkCircuit& circ, int L, int t) { return dense_squeezes(circ, L, t) * dense_bricks(circ, L, t); }

}  // namespace

TEST(RandomCircuits, HaarU2IsUnitary) {
  auto g = SplitMix64::keyed(1, 2, 3, 4);
  for (int k = 0; k < 100; ++k) {
    const auto u = haar_u2(g);
    CMat U(2, 2);
    U << u[0], u[1], u[2], u[3];
    EXPECT_LT((U.adjoint() * U - CMat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(RandomCircuits, CircuitElementsAreAddressable) {
  const BrickworkCircuit a{7, 3, 0.4}, b{7, 3, 0.4}, c{7, 4, 0.4};
  EXPECT_EQ(a.squeeze(5, -2), b.squeeze(5, -2));
  EXPECT_NE(a.squeeze(5, -2), c.squeeze(5, -2));
  EXPECT_EQ(a.bond_unitary(2, 0), b.bond_unitary(2, 0));
  for (int t = 0; t < 20; ++t)
    for (int x = -5; x <= 5; ++x) {
      const double r = a.squeeze(t, x);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 0.4);
    }
}

TEST(RandomCircuits, SingleWalkGrowth) {
  // annealed rate: mean r_tot grows like T E[r^2]/2 per step for a random-axis walk
  const auto w = single_mode_walk(400, {0.0, 0.5}, 2000, 3);
  ASSERT_EQ(w.mean.size(), 401u);
  EXPECT_EQ(w.mean[0], 0.0);
  EXPECT_NEAR(w.mean[400] / (400.0 / 24.0), 1.0, 0.1);
  EXPECT_NEAR(w.var[400] / w.mean[400], 1.0, 0.2);
}

TEST(RandomCircuits, SingleWalkDeterministic) {
  const auto a = single_mode_walk(50, {0.0, 0.5}, 64, 9);
  const auto b = single_mode_walk(50, {0.0, 0.5}, 64, 9);
  EXPECT_EQ(a.final_r, b.final_r);
}

TEST(RandomCircuits, HistogramCountsEverything) {
  const auto h = histogram({0.0, 0.1, 0.5, 0.9, 1.0}, 4);
  long total = 0;
  for (long c : h.counts) total += c;
  EXPECT_EQ(total, 5);
}

TEST(RandomCircuits, FieldMatchesDenseOracle) {
  const CircuitConfig cfg{8, 8, 0.3, 1, 11};
  const Mat f = brickwork_field(cfg, 0);
  const BrickworkCircuit circ{cfg.seed, 0, cfg.R};
  const int M = 2 * cfg.L + 1;
  Vec xi = Vec::Zero(2 * M);
  xi[2 * cfg.L] = 1.0;
  for (int t = 0; t < cfg.T; ++t) {
    // the field prepends layers: xi -> (B_t Sq_t)^{-1} xi
    xi = symplectic_inverse(dense_bricks(circ, cfg.L, t) * dense_squeezes(circ, cfg.L, t)) * xi;
    for (int i = 0; i < M; ++i)
      EXPECT_NEAR(f(t + 1, i), xi[2 * i] * xi[2 * i] + xi[2 * i + 1] * xi[2 * i + 1], 1e-12);
  }
}

TEST(RandomCircuits, StrictLightcone) {
  const CircuitConfig cfg{30, 25, 0.5, 20, 5};
  for (long s = 0; s < cfg.samples; ++s) {
    const Mat f = brickwork_field(cfg, s);
    for (int t = 0; t <= cfg.T; ++t)
      for (int i = 0; i < f.cols(); ++i)
        if (std::abs(i - cfg.L) > t) ASSERT_EQ(f(t, i), 0.0);
  }
  EXPECT_EQ(brickwork_run(cfg, {1.0}).max_outside_lightcone, 0.0);
}

TEST(RandomCircuits, AmplitudeConservedWithoutSqueezing) {
  const CircuitConfig cfg{60, 50, 0.0, 20, 2};
  const auto r = brickwork_run(cfg, {1.0});
  for (long s = 0; s < cfg.samples; ++s)
    for (int t = 0; t <= cfg.T; ++t) ASSERT_LT(std::abs(r.F(s, t) - r.F(s, 0)), 1e-8 * r.F(s, 0));
}

TEST(RandomCircuits, MeanAmplitudeNonDecreasing) {
  const CircuitConfig cfg{40, 30, 0.3, 200, 4};
  const auto r = brickwork_run(cfg, {1.0});
  // bootstrap over samples: Fbar(t) monotone in at least 95% of resamples
  Rng rng(8);
  std::uniform_int_distribution<long> pick(0, cfg.samples - 1);
  int mono = 0;
  const int B = 200;
  for (int b = 0; b < B; ++b) {
    std::vector<double> Fb(cfg.T + 1, 0.0);
    for (long k = 0; k < cfg.samples; ++k) {
      const long s = pick(rng);
      for (int t = 0; t <= cfg.T; ++t) Fb[t] += r.F(s, t);
    }
    bool ok = true;
    for (int t = 1; t <= cfg.T; ++t) ok = ok && Fb[t] >= Fb[t - 1];
    mono += ok;
  }
  EXPECT_GE(mono, 0.95 * B);
}

TEST(RandomCircuits, RunIsReproducibleAndThreadIndependent) {
  const CircuitConfig cfg{20, 15, 0.4, 40, 6};
  const auto a = brickwork_run(cfg, {0.5, 2.0});
  const auto b = brickwork_run(cfg, {0.5, 2.0});
  EXPECT_EQ(a.fbar, b.fbar);
  EXPECT_EQ(a.F, b.F);
  EXPECT_EQ(a.otoc[1], b.otoc[1]);
}

TEST(RandomCircuits, OtocFieldBounds) {
  const CircuitConfig cfg{20, 15, 0.4, 40, 6};
  const auto r = brickwork_run(cfg, {1.0});
  EXPECT_LE(r.otoc[0].maxCoeff(), 1.0);
  EXPECT_GT(r.otoc[0].minCoeff(), 0.0);
  const auto front = wavefront(r.otoc[0], 0.5);
  for (int t = 0; t <= cfg.T; ++t) EXPECT_LE(front[t], t);
}

TEST(RandomCircuits, BinomialVelocity) {
  EXPECT_EQ(binomial_velocity(0.0), 0.0);
  EXPECT_EQ(binomial_velocity(1.0), 1.0);
  // solves c = ln 2 - h((1+v)/2)
  for (double c : {0.01, 0.1, 0.4}) {
    const double v = binomial_velocity(c), p = 0.5 * (1 + v), q = 1 - p;
    EXPECT_NEAR(c + (-p * std::log(p) - q * std::log(q)) - std::log(2.0), 0.0, 1e-10);
    EXPECT_LE(v, std::sqrt(2.0 * c) + 1e-12);
  }
  EXPECT_NEAR(annealed_growth_rate(0.5), std::log(std::sinh(1.0)), 1e-15);
  EXPECT_THROW(binomial_velocity(-1.0), ParameterError);
}

TEST(RandomCircuits, BandedCovarianceMatchesDense) {
  const CircuitConfig cfg{7, 9, 0.3, 1, 13};
  const BrickworkCircuit circ{cfg.seed, 0, cfg.R};
  const int M = 2 * cfg.L + 1;
  Mat sigma = 0.5 * Mat::Identity(2 * M, 2 * M);
  for (int t = 0; t < cfg.T; ++t) {
    const Mat S = dense_step(circ, cfg.L, t);
    sigma = S * sigma * S.transpose();
    const Mat banded = brickwork_covariance(cfg, 0, t + 1);
    ASSERT_LT((banded - sigma).cwiseAbs().maxCoeff(), 1e-10 * sigma.cwiseAbs().maxCoeff()) << "t = " << t + 1;
  }
}

TEST(RandomCircuits, EntanglementMatchesDenseAndIsSymmetric) {
  CircuitConfig cfg{12, 10, 0.25, 3, 17};
  EntanglementOptions opt;
  opt.cuts = {0, 3};
  opt.eval_every = 2;
  const auto e = entanglement_run(cfg, opt);
  const int M = 2 * cfg.L + 1;
  for (long s = 0; s < cfg.samples; ++s) {
    const BrickworkCircuit circ{cfg.seed, s, cfg.R};
    Mat sigma = 0.5 * Mat::Identity(2 * M, 2 * M);
    int t = 0;
    for (std::size_t k = 0; k < e.times.size(); ++k) {
      for (; t < e.times[k]; ++t) {
        const Mat S = dense_step(circ, cfg.L, t);
        sigma = S * sigma * S.transpose();
      }
      for (std::size_t c = 0; c < opt.cuts.size(); ++c) {
        const int left = opt.cuts[c] + cfg.L;
        const double sl = block_entropy(sigma, 0, left);
        const double sr = block_entropy(sigma, left, M - left);
        EXPECT_NEAR(sl, sr, 1e-8);
        EXPECT_NEAR(e.S[c](s, k), sl, 1e-8) << "cut " << opt.cuts[c] << " t " << e.times[k];
      }
    }
  }
  EXPECT_EQ(e.aborted, 0);
}

TEST(RandomCircuits, EntanglementAbortsOnConditioning) {
  CircuitConfig cfg{10, 40, 3.0, 2, 1};
  EntanglementOptions opt;
  opt.condition_abort = 1e6;
  opt.eval_every = 1;
  const auto e = entanglement_run(cfg, opt);
  EXPECT_EQ(e.aborted, 2);
  EXPECT_LT(e.horizon[0], cfg.T);
  EXPECT_TRUE(std::isnan(e.S_center(0, e.times.size() - 1)));
}

TEST(RandomCircuits, ValidationErrors) {
  EXPECT_THROW(brickwork_field({0, 5, 0.1, 1, 1}, 0), ParameterError);
  EXPECT_THROW(brickwork_run({5, 5, -0.1, 1, 1}, {1.0}), ParameterError);
  EXPECT_THROW(brickwork_run({5, 5, 0.1, 1, 1}, {0.0}), ParameterError);
  EntanglementOptions opt;
  opt.cuts = {99};
  EXPECT_THROW(entanglement_run({5, 5, 0.1, 1, 1}, opt), ParameterError);
}
