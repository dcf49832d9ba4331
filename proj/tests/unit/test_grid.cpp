#include <cmath>

#include <gtest/gtest.h>

#include "cvscramble/correlators.hpp"
#include "cvscramble/grid.hpp"
#include "cvscramble/symplectic.hpp"

using namespace cvscramble;

namespace {

Grid2D small_grid(double hbar = 2.0) {
  Grid2D g;
  g.n = 64;
  g.extent = 12.0;
  g.dt = 1e-3;
  g.mass = 1.0;
  g.hbar = hbar;
  return g;
}

// H = (p^2 + q^2)/2 with m = 1: the grid vacuum is its ground state and U(t)
// rotates phase space by t
double harmonic(double q1, double q2) { return 0.5 * (q1 * q1 + q2 * q2); }

}  // namespace

TEST(Grid, HenonHeilesScales) {
  HenonHeiles hh;
  EXPECT_DOUBLE_EQ(hh.r_C(), 40.0);
  EXPECT_NEAR(hh.V_C(), 266.6667, 1e-4);
  EXPECT_NEAR(hh.t_c(0.5), 1.2247, 1e-4);
  // saddle on the q2 axis
  EXPECT_NEAR(hh(0.0, 40.0), hh.V_C(), 1e-9);
  const double h = 1e-5;
  EXPECT_NEAR((hh(0.0, 40.0 + h) - hh(0.0, 40.0 - h)) / (2 * h), 0.0, 1e-6);
}

TEST(Grid, CoherentPacketMoments) {
  const auto g = small_grid();
  const cplx gam{0.8, -0.3};
  const auto w = coherent_packet(g, gam, 0.0);
  EXPECT_NEAR(w.norm(), 1.0, 1e-12);
  const Mat rho = w.density();
  double m = 0.0, m2 = 0.0, tot = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double x = g.coord(i);
      m += x * rho(i, j);
      m2 += x * x * rho(i, j);
      tot += rho(i, j);
    }
  m /= tot;
  m2 /= tot;
  EXPECT_NEAR(m, std::sqrt(2.0 * g.hbar) * gam.real(), 1e-8);
  EXPECT_NEAR(m2 - m * m, g.hbar / 2.0, 1e-8);
}

TEST(Grid, DisplacementGroupLaw) {
  const auto g = small_grid();
  const auto psi = coherent_packet(g, {0.2, 0.1}, {-0.3, 0.2});
  const Vec a = (Vec(4) << 0.3, -0.2, 0.1, 0.4).finished();
  const Vec b = (Vec(4) << -0.1, 0.5, 0.25, -0.3).finished();
  const auto lhs = apply_displacement(apply_displacement(psi, DisplacementVector(b)), DisplacementVector(a));
  const auto rhs = apply_displacement(psi, DisplacementVector(a + b));
  const cplx ph = std::polar(1.0, -a.dot(omega_times(b)));
  EXPECT_NEAR(std::abs(rhs.overlap(lhs) - ph), 0.0, 1e-9);
  const auto back = apply_displacement(apply_displacement(psi, DisplacementVector(a)), DisplacementVector(a), true);
  EXPECT_NEAR(std::abs(psi.overlap(back) - 1.0), 0.0, 1e-9);
}

TEST(Grid, UnitarityAndTimeReversal) {
  Grid2D g = small_grid();
  g.extent = 16.0;
  g.mass = 0.5;
  g.dt = 2e-3;
  SplitStepSolver s(g, [](double a, double b) { return 0.5 * (a * a + b * b) + 0.05 * (a * a * b - b * b * b / 3.0); });
  auto psi = coherent_packet(g, {1.0, 0.5}, {0.0, 1.0});
  const auto psi0 = psi;
  s.evolve(psi, 1000);
  EXPECT_LT(std::abs(psi.norm() - 1.0), 1e-6);
  s.evolve(psi, 1000, true);
  EXPECT_GT(std::abs(psi0.overlap(psi)), 1.0 - 1e-6);
}

TEST(Grid, HarmonicOtocIsRotation) {
  const auto g = small_grid();
  SplitStepSolver s(g, harmonic);
  const auto x1 = DisplacementVector((Vec(4) << 0.4, 0.1, -0.2, 0.3).finished());
  const auto x2 = DisplacementVector((Vec(4) << -0.3, 0.2, 0.5, 0.1).finished());
  const std::vector<double> times{0.0, 0.25, 0.5};
  const auto c = otoc_grid(s, {0.1, 0.0}, {0.0, -0.2}, x1, x2, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto R = compose(embed(rotation(times[k]), {0}, 2), embed(rotation(times[k]), {1}, 2));
    EXPECT_LT(std::abs(c.values[k] - otoc_gaussian(R, x1, x2).value), 1e-6) << "t = " << times[k];
  }
  EXPECT_LT(c.report.max_energy_drift, 1e-4);
}

TEST(Grid, OneDimensionalHarmonicOtoc) {
  Grid1D g;
  g.n = 256;
  g.extent = 12.0;
  g.dt = 1e-3;
  g.mass = 1.0;
  g.hbar = 2.0;
  SplitStep1D s(g, [](double q) { return 0.5 * q * q; });
  const cplx al{0.3, 0.4}, be{-0.5, 0.2};
  const std::vector<double> times{0.0, 0.3};
  const auto c = otoc_grid_1d(s, {0.2, 0.1}, al, be, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto ref = otoc_gaussian(rotation(times[k]), DisplacementVector::from_alpha(al), DisplacementVector::from_alpha(be));
    EXPECT_LT(std::abs(c[k] - ref.value), 1e-6);
  }
}

TEST(Grid, CubicPotentialMatchesClosedForm) {
  Grid1D g;
  g.n = 1024;
  g.extent = 20.0;
  g.dt = 1e-3;
  g.mass = 1e4;
  g.hbar = 2.0;
  SplitStep1D s(g, [](double q) { return q * q * q / 6.0; });
  const std::vector<double> times{0.05, 0.1, 0.2};
  const auto c = otoc_grid_1d(s, 0.0, 1.0, 1.0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double ref = otoc_cubic(1.0, 1.0, times[k], 1.0, 0.0).magnitude;
    EXPECT_NEAR(std::abs(c[k]), ref, 0.05 * ref);
  }
}

TEST(Grid, LeakageAborts) {
  Grid2D g = small_grid();
  g.extent = 6.0;
  SplitStepSolver s(g, harmonic);
  EXPECT_THROW(otoc_grid(s, {1.5, 0.0}, 0.0, DisplacementVector::zero(2), DisplacementVector::zero(2), {0.0}),
               NumericalAbort);
}

TEST(Grid, Validation) {
  Grid2D g = small_grid();
  g.n = 7;
  EXPECT_THROW(g.validate(), ParameterError);
  g = small_grid();
  g.dt = 0.0;
  EXPECT_THROW(g.validate(), ParameterError);
}
