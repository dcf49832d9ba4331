#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "cvscramble/types.hpp"

namespace cvscramble {

// Square grid of n x n points on [-extent, extent)^2. Positions are in units
// where [q, p] = i hbar and a = (q + i p)/sqrt(2 hbar); hbar = 1 matches the
// core convention, hbar = 2 the a + a^dag quadrature scale.
struct Grid2D {
  int n = 256;
  double extent = 60.0;
  double dt = 1e-3;
  double mass = 0.5;
  double hbar = 2.0;
  void validate() const;
  double dx() const { return 2.0 * extent / n; }
  double coord(int i) const { return -extent + i * dx(); }
  double k(int i) const;  // angular wavenumber of FFT bin i
};

struct HenonHeiles {
  double U = 1.0;
  double lambda = 0.025;
  double r_C() const { return U / lambda; }
  double V_C() const { return U * U * U / (6.0 * lambda * lambda); }
  double t_c(double mass) const { return r_C() / std::sqrt(2.0 * V_C() / mass); }
  double operator()(double q1, double q2) const;
};

double henon_heiles_potential(double q1, double q2, double U, double lambda);

using Potential2D = std::function<double(double, double)>;

class Wavefunction2D {
 public:
  Wavefunction2D() = default;
  explicit Wavefunction2D(const Grid2D& g);
  const Grid2D& grid() const { return g_; }
  std::vector<cplx>& data() { return psi_; }
  const std::vector<cplx>& data() const { return psi_; }
  cplx& at(int i1, int i2) { return psi_[static_cast<std::size_t>(i1) * g_.n + i2]; }
  cplx at(int i1, int i2) const { return psi_[static_cast<std::size_t>(i1) * g_.n + i2]; }
  double norm() const;  // sqrt of integral |psi|^2
  cplx overlap(const Wavefunction2D& other) const;  // <this|other>
  // probability in the outer `frac` of the box along either axis
  double edge_population(double frac = 0.05) const;
  Mat density() const;

 private:
  Grid2D g_;
  std::vector<cplx> psi_;  // index i1 * n + i2, i1 along q1
};

// Product of coherent states |gamma1>|gamma2>.
Wavefunction2D coherent_packet(const Grid2D& g, cplx gamma1, cplx gamma2);

// D(xi) psi with xi = (xi_q1, xi_p1, xi_q2, xi_p2) and alpha_k = xi_qk + i xi_pk;
// shifts by s = sqrt(2 hbar) (Re alpha, Im alpha) per mode, sub-grid via a spectral ramp.
Wavefunction2D apply_displacement(const Wavefunction2D& psi, const DisplacementVector& xi, bool adjoint = false);

struct EvolutionReport {
  double energy0 = 0.0;
  double max_energy_drift = 0.0;  // relative
  double max_norm_drift = 0.0;
  double max_edge_population = 0.0;
};

// Strang split-step propagator exp(-i V dt/2 hbar) exp(-i T dt/hbar) exp(-i V dt/2 hbar).
class SplitStepSolver {
 public:
  SplitStepSolver(const Grid2D& g, const Potential2D& V);
  ~SplitStepSolver();
  SplitStepSolver(const SplitStepSolver&) = delete;
  SplitStepSolver& operator=(const SplitStepSolver&) = delete;

  const Grid2D& grid() const { return g_; }
  void evolve(Wavefunction2D& psi, long steps, bool backward = false) const;
  double energy(const Wavefunction2D& psi) const;
  double max_potential() const;
  void fft(std::vector<cplx>& a, bool inverse) const;

 private:
  Grid2D g_;
  std::vector<double> V_;
  std::vector<cplx> kin_, kin_b_, vhalf_, vhalf_b_, vfull_, vfull_b_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

struct GridOtocCurve {
  std::vector<double> times;
  std::vector<cplx> values;
  EvolutionReport report;
};

struct GridOtocOptions {
  double energy_tol = 1e-4;
  double leakage_tol = 1e-4;
};

// C2(t) = <psi| D^dag(xi1;t) D^dag(xi2) D(xi1;t) D(xi2) |psi>, evaluated as
// <b|a> with a = U^dag D1 U D2 psi and b = D2 U^dag D1 U psi. Times must be
// multiples of dt (rounded).
GridOtocCurve otoc_grid(const SplitStepSolver& solver, cplx gamma1, cplx gamma2, const DisplacementVector& xi1,
                        const DisplacementVector& xi2, const std::vector<double>& times,
                        const GridOtocOptions& opt = {});

// ---- one dimension ---------------------------------------------------------

struct Grid1D {
  int n = 1024;
  double extent = 20.0;
  double dt = 1e-3;
  double mass = 1.0;
  double hbar = 1.0;
  void validate() const;
  double dx() const { return 2.0 * extent / n; }
  double coord(int i) const { return -extent + i * dx(); }
  double k(int i) const;
};

class SplitStep1D {
 public:
  SplitStep1D(const Grid1D& g, const std::function<double(double)>& V);
  ~SplitStep1D();
  SplitStep1D(const SplitStep1D&) = delete;
  SplitStep1D& operator=(const SplitStep1D&) = delete;
  const Grid1D& grid() const { return g_; }
  void evolve(std::vector<cplx>& psi, long steps, bool backward = false) const;
  std::vector<cplx> coherent(cplx gamma) const;
  std::vector<cplx> displace(const std::vector<cplx>& psi, cplx alpha) const;
  cplx overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) const;
  double width(const std::vector<cplx>& psi) const;  // position std-dev
  double mean(const std::vector<cplx>& psi) const;
  double edge_population(const std::vector<cplx>& psi, double frac = 0.05) const;

 private:
  void fft(std::vector<cplx>& a, bool inverse) const;
  Grid1D g_;
  std::vector<cplx> kin_, kin_b_, vhalf_, vhalf_b_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

// OTOC of single-mode displacements alpha (evolved) and beta on the 1D grid.
std::vector<cplx> otoc_grid_1d(const SplitStep1D& solver, cplx gamma, cplx alpha, cplx beta,
                               const std::vector<double>& times);

}  // namespace cvscramble
