#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/SparseCore>

#include "cvscramble/rng.hpp"
#include "cvscramble/symplectic.hpp"
#include "cvscramble/types.hpp"

namespace cvscramble {

struct TruncationConfig {
  int d_cut = 64;
  double tail_tol = 1e-6;
  void validate() const;
  // number of top levels counted as "tail"
  int tail_band() const;
};

struct TruncationReport {
  int d_cut = 0;
  double max_tail = 0.0;  // worst tail population seen
  bool ok = true;
  void absorb(double tail, double tol) {
    max_tail = std::max(max_tail, tail);
    ok = ok && tail <= tol;
  }
};

// Amplitudes over the number basis of one or two modes (index n1 * d + n2).
class FockState {
 public:
  FockState() = default;
  FockState(CVec amp, int d, int modes);
  static FockState basis(int n, int d);
  static FockState basis2(int n1, int n2, int d);
  static FockState tensor(const FockState& a, const FockState& b);

  const CVec& amp() const { return amp_; }
  CVec& amp() { return amp_; }
  int d() const { return d_; }
  int modes() const { return modes_; }
  double norm() const { return amp_.norm(); }
  // population in the top tail_band levels of any mode
  double tail_population(int band) const;
  double mean_photons(int mode = 0) const;

 private:
  CVec amp_;
  int d_ = 0;
  int modes_ = 1;
};

using SpMat = Eigen::SparseMatrix<cplx>;

// Matrix in the truncated number basis. Stored dense, sparse or diagonal.
class FockOperator {
 public:
  FockOperator() = default;
  static FockOperator dense(CMat m, int d, int modes);
  static FockOperator sparse(SpMat m, int d, int modes);
  static FockOperator diagonal(CVec diag, int d, int modes);

  int d() const { return d_; }
  int modes() const { return modes_; }
  int dim() const;
  CMat to_dense() const;

  CVec apply(const CVec& v) const;
  CVec apply_adjoint(const CVec& v) const;
  FockState operator*(const FockState& s) const;
  FockOperator adjoint() const;
  // largest |norm - 1| over the first `cols` columns
  double column_defect(int cols) const;

 private:
  std::variant<CMat, SpMat, CVec> m_;
  int d_ = 0;
  int modes_ = 1;
};

FockOperator product(const FockOperator& a, const FockOperator& b);  // a * b, dense
// Single-mode operator acting on `mode` of a two-mode state.
FockState apply_on_mode(const FockOperator& op, int mode, const FockState& s, bool adjoint = false);

// ---- gates ---------------------------------------------------------------

// <m|D(alpha)|n>; throws TruncationError if columns n < d/2 leak more than tail_tol.
FockOperator displacement_matrix(cplx alpha, const TruncationConfig& cfg);
FockOperator snap_gate(const std::vector<double>& phases);
std::vector<double> kerr_phases(double t, int d);
std::vector<double> random_snap_energies(int d, Rng& rng);
FockOperator random_snap(const std::vector<double>& w, double t);
// exp(-i t (p^2 + q^2)) = exp(-i t (2n + 1))
FockOperator harmonic_evolution(double t, int d);
// exp(-i theta n): Heisenberg rotation R(theta)
FockOperator phase_rotation(double theta, int d);
// exp((r/2)(a^2 - a^dag^2)): Heisenberg diag(e^{-r}, e^{r})
FockOperator squeeze_fock(double r, const TruncationConfig& cfg);
// exp(theta (a1^dag a2 - a1 a2^dag)), transmissivity cos^2 theta; exact per number block
FockOperator beamsplitter_fock(double theta, const TruncationConfig& cfg);
// exp(-i H t / hbar), H = gamma q^3 / 6 in hbar = 2 units (q = a + a^dag)
FockOperator cubic_gate_fock(double gamma_t, const TruncationConfig& cfg);
// f(qt), qt = a + a^dag, evaluated in a padded basis and cut back to d
FockOperator function_of_quadrature(const std::function<cplx(double)>& f, const TruncationConfig& cfg);
// Single-mode Gaussian unitary with the given Heisenberg action (up to phase).
FockOperator gaussian_unitary_fock(const GaussianUnitary& U, const TruncationConfig& cfg);

FockState coherent_state(cplx gamma, const TruncationConfig& cfg);
std::vector<double> thermal_weights(double n_th, int d);

// ---- correlators ---------------------------------------------------------

// A gate sequence applied left to right (first element acts first).
struct FockCircuit {
  std::vector<FockOperator> gates;
  std::vector<int> on_mode;  // -1: acts on the full register
  void add(FockOperator g, int mode = -1);
  FockState apply(const FockState& s) const;
  FockState apply_adjoint(const FockState& s) const;
};

enum class CorrelatorKind { TOC, OTOC };

struct FockCorrelator {
  cplx value;
  TruncationReport report;
};

// Displacement D(xi) acting on a 1- or 2-mode state (xi has 2*modes entries).
// No column check: the caller is expected to test the tail of the result.
FockState apply_displacement(const DisplacementVector& xi, const FockState& s, const TruncationConfig& cfg,
                             bool adjoint = false);

// TOC: <psi| U^dag D(xi1) U D(xi2) |psi>
// OTOC: <psi| D^dag(xi1;t) D^dag(xi2) D(xi1;t) D(xi2) |psi>, D(xi;t) = U^dag D(xi) U
FockCorrelator correlator_fock(CorrelatorKind kind, const FockCircuit& U, const DisplacementVector& xi1,
                               const DisplacementVector& xi2, const FockState& psi, const TruncationConfig& cfg);
// Weighted mixture of pure states (e.g. a thermal regulator).
FockCorrelator correlator_fock_mixed(CorrelatorKind kind, const FockCircuit& U, const DisplacementVector& xi1,
                                     const DisplacementVector& xi2,
                                     const std::vector<std::pair<double, FockState>>& mixture,
                                     const TruncationConfig& cfg);

// ---- experiments ---------------------------------------------------------

struct SnapCircuitSample {
  std::vector<double> w1, w2, w3, w4;  // SNAP phases before/after the beamsplitter
};

// (S3 x S4) B(theta) (S1 x S2) with iid uniform SNAP phases.
FockCircuit two_mode_snap_circuit(double theta, const SnapCircuitSample& phases, const TruncationConfig& cfg);
SnapCircuitSample random_snap_sample(int d, Rng& rng);

struct SnapSweepPoint {
  double theta = 0.0;
  double mean11 = 0.0, std11 = 0.0;
  double mean12 = 0.0, std12 = 0.0;
};
struct SnapSweep {
  std::vector<SnapSweepPoint> points;
  TruncationReport report;
};
// |C2^{1,v}| averaged over random SNAP phases: xi1 = alpha on mode 1, xi2 = beta on mode v.
SnapSweep snap_circuit_otoc_sweep(const std::vector<double>& thetas, long samples, cplx alpha, cplx beta,
                                  cplx gamma1, cplx gamma2, const TruncationConfig& cfg, std::uint64_t seed);

struct Heatmap {
  std::vector<double> re, im;  // beta grid axes
  Mat values;                  // |C1(alpha, beta)|^2, rows = im, cols = re
  TruncationReport report;
};
// Grid points outside the disk are left at 0 and not evaluated.
struct HeatmapDisk {
  cplx center{0.0, 0.0};
  double radius = std::numeric_limits<double>::infinity();
};
Heatmap toc_heatmap(const FockCircuit& U, cplx alpha, const std::vector<double>& re, const std::vector<double>& im,
                    const FockState& psi, const TruncationConfig& cfg, const HeatmapDisk& disk = {});
// (sum h)^2 / sum h^2
double participation_ratio(const Mat& h);

}  // namespace cvscramble
