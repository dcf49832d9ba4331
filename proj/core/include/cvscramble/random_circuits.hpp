#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cvscramble/rng.hpp"
#include "cvscramble/types.hpp"

namespace cvscramble {

struct SqueezeDist {
  double lo = 0.0;
  double hi = 0.5;
  double sample(SplitMix64& g) const { return lo + (hi - lo) * g.uniform(); }
};

struct CircuitConfig {
  int L = 200;  // modes -L..L
  int T = 150;
  double R = 0.1;  // squeezing r ~ uniform[0, R]
  long samples = 100;
  std::uint64_t seed = 1;
};
void validate(const CircuitConfig& c);

// ---- single mode -------------------------------------------------------

struct WalkStats {
  std::vector<double> mean;  // r_tot(t), t = 0..T
  std::vector<double> var;
  std::vector<double> final_r;  // per sample
};

// Each step applies a Haar rotation, a squeezer r ~ dist, and a Haar rotation.
WalkStats single_mode_walk(int T, SqueezeDist dist, long samples, std::uint64_t seed);

struct Histogram {
  double lo = 0.0, hi = 0.0;
  std::vector<long> counts;
};
Histogram histogram(const std::vector<double>& xs, int bins);

// ---- brickwork ---------------------------------------------------------

// Haar U(2) as e^{i phi} [[a, b], [-b*, a*]] with (a, b) uniform on S^3.
std::array<cplx, 4> haar_u2(SplitMix64& g);

// Random elements of the circuit, addressed by position. Time step t applies
// the brick layer on bonds (x, x+1) with x = t mod 2, then squeezes every mode.
struct BrickworkCircuit {
  std::uint64_t seed;
  long sample;
  double R;
  std::array<cplx, 4> bond_unitary(int t, int x) const;  // row-major 2x2
  double squeeze(int t, int x) const;
  static bool bond_active(int t, int x) { return ((x - t) % 2 + 2) % 2 == 0; }
};

struct BrickworkResult {
  int L = 0, T = 0;
  long samples = 0;
  double R = 0.0;
  std::vector<double> n_values;
  Mat fbar;               // (T+1) x (2L+1), sample mean of f(x,t)
  std::vector<Mat> otoc;  // per n: sample mean of exp(-n f(x,t))
  Mat F;                  // samples x (T+1), total amplitude per sample
  std::vector<double> Fbar;      // mean F(t)
  std::vector<double> lnF_mean;  // mean ln F(t)
  std::vector<Mat> fields;       // per-sample f, only when requested
  double max_outside_lightcone = 0.0;
};

// Evolves xi(t) = S^{-1}(t) xi(0) with xi(0) = (1, 0) on mode 0.
BrickworkResult brickwork_run(const CircuitConfig& cfg, const std::vector<double>& n_values, bool keep_fields = false);
// single sample, returns f (T+1) x (2L+1)
Mat brickwork_field(const CircuitConfig& cfg, long sample);

Mat avg_otoc_field(const std::vector<Mat>& fields, double n);

// farthest |x| with C2(x,t) < threshold, -1 if none
std::vector<int> wavefront(const Mat& c2, double threshold = 0.5);

struct HydroFit {
  double c_R = 0.0;
  double D = 0.0;
  double v_B = 0.0;
  double v_hydro = 0.0;         // sqrt(4 D c_R) with fitted D
  double v_hydro_half = 0.0;    // sqrt(2 c_R), D = 1/2
  double v_binomial = 0.0;
  double c_R_residual = 0.0;
  double D_residual = 0.0;
  double v_B_residual = 0.0;
  std::vector<double> x2;       // amplitude-weighted <x^2>(t)
  std::vector<int> front;
};

enum class GrowthEstimator { LogOfMean, MeanOfLog };

HydroFit fit_hydro(const BrickworkResult& r, std::size_t n_index = 0, double threshold = 0.5,
                   GrowthEstimator est = GrowthEstimator::LogOfMean);

double binomial_velocity(double c_R);
// ln E[cosh 2r] for r ~ uniform[0, R]; mean-field growth per step
double annealed_growth_rate(double R);

// ---- entanglement ------------------------------------------------------

struct EntanglementOptions {
  std::vector<int> cuts{0};  // cut x: left = modes < x
  int eval_every = 10;
  double condition_abort = 1e12;
};

struct EntanglementResult {
  std::vector<int> times;
  std::vector<int> cuts;
  Mat S_center;  // samples x times, entropy at cuts[0]; NaN after abort
  std::vector<Mat> S;  // per cut: samples x times
  std::vector<double> h;  // mean S(cuts[0], t) over live samples
  std::vector<double> w;  // std-dev
  std::vector<long> live;  // samples contributing at each time
  std::vector<int> horizon;  // per sample: last time before abort (T if none)
  long aborted = 0;
  int window_lo = 0, window_hi = 0;
};

// Vacuum evolved through the brickwork circuits of `cfg`. Only modes and gates
// inside the causal region of the requested cuts are simulated; the entropy
// across those cuts is unchanged by everything outside it.
EntanglementResult entanglement_run(const CircuitConfig& cfg, const EntanglementOptions& opt = {});

// Full covariance of all 2L+1 modes after t steps (small systems, tests).
Mat brickwork_covariance(const CircuitConfig& cfg, long sample, int t);

}  // namespace cvscramble
