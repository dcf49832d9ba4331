#pragma once

#include "cvscramble/gaussian_state.hpp"
#include "cvscramble/rng.hpp"
#include "cvscramble/symplectic.hpp"

namespace cvscramble {

// Mode order of the protocol register: 1 (input), 2, 2', 1', R.
enum TeleportMode { kIn = 0, kTwo = 1, kTwoP = 2, kOneP = 3, kOut = 4 };

enum class CorrectionRoute { Generic, MFamily };

struct TeleportConfig {
  double m = 5.0;
  double epr_r = 10.0;
  double noise = 0.0;  // std-dev added to each of Q and P
  GaussianState input = GaussianState::vacuum(1);
  bool scrambler = true;  // false: plain Bell measurement on (1, 1')
  CorrectionRoute route = CorrectionRoute::Generic;
  void validate() const;
};

struct TeleportOutcome {
  double Q = 0.0, P = 0.0;
  Vec correction;  // quadrature shift applied on R
  GaussianState output;
  double fidelity = 0.0;
};

// p1 -> m p1 + (m+1) p2, q1 -> m q1 - (m-1) q2, p2 -> (m-1) p1 + m p2, q2 -> -(m+1) q1 + m q2
GaussianUnitary scrambler_from_m(double m);

// Covariance and mean of the full register before measurement.
GaussianState teleport_register(const TeleportConfig& cfg);

// Samples (Q, P) from the conditional statistics and returns the corrected output.
TeleportOutcome run_protocol(const TeleportConfig& cfg, Rng& rng);
// Same, for a fixed outcome (Q, P).
TeleportOutcome run_protocol_with_outcome(const TeleportConfig& cfg, double Q, double P);

// Gaussian conditioning on y = M x + noise, noise ~ N(0, Nc); returns the state of `keep`.
GaussianState condition_gaussian(const GaussianState& state, const Mat& M, const Vec& y, const Mat& Nc,
                                 const std::vector<int>& keep);

// Delta z = S_21^{-1} Delta xi; throws for a singular block (m = +-1).
Vec induced_error(const GaussianUnitary& U, const Vec& delta_xi);
Vec induced_error(double m, const Vec& delta_xi);

// Square-lattice GKP: each component below sqrt(pi)/2.
bool gkp_correctable(const Vec& delta_z);
double gkp_threshold();

// Uhlmann fidelity of two single-mode Gaussian states.
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

}  // namespace cvscramble
