#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cvscramble/gaussian_state.hpp"
#include "cvscramble/rng.hpp"
#include "cvscramble/symplectic.hpp"

namespace cvscramble {

struct CorrelatorResult {
  cplx value{1.0, 0.0};
  double magnitude = 1.0;
  double stderr_ = 0.0;  // 0 for analytic results
  long samples = 0;

  static CorrelatorResult exact(cplx v) { return {v, std::abs(v), 0.0, 0}; }
};

// Gaussian distribution of displacements: mean xi0, covariance V.
class DisplacementEnsemble {
 public:
  DisplacementEnsemble(DisplacementVector xi0, Mat V);
  // D_n: density exp(-|xi|^2/n)/(pi n)^N, i.e. V = (n/2) I
  static DisplacementEnsemble isotropic(int modes, double n);
  // isotropic on a single mode of an N-mode register
  static DisplacementEnsemble isotropic_on_mode(int mode, int modes, double n);
  static DisplacementEnsemble point(DisplacementVector xi);

  const DisplacementVector& mean() const { return xi0_; }
  const Mat& covariance() const { return V_; }
  bool is_isotropic() const { return isotropic_; }
  double width() const { return n_; }
  int modes() const { return xi0_.modes(); }
  DisplacementVector sample(Rng& rng) const;

 private:
  DisplacementVector xi0_;
  Mat V_;
  Mat factor_;  // V = factor factor^T
  bool isotropic_ = false;
  double n_ = 0.0;
};

using EnsembleSampler = std::function<DisplacementVector(Rng&)>;
EnsembleSampler sampler_of(const DisplacementEnsemble& e);
// uniform choice among a fixed set of displacements
EnsembleSampler discrete_sampler(std::vector<DisplacementVector> points);

// Dynamics handle: Gaussian dynamics answer analytically, non-Gaussian ones
// delegate to a numerical engine.
class OtocDynamics {
 public:
  virtual ~OtocDynamics() = default;
  virtual bool is_gaussian() const = 0;
  // C2 = <D^dag(xi1;t) D^dag(xi2) D(xi1;t) D(xi2)>
  virtual cplx otoc(const DisplacementVector& xi1, const DisplacementVector& xi2) const = 0;
};

class GaussianDynamics : public OtocDynamics {
 public:
  explicit GaussianDynamics(GaussianUnitary U) : U_(std::move(U)), Sinv_(symplectic_inverse(U_.S.mat())) {}
  bool is_gaussian() const override { return true; }
  cplx otoc(const DisplacementVector& xi1, const DisplacementVector& xi2) const override;

 private:
  GaussianUnitary U_;
  Mat Sinv_;
};

// exp(-i H t / hbar), H = gamma q^3 / 6, hbar = 2 (q = a + a^dag), on a thermal state; closed form
class CubicGateDynamics : public OtocDynamics {
 public:
  CubicGateDynamics(double t, double gamma, double n_th) : t_(t), gamma_(gamma), n_th_(n_th) {}
  bool is_gaussian() const override { return gamma_ * t_ == 0.0; }
  cplx otoc(const DisplacementVector& xi1, const DisplacementVector& xi2) const override;

 private:
  double t_, gamma_, n_th_;
};

CorrelatorResult toc_gaussian(const GaussianUnitary& U, const DisplacementVector& xi1, const DisplacementVector& xi2,
                              const GaussianState& state);
CorrelatorResult otoc_gaussian(const GaussianUnitary& U, const DisplacementVector& xi1, const DisplacementVector& xi2);
CorrelatorResult otoc_cubic(cplx alpha, cplx beta, double t, double gamma, double n_th);

double avg_otoc_displacement(const DisplacementVector& xi, double n);
// E over D_n^w (source, evolved) and D_n^v (probe)
CorrelatorResult avg_otoc_quasi(const GaussianUnitary& U, int w, int v, double n);
// Monte-Carlo phase average of the same quantity
CorrelatorResult avg_otoc_quasi_mc(const GaussianUnitary& U, int w, int v, double n, long samples, std::uint64_t seed);

// Closed forms for single gates (w, v as in the gate)
double quasi_closed_identity(double n);
double quasi_closed_squeeze(double r, double n);
// amp: amplitude coupling between w and v (sqrt(1-eta) across, sqrt(eta) same mode for B(eta))
double quasi_closed_passive(double amp, double n);
double quasi_closed_two_mode_squeeze(double r, double n);

// Average OTOC of a zero-mean ensemble with covariance V against D_n / D_n^w.
double avg_otoc_ensemble(const Mat& V, double n);
double avg_otoc_ensemble_projected(const Mat& V, int w, double n);

CorrelatorResult nongaussianity_measure(const OtocDynamics& dyn, const EnsembleSampler& e1, const EnsembleSampler& e2,
                                        long samples, std::uint64_t seed);

struct LossResult {
  double damping;
  cplx alpha_out;
};
LossResult loss_channel_displacement(cplx alpha, double eta, double N_E);

double frame_potential_gaussian(const Mat& V, double n_th);
// (1/8 n_th)^N / sqrt(det V)
double frame_potential_high_temperature(const Mat& V, double n_th);
CorrelatorResult frame_potential_mc(const EnsembleSampler& e, const GaussianState& state, int k, long samples,
                                    std::uint64_t seed);

double twice_regulated_J(double n, double n_th, int N);
double H_bound(int k, const GaussianState& state);
// tr sqrt(rho) for a Gaussian state (product over Williamson modes)
double trace_sqrt_rho(const GaussianState& state);

double ensemble_volume(const DisplacementEnsemble& e, const GaussianState& thermal_state);
// full-dimensional infinite-temperature volume sqrt(det V)
double ensemble_volume_infinite_temperature(const Mat& V);
// volume projected onto one mode: sqrt(det V_w)
double projected_volume(const Mat& V, int w);
// evolved ensemble covariance under U: xi -> S^{-1} xi
Mat evolve_ensemble_covariance(const Mat& V, const GaussianUnitary& U);
double liouville_check(const DisplacementEnsemble& e, const GaussianUnitary& U);

// Large-n_th transform of |C1|^2 for the cubic gate, normalized to 1 at
// Re beta = 0; trapezoid over 6 standard deviations with `points` nodes.
cplx cubic_c2_from_c1_transform(cplx alpha, cplx beta, double t, double gamma, double n_th, int points = 2048);

}  // namespace cvscramble
