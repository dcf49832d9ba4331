#pragma once

#include <vector>

#include "cvscramble/symplectic.hpp"

namespace cvscramble {

inline constexpr double kConditionAbort = 1e12;

class GaussianState {
 public:
  GaussianState() = default;
  // Validates symmetry and sigma + (i/2) Omega >= 0 within 1e-9.
  GaussianState(Vec mu, Mat sigma);
  static GaussianState trusted(Vec mu, Mat sigma);

  static GaussianState vacuum(int modes);
  static GaussianState thermal(int modes, double n_th);
  // |gamma> = D(gamma)|0>: mean sqrt(2) (Re gamma, Im gamma) per mode
  static GaussianState coherent(const std::vector<cplx>& gammas);
  static GaussianState squeezed_vacuum(double r);
  static GaussianState two_mode_squeezed_vacuum(double r);

  const Vec& mu() const { return mu_; }
  const Mat& sigma() const { return sigma_; }
  int modes() const { return static_cast<int>(mu_.size() / 2); }

  GaussianState reduced(const std::vector<int>& keep) const;
  // Tensor product (this first)
  GaussianState tensor(const GaussianState& other) const;

 private:
  Vec mu_;
  Mat sigma_;
};

struct SymplecticSpectrum {
  Vec nu;
};

GaussianState evolve(const GaussianState& state, const GaussianUnitary& U);

// tr[rho D(xi)] = exp(i sqrt(2) mu^T Omega xi - xi^T Omega^T sigma Omega xi);
// thermal: exp(-(n_th + 1/2) |xi|^2)
cplx char_fn(const GaussianState& state, const DisplacementVector& xi);

SymplecticSpectrum symplectic_eigenvalues(const Mat& sigma);
double entropy_from_spectrum(const SymplecticSpectrum& s);
// von Neumann entropy (nats) of the listed modes
double entanglement_entropy(const GaussianState& state, const std::vector<int>& left_modes);
// Same, directly on a covariance matrix (no mean needed).
double entanglement_entropy(const Mat& sigma, const std::vector<int>& left_modes);
// Entropy of a contiguous block of modes [first, first+count).
double block_entropy(const Mat& sigma, int first, int count);

// ratio of extreme eigenvalues of sigma
double condition_report(const Mat& sigma);

double nats_to_bits(double s);

}  // namespace cvscramble
