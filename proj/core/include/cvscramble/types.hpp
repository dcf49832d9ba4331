#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cvscramble {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Error taxonomy. The CLI maps ParameterError/DimensionError to exit code 1
// and NumericalAbort/TruncationError to exit code 2.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionError : ParameterError {
  using ParameterError::ParameterError;
};
struct NumericalAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationError : NumericalAbort {
  using NumericalAbort::NumericalAbort;
};

inline constexpr double kSymplecticTol = 1e-10;
inline constexpr double kLongCircuitTol = 1e-8;

// Phase-space shift xi, ordering (q1,p1,...,qN,pN).
class DisplacementVector {
 public:
  DisplacementVector() = default;
  explicit DisplacementVector(Vec xi);
  static DisplacementVector zero(int modes);
  // single-mode complex label alpha -> (Re alpha, Im alpha) placed on `mode`
  static DisplacementVector from_alpha(cplx alpha, int mode = 0, int modes = 1);

  const Vec& vec() const { return xi_; }
  int modes() const { return static_cast<int>(xi_.size() / 2); }
  double operator[](int i) const { return xi_[i]; }
  cplx alpha(int mode) const { return {xi_[2 * mode], xi_[2 * mode + 1]}; }

 private:
  Vec xi_;
};

}  // namespace cvscramble
