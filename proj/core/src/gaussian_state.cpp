#include "cvscramble/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace cvscramble {

namespace {

Mat restrict_modes(const Mat& sigma, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  Mat out(2 * k, 2 * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) out.block(2 * a, 2 * b, 2, 2) = sigma.block(2 * keep[a], 2 * keep[b], 2, 2);
  return out;
}

void check_modes(const std::vector<int>& modes, int total) {
  std::vector<int> s = modes;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ParameterError("mode list has duplicates");
  for (int m : s)
    if (m < 0 || m >= total) throw ParameterError("mode index out of range");
}

}  // namespace

GaussianState::GaussianState(Vec mu, Mat sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() != mu_.size() || mu_.size() % 2 != 0)
    throw DimensionError("gaussian state: inconsistent dimensions");
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, sigma_.cwiseAbs().maxCoeff()))
    throw ParameterError("gaussian state: covariance not symmetric");
  // sigma + (i/2) Omega is Hermitian; its smallest eigenvalue must be >= 0
  CMat H = sigma_.cast<cplx>() + cplx(0, 0.5) * omega(modes()).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw ParameterError("gaussian state: violates the uncertainty relation");
}

GaussianState GaussianState::trusted(Vec mu, Mat sigma) {
  GaussianState s;
  s.mu_ = std::move(mu);
  s.sigma_ = std::move(sigma);
  return s;
}

GaussianState GaussianState::vacuum(int modes) { return thermal(modes, 0.0); }

GaussianState GaussianState::thermal(int modes, double n_th) {
  if (modes < 1) throw ParameterError("state needs at least one mode");
  if (n_th < 0) throw ParameterError("thermal occupation must be >= 0");
  return trusted(Vec::Zero(2 * modes), (n_th + 0.5) * Mat::Identity(2 * modes, 2 * modes));
}

GaussianState GaussianState::coherent(const std::vector<cplx>& gammas) {
  GaussianState s = vacuum(static_cast<int>(gammas.size()));
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    s.mu_[2 * k] = std::numbers::sqrt2 * gammas[k].real();
    s.mu_[2 * k + 1] = std::numbers::sqrt2 * gammas[k].imag();
  }
  return s;
}

GaussianState GaussianState::squeezed_vacuum(double r) { return evolve(vacuum(1), squeeze(r)); }

GaussianState GaussianState::two_mode_squeezed_vacuum(double r) { return evolve(vacuum(2), two_mode_squeeze(r)); }

GaussianState GaussianState::reduced(const std::vector<int>& keep) const {
  check_modes(keep, modes());
  Vec mu(2 * keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) mu.segment(2 * a, 2) = mu_.segment(2 * keep[a], 2);
  return trusted(std::move(mu), restrict_modes(sigma_, keep));
}

GaussianState GaussianState::tensor(const GaussianState& o) const {
  const Eigen::Index n = mu_.size(), m = o.mu_.size();
  Vec mu(n + m);
  mu << mu_, o.mu_;
  Mat sg = Mat::Zero(n + m, n + m);
  sg.topLeftCorner(n, n) = sigma_;
  sg.bottomRightCorner(m, m) = o.sigma_;
  return trusted(std::move(mu), std::move(sg));
}

GaussianState evolve(const GaussianState& state, const GaussianUnitary& U) {
  if (state.modes() != U.modes()) throw DimensionError("evolve: mode count mismatch");
  const Mat& S = U.S.mat();
  Mat sg = S * state.sigma() * S.transpose();
  sg = 0.5 * (sg + sg.transpose());
  return GaussianState::trusted(S * state.mu() + U.d.vec(), std::move(sg));
}

cplx char_fn(const GaussianState& state, const DisplacementVector& xi) {
  if (xi.vec().size() != state.mu().size()) throw DimensionError("char_fn: mode count mismatch");
  Vec w = omega_times(xi.vec());
  double quad = w.dot(state.sigma() * w);
  double lin = std::numbers::sqrt2 * state.mu().dot(w);
  return std::exp(-quad) * std::polar(1.0, lin);
}

SymplecticSpectrum symplectic_eigenvalues(const Mat& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0) throw DimensionError("covariance must be square, even size");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ParameterError("symplectic_eigenvalues: covariance not symmetric");
  const int N = static_cast<int>(sigma.rows() / 2);
  Mat sym = 0.5 * (sigma + sigma.transpose());
  Eigen::LLT<Mat> llt(sym);
  if (llt.info() != Eigen::Success) throw ParameterError("symplectic_eigenvalues: covariance not positive definite");
  Mat Lm = llt.matrixL();
  // M = L^T Omega L is antisymmetric with eigenvalues +-i nu; -M^2 has nu^2 twice.
  Mat OL(Lm.rows(), Lm.cols());
  for (Eigen::Index k = 0; k + 1 < Lm.rows(); k += 2) {
    OL.row(k) = Lm.row(k + 1);
    OL.row(k + 1) = -Lm.row(k);
  }
  Mat M = Lm.transpose() * OL;
  Mat M2 = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Mat> es(M2, Eigen::EigenvaluesOnly);
  Vec ev = es.eigenvalues();  // ascending
  SymplecticSpectrum out;
  out.nu.resize(N);
  for (int k = 0; k < N; ++k) {
    double nu = std::sqrt(std::max(0.0, 0.5 * (ev[2 * k] + ev[2 * k + 1])));
    if (nu < 0.5 - 1e-9) throw ParameterError("symplectic_eigenvalues: non-physical covariance (nu < 1/2)");
    out.nu[k] = std::max(nu, 0.5);
  }
  return out;
}

double entropy_from_spectrum(const SymplecticSpectrum& s) {
  double S = 0.0;
  for (Eigen::Index k = 0; k < s.nu.size(); ++k) {
    const double a = s.nu[k] + 0.5, b = s.nu[k] - 0.5;
    S += a * std::log(a);
    if (b > 0) S -= b * std::log(b);
  }
  return S;
}

double entanglement_entropy(const Mat& sigma, const std::vector<int>& left_modes) {
  const int N = static_cast<int>(sigma.rows() / 2);
  if (left_modes.empty()) throw ParameterError("entanglement_entropy: empty partition");
  check_modes(left_modes, N);
  return entropy_from_spectrum(symplectic_eigenvalues(restrict_modes(sigma, left_modes)));
}

double entanglement_entropy(const GaussianState& state, const std::vector<int>& left_modes) {
  return entanglement_entropy(state.sigma(), left_modes);
}

double block_entropy(const Mat& sigma, int first, int count) {
  const int N = static_cast<int>(sigma.rows() / 2);
  if (count < 1 || first < 0 || first + count > N) throw ParameterError("block_entropy: invalid block");
  Mat sub = sigma.block(2 * first, 2 * first, 2 * count, 2 * count);
  return entropy_from_spectrum(symplectic_eigenvalues(sub));
}

double condition_report(const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sigma + sigma.transpose()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo <= 0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double nats_to_bits(double s) { return s / std::numbers::ln2; }

}  // namespace cvscramble
