#include "cvscramble/teleportation.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cvscramble {

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Block of S mapping input mode `from` to output mode `to`.
Mat block(const Mat& S, int to, int from) { return S.block(2 * to, 2 * from, 2, 2); }

struct Register {
  LVec mu;
  LMat sigma;
  Mat S21;  // gain block used by the generic correction
};

Register build_register(const TeleportConfig& cfg) {
  const int N = 5;
  LMat sigma = LMat::Zero(2 * N, 2 * N);
  LVec mu = LVec::Zero(2 * N);
  sigma.block(0, 0, 2, 2) = cfg.input.sigma().cast<long double>();
  mu.head(2) = cfg.input.mu().cast<long double>();
  // Appendix-A two-mode squeezer on vacuum: q - q' and p + p' are squeezed
  const long double r = cfg.epr_r;
  const long double c = std::cosh(2.0L * r) / 2.0L, s = std::sinh(2.0L * r) / 2.0L;
  for (int a : {kTwo, kOneP}) {
    const int b = a + 1;
    sigma(2 * a, 2 * a) = sigma(2 * a + 1, 2 * a + 1) = c;
    sigma(2 * b, 2 * b) = sigma(2 * b + 1, 2 * b + 1) = c;
    sigma(2 * a, 2 * b) = sigma(2 * b, 2 * a) = s;
    sigma(2 * a + 1, 2 * b + 1) = sigma(2 * b + 1, 2 * a + 1) = -s;
  }
  Register reg;
  if (cfg.scrambler) {
    const GaussianUnitary U = scrambler_from_m(cfg.m);
    const Mat Sstar = conjugate_symplectic(U.S.mat());
    Mat S = embed(U, {kIn, kTwo}, N).S.mat();
    S = embed(GaussianUnitary(SymplecticMatrix::trusted(Sstar)), {kOneP, kTwoP}, N).S.mat() * S;
    const LMat SL = S.cast<long double>();
    sigma = SL * sigma * SL.transpose();
    mu = SL * mu;
    reg.S21 = block(U.S.mat(), 1, 0);
  } else {
    reg.S21 = Mat::Identity(2, 2);
  }
  reg.mu = mu;
  reg.sigma = 0.5L * (sigma + sigma.transpose());
  return reg;
}

// Rows of (Q, P): q_a - q_b and p_a + p_b with (a, b) the measured pair.
LMat measurement_rows(bool scrambler) {
  const int a = scrambler ? kTwo : kIn, b = scrambler ? kTwoP : kOneP;
  LMat M = LMat::Zero(2, 10);
  M(0, 2 * a) = 1.0L;
  M(0, 2 * b) = -1.0L;
  M(1, 2 * a + 1) = 1.0L;
  M(1, 2 * b + 1) = 1.0L;
  return M;
}

struct Conditioned {
  LVec mu;
  LMat sigma;
};

Conditioned condition(const LVec& mu, const LMat& sigma, const LMat& M, const LVec& y, const LMat& Nc,
                      const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  LMat P = LMat::Zero(2 * k, mu.size());
  for (int i = 0; i < k; ++i) {
    P(2 * i, 2 * keep[i]) = 1.0L;
    P(2 * i + 1, 2 * keep[i] + 1) = 1.0L;
  }
  const LMat C = P * sigma * M.transpose();
  const LMat G = M * sigma * M.transpose() + Nc;
  const Eigen::FullPivLU<LMat> lu(G);
  if (!lu.isInvertible()) throw NumericalAbort("conditioning: measurement covariance is singular");
  Conditioned out;
  out.mu = P * mu + C * lu.solve(y - M * mu);
  out.sigma = P * sigma * P.transpose() - C * lu.solve(C.transpose());
  out.sigma = 0.5L * (out.sigma + out.sigma.transpose());
  return out;
}

}  // namespace

void TeleportConfig::validate() const {
  if (!std::isfinite(m) || m == 0.0 || m == 1.0 || m == -1.0)
    throw ParameterError("scrambler parameter m must be finite and not in {0, 1, -1}");
  if (!(epr_r >= 0.0) || !std::isfinite(epr_r)) throw ParameterError("epr_r must be finite and >= 0");
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  if (input.modes() != 1) throw DimensionError("teleportation input must be a single mode");
}

GaussianUnitary scrambler_from_m(double m) {
  if (!std::isfinite(m)) throw ParameterError("m must be finite");
  Mat S(4, 4);
  S << m, 0, -(m - 1), 0,  //
      0, m, 0, m + 1,      //
      -(m + 1), 0, m, 0,   //
      0, m - 1, 0, m;
  return GaussianUnitary(SymplecticMatrix(S, 1e-12 * std::max(1.0, m * m)));
}

GaussianState teleport_register(const TeleportConfig& cfg) {
  cfg.validate();
  const Register reg = build_register(cfg);
  return GaussianState::trusted(reg.mu.cast<double>(), reg.sigma.cast<double>());
}

TeleportOutcome run_protocol_with_outcome(const TeleportConfig& cfg, double Q, double P) {
  cfg.validate();
  const Register reg = build_register(cfg);
  const LMat M = measurement_rows(cfg.scrambler);
  LVec y(2);
  y << Q, P;
  const LMat Nc = LMat::Identity(2, 2) * static_cast<long double>(cfg.noise) * static_cast<long double>(cfg.noise);
  Conditioned c = condition(reg.mu, reg.sigma, M, y, Nc, {kOut});

  Vec corr(2);
  if (cfg.route == CorrectionRoute::MFamily && cfg.scrambler) {
    corr << -Q / (cfg.m + 1.0), P / (cfg.m - 1.0);
  } else {
    const Eigen::FullPivLU<Mat> lu(reg.S21);
    if (!lu.isInvertible()) throw NumericalAbort("correction block is singular");
    corr = lu.solve(Vec(y.cast<double>()));
  }
  TeleportOutcome out;
  out.Q = Q;
  out.P = P;
  out.correction = corr;
  out.output = GaussianState::trusted(c.mu.cast<double>() + corr, c.sigma.cast<double>());
  out.fidelity = gaussian_fidelity(cfg.input, out.output);
  return out;
}

TeleportOutcome run_protocol(const TeleportConfig& cfg, Rng& rng) {
  cfg.validate();
  const Register reg = build_register(cfg);
  const LMat M = measurement_rows(cfg.scrambler);
  const LVec m = M * reg.mu;
  LMat G = M * reg.sigma * M.transpose();
  G += LMat::Identity(2, 2) * static_cast<long double>(cfg.noise) * static_cast<long double>(cfg.noise);
  const Eigen::LLT<Mat> llt(G.cast<double>());
  if (llt.info() != Eigen::Success) throw NumericalAbort("outcome covariance is not positive definite");
  std::normal_distribution<double> n01;
  Vec z(2);
  z << n01(rng), n01(rng);
  const Vec y = m.cast<double>() + llt.matrixL() * z;
  return run_protocol_with_outcome(cfg, y[0], y[1]);
}

GaussianState condition_gaussian(const GaussianState& state, const Mat& M, const Vec& y, const Mat& Nc,
                                 const std::vector<int>& keep) {
  const int n = 2 * state.modes();
  if (M.cols() != n || M.rows() != y.size() || Nc.rows() != M.rows() || Nc.cols() != M.rows())
    throw DimensionError("measurement shapes do not match the state");
  for (int k : keep)
    if (k < 0 || k >= state.modes()) throw ParameterError("kept mode out of range");
  const auto c = condition(state.mu().cast<long double>(), state.sigma().cast<long double>(), M.cast<long double>(),
                           y.cast<long double>(), Nc.cast<long double>(), keep);
  return GaussianState::trusted(c.mu.cast<double>(), c.sigma.cast<double>());
}

Vec induced_error(const GaussianUnitary& U, const Vec& delta_xi) {
  if (U.modes() != 2 || delta_xi.size() != 2) throw DimensionError("induced_error needs a 2-mode scrambler and a 2-vector");
  const Mat S21 = block(U.S.mat(), 1, 0);
  const Eigen::FullPivLU<Mat> lu(S21);
  if (!lu.isInvertible()) throw NumericalAbort("S_21 block is singular");
  return lu.solve(delta_xi);
}

Vec induced_error(double m, const Vec& delta_xi) {
  if (m == 1.0 || m == -1.0) throw NumericalAbort("S_21 block is singular at m = +-1");
  return induced_error(scrambler_from_m(m), delta_xi);
}

double gkp_threshold() { return std::sqrt(std::numbers::pi) / 2.0; }

bool gkp_correctable(const Vec& dz) {
  for (int i = 0; i < dz.size(); ++i)
    if (!(std::abs(dz[i]) < gkp_threshold())) return false;
  return true;
}

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
  if (a.modes() != 1 || b.modes() != 1) throw DimensionError("gaussian_fidelity supports one mode");
  const Mat sum = a.sigma() + b.sigma();
  const Vec d = a.mu() - b.mu();
  const double delta = 4.0 * sum.determinant();
  const double lam = std::max(0.0, (4.0 * a.sigma().determinant() - 1.0) * (4.0 * b.sigma().determinant() - 1.0));
  const double f = 2.0 / (std::sqrt(delta + lam) - std::sqrt(lam)) * std::exp(-0.5 * d.dot(sum.ldlt().solve(d)));
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace cvscramble
