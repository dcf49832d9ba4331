#include "cvscramble/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace cvscramble {

DisplacementVector::DisplacementVector(Vec xi) : xi_(std::move(xi)) {
  if (xi_.size() % 2 != 0) throw DimensionError("displacement vector must have even length");
  if (!xi_.allFinite()) throw ParameterError("displacement vector has non-finite entries");
}

DisplacementVector DisplacementVector::zero(int modes) { return DisplacementVector(Vec::Zero(2 * modes)); }

DisplacementVector DisplacementVector::from_alpha(cplx alpha, int mode, int modes) {
  if (mode < 0 || mode >= modes) throw ParameterError("mode index out of range");
  Vec v = Vec::Zero(2 * modes);
  v[2 * mode] = alpha.real();
  v[2 * mode + 1] = alpha.imag();
  return DisplacementVector(std::move(v));
}

Mat omega(int modes) {
  Mat W = Mat::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    W(2 * k, 2 * k + 1) = 1.0;
    W(2 * k + 1, 2 * k) = -1.0;
  }
  return W;
}

Vec omega_times(const Vec& x) {
  Vec y(x.size());
  for (Eigen::Index k = 0; k + 1 < x.size(); k += 2) {
    y[k] = x[k + 1];
    y[k + 1] = -x[k];
  }
  return y;
}

Vec omega_t_times(const Vec& x) { return -omega_times(x); }

namespace {

// rows of Omega * A
Mat omega_left(const Mat& A) {
  Mat B(A.rows(), A.cols());
  for (Eigen::Index k = 0; k + 1 < A.rows(); k += 2) {
    B.row(k) = A.row(k + 1);
    B.row(k + 1) = -A.row(k);
  }
  return B;
}

// columns of A * Omega
Mat omega_right(const Mat& A) {
  Mat B(A.rows(), A.cols());
  for (Eigen::Index k = 0; k + 1 < A.cols(); k += 2) {
    B.col(k) = -A.col(k + 1);
    B.col(k + 1) = A.col(k);
  }
  return B;
}

void check_square_even(const Mat& S) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0) throw DimensionError("symplectic matrix must be square with even size");
}

}  // namespace

double symplectic_defect(const Mat& S) {
  check_square_even(S);
  Mat R = omega_right(S) * S.transpose() - omega(static_cast<int>(S.rows() / 2));
  return R.cwiseAbs().maxCoeff();
}

bool is_symplectic(const Mat& S, double tol) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0) return false;
  if (symplectic_defect(S) > tol) return false;
  return std::abs(S.determinant() - 1.0) <= tol * std::max(1.0, S.norm());
}

Mat symplectic_inverse(const Mat& S) {
  check_square_even(S);
  // Omega S^T Omega^T
  return -omega_right(omega_left(S.transpose()));
}

Mat reproject_symplectic(const Mat& S) {
  check_square_even(S);
  const Eigen::Index n = S.rows();
  // A = -Omega S^T Omega S is I for exact S; S (3I - A)/2 ~ S A^{-1/2}
  Mat A = -omega_left(S.transpose()) * omega_left(S);
  return S * (3.0 * Mat::Identity(n, n) - A) * 0.5;
}

SymplecticMatrix::SymplecticMatrix(Mat S, double tol) : S_(std::move(S)) {
  check_square_even(S_);
  if (!is_symplectic(S_, tol)) {
    std::ostringstream os;
    os << "matrix is not symplectic (defect " << symplectic_defect(S_) << ")";
    throw ParameterError(os.str());
  }
}

SymplecticMatrix SymplecticMatrix::identity(int modes) { return trusted(Mat::Identity(2 * modes, 2 * modes)); }

SymplecticMatrix SymplecticMatrix::trusted(Mat S) {
  SymplecticMatrix out;
  out.S_ = std::move(S);
  return out;
}

SymplecticMatrix SymplecticMatrix::inverse() const { return trusted(symplectic_inverse(S_)); }

GaussianUnitary::GaussianUnitary(SymplecticMatrix s, DisplacementVector disp) : S(std::move(s)), d(std::move(disp)) {
  if (d.vec().size() != S.mat().rows()) throw DimensionError("displacement length does not match symplectic matrix");
}

GaussianUnitary::GaussianUnitary(SymplecticMatrix s) : S(std::move(s)), d(DisplacementVector::zero(S.modes())) {}

GaussianUnitary GaussianUnitary::identity(int modes) { return GaussianUnitary(SymplecticMatrix::identity(modes)); }

GaussianUnitary GaussianUnitary::displacement(const DisplacementVector& delta) {
  return shift(DisplacementVector(std::numbers::sqrt2 * delta.vec()));
}

GaussianUnitary GaussianUnitary::shift(const DisplacementVector& d) {
  return GaussianUnitary(SymplecticMatrix::identity(d.modes()), d);
}

GaussianUnitary GaussianUnitary::inverse() const {
  // x -> S x + d inverts to x -> S^{-1}(x - d)
  Mat Si = symplectic_inverse(S.mat());
  Vec di = -(Si * d.vec());
  return GaussianUnitary(SymplecticMatrix::trusted(std::move(Si)), DisplacementVector(std::move(di)));
}

GaussianUnitary compose(const GaussianUnitary& outer, const GaussianUnitary& inner) {
  if (outer.modes() != inner.modes()) throw DimensionError("compose: mode count mismatch");
  Mat S = outer.S.mat() * inner.S.mat();
  Vec d = outer.S.mat() * inner.d.vec() + outer.d.vec();
  return GaussianUnitary(SymplecticMatrix::trusted(std::move(S)), DisplacementVector(std::move(d)));
}

PhasedDisplacement evolve_displacement(const GaussianUnitary& U, const DisplacementVector& xi) {
  if (xi.vec().size() != U.d.vec().size()) throw DimensionError("evolve_displacement: mode count mismatch");
  double arg = std::numbers::sqrt2 * U.d.vec().dot(omega_times(xi.vec()));
  Vec out = symplectic_inverse(U.S.mat()) * xi.vec();
  return {std::polar(1.0, arg), DisplacementVector(std::move(out))};
}

PhasedDisplacement displacement_product(const DisplacementVector& xi1, const DisplacementVector& xi2) {
  if (xi1.vec().size() != xi2.vec().size()) throw DimensionError("displacement_product: length mismatch");
  double arg = -xi1.vec().dot(omega_times(xi2.vec()));
  return {std::polar(1.0, arg), DisplacementVector(xi1.vec() + xi2.vec())};
}

GaussianUnitary rotation(double theta) {
  Mat S(2, 2);
  S << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return GaussianUnitary(SymplecticMatrix::trusted(S));
}

GaussianUnitary squeeze(double r) {
  Mat S = Mat::Zero(2, 2);
  S(0, 0) = std::exp(-r);
  S(1, 1) = std::exp(r);
  return GaussianUnitary(SymplecticMatrix::trusted(S));
}

GaussianUnitary beamsplitter(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("beamsplitter: eta must lie in [0,1]");
  const double t = std::sqrt(eta), s = std::sqrt(1.0 - eta);
  Mat S = Mat::Zero(4, 4);
  S.block(0, 0, 2, 2) = t * Mat::Identity(2, 2);
  S.block(0, 2, 2, 2) = s * Mat::Identity(2, 2);
  S.block(2, 0, 2, 2) = -s * Mat::Identity(2, 2);
  S.block(2, 2, 2, 2) = t * Mat::Identity(2, 2);
  return GaussianUnitary(SymplecticMatrix::trusted(S));
}

GaussianUnitary two_mode_squeeze(double r) {
  const double c = std::cosh(r), s = std::sinh(r);
  Mat Z = Mat::Zero(2, 2);
  Z(0, 0) = 1.0;
  Z(1, 1) = -1.0;
  Mat S(4, 4);
  S.block(0, 0, 2, 2) = c * Mat::Identity(2, 2);
  S.block(0, 2, 2, 2) = s * Z;
  S.block(2, 0, 2, 2) = s * Z;
  S.block(2, 2, 2, 2) = c * Mat::Identity(2, 2);
  return GaussianUnitary(SymplecticMatrix::trusted(S));
}

GaussianUnitary embed(const GaussianUnitary& gate, const std::vector<int>& modes, int total_modes) {
  const int k = gate.modes();
  if (static_cast<int>(modes.size()) != k) throw DimensionError("embed: mode list does not match gate size");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i] < 0 || modes[i] >= total_modes) throw ParameterError("embed: mode index out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (modes[i] == modes[j]) throw ParameterError("embed: overlapping modes");
  }
  Mat S = Mat::Identity(2 * total_modes, 2 * total_modes);
  Vec d = Vec::Zero(2 * total_modes);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) S.block(2 * modes[a], 2 * modes[b], 2, 2) = gate.S.mat().block(2 * a, 2 * b, 2, 2);
    d.segment(2 * modes[a], 2) = gate.d.vec().segment(2 * a, 2);
  }
  return GaussianUnitary(SymplecticMatrix::trusted(std::move(S)), DisplacementVector(std::move(d)));
}

EulerFactors euler_decompose(const SymplecticMatrix& Sm) {
  const Mat& S = Sm.mat();
  const int n2 = static_cast<int>(S.rows());
  const int N = n2 / 2;
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat& U = svd.matrixU();
  const Mat& V = svd.matrixV();
  const Vec& sv = svd.singularValues();  // descending

  // Columns of W: pairs (v, Omega^T v); eigenvalue of P = V Sigma V^T is
  // s for v and 1/s for Omega^T v.
  Mat W(n2, n2);
  Vec r(N);
  int filled = 0;
  std::vector<int> flat;
  for (int i = 0; i < n2; ++i) {
    if (std::log(sv[i]) > 1e-8 && filled < N) {
      Vec v = V.col(i);
      W.col(2 * filled) = v;
      W.col(2 * filled + 1) = omega_t_times(v);
      r[filled] = std::log(sv[i]);
      ++filled;
    } else if (std::abs(std::log(sv[i])) <= 1e-8) {
      flat.push_back(i);
    }
  }
  // Unsqueezed subspace is Omega-invariant; build a symplectic-orthonormal
  // basis in it by Gram-Schmidt.
  std::vector<Vec> pool;
  for (int i : flat) pool.push_back(V.col(i));
  while (filled < N) {
    Vec v;
    for (auto& c : pool) {
      for (int j = 0; j < 2 * filled; ++j) c -= W.col(j).dot(c) * W.col(j);
      if (c.norm() > 1e-6) {
        v = c.normalized();
        break;
      }
    }
    if (v.size() == 0) throw NumericalAbort("euler_decompose: failed to complete symplectic basis");
    W.col(2 * filled) = v;
    W.col(2 * filled + 1) = omega_t_times(v);
    r[filled] = 0.0;
    ++filled;
  }
  EulerFactors f;
  f.K = U * V.transpose() * W;  // orthogonal part times W
  f.L = W.transpose();
  f.r = r;
  return f;
}

Mat recompose(const EulerFactors& f) {
  const int N = static_cast<int>(f.r.size());
  Vec diag(2 * N);
  for (int k = 0; k < N; ++k) {
    diag[2 * k] = std::exp(f.r[k]);
    diag[2 * k + 1] = std::exp(-f.r[k]);
  }
  return f.K * diag.asDiagonal() * f.L;
}

double total_squeezing(const Mat& S) {
  if (S.rows() == 2 && S.cols() == 2) {
    // det S = 1: |S|_F^2 = s^2 + s^-2
    const double F = S.squaredNorm();
    const double s2 = 0.5 * (F + std::sqrt(std::max(0.0, F * F - 4.0)));
    return 0.5 * std::log(s2);
  }
  Eigen::JacobiSVD<Mat> svd(S);
  return std::log(svd.singularValues()[0]);
}

CMat haar_unitary(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat Z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) Z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ();
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cplx d = R(j, j);
    double a = std::abs(d);
    Q.col(j) *= (a > 0 ? d / a : cplx(1.0));
  }
  return Q;
}

Mat passive_from_unitary(const CMat& U) {
  const Eigen::Index n = U.rows();
  Mat S(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const double x = U(j, k).real(), y = U(j, k).imag();
      S(2 * j, 2 * k) = x;
      S(2 * j, 2 * k + 1) = -y;
      S(2 * j + 1, 2 * k) = y;
      S(2 * j + 1, 2 * k + 1) = x;
    }
  return S;
}

GaussianUnitary haar_passive(int modes, Rng& rng) {
  if (modes < 1) throw ParameterError("haar_passive: need at least one mode");
  return GaussianUnitary(SymplecticMatrix::trusted(passive_from_unitary(haar_unitary(modes, rng))));
}

GaussianUnitary random_gaussian_circuit(int modes, int depth, Rng& rng, double max_r, double max_shift) {
  if (modes < 1 || depth < 0) throw ParameterError("random_gaussian_circuit: need modes >= 1 and depth >= 0");
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi), sq(-max_r, max_r), u01(0.0, 1.0),
      sh(-max_shift, max_shift);
  std::uniform_int_distribution<int> pick_mode(0, modes - 1), pick_gate(0, modes > 1 ? 3 : 1);
  GaussianUnitary U = GaussianUnitary::identity(modes);
  for (int g = 0; g < depth; ++g) {
    const int kind = pick_gate(rng);
    GaussianUnitary gate;
    if (kind < 2) {
      const int a = pick_mode(rng);
      gate = embed(kind == 0 ? rotation(ang(rng)) : squeeze(sq(rng)), {a}, modes);
    } else {
      const int a = pick_mode(rng);
      int b = pick_mode(rng);
      while (b == a) b = pick_mode(rng);
      gate = embed(kind == 2 ? beamsplitter(u01(rng)) : two_mode_squeeze(sq(rng)), {a, b}, modes);
    }
    if (max_shift > 0.0) {
      Vec d(2 * modes);
      for (int i = 0; i < 2 * modes; ++i) d[i] = sh(rng);
      gate = compose(GaussianUnitary::shift(DisplacementVector(d)), gate);
    }
    U = compose(gate, U);
  }
  return U;
}

Mat conjugate_symplectic(const Mat& S) {
  Mat C = S;
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j)
      if ((i % 2) != (j % 2)) C(i, j) = -C(i, j);
  return C;
}

}  // namespace cvscramble
