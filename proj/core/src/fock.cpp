#include "cvscramble/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace cvscramble {

void TruncationConfig::validate() const {
  if (d_cut < 2) throw ParameterError("d_cut must be >= 2");
  if (!(tail_tol > 0.0)) throw ParameterError("tail_tol must be > 0");
}

int TruncationConfig::tail_band() const { return std::max(2, d_cut / 10); }

// ---- FockState -------------------------------------------------------------

FockState::FockState(CVec amp, int d, int modes) : amp_(std::move(amp)), d_(d), modes_(modes) {
  if (modes != 1 && modes != 2) throw DimensionError("Fock states support 1 or 2 modes");
  const long expect = modes == 1 ? d : static_cast<long>(d) * d;
  if (amp_.size() != expect) throw DimensionError("amplitude length does not match d^modes");
}

FockState FockState::basis(int n, int d) {
  if (n < 0 || n >= d) throw ParameterError("basis index out of range");
  CVec v = CVec::Zero(d);
  v[n] = 1.0;
  return FockState(v, d, 1);
}

FockState FockState::basis2(int n1, int n2, int d) {
  if (n1 < 0 || n2 < 0 || n1 >= d || n2 >= d) throw ParameterError("basis index out of range");
  CVec v = CVec::Zero(static_cast<long>(d) * d);
  v[static_cast<long>(n1) * d + n2] = 1.0;
  return FockState(v, d, 2);
}

FockState FockState::tensor(const FockState& a, const FockState& b) {
  if (a.modes() != 1 || b.modes() != 1 || a.d() != b.d()) throw DimensionError("tensor needs two 1-mode states of equal d");
  const int d = a.d();
  CVec v(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v.segment(static_cast<long>(i) * d, d) = a.amp()[i] * b.amp();
  return FockState(v, d, 2);
}

double FockState::tail_population(int band) const {
  const int lo = std::max(0, d_ - band);
  double p = 0.0;
  if (modes_ == 1) {
    for (int n = lo; n < d_; ++n) p += std::norm(amp_[n]);
    return p;
  }
  for (int n1 = 0; n1 < d_; ++n1)
    for (int n2 = 0; n2 < d_; ++n2)
      if (n1 >= lo || n2 >= lo) p += std::norm(amp_[static_cast<long>(n1) * d_ + n2]);
  return p;
}

double FockState::mean_photons(int mode) const {
  if (mode < 0 || mode >= modes_) throw ParameterError("mode out of range");
  double s = 0.0;
  if (modes_ == 1) {
    for (int n = 0; n < d_; ++n) s += n * std::norm(amp_[n]);
  } else {
    for (int n1 = 0; n1 < d_; ++n1)
      for (int n2 = 0; n2 < d_; ++n2) s += (mode == 0 ? n1 : n2) * std::norm(amp_[static_cast<long>(n1) * d_ + n2]);
  }
  return s / amp_.squaredNorm();
}

// ---- FockOperator ----------------------------------------------------------

FockOperator FockOperator::dense(CMat m, int d, int modes) {
  FockOperator op;
  op.d_ = d;
  op.modes_ = modes;
  if (m.rows() != op.dim() || m.cols() != op.dim()) throw DimensionError("operator size does not match d^modes");
  op.m_ = std::move(m);
  return op;
}

FockOperator FockOperator::sparse(SpMat m, int d, int modes) {
  FockOperator op;
  op.d_ = d;
  op.modes_ = modes;
  if (m.rows() != op.dim() || m.cols() != op.dim()) throw DimensionError("operator size does not match d^modes");
  m.makeCompressed();
  op.m_ = std::move(m);
  return op;
}

FockOperator FockOperator::diagonal(CVec diag, int d, int modes) {
  FockOperator op;
  op.d_ = d;
  op.modes_ = modes;
  if (diag.size() != op.dim()) throw DimensionError("diagonal size does not match d^modes");
  op.m_ = std::move(diag);
  return op;
}

int FockOperator::dim() const { return modes_ == 1 ? d_ : d_ * d_; }

CMat FockOperator::to_dense() const {
  if (auto* m = std::get_if<CMat>(&m_)) return *m;
  if (auto* s = std::get_if<SpMat>(&m_)) return CMat(*s);
  return std::get<CVec>(m_).asDiagonal();
}

CVec FockOperator::apply(const CVec& v) const {
  if (v.size() != dim()) throw DimensionError("state size does not match operator");
  if (auto* m = std::get_if<CMat>(&m_)) return (*m) * v;
  if (auto* s = std::get_if<SpMat>(&m_)) return (*s) * v;
  return std::get<CVec>(m_).cwiseProduct(v);
}

CVec FockOperator::apply_adjoint(const CVec& v) const {
  if (v.size() != dim()) throw DimensionError("state size does not match operator");
  if (auto* m = std::get_if<CMat>(&m_)) return m->adjoint() * v;
  if (auto* s = std::get_if<SpMat>(&m_)) return s->adjoint() * v;
  return std::get<CVec>(m_).conjugate().cwiseProduct(v);
}

FockState FockOperator::operator*(const FockState& s) const {
  if (s.modes() != modes_ || s.d() != d_) throw DimensionError("state does not match operator");
  return FockState(apply(s.amp()), d_, modes_);
}

FockOperator FockOperator::adjoint() const {
  if (auto* m = std::get_if<CMat>(&m_)) return dense(m->adjoint(), d_, modes_);
  if (auto* s = std::get_if<SpMat>(&m_)) return sparse(SpMat(s->adjoint()), d_, modes_);
  return diagonal(std::get<CVec>(m_).conjugate(), d_, modes_);
}

double FockOperator::column_defect(int cols) const {
  const CMat m = to_dense();
  double worst = 0.0;
  for (int j = 0; j < std::min<int>(cols, dim()); ++j) worst = std::max(worst, std::abs(m.col(j).norm() - 1.0));
  return worst;
}

FockOperator product(const FockOperator& a, const FockOperator& b) {
  if (a.d() != b.d() || a.modes() != b.modes()) throw DimensionError("operator shapes differ");
  return FockOperator::dense(a.to_dense() * b.to_dense(), a.d(), a.modes());
}

FockState apply_on_mode(const FockOperator& op, int mode, const FockState& s, bool adjoint) {
  if (op.modes() != 1 || op.d() != s.d()) throw DimensionError("apply_on_mode needs a single-mode operator of matching d");
  if (s.modes() == 1) {
    if (mode != 0) throw ParameterError("mode out of range");
    return FockState(adjoint ? op.apply_adjoint(s.amp()) : op.apply(s.amp()), s.d(), 1);
  }
  if (mode != 0 && mode != 1) throw ParameterError("mode out of range");
  const int d = s.d();
  CVec out(s.amp().size());
  // column-major view: A(n2, n1)
  Eigen::Map<const CMat> A(s.amp().data(), d, d);
  Eigen::Map<CMat> B(out.data(), d, d);
  if (mode == 1) {
    for (int n1 = 0; n1 < d; ++n1) B.col(n1) = adjoint ? op.apply_adjoint(A.col(n1)) : op.apply(A.col(n1));
  } else {
    for (int n2 = 0; n2 < d; ++n2) {
      CVec row = A.row(n2).transpose();
      B.row(n2) = (adjoint ? op.apply_adjoint(row) : op.apply(row)).transpose();
    }
  }
  return FockState(out, d, 2);
}

// ---- gates -----------------------------------------------------------------

namespace {

// <n+k|D|n> = alpha^k e^{-x/2} sqrt(n!/(n+k)!) L_n^(k)(x), x = |alpha|^2. The
// normalised g_n = sqrt(n! k!/(n+k)!) L_n^(k)(x) obeys a three-term recurrence
// in n; a running log scale keeps it finite for large |alpha| or k.
CMat displacement_elements(cplx alpha, int d) {
  CMat D(d, d);
  const double x = std::norm(alpha), r = std::abs(alpha), phi = std::arg(alpha);
  const double logr = r > 0.0 ? std::log(r) : -std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) {
    // prefactor |alpha|^k e^{-x/2} / sqrt(k!)
    const double logpref = (k == 0 ? 0.0 : k * logr) - 0.5 * x - 0.5 * std::lgamma(k + 1.0);
    const cplx below = std::polar(1.0, k * phi);                           // (alpha / |alpha|)^k
    const cplx above = std::polar(1.0, k * (std::numbers::pi - phi));     // (-alpha^* / |alpha|)^k
    double gm = 0.0, g = 1.0, logscale = 0.0;
    for (int n = 0; n + k < d; ++n) {
      if (n == 1) {
        gm = g;
        g = (1.0 + k - x) / std::sqrt(k + 1.0);
      } else if (n > 1) {
        const double j = n - 1;
        const double next = ((2.0 * j + 1.0 + k - x) * g - std::sqrt(j * (j + k)) * gm) / std::sqrt((j + 1.0) * (j + 1.0 + k));
        gm = g;
        g = next;
      }
      if (std::abs(g) > 1e150) {
        g *= 1e-150;
        gm *= 1e-150;
        logscale += 150.0 * std::log(10.0);
      }
      const double mag = (k > 0 && r == 0.0) ? 0.0 : g * std::exp(logpref + logscale);
      D(n + k, n) = mag * below;
      if (k > 0) D(n, n + k) = mag * above;
    }
  }
  return D;
}

// Only the vacuum column is checked: higher columns of a displacement or
// squeezer spread past any d_cut. States built from them are guarded by the
// tail and norm checks of the correlators.
void check_columns(const CMat& m, const TruncationConfig& cfg, const char* what) {
  const double leak = std::abs(1.0 - m.col(0).squaredNorm());
  if (leak > cfg.tail_tol)
    throw TruncationError(std::string(what) + ": vacuum column leakage " + std::to_string(leak) +
                          " exceeds tail_tol at d_cut=" + std::to_string(cfg.d_cut));
}

int padded_dim(int d) { return std::max(2 * d, d + 60); }

}  // namespace

FockOperator displacement_matrix(cplx alpha, const TruncationConfig& cfg) {
  cfg.validate();
  CMat D = displacement_elements(alpha, cfg.d_cut);
  check_columns(D, cfg, "displacement_matrix");
  return FockOperator::dense(std::move(D), cfg.d_cut, 1);
}

FockOperator snap_gate(const std::vector<double>& phases) {
  if (phases.size() < 2) throw ParameterError("SNAP needs at least 2 phases");
  CVec diag(phases.size());
  for (std::size_t n = 0; n < phases.size(); ++n) diag[n] = std::polar(1.0, phases[n]);
  return FockOperator::diagonal(diag, static_cast<int>(phases.size()), 1);
}

std::vector<double> kerr_phases(double t, int d) {
  std::vector<double> th(d);
  for (int n = 0; n < d; ++n) th[n] = -t * (4.0 * n + 2.0) * (4.0 * n + 2.0);
  return th;
}

std::vector<double> random_snap_energies(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> w(d);
  for (double& x : w) x = u(rng);
  return w;
}

FockOperator random_snap(const std::vector<double>& w, double t) {
  std::vector<double> th(w.size());
  for (std::size_t n = 0; n < w.size(); ++n) th[n] = w[n] * t;
  return snap_gate(th);
}

FockOperator harmonic_evolution(double t, int d) {
  std::vector<double> th(d);
  for (int n = 0; n < d; ++n) th[n] = -t * (2.0 * n + 1.0);
  return snap_gate(th);
}

FockOperator phase_rotation(double theta, int d) {
  std::vector<double> th(d);
  for (int n = 0; n < d; ++n) th[n] = -theta * n;
  return snap_gate(th);
}

FockOperator squeeze_fock(double r, const TruncationConfig& cfg) {
  cfg.validate();
  const int D = padded_dim(cfg.d_cut);
  // G = (r/2)(a^2 - a^dag^2); exp(G) = exp(-i H) with H = i G Hermitian
  CMat H = CMat::Zero(D, D);
  for (int n = 0; n + 2 < D; ++n) {
    const double a2 = std::sqrt(static_cast<double>(n + 1) * (n + 2));  // <n|a^2|n+2>
    const cplx g(0.5 * r * a2, 0.0);                                      // G(n, n+2)
    H(n, n + 2) = cplx(0.0, 1.0) * g;
    H(n + 2, n) = cplx(0.0, 1.0) * (-g);
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const CVec ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -1.0)).array().exp();
  const CMat Vtop = es.eigenvectors().topRows(cfg.d_cut);
  CMat S = Vtop * ph.asDiagonal() * Vtop.adjoint();
  check_columns(S, cfg, "squeeze_fock");
  return FockOperator::dense(std::move(S), cfg.d_cut, 1);
}

FockOperator beamsplitter_fock(double theta, const TruncationConfig& cfg) {
  cfg.validate();
  const int d = cfg.d_cut;
  std::vector<Eigen::Triplet<cplx>> trip;
  // block of total photon number N, basis |k, N-k>, k = 0..N
  for (int N = 0; N <= 2 * (d - 1); ++N) {
    const int m = N + 1;
    // iG with G = theta (a1^dag a2 - a1 a2^dag) is Hermitian
    CMat H = CMat::Zero(m, m);
    for (int k = 0; k < N; ++k) {
      // a1^dag a2 |k, N-k> = sqrt((k+1)(N-k)) |k+1, N-k-1>
      const double c = theta * std::sqrt(static_cast<double>(k + 1) * (N - k));
      H(k + 1, k) += cplx(0.0, c);
      H(k, k + 1) += cplx(0.0, -c);
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    const CVec ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -1.0)).array().exp();
    const CMat B = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    for (int k = 0; k <= N; ++k) {
      if (k >= d || N - k >= d) continue;
      for (int l = 0; l <= N; ++l) {
        if (l >= d || N - l >= d) continue;
        if (std::abs(B(k, l)) < 1e-300) continue;
        trip.emplace_back(k * d + (N - k), l * d + (N - l), B(k, l));
      }
    }
  }
  SpMat m(d * d, d * d);
  m.setFromTriplets(trip.begin(), trip.end());
  return FockOperator::sparse(std::move(m), d, 2);
}

FockOperator function_of_quadrature(const std::function<cplx(double)>& f, const TruncationConfig& cfg) {
  cfg.validate();
  const int D = padded_dim(cfg.d_cut);
  Mat q = Mat::Zero(D, D);
  for (int n = 0; n + 1 < D; ++n) q(n, n + 1) = q(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  Eigen::SelfAdjointEigenSolver<Mat> es(q);
  CVec fx(D);
  for (int k = 0; k < D; ++k) fx[k] = f(es.eigenvalues()[k]);
  const Mat Vtop = es.eigenvectors().topRows(cfg.d_cut);
  CMat F = Vtop.cast<cplx>() * fx.asDiagonal() * Vtop.transpose().cast<cplx>();
  return FockOperator::dense(std::move(F), cfg.d_cut, 1);
}

FockOperator cubic_gate_fock(double gamma_t, const TruncationConfig& cfg) {
  // No column check: the gate moves high-n columns far past any d_cut. States
  // it acts on are guarded by the tail and norm checks of the correlators.
  // exp(-i H t / hbar) with H = gamma q^3 / 6, q = a + a^dag, hbar = 2
  return function_of_quadrature([gamma_t](double x) { return std::polar(1.0, -gamma_t * x * x * x / 12.0); }, cfg);
}

FockOperator gaussian_unitary_fock(const GaussianUnitary& U, const TruncationConfig& cfg) {
  if (U.modes() != 1) throw DimensionError("gaussian_unitary_fock supports one mode");
  cfg.validate();
  const auto e = euler_decompose(U.S);
  const double tk = std::atan2(e.K(0, 1), e.K(0, 0));
  const double tl = std::atan2(e.L(0, 1), e.L(0, 0));
  // S = K diag(e^{r}, e^{-r}) L, and squeeze_fock(r) realises diag(e^{-r}, e^{r})
  FockOperator V = product(phase_rotation(tk, cfg.d_cut), product(squeeze_fock(-e.r[0], cfg), phase_rotation(tl, cfg.d_cut)));
  const cplx delta(U.d[0] / std::numbers::sqrt2, U.d[1] / std::numbers::sqrt2);
  if (delta == cplx(0.0)) return V;
  return product(displacement_matrix(delta, cfg), V);
}

FockState coherent_state(cplx gamma, const TruncationConfig& cfg) {
  cfg.validate();
  CVec v(cfg.d_cut);
  v[0] = std::exp(-0.5 * std::norm(gamma));
  for (int n = 1; n < cfg.d_cut; ++n) v[n] = v[n - 1] * gamma / std::sqrt(static_cast<double>(n));
  FockState s(v, cfg.d_cut, 1);
  const double tail = s.tail_population(cfg.tail_band()) + std::max(0.0, 1.0 - v.squaredNorm());
  if (tail > cfg.tail_tol)
    throw TruncationError("coherent_state: tail population " + std::to_string(tail) + " exceeds tail_tol");
  s.amp() /= v.norm();
  return s;
}

std::vector<double> thermal_weights(double n_th, int d) {
  if (!(n_th >= 0.0)) throw ParameterError("n_th must be >= 0");
  std::vector<double> p(d, 0.0);
  p[0] = 1.0 / (n_th + 1.0);
  const double ratio = n_th / (n_th + 1.0);
  for (int n = 1; n < d; ++n) p[n] = p[n - 1] * ratio;
  return p;
}

// ---- correlators -----------------------------------------------------------

void FockCircuit::add(FockOperator g, int mode) {
  gates.push_back(std::move(g));
  on_mode.push_back(mode);
}

FockState FockCircuit::apply(const FockState& s) const {
  FockState out = s;
  for (std::size_t i = 0; i < gates.size(); ++i)
    out = on_mode[i] < 0 ? gates[i] * out : apply_on_mode(gates[i], on_mode[i], out);
  return out;
}

FockState FockCircuit::apply_adjoint(const FockState& s) const {
  FockState out = s;
  for (std::size_t i = gates.size(); i-- > 0;) {
    if (on_mode[i] < 0)
      out = FockState(gates[i].apply_adjoint(out.amp()), out.d(), out.modes());
    else
      out = apply_on_mode(gates[i], on_mode[i], out, true);
  }
  return out;
}

FockState apply_displacement(const DisplacementVector& xi, const FockState& s, const TruncationConfig& cfg,
                             bool adjoint) {
  if (xi.modes() != s.modes()) throw DimensionError("displacement and state mode counts differ");
  if (s.d() != cfg.d_cut) throw DimensionError("state d differs from d_cut");
  FockState out = s;
  for (int k = 0; k < s.modes(); ++k) {
    const cplx a = xi.alpha(k);
    if (a == cplx(0.0)) continue;
    // elements are exact, so the only error is weight pushed past d_cut; callers check the state tail
    out = apply_on_mode(FockOperator::dense(displacement_elements(adjoint ? -a : a, cfg.d_cut), cfg.d_cut, 1), k, out);
  }
  return out;
}

namespace {

// Tail population plus any norm lost through truncated operator columns.
void stage(FockState& s, TruncationReport& rep, const TruncationConfig& cfg, const char* where) {
  const double tail = s.tail_population(cfg.tail_band()) + std::abs(1.0 - s.amp().squaredNorm());
  rep.absorb(tail, cfg.tail_tol);
  if (tail > cfg.tail_tol)
    throw TruncationError(std::string("correlator_fock: tail population ") + std::to_string(tail) + " after " + where +
                          " exceeds tail_tol at d_cut=" + std::to_string(cfg.d_cut));
}

}  // namespace

FockCorrelator correlator_fock(CorrelatorKind kind, const FockCircuit& U, const DisplacementVector& xi1,
                               const DisplacementVector& xi2, const FockState& psi, const TruncationConfig& cfg) {
  cfg.validate();
  FockCorrelator out;
  out.report.d_cut = cfg.d_cut;
  FockState s = psi;
  stage(s, out.report, cfg, "input");
  auto step_D = [&](const DisplacementVector& xi, bool adj, const char* w) {
    s = apply_displacement(xi, s, cfg, adj);
    stage(s, out.report, cfg, w);
  };
  auto step_U = [&](bool adj, const char* w) {
    s = adj ? U.apply_adjoint(s) : U.apply(s);
    stage(s, out.report, cfg, w);
  };
  if (kind == CorrelatorKind::TOC) {
    step_D(xi2, false, "D(xi2)");
    step_U(false, "U");
    step_D(xi1, false, "D(xi1)");
    step_U(true, "U^dag");
  } else {
    // rightmost first: D(xi2), U^dag D(xi1) U, D^dag(xi2), U^dag D^dag(xi1) U
    step_D(xi2, false, "D(xi2)");
    step_U(false, "U");
    step_D(xi1, false, "D(xi1)");
    step_U(true, "U^dag");
    step_D(xi2, true, "D^dag(xi2)");
    step_U(false, "U");
    step_D(xi1, true, "D^dag(xi1)");
    step_U(true, "U^dag");
  }
  out.value = psi.amp().dot(s.amp());  // conjugates psi
  return out;
}

FockCorrelator correlator_fock_mixed(CorrelatorKind kind, const FockCircuit& U, const DisplacementVector& xi1,
                                     const DisplacementVector& xi2,
                                     const std::vector<std::pair<double, FockState>>& mixture,
                                     const TruncationConfig& cfg) {
  FockCorrelator out;
  out.value = 0.0;
  out.report.d_cut = cfg.d_cut;
  for (const auto& [p, s] : mixture) {
    if (p == 0.0) continue;
    const auto c = correlator_fock(kind, U, xi1, xi2, s, cfg);
    out.value += p * c.value;
    out.report.absorb(c.report.max_tail, cfg.tail_tol);
  }
  return out;
}

// ---- experiments -----------------------------------------------------------

SnapCircuitSample random_snap_sample(int d, Rng& rng) {
  return {random_snap_energies(d, rng), random_snap_energies(d, rng), random_snap_energies(d, rng),
          random_snap_energies(d, rng)};
}

FockCircuit two_mode_snap_circuit(double theta, const SnapCircuitSample& ph, const TruncationConfig& cfg) {
  cfg.validate();
  FockCircuit c;
  c.add(snap_gate(ph.w1), 0);
  c.add(snap_gate(ph.w2), 1);
  c.add(beamsplitter_fock(theta, cfg));
  c.add(snap_gate(ph.w3), 0);
  c.add(snap_gate(ph.w4), 1);
  return c;
}

SnapSweep snap_circuit_otoc_sweep(const std::vector<double>& thetas, long samples, cplx alpha, cplx beta,
                                  cplx gamma1, cplx gamma2, const TruncationConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (samples < 2) throw ParameterError("samples must be >= 2");
  const int d = cfg.d_cut;
  const FockState psi = FockState::tensor(coherent_state(gamma1, cfg), coherent_state(gamma2, cfg));
  Vec x1(4), x11(4), x12(4);
  x1 << alpha.real(), alpha.imag(), 0.0, 0.0;
  x11 << beta.real(), beta.imag(), 0.0, 0.0;
  x12 << 0.0, 0.0, beta.real(), beta.imag();
  const DisplacementVector xi1(x1), xi2_11(x11), xi2_12(x12);

  SnapSweep out;
  out.report.d_cut = d;
  for (double theta : thetas) {
    const FockOperator B = beamsplitter_fock(theta, cfg);
    std::vector<double> v11(samples), v12(samples), tails(samples);
#pragma omp parallel for schedule(dynamic, 1)
    for (long s = 0; s < samples; ++s) {
      Rng rng = stream_rng(seed, static_cast<std::uint64_t>(s));
      const auto ph = random_snap_sample(d, rng);
      FockCircuit c;
      c.add(snap_gate(ph.w1), 0);
      c.add(snap_gate(ph.w2), 1);
      c.add(B);
      c.add(snap_gate(ph.w3), 0);
      c.add(snap_gate(ph.w4), 1);
      const auto a = correlator_fock(CorrelatorKind::OTOC, c, xi1, xi2_11, psi, cfg);
      const auto b = correlator_fock(CorrelatorKind::OTOC, c, xi1, xi2_12, psi, cfg);
      v11[s] = std::abs(a.value);
      v12[s] = std::abs(b.value);
      tails[s] = std::max(a.report.max_tail, b.report.max_tail);
    }
    for (double t : tails) out.report.absorb(t, cfg.tail_tol);
    auto ms = [](const std::vector<double>& v) {
      double m = 0.0, q = 0.0;
      for (double x : v) m += x;
      m /= v.size();
      for (double x : v) q += (x - m) * (x - m);
      return std::pair{m, std::sqrt(q / (v.size() - 1))};
    };
    const auto [m11, s11] = ms(v11);
    const auto [m12, s12] = ms(v12);
    out.points.push_back({theta, m11, s11, m12, s12});
  }
  return out;
}

Heatmap toc_heatmap(const FockCircuit& U, cplx alpha, const std::vector<double>& re, const std::vector<double>& im,
                    const FockState& psi, const TruncationConfig& cfg, const HeatmapDisk& disk) {
  if (psi.modes() != 1) throw DimensionError("toc_heatmap supports one mode");
  if (re.empty() || im.empty()) throw ParameterError("empty beta grid");
  Heatmap h;
  h.re = re;
  h.im = im;
  h.report.d_cut = cfg.d_cut;
  // C1 = <chi| D(beta) |psi>, chi = U^dag D(-alpha) U psi
  FockState chi = U.apply(psi);
  chi = apply_displacement(DisplacementVector::from_alpha(alpha), chi, cfg, true);
  chi = U.apply_adjoint(chi);
  h.report.absorb(chi.tail_population(cfg.tail_band()), cfg.tail_tol);
  h.values = Mat::Zero(im.size(), re.size());
  std::vector<double> tails(im.size() * re.size());
#pragma omp parallel for collapse(2) schedule(dynamic, 4)
  for (std::size_t i = 0; i < im.size(); ++i)
    for (std::size_t j = 0; j < re.size(); ++j) {
      if (std::abs(cplx{re[j], im[i]} - disk.center) > disk.radius) continue;
      const auto moved = apply_displacement(DisplacementVector::from_alpha({re[j], im[i]}), psi, cfg);
      tails[i * re.size() + j] = moved.tail_population(cfg.tail_band());
      h.values(i, j) = std::norm(chi.amp().dot(moved.amp()));
    }
  for (double t : tails) h.report.absorb(t, cfg.tail_tol);
  if (!h.report.ok) throw TruncationError("toc_heatmap: tail population exceeds tail_tol");
  return h;
}

double participation_ratio(const Mat& h) {
  const double s = h.sum(), q = h.squaredNorm();
  if (q <= 0.0) throw NumericalAbort("participation ratio of an all-zero map");
  return s * s / q;
}

}  // namespace cvscramble
