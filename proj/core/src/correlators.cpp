#include "cvscramble/correlators.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "cvscramble/stats.hpp"

namespace cvscramble {

namespace {

Mat psd_factor(const Mat& V) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (V + V.transpose()));
  Vec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal();
}

Vec psd_eigenvalues(const Mat& V) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (V + V.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void require_psd(const Mat& V) {
  if (V.rows() != V.cols() || V.rows() % 2 != 0) throw DimensionError("ensemble covariance must be square, even size");
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, V.cwiseAbs().maxCoeff()))
    throw ParameterError("ensemble covariance not symmetric");
  if (V.size() && psd_eigenvalues(V).minCoeff() < -1e-9 * std::max(1.0, V.cwiseAbs().maxCoeff()))
    throw ParameterError("ensemble covariance not positive semidefinite");
}

CorrelatorResult reduce_real(const std::vector<double>& xs) {
  MeanStd ms = mean_std(xs);
  CorrelatorResult r;
  r.value = ms.mean;
  r.magnitude = std::abs(ms.mean);
  r.stderr_ = ms.stderr_;
  r.samples = static_cast<long>(xs.size());
  return r;
}

}  // namespace

DisplacementEnsemble::DisplacementEnsemble(DisplacementVector xi0, Mat V) : xi0_(std::move(xi0)), V_(std::move(V)) {
  if (V_.rows() != xi0_.vec().size()) throw DimensionError("ensemble mean/covariance size mismatch");
  require_psd(V_);
  factor_ = psd_factor(V_);
}

DisplacementEnsemble DisplacementEnsemble::isotropic(int modes, double n) {
  if (!(n > 0)) throw ParameterError("ensemble width n must be positive");
  DisplacementEnsemble e(DisplacementVector::zero(modes), 0.5 * n * Mat::Identity(2 * modes, 2 * modes));
  e.isotropic_ = true;
  e.n_ = n;
  return e;
}

DisplacementEnsemble DisplacementEnsemble::isotropic_on_mode(int mode, int modes, double n) {
  if (!(n > 0)) throw ParameterError("ensemble width n must be positive");
  if (mode < 0 || mode >= modes) throw ParameterError("mode index out of range");
  Mat V = Mat::Zero(2 * modes, 2 * modes);
  V(2 * mode, 2 * mode) = V(2 * mode + 1, 2 * mode + 1) = 0.5 * n;
  DisplacementEnsemble e(DisplacementVector::zero(modes), V);
  e.n_ = n;
  return e;
}

DisplacementEnsemble DisplacementEnsemble::point(DisplacementVector xi) {
  const auto m = xi.vec().size();
  return DisplacementEnsemble(std::move(xi), Mat::Zero(m, m));
}

DisplacementVector DisplacementEnsemble::sample(Rng& rng) const {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = g(rng);
  return DisplacementVector(xi0_.vec() + factor_ * z);
}

EnsembleSampler sampler_of(const DisplacementEnsemble& e) {
  return [e](Rng& rng) { return e.sample(rng); };
}

EnsembleSampler discrete_sampler(std::vector<DisplacementVector> points) {
  if (points.empty()) throw ParameterError("discrete ensemble needs at least one point");
  return [pts = std::move(points)](Rng& rng) {
    std::uniform_int_distribution<std::size_t> u(0, pts.size() - 1);
    return pts[u(rng)];
  };
}

cplx GaussianDynamics::otoc(const DisplacementVector& xi1, const DisplacementVector& xi2) const {
  Vec a = Sinv_ * xi1.vec();
  return std::polar(1.0, -2.0 * a.dot(omega_times(xi2.vec())));
}

cplx CubicGateDynamics::otoc(const DisplacementVector& xi1, const DisplacementVector& xi2) const {
  return otoc_cubic(xi1.alpha(0), xi2.alpha(0), t_, gamma_, n_th_).value;
}

CorrelatorResult toc_gaussian(const GaussianUnitary& U, const DisplacementVector& xi1, const DisplacementVector& xi2,
                              const GaussianState& state) {
  PhasedDisplacement e = evolve_displacement(U, xi1);
  PhasedDisplacement p = displacement_product(e.xi, xi2);
  return CorrelatorResult::exact(e.phase * p.phase * char_fn(state, p.xi));
}

CorrelatorResult otoc_gaussian(const GaussianUnitary& U, const DisplacementVector& xi1, const DisplacementVector& xi2) {
  if (xi1.vec().size() != xi2.vec().size() || xi1.modes() != U.modes())
    throw DimensionError("otoc_gaussian: mode count mismatch");
  GaussianDynamics g(U);
  return CorrelatorResult::exact(g.otoc(xi1, xi2));
}

CorrelatorResult otoc_cubic(cplx alpha, cplx beta, double t, double gamma, double n_th) {
  if (n_th < 0) throw ParameterError("n_th must be >= 0");
  const double ra = alpha.real(), rb = beta.real();
  const double theta = 2.0 * (std::conj(alpha) * beta).imag() + 2.0 * gamma * t * ra * rb * (ra + rb);
  const double x = ra * rb * t * gamma;
  return CorrelatorResult::exact(std::polar(std::exp(-2.0 * (2.0 * n_th + 1.0) * x * x), theta));
}

double avg_otoc_displacement(const DisplacementVector& xi, double n) {
  if (!(n > 0)) throw ParameterError("ensemble width n must be positive");
  return std::exp(-n * xi.vec().squaredNorm());
}

CorrelatorResult avg_otoc_quasi(const GaussianUnitary& U, int w, int v, double n) {
  const int N = U.modes();
  if (!(n > 0)) throw ParameterError("ensemble width n must be positive");
  if (w < 0 || w >= N || v < 0 || v >= N) throw ParameterError("mode index out of range");
  Mat Si = symplectic_inverse(U.S.mat());
  Mat B = Si.block(2 * v, 2 * w, 2, 2);
  Mat M = Mat::Identity(2, 2) + n * n * B.transpose() * B;
  return CorrelatorResult::exact(1.0 / std::sqrt(M.determinant()));
}

CorrelatorResult avg_otoc_quasi_mc(const GaussianUnitary& U, int w, int v, double n, long samples,
                                   std::uint64_t seed) {
  const int N = U.modes();
  if (!(n > 0) || samples < 1) throw ParameterError("avg_otoc_quasi_mc: bad parameters");
  if (w < 0 || w >= N || v < 0 || v >= N) throw ParameterError("mode index out of range");
  Mat Si = symplectic_inverse(U.S.mat());
  Mat B = Si.block(2 * v, 2 * w, 2, 2);
  const double sd = std::sqrt(0.5 * n);
  std::vector<double> vals(samples);
#pragma omp parallel for schedule(static)
  for (long s = 0; s < samples; ++s) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> g(0.0, sd);
    Eigen::Vector2d xw(g(rng), g(rng)), xv(g(rng), g(rng));
    Eigen::Vector2d a = B * xw;  // mode-v block of S^{-1} xi_w
    // a^T Omega xv on one mode
    double s1 = a[0] * xv[1] - a[1] * xv[0];
    vals[s] = std::cos(-2.0 * s1);  // imaginary part averages to zero by symmetry
  }
  return reduce_real(vals);
}

double quasi_closed_identity(double n) { return 1.0 / (1.0 + n * n); }

double quasi_closed_squeeze(double r, double n) {
  return 1.0 / std::sqrt(1.0 + std::pow(n, 4) + 2.0 * n * n * std::cosh(2.0 * r));
}

double quasi_closed_passive(double amp, double n) { return 1.0 / (1.0 + amp * amp * n * n); }

double quasi_closed_two_mode_squeeze(double r, double n) {
  const double s = std::sinh(r);
  return 1.0 / (1.0 + s * s * n * n);
}

double avg_otoc_ensemble(const Mat& V, double n) {
  require_psd(V);
  Vec lam = psd_eigenvalues(V);
  double out = 1.0;
  for (Eigen::Index l = 0; l < lam.size(); ++l) out /= std::sqrt(1.0 + 2.0 * std::max(0.0, lam[l]) * n);
  return out;
}

double avg_otoc_ensemble_projected(const Mat& V, int w, double n) {
  if (w < 0 || 2 * w + 1 >= V.rows()) throw ParameterError("mode index out of range");
  return avg_otoc_ensemble(V.block(2 * w, 2 * w, 2, 2), n);
}

CorrelatorResult nongaussianity_measure(const OtocDynamics& dyn, const EnsembleSampler& e1, const EnsembleSampler& e2,
                                        long samples, std::uint64_t seed) {
  if (dyn.is_gaussian()) return CorrelatorResult::exact(1.0);
  if (samples < 1) throw ParameterError("nongaussianity_measure: samples must be >= 1");
  std::vector<double> vals(samples);
  for (long s = 0; s < samples; ++s) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(s));
    DisplacementVector x1 = e1(rng);
    DisplacementVector x2 = e2(rng);
    vals[s] = std::norm(dyn.otoc(x1, x2));
  }
  return reduce_real(vals);
}

LossResult loss_channel_displacement(cplx alpha, double eta, double N_E) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("loss channel: eta must lie in [0,1]");
  if (N_E < 0) throw ParameterError("loss channel: N_E must be >= 0");
  return {std::exp(-(1.0 - eta) * std::norm(alpha) * (2.0 * N_E + 1.0) / 2.0), std::sqrt(eta) * alpha};
}

double frame_potential_gaussian(const Mat& V, double n_th) {
  require_psd(V);
  if (n_th < 0) throw ParameterError("n_th must be >= 0");
  Vec lam = psd_eigenvalues(V);
  double out = 1.0;
  for (Eigen::Index l = 0; l < lam.size(); ++l) out /= std::sqrt(1.0 + 4.0 * std::max(0.0, lam[l]) * (2.0 * n_th + 1.0));
  return out;
}

double frame_potential_high_temperature(const Mat& V, double n_th) {
  const int N = static_cast<int>(V.rows() / 2);
  if (!(n_th > 0)) throw ParameterError("high-temperature form needs n_th > 0");
  return std::pow(1.0 / (8.0 * n_th), N) / std::sqrt(V.determinant());
}

CorrelatorResult frame_potential_mc(const EnsembleSampler& e, const GaussianState& state, int k, long samples,
                                    std::uint64_t seed) {
  if (k < 1) throw ParameterError("frame potential order k must be >= 1");
  if (samples < 1) throw ParameterError("frame_potential_mc: samples must be >= 1");
  std::vector<double> vals(samples);
  for (long s = 0; s < samples; ++s) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(s));
    DisplacementVector a = e(rng);
    DisplacementVector b = e(rng);
    DisplacementVector diff(b.vec() - a.vec());
    // |tr(rho D(a)^dag D(b))|^2 = |chi(b - a)|^2
    vals[s] = std::pow(std::norm(char_fn(state, diff)), k);
  }
  return reduce_real(vals);
}

double twice_regulated_J(double n, double n_th, int N) {
  if (n < 0 || n_th < 0 || N < 1) throw ParameterError("twice_regulated_J: bad parameters");
  const double num = (1.0 + n + 2.0 * n_th) * (1.0 + n + 2.0 * n_th);
  const double den = (1.0 + n) * (1.0 + n) + 4.0 * n * n_th;
  return std::pow(num / den, N);
}

double trace_sqrt_rho(const GaussianState& state) {
  SymplecticSpectrum sp = symplectic_eigenvalues(state.sigma());
  double out = 1.0;
  for (Eigen::Index k = 0; k < sp.nu.size(); ++k) {
    double nk = sp.nu[k] - 0.5;
    if (nk < 1e-12) nk = 0.0;  // rounding near a pure mode; sqrt(n) would amplify it
    // sum_j sqrt(n^j/(n+1)^{j+1}) = 1/(sqrt(n+1) - sqrt(n))
    out *= 1.0 / (std::sqrt(nk + 1.0) - std::sqrt(nk));
  }
  return out;
}

double H_bound(int k, const GaussianState& state) {
  if (k == 1) return 1.0;
  if (k == 2) return 2.0 + 2.0 * std::pow(trace_sqrt_rho(state), 4);
  throw ParameterError("H_bound: only k = 1, 2 have closed forms");
}

double ensemble_volume(const DisplacementEnsemble& e, const GaussianState& thermal_state) {
  const int N = e.modes();
  if (thermal_state.modes() != N) throw DimensionError("ensemble_volume: mode count mismatch");
  const Mat& sg = thermal_state.sigma();
  const double c = sg(0, 0);
  if ((sg - c * Mat::Identity(2 * N, 2 * N)).cwiseAbs().maxCoeff() > 1e-12 || thermal_state.mu().norm() > 0)
    throw ParameterError("ensemble_volume: analytic path needs a thermal state");
  const double n_th = c - 0.5;
  if (!(n_th > 0)) throw ParameterError("ensemble_volume: needs n_th > 0");
  return std::pow(1.0 / (8.0 * n_th), N) / frame_potential_gaussian(e.covariance(), n_th);
}

double ensemble_volume_infinite_temperature(const Mat& V) { return std::sqrt(std::max(0.0, V.determinant())); }

double projected_volume(const Mat& V, int w) {
  if (w < 0 || 2 * w + 1 >= V.rows()) throw ParameterError("mode index out of range");
  return ensemble_volume_infinite_temperature(V.block(2 * w, 2 * w, 2, 2));
}

Mat evolve_ensemble_covariance(const Mat& V, const GaussianUnitary& U) {
  if (V.rows() != 2 * U.modes()) throw DimensionError("ensemble/unitary mode mismatch");
  Mat Si = symplectic_inverse(U.S.mat());
  Mat out = Si * V * Si.transpose();
  return 0.5 * (out + out.transpose());
}

double liouville_check(const DisplacementEnsemble& e, const GaussianUnitary& U) {
  const double v0 = ensemble_volume_infinite_temperature(e.covariance());
  const double v1 = ensemble_volume_infinite_temperature(evolve_ensemble_covariance(e.covariance(), U));
  if (v0 == 0.0) return v1 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(v1 - v0) / v0;
}

cplx cubic_c2_from_c1_transform(cplx alpha, cplx beta, double t, double gamma, double n_th, int points) {
  // |C1(alpha, beta'; t)|^2 ~ delta(Re beta' - Re alpha) G(Im beta'), G Gaussian with
  // mean Im alpha - gamma t (Re alpha)^2 and variance (2 n_th + 1) (gamma t Re alpha)^2.
  const double ra = alpha.real();
  const double mu = alpha.imag() - gamma * t * ra * ra;
  const double s = std::sqrt(2.0 * n_th + 1.0) * std::abs(gamma * t * ra);
  if (s == 0.0) return std::polar(1.0, -2.0 * (beta.real() * mu - beta.imag() * ra));
  if (points < 3) throw ParameterError("transform needs at least 3 nodes");
  const double lo = mu - 6.0 * s, hi = mu + 6.0 * s, h = (hi - lo) / (points - 1);
  cplx acc = 0.0;
  double norm = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = lo + i * h;
    const double wgt = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    const double g = std::exp(-0.5 * (x - mu) * (x - mu) / (s * s));
    // exp(-2 i beta^T Omega xi), xi = (Re alpha, x)
    const double phase = -2.0 * (beta.real() * x - beta.imag() * ra);
    acc += wgt * g * std::polar(1.0, phase);
    norm += wgt * g;
  }
  return acc / norm;
}

}  // namespace cvscramble
