#include "cvscramble/random_circuits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cvscramble/gaussian_state.hpp"
#include "cvscramble/stats.hpp"
#include "cvscramble/symplectic.hpp"

namespace cvscramble {

namespace {

constexpr std::uint64_t kBondStream = 1;
constexpr std::uint64_t kSqueezeStream = 2;
constexpr std::uint64_t kWalkStream = 3;

inline int mod2(int x) { return ((x % 2) + 2) % 2; }

Mat bond_symplectic(const std::array<cplx, 4>& u) {
  CMat U(2, 2);
  U << u[0], u[1], u[2], u[3];
  return passive_from_unitary(U);
}

}  // namespace

void validate(const CircuitConfig& c) {
  if (c.L < 1) throw ParameterError("L must be >= 1");
  if (c.T < 1) throw ParameterError("T must be >= 1");
  if (c.samples < 1) throw ParameterError("samples must be >= 1");
  if (!(c.R >= 0.0) || !std::isfinite(c.R)) throw ParameterError("R must be finite and >= 0");
}

// ---- single mode ----------------------------------------------------------

WalkStats single_mode_walk(int T, SqueezeDist dist, long samples, std::uint64_t seed) {
  if (T < 1 || samples < 1) throw ParameterError("T and samples must be positive");
  if (!(dist.lo >= 0.0) || dist.hi < dist.lo) throw ParameterError("squeezing range must satisfy 0 <= lo <= hi");
  std::vector<double> r(static_cast<std::size_t>(samples) * (T + 1));

#pragma omp parallel for schedule(dynamic, 16)
  for (long s = 0; s < samples; ++s) {
    auto g = SplitMix64::keyed(seed, kWalkStream, static_cast<std::uint64_t>(s), 0);
    // S = U diag(e^r, e^-r) V^T; only U and r affect later singular values,
    // and carrying them avoids the cancellation of a raw product at large r.
    Eigen::Matrix2d U = Eigen::Matrix2d::Identity();
    double rt = 0.0;
    double* out = r.data() + static_cast<std::size_t>(s) * (T + 1);
    out[0] = 0.0;
    for (int t = 1; t <= T; ++t) {
      const double a = 2.0 * std::numbers::pi * g.uniform();
      const double b = 2.0 * std::numbers::pi * g.uniform();
      const double sq = dist.sample(g);
      Eigen::Matrix2d R1, R2, Z;
      R1 << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
      R2 << std::cos(b), std::sin(b), -std::sin(b), std::cos(b);
      Z << std::exp(-sq), 0.0, 0.0, std::exp(sq);
      Eigen::Matrix2d A = R2 * Z * R1 * U;
      A.col(1) *= std::exp(-2.0 * rt);
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullU);
      rt += std::log(svd.singularValues()[0]);
      U = svd.matrixU();
      out[t] = rt;
    }
  }

  WalkStats w;
  w.mean.resize(T + 1);
  w.var.resize(T + 1);
  std::vector<double> col(samples);
  for (int t = 0; t <= T; ++t) {
    for (long s = 0; s < samples; ++s) col[s] = r[static_cast<std::size_t>(s) * (T + 1) + t];
    const auto ms = mean_std(col);
    w.mean[t] = ms.mean;
    w.var[t] = ms.stddev * ms.stddev;
  }
  w.final_r = col;
  return w;
}

Histogram histogram(const std::vector<double>& xs, int bins) {
  if (bins < 1) throw ParameterError("bins must be >= 1");
  Histogram h;
  h.counts.assign(bins, 0);
  if (xs.empty()) return h;
  auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  h.lo = *mn;
  h.hi = *mx > *mn ? *mx : *mn + 1.0;
  const double w = (h.hi - h.lo) / bins;
  for (double x : xs) {
    int k = static_cast<int>((x - h.lo) / w);
    h.counts[std::clamp(k, 0, bins - 1)]++;
  }
  return h;
}

// ---- brickwork ------------------------------------------------------------

std::array<cplx, 4> haar_u2(SplitMix64& g) {
  std::normal_distribution<double> n01;
  double v[4];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = n01(g);
      norm += x * x;
    }
  } while (norm < 1e-300);
  norm = std::sqrt(norm);
  const cplx a(v[0] / norm, v[1] / norm), b(v[2] / norm, v[3] / norm);
  const cplx ph = std::polar(1.0, 2.0 * std::numbers::pi * g.uniform());
  return {ph * a, ph * b, -ph * std::conj(b), ph * std::conj(a)};
}

std::array<cplx, 4> BrickworkCircuit::bond_unitary(int t, int x) const {
  auto g = SplitMix64::keyed(seed ^ kBondStream, static_cast<std::uint64_t>(sample), static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(static_cast<std::int64_t>(x)));
  return haar_u2(g);
}

double BrickworkCircuit::squeeze(int t, int x) const {
  auto g = SplitMix64::keyed(seed ^ kSqueezeStream, static_cast<std::uint64_t>(sample), static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(static_cast<std::int64_t>(x)));
  return R * g.uniform();
}

Mat brickwork_field(const CircuitConfig& cfg, long sample) {
  validate(cfg);
  const int L = cfg.L, T = cfg.T, M = 2 * L + 1;
  const BrickworkCircuit circ{cfg.seed, sample, cfg.R};
  std::vector<cplx> z(M, cplx(0.0));
  z[L] = 1.0;
  Mat f = Mat::Zero(T + 1, M);
  f(0, L) = 1.0;
  for (int t = 0; t < T; ++t) {
    const int reach = std::min(L, t + 1);
    for (int x = -reach; x < reach; ++x) {
      if (!BrickworkCircuit::bond_active(t, x) || x + 1 > L) continue;
      const auto u = circ.bond_unitary(t, x);
      cplx& z1 = z[x + L];
      cplx& z2 = z[x + 1 + L];
      // U^dagger acting on (z1, z2)
      const cplx n1 = std::conj(u[0]) * z1 + std::conj(u[2]) * z2;
      const cplx n2 = std::conj(u[1]) * z1 + std::conj(u[3]) * z2;
      z1 = n1;
      z2 = n2;
    }
    for (int x = -reach; x <= reach; ++x) {
      const double r = circ.squeeze(t, x);
      cplx& zx = z[x + L];
      zx = cplx(zx.real() * std::exp(r), zx.imag() * std::exp(-r));
    }
    for (int i = 0; i < M; ++i) f(t + 1, i) = std::norm(z[i]);
  }
  return f;
}

BrickworkResult brickwork_run(const CircuitConfig& cfg, const std::vector<double>& n_values, bool keep_fields) {
  validate(cfg);
  for (double n : n_values)
    if (!(n > 0.0)) throw ParameterError("ensemble width n must be > 0");
  const int L = cfg.L, T = cfg.T, M = 2 * L + 1;
  BrickworkResult res;
  res.L = L;
  res.T = T;
  res.samples = cfg.samples;
  res.R = cfg.R;
  res.n_values = n_values;
  res.fbar = Mat::Zero(T + 1, M);
  res.otoc.assign(n_values.size(), Mat::Zero(T + 1, M));
  res.F = Mat::Zero(cfg.samples, T + 1);

  const long chunk = 16;
  std::vector<Mat> buf(chunk);
  std::vector<double> outside(chunk);
  for (long s0 = 0; s0 < cfg.samples; s0 += chunk) {
    const long s1 = std::min(cfg.samples, s0 + chunk);
#pragma omp parallel for schedule(dynamic, 1)
    for (long s = s0; s < s1; ++s) {
      buf[s - s0] = brickwork_field(cfg, s);
      double worst = 0.0;
      const Mat& f = buf[s - s0];
      for (int t = 0; t <= T; ++t)
        for (int i = 0; i < M; ++i)
          if (std::abs(i - L) > t) worst = std::max(worst, f(t, i));
      outside[s - s0] = worst;
    }
    // sequential reduction keeps results independent of thread count
    for (long s = s0; s < s1; ++s) {
      const Mat& f = buf[s - s0];
      res.fbar += f;
      for (std::size_t k = 0; k < n_values.size(); ++k) res.otoc[k] += (-n_values[k] * f.array()).exp().matrix();
      res.F.row(s) = f.rowwise().sum().transpose();
      res.max_outside_lightcone = std::max(res.max_outside_lightcone, outside[s - s0]);
      if (keep_fields) res.fields.push_back(f);
    }
  }
  const double inv = 1.0 / static_cast<double>(cfg.samples);
  res.fbar *= inv;
  for (auto& o : res.otoc) o *= inv;
  res.Fbar.resize(T + 1);
  res.lnF_mean.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    KahanSum a, b;
    for (long s = 0; s < cfg.samples; ++s) {
      a.add(res.F(s, t));
      b.add(std::log(res.F(s, t)));
    }
    res.Fbar[t] = a.value() * inv;
    res.lnF_mean[t] = b.value() * inv;
  }
  return res;
}

Mat avg_otoc_field(const std::vector<Mat>& fields, double n) {
  if (fields.empty()) throw ParameterError("no fields to average");
  if (!(n > 0.0)) throw ParameterError("ensemble width n must be > 0");
  Mat acc = Mat::Zero(fields[0].rows(), fields[0].cols());
  for (const auto& f : fields) {
    if (f.rows() != acc.rows() || f.cols() != acc.cols()) throw DimensionError("field shapes differ");
    acc += (-n * f.array()).exp().matrix();
  }
  return acc / static_cast<double>(fields.size());
}

std::vector<int> wavefront(const Mat& c2, double threshold) {
  const int M = static_cast<int>(c2.cols());
  if (M % 2 == 0) throw DimensionError("field must have 2L+1 columns");
  const int L = M / 2;
  std::vector<int> xf(c2.rows(), -1);
  for (int t = 0; t < c2.rows(); ++t)
    for (int i = 0; i < M; ++i)
      if (c2(t, i) < threshold) xf[t] = std::max(xf[t], std::abs(i - L));
  return xf;
}

double annealed_growth_rate(double R) {
  if (R <= 1e-6) return 2.0 * R * R / 3.0;
  return std::log(std::sinh(2.0 * R) / (2.0 * R));
}

double binomial_velocity(double c) {
  if (!(c >= 0.0)) throw ParameterError("growth rate must be >= 0");
  if (c >= std::numbers::ln2) return 1.0;
  if (c == 0.0) return 0.0;
  // c + h((1+v)/2) - ln 2 = 0, h the natural binary entropy; decreasing in v
  auto g = [c](double v) {
    const double p = 0.5 * (1.0 + v), q = 1.0 - p;
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (q > 0.0) h -= q * std::log(q);
    return c + h - std::numbers::ln2;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

HydroFit fit_hydro(const BrickworkResult& r, std::size_t n_index, double threshold, GrowthEstimator est) {
  if (n_index >= r.otoc.size()) throw ParameterError("n index out of range");
  const int T = r.T, L = r.L;
  HydroFit h;

  std::vector<double> t1, y1, y2;
  h.x2.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 2 * L + 1; ++i) {
      const double x = i - L;
      num += x * x * r.fbar(t, i);
      den += r.fbar(t, i);
    }
    h.x2[t] = num / den;
  }
  for (int t = T / 4; t <= T; ++t) {
    t1.push_back(t);
    y1.push_back(est == GrowthEstimator::LogOfMean ? std::log(r.Fbar[t]) : r.lnF_mean[t]);
    y2.push_back(h.x2[t]);
  }
  const auto fc = linear_fit(t1, y1);
  const auto fd = linear_fit(t1, y2);
  h.c_R = fc.slope;
  h.c_R_residual = fc.rms_residual;
  h.D = 0.5 * fd.slope;
  h.D_residual = fd.rms_residual;

  h.front = wavefront(r.otoc[n_index], threshold);
  std::vector<double> t3, y3;
  for (int t = T / 2; t <= T; ++t)
    if (h.front[t] >= 0) {
      t3.push_back(t);
      y3.push_back(h.front[t]);
    }
  if (t3.size() >= 2) {
    const auto fv = linear_fit(t3, y3);
    h.v_B = fv.slope;
    h.v_B_residual = fv.rms_residual;
  }
  const double c = std::max(0.0, h.c_R);
  h.v_hydro = std::sqrt(4.0 * std::max(0.0, h.D) * c);
  h.v_hydro_half = std::sqrt(2.0 * c);
  h.v_binomial = binomial_velocity(c);
  return h;
}

// ---- entanglement ---------------------------------------------------------

namespace {

// Covariance of a window of modes [lo, hi], updated in place by local gates.
// After t layers correlations span at most 2t modes, which bounds each update.
struct BandedState {
  int lo, hi, W;
  Mat sigma;
  BandedState(int l, int h) : lo(l), hi(h), W(h - l + 1), sigma(0.5 * Mat::Identity(2 * (h - l + 1), 2 * (h - l + 1))) {}

  void bond(int x, const Mat& S4, int band) {
    const int i = x - lo;
    const int c0 = std::max(0, i - band), c1 = std::min(W - 1, i + 1 + band);
    const int n = 2 * (c1 - c0 + 1);
    auto rows = sigma.block(2 * i, 2 * c0, 4, n);
    Mat tmp = S4 * rows;
    rows = tmp;
    auto cols = sigma.block(2 * c0, 2 * i, n, 4);
    Mat tmp2 = cols * S4.transpose();
    cols = tmp2;
  }

  void squeeze(int x, double r, int band) {
    const int i = x - lo;
    const int c0 = std::max(0, i - band), c1 = std::min(W - 1, i + band);
    const int n = 2 * (c1 - c0 + 1);
    const double a = std::exp(-r), b = std::exp(r);
    sigma.block(2 * i, 2 * c0, 1, n) *= a;
    sigma.block(2 * i + 1, 2 * c0, 1, n) *= b;
    sigma.block(2 * c0, 2 * i, n, 1) *= a;
    sigma.block(2 * c0, 2 * i + 1, n, 1) *= b;
  }
};

double largest_eigenvalue(const Mat& A) {
  Vec v = Vec::Ones(A.rows()).normalized();
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec w = A * v;
    const double nl = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it > 5 && std::abs(nl - lam) <= 1e-6 * std::abs(nl)) return nl;
    lam = nl;
  }
  return lam;
}

void evolve_steps(BandedState& st, const BrickworkCircuit& circ, int t0, int t1, const std::vector<int>& cuts,
                  int horizon) {
  auto in_region = [&](int x0, int x1, int t) {
    for (int c : cuts) {
      const int d = std::min(std::abs(x0 - c), std::abs(x1 - c));
      if (d <= horizon - t + 2) return true;
    }
    return false;
  };
  for (int t = t0; t < t1; ++t) {
    const int band = 2 * t + 2;
    for (int x = st.lo; x < st.hi; ++x) {
      if (!BrickworkCircuit::bond_active(t, x) || !in_region(x, x + 1, t)) continue;
      st.bond(x, bond_symplectic(circ.bond_unitary(t, x)), band);
    }
    for (int x = st.lo; x <= st.hi; ++x) {
      if (!in_region(x, x, t)) continue;
      st.squeeze(x, circ.squeeze(t, x), band);
    }
  }
}

}  // namespace

Mat brickwork_covariance(const CircuitConfig& cfg, long sample, int t) {
  validate(cfg);
  if (t < 0) throw ParameterError("t must be >= 0");
  BandedState st(-cfg.L, cfg.L);
  const BrickworkCircuit circ{cfg.seed, sample, cfg.R};
  const std::vector<int> all{0};
  // horizon large enough that every gate lies inside the region
  evolve_steps(st, circ, 0, t, all, t + 2 * cfg.L + 4);
  return st.sigma;
}

EntanglementResult entanglement_run(const CircuitConfig& cfg, const EntanglementOptions& opt) {
  validate(cfg);
  if (opt.cuts.empty()) throw ParameterError("at least one cut is required");
  if (opt.eval_every < 1) throw ParameterError("eval_every must be >= 1");
  for (int c : opt.cuts)
    if (c <= -cfg.L || c > cfg.L) throw ParameterError("cut must lie in (-L, L]");
  const int T = cfg.T, L = cfg.L;
  const auto [cmin, cmax] = std::minmax_element(opt.cuts.begin(), opt.cuts.end());

  EntanglementResult res;
  res.cuts = opt.cuts;
  res.window_lo = std::max(-L, *cmin - T - 3);
  res.window_hi = std::min(L, *cmax + T + 3);
  for (int t = opt.eval_every; t <= T; t += opt.eval_every) res.times.push_back(t);
  if (res.times.empty() || res.times.back() != T) res.times.push_back(T);
  const int nt = static_cast<int>(res.times.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.S.assign(opt.cuts.size(), Mat::Constant(cfg.samples, nt, nan));
  res.horizon.assign(cfg.samples, T);

#pragma omp parallel for schedule(dynamic, 1)
  for (long s = 0; s < cfg.samples; ++s) {
    BandedState st(res.window_lo, res.window_hi);
    const BrickworkCircuit circ{cfg.seed, s, cfg.R};
    int t_prev = 0;
    for (int k = 0; k < nt; ++k) {
      const int t = res.times[k];
      evolve_steps(st, circ, t_prev, t, opt.cuts, T);
      t_prev = t;
      // pure state: eigenvalues of sigma come in pairs (l, 1/(4l))
      const double lmax = largest_eigenvalue(st.sigma);
      if (!(2.0 * lmax * 2.0 * lmax <= opt.condition_abort)) {
        res.horizon[s] = k > 0 ? res.times[k - 1] : 0;
        break;
      }
      for (std::size_t c = 0; c < opt.cuts.size(); ++c) {
        const int left = opt.cuts[c] - st.lo;
        const int right = st.W - left;
        res.S[c](s, k) = left <= right ? block_entropy(st.sigma, 0, left) : block_entropy(st.sigma, left, right);
      }
    }
  }

  res.S_center = res.S[0];
  res.h.assign(nt, nan);
  res.w.assign(nt, nan);
  res.live.assign(nt, 0);
  for (long s = 0; s < cfg.samples; ++s)
    if (res.horizon[s] < T) ++res.aborted;
  for (int k = 0; k < nt; ++k) {
    std::vector<double> v;
    for (long s = 0; s < cfg.samples; ++s)
      if (std::isfinite(res.S_center(s, k))) v.push_back(res.S_center(s, k));
    res.live[k] = static_cast<long>(v.size());
    if (v.size() >= 2) {
      const auto ms = mean_std(v);
      res.h[k] = ms.mean;
      res.w[k] = ms.stddev;
    }
  }
  return res;
}

}  // namespace cvscramble
