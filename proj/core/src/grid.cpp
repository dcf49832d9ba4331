#include "cvscramble/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace cvscramble {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

struct AlignedBuffer {
  cplx* p = nullptr;
  std::size_t n = 0;
  explicit AlignedBuffer(std::size_t count) : p(static_cast<cplx*>(fftw_malloc(sizeof(cplx) * count))), n(count) {
    if (!p) throw std::bad_alloc();
  }
  ~AlignedBuffer() { fftw_free(p); }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
};

double wavenumber(int i, int n, double dx) {
  const int j = i < n / 2 ? i : i - n;
  return 2.0 * std::numbers::pi * j / (n * dx);
}

// vacuum profile of variance hbar/2 (unnormalized)
double vacuum_profile(double q, double hbar) { return std::exp(-q * q / (2.0 * hbar)); }

}  // namespace

void Grid2D::validate() const {
  if (n < 8 || n % 2) throw ParameterError("grid points per axis must be even and >= 8");
  if (!(extent > 0.0) || !(dt > 0.0) || !(mass > 0.0) || !(hbar > 0.0))
    throw ParameterError("extent, dt, mass and hbar must be positive");
}

double Grid2D::k(int i) const { return wavenumber(i, n, dx()); }

void Grid1D::validate() const {
  if (n < 8 || n % 2) throw ParameterError("grid points must be even and >= 8");
  if (!(extent > 0.0) || !(dt > 0.0) || !(mass > 0.0) || !(hbar > 0.0))
    throw ParameterError("extent, dt, mass and hbar must be positive");
}

double Grid1D::k(int i) const { return wavenumber(i, n, dx()); }

double henon_heiles_potential(double q1, double q2, double U, double lambda) {
  return 0.5 * U * (q1 * q1 + q2 * q2) + lambda * (q1 * q1 * q2 - q2 * q2 * q2 / 3.0);
}

double HenonHeiles::operator()(double q1, double q2) const { return henon_heiles_potential(q1, q2, U, lambda); }

// ---- Wavefunction2D --------------------------------------------------------

Wavefunction2D::Wavefunction2D(const Grid2D& g) : g_(g), psi_(static_cast<std::size_t>(g.n) * g.n, cplx(0.0)) {
  g.validate();
}

double Wavefunction2D::norm() const {
  double s = 0.0;
  for (const auto& z : psi_) s += std::norm(z);
  return std::sqrt(s * g_.dx() * g_.dx());
}

cplx Wavefunction2D::overlap(const Wavefunction2D& o) const {
  if (o.psi_.size() != psi_.size()) throw DimensionError("wavefunctions live on different grids");
  cplx s = 0.0;
  for (std::size_t i = 0; i < psi_.size(); ++i) s += std::conj(psi_[i]) * o.psi_[i];
  return s * g_.dx() * g_.dx();
}

double Wavefunction2D::edge_population(double frac) const {
  const int n = g_.n, w = std::max(1, static_cast<int>(frac * n));
  double edge = 0.0, all = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double p = std::norm(at(i, j));
      all += p;
      if (i < w || i >= n - w || j < w || j >= n - w) edge += p;
    }
  return all > 0.0 ? edge / all : 0.0;
}

Mat Wavefunction2D::density() const {
  Mat d(g_.n, g_.n);
  for (int i = 0; i < g_.n; ++i)
    for (int j = 0; j < g_.n; ++j) d(i, j) = std::norm(at(i, j));
  return d;
}

Wavefunction2D coherent_packet(const Grid2D& g, cplx gamma1, cplx gamma2) {
  Wavefunction2D w(g);
  const double s = std::sqrt(2.0 * g.hbar);
  const double q1 = s * gamma1.real(), p1 = s * gamma1.imag();
  const double q2 = s * gamma2.real(), p2 = s * gamma2.imag();
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    const cplx f1 = vacuum_profile(x - q1, g.hbar) * std::polar(1.0, p1 * (x - 0.5 * q1) / g.hbar);
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      w.at(i, j) = f1 * vacuum_profile(y - q2, g.hbar) * std::polar(1.0, p2 * (y - 0.5 * q2) / g.hbar);
    }
  }
  const double nrm = w.norm();
  for (auto& z : w.data()) z /= nrm;
  return w;
}

// ---- SplitStepSolver -------------------------------------------------------

struct SplitStepSolver::Plans {
  fftw_plan fwd = nullptr, inv = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

SplitStepSolver::SplitStepSolver(const Grid2D& g, const Potential2D& V) : g_(g), plans_(std::make_unique<Plans>()) {
  g.validate();
  const int n = g.n;
  const std::size_t N = static_cast<std::size_t>(n) * n;
  V_.resize(N);
  kin_.resize(N);
  vhalf_.resize(N);
  vfull_.resize(N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      V_[idx] = V(g.coord(i), g.coord(j));
      const double k2 = g.k(i) * g.k(i) + g.k(j) * g.k(j);
      kin_[idx] = std::polar(1.0 / static_cast<double>(N), -g.hbar * k2 * g.dt / (2.0 * g.mass));
      vhalf_[idx] = std::polar(1.0, -V_[idx] * g.dt / (2.0 * g.hbar));
      vfull_[idx] = vhalf_[idx] * vhalf_[idx];
    }
  kin_b_.resize(N);
  vhalf_b_.resize(N);
  vfull_b_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    kin_b_[i] = std::conj(kin_[i]);
    vhalf_b_[i] = std::conj(vhalf_[i]);
    vfull_b_[i] = std::conj(vfull_[i]);
  }
  AlignedBuffer scratch(N);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->fwd = fftw_plan_dft_2d(n, n, as_fftw(scratch.p), as_fftw(scratch.p), FFTW_FORWARD, FFTW_MEASURE);
  plans_->inv = fftw_plan_dft_2d(n, n, as_fftw(scratch.p), as_fftw(scratch.p), FFTW_BACKWARD, FFTW_MEASURE);
  if (!plans_->fwd || !plans_->inv) throw NumericalAbort("FFTW planning failed");
}

SplitStepSolver::~SplitStepSolver() = default;

void SplitStepSolver::fft(std::vector<cplx>& a, bool inverse) const {
  AlignedBuffer buf(a.size());
  std::copy(a.begin(), a.end(), buf.p);
  fftw_execute_dft(inverse ? plans_->inv : plans_->fwd, as_fftw(buf.p), as_fftw(buf.p));
  std::copy(buf.p, buf.p + a.size(), a.begin());
}

void SplitStepSolver::evolve(Wavefunction2D& psi, long steps, bool backward) const {
  if (steps < 0) throw ParameterError("steps must be >= 0");
  if (steps == 0) return;
  auto& d = psi.data();
  const std::size_t N = d.size();
  if (N != V_.size()) throw DimensionError("wavefunction grid differs from solver grid");
  const auto& kin = backward ? kin_b_ : kin_;
  const auto& vh = backward ? vhalf_b_ : vhalf_;
  const auto& vf = backward ? vfull_b_ : vfull_;
  AlignedBuffer buf(N);
  cplx* p = buf.p;
  for (std::size_t i = 0; i < N; ++i) p[i] = d[i] * vh[i];
  for (long s = 0; s < steps; ++s) {
    fftw_execute_dft(plans_->fwd, as_fftw(p), as_fftw(p));
    for (std::size_t i = 0; i < N; ++i) p[i] *= kin[i];
    fftw_execute_dft(plans_->inv, as_fftw(p), as_fftw(p));
    const auto& v = s + 1 < steps ? vf : vh;
    for (std::size_t i = 0; i < N; ++i) p[i] *= v[i];
  }
  std::copy(p, p + N, d.begin());
}

double SplitStepSolver::energy(const Wavefunction2D& psi) const {
  const auto& d = psi.data();
  double pot = 0.0, nrm = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = std::norm(d[i]);
    pot += V_[i] * w;
    nrm += w;
  }
  std::vector<cplx> f = d;
  fft(f, false);
  double kin = 0.0, nk = 0.0;
  const int n = g_.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = std::norm(f[static_cast<std::size_t>(i) * n + j]);
      const double k2 = g_.k(i) * g_.k(i) + g_.k(j) * g_.k(j);
      kin += g_.hbar * g_.hbar * k2 / (2.0 * g_.mass) * w;
      nk += w;
    }
  return pot / nrm + kin / nk;
}

double SplitStepSolver::max_potential() const {
  double m = 0.0;
  for (double v : V_) m = std::max(m, std::abs(v));
  return m;
}

Wavefunction2D apply_displacement(const Wavefunction2D& psi, const DisplacementVector& xi, bool adjoint) {
  if (xi.modes() != 2) throw DimensionError("grid displacement needs a 2-mode vector");
  const Grid2D& g = psi.grid();
  const double sc = std::sqrt(2.0 * g.hbar) * (adjoint ? -1.0 : 1.0);
  const double q1 = sc * xi[0], p1 = sc * xi[1], q2 = sc * xi[2], p2 = sc * xi[3];
  const int n = g.n;
  const std::size_t N = static_cast<std::size_t>(n) * n;
  AlignedBuffer buf(N);
  std::copy(psi.data().begin(), psi.data().end(), buf.p);
  if (q1 != 0.0 || q2 != 0.0) {
    fftw_plan f, b;
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      f = fftw_plan_dft_2d(n, n, as_fftw(buf.p), as_fftw(buf.p), FFTW_FORWARD, FFTW_ESTIMATE);
      b = fftw_plan_dft_2d(n, n, as_fftw(buf.p), as_fftw(buf.p), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(f);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        buf.p[static_cast<std::size_t>(i) * n + j] *=
            std::polar(1.0 / static_cast<double>(N), -(g.k(i) * q1 + g.k(j) * q2));
    fftw_execute(b);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(f);
    fftw_destroy_plan(b);
  }
  Wavefunction2D out(g);
  for (int i = 0; i < n; ++i) {
    const cplx r1 = std::polar(1.0, p1 * (g.coord(i) - 0.5 * q1) / g.hbar);
    for (int j = 0; j < n; ++j)
      out.at(i, j) = buf.p[static_cast<std::size_t>(i) * n + j] * r1 *
                     std::polar(1.0, p2 * (g.coord(j) - 0.5 * q2) / g.hbar);
  }
  return out;
}

GridOtocCurve otoc_grid(const SplitStepSolver& solver, cplx gamma1, cplx gamma2, const DisplacementVector& xi1,
                        const DisplacementVector& xi2, const std::vector<double>& times, const GridOtocOptions& opt) {
  if (times.empty()) throw ParameterError("no times requested");
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
    throw ParameterError("times must be non-negative and ascending");
  const Grid2D& g = solver.grid();
  GridOtocCurve out;
  out.times = times;
  Wavefunction2D u = coherent_packet(g, gamma1, gamma2);
  Wavefunction2D w = apply_displacement(u, xi2);
  const double E0 = solver.energy(u);
  out.report.energy0 = E0;
  auto watch = [&](const Wavefunction2D& s) {
    const double edge = s.edge_population();
    out.report.max_edge_population = std::max(out.report.max_edge_population, edge);
    out.report.max_norm_drift = std::max(out.report.max_norm_drift, std::abs(s.norm() - 1.0));
    if (edge > opt.leakage_tol)
      throw NumericalAbort("otoc_grid: support leakage " + std::to_string(edge) + " exceeds tolerance");
  };
  watch(u);
  watch(w);
  long done = 0;
  for (double t : times) {
    const long steps = std::lround(t / g.dt);
    solver.evolve(u, steps - done);
    solver.evolve(w, steps - done);
    done = steps;
    const double drift = std::abs(solver.energy(u) - E0) / std::max(1.0, std::abs(E0));
    out.report.max_energy_drift = std::max(out.report.max_energy_drift, drift);
    if (drift > opt.energy_tol)
      throw NumericalAbort("otoc_grid: energy drift " + std::to_string(drift) + " exceeds tolerance; reduce dt");
    watch(u);
    watch(w);
    Wavefunction2D a = apply_displacement(w, xi1);
    Wavefunction2D b = apply_displacement(u, xi1);
    watch(a);
    watch(b);
    solver.evolve(a, steps, true);
    solver.evolve(b, steps, true);
    b = apply_displacement(b, xi2);
    watch(a);
    watch(b);
    out.values.push_back(b.overlap(a));
  }
  return out;
}

// ---- one dimension ---------------------------------------------------------

struct SplitStep1D::Plans {
  fftw_plan fwd = nullptr, inv = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

SplitStep1D::SplitStep1D(const Grid1D& g, const std::function<double(double)>& V)
    : g_(g), plans_(std::make_unique<Plans>()) {
  g.validate();
  const int n = g.n;
  kin_.resize(n);
  vhalf_.resize(n);
  for (int i = 0; i < n; ++i) {
    kin_[i] = std::polar(1.0 / n, -g.hbar * g.k(i) * g.k(i) * g.dt / (2.0 * g.mass));
    vhalf_[i] = std::polar(1.0, -V(g.coord(i)) * g.dt / (2.0 * g.hbar));
  }
  kin_b_.resize(n);
  vhalf_b_.resize(n);
  for (int i = 0; i < n; ++i) {
    kin_b_[i] = std::conj(kin_[i]);
    vhalf_b_[i] = std::conj(vhalf_[i]);
  }
  AlignedBuffer scratch(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->fwd = fftw_plan_dft_1d(n, as_fftw(scratch.p), as_fftw(scratch.p), FFTW_FORWARD, FFTW_MEASURE);
  plans_->inv = fftw_plan_dft_1d(n, as_fftw(scratch.p), as_fftw(scratch.p), FFTW_BACKWARD, FFTW_MEASURE);
  if (!plans_->fwd || !plans_->inv) throw NumericalAbort("FFTW planning failed");
}

SplitStep1D::~SplitStep1D() = default;

void SplitStep1D::fft(std::vector<cplx>& a, bool inverse) const {
  AlignedBuffer buf(a.size());
  std::copy(a.begin(), a.end(), buf.p);
  fftw_execute_dft(inverse ? plans_->inv : plans_->fwd, as_fftw(buf.p), as_fftw(buf.p));
  std::copy(buf.p, buf.p + a.size(), a.begin());
}

void SplitStep1D::evolve(std::vector<cplx>& psi, long steps, bool backward) const {
  if (steps < 0) throw ParameterError("steps must be >= 0");
  if (steps == 0) return;
  const int n = g_.n;
  if (static_cast<int>(psi.size()) != n) throw DimensionError("wavefunction grid differs from solver grid");
  const auto& kin = backward ? kin_b_ : kin_;
  const auto& vh = backward ? vhalf_b_ : vhalf_;
  AlignedBuffer buf(n);
  cplx* p = buf.p;
  for (int i = 0; i < n; ++i) p[i] = psi[i] * vh[i];
  for (long s = 0; s < steps; ++s) {
    fftw_execute_dft(plans_->fwd, as_fftw(p), as_fftw(p));
    for (int i = 0; i < n; ++i) p[i] *= kin[i];
    fftw_execute_dft(plans_->inv, as_fftw(p), as_fftw(p));
    for (int i = 0; i < n; ++i) p[i] *= s + 1 < steps ? vh[i] * vh[i] : vh[i];
  }
  std::copy(p, p + n, psi.begin());
}

std::vector<cplx> SplitStep1D::coherent(cplx gamma) const {
  const double s = std::sqrt(2.0 * g_.hbar);
  const double q0 = s * gamma.real(), p0 = s * gamma.imag();
  std::vector<cplx> psi(g_.n);
  double nrm = 0.0;
  for (int i = 0; i < g_.n; ++i) {
    const double x = g_.coord(i);
    psi[i] = vacuum_profile(x - q0, g_.hbar) * std::polar(1.0, p0 * (x - 0.5 * q0) / g_.hbar);
    nrm += std::norm(psi[i]);
  }
  nrm = std::sqrt(nrm * g_.dx());
  for (auto& z : psi) z /= nrm;
  return psi;
}

std::vector<cplx> SplitStep1D::displace(const std::vector<cplx>& psi, cplx alpha) const {
  const double s = std::sqrt(2.0 * g_.hbar);
  const double q0 = s * alpha.real(), p0 = s * alpha.imag();
  std::vector<cplx> f = psi;
  if (q0 != 0.0) {
    fft(f, false);
    for (int i = 0; i < g_.n; ++i) f[i] *= std::polar(1.0 / g_.n, -g_.k(i) * q0);
    fft(f, true);
  }
  for (int i = 0; i < g_.n; ++i) f[i] *= std::polar(1.0, p0 * (g_.coord(i) - 0.5 * q0) / g_.hbar);
  return f;
}

cplx SplitStep1D::overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * g_.dx();
}

double SplitStep1D::mean(const std::vector<cplx>& psi) const {
  double m = 0.0, w = 0.0;
  for (int i = 0; i < g_.n; ++i) {
    m += g_.coord(i) * std::norm(psi[i]);
    w += std::norm(psi[i]);
  }
  return m / w;
}

double SplitStep1D::width(const std::vector<cplx>& psi) const {
  const double mu = mean(psi);
  double v = 0.0, w = 0.0;
  for (int i = 0; i < g_.n; ++i) {
    const double d = g_.coord(i) - mu;
    v += d * d * std::norm(psi[i]);
    w += std::norm(psi[i]);
  }
  return std::sqrt(v / w);
}

double SplitStep1D::edge_population(const std::vector<cplx>& psi, double frac) const {
  const int n = g_.n, w = std::max(1, static_cast<int>(frac * n));
  double edge = 0.0, all = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = std::norm(psi[i]);
    all += p;
    if (i < w || i >= n - w) edge += p;
  }
  return all > 0.0 ? edge / all : 0.0;
}

std::vector<cplx> otoc_grid_1d(const SplitStep1D& solver, cplx gamma, cplx alpha, cplx beta,
                               const std::vector<double>& times) {
  if (!std::is_sorted(times.begin(), times.end())) throw ParameterError("times must be ascending");
  const double dt = solver.grid().dt;
  auto u = solver.coherent(gamma);
  auto w = solver.displace(u, beta);
  std::vector<cplx> out;
  long done = 0;
  for (double t : times) {
    const long steps = std::lround(t / dt);
    solver.evolve(u, steps - done);
    solver.evolve(w, steps - done);
    done = steps;
    auto a = solver.displace(w, alpha);
    auto b = solver.displace(u, alpha);
    solver.evolve(a, steps, true);
    solver.evolve(b, steps, true);
    b = solver.displace(b, beta);
    out.push_back(solver.overlap(b, a));
  }
  return out;
}

}  // namespace cvscramble
