#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "cvscramble/correlators.hpp"
#include "cvscramble/fock.hpp"
#include "cvscramble/gaussian_state.hpp"
#include "cvscramble/grid.hpp"
#include "cvscramble/random_circuits.hpp"
#include "cvscramble/stats.hpp"
#include "cvscramble/symplectic.hpp"
#include "cvscramble/teleportation.hpp"

namespace cvscramble::cli {

namespace {

using json = nlohmann::ordered_json;

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

ExperimentRecord start(const std::string& command, std::uint64_t seed) {
  ExperimentRecord r;
  r.command = command;
  r.seed = seed;
  r.version = version_string();
  return r;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

json truncation_json(const TruncationReport& r, double tol) {
  return {{"d_cut", r.d_cut}, {"max_tail", r.max_tail}, {"tail_tol", tol}, {"ok", r.ok}};
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

void require(bool ok, const char* msg) {
  if (!ok) throw ParameterError(msg);
}

}  // namespace

// ---- gate-check ------------------------------------------------------------

ExperimentRecord run_gate_check(const GateCheckParams& p) {
  require(p.trials >= 1 && p.depth >= 1, "trials and depth must be >= 1");
  Stopwatch sw;
  auto rec = start("gate-check", p.seed);
  rec.params = {{"trials", p.trials}, {"depth", p.depth}, {"seed", p.seed}};

  double defect = 0.0, det = 0.0, assoc = 0.0, euler = 0.0, phase = 0.0, otoc = 0.0, orth = 0.0, inv = 0.0;
  for (int t = 0; t < p.trials; ++t) {
    Rng rng = stream_rng(p.seed, static_cast<std::uint64_t>(t));
    const int modes = 1 + t % 3;
    const auto A = random_gaussian_circuit(modes, p.depth, rng, 0.3, 0.5);
    const auto B = random_gaussian_circuit(modes, 3, rng, 0.3, 0.5);
    const auto C = random_gaussian_circuit(modes, 3, rng, 0.3, 0.5);
    const Mat& S = A.S.mat();
    defect = std::max(defect, symplectic_defect(S));
    det = std::max(det, std::abs(S.determinant() - 1.0));
    const auto l = compose(compose(A, B), C), r = compose(A, compose(B, C));
    assoc = std::max(assoc, (l.S.mat() - r.S.mat()).cwiseAbs().maxCoeff() / std::max(1.0, S.norm()));
    assoc = std::max(assoc, (l.d.vec() - r.d.vec()).cwiseAbs().maxCoeff() / std::max(1.0, S.norm()));
    const auto f = euler_decompose(A.S);
    euler = std::max(euler, (recompose(f) - S).cwiseAbs().maxCoeff() / S.cwiseAbs().maxCoeff());
    orth = std::max(orth, (f.K * f.K.transpose() - Mat::Identity(2 * modes, 2 * modes)).cwiseAbs().maxCoeff());
    inv = std::max(inv, (symplectic_inverse(S) * S - Mat::Identity(2 * modes, 2 * modes)).cwiseAbs().maxCoeff());
    std::normal_distribution<double> n01;
    Vec x1(2 * modes), x2(2 * modes);
    for (int i = 0; i < 2 * modes; ++i) {
      x1[i] = n01(rng);
      x2[i] = n01(rng);
    }
    const Mat Si = symplectic_inverse(S);
    const Vec y1 = Si * x1, y2 = Si * x2;
    phase = std::max(phase, std::abs(x1.dot(omega_times(x2)) - y1.dot(omega_times(y2))) /
                                std::max(1.0, y1.norm() * y2.norm()));
    otoc = std::max(otoc, std::abs(otoc_gaussian(A, DisplacementVector(x1), DisplacementVector(x2)).magnitude - 1.0));
  }
  struct Check {
    const char* name;
    double value, tol;
  };
  const Check checks[] = {
      {"symplectic_defect", defect, kLongCircuitTol}, {"det_minus_one", det, kLongCircuitTol},
      {"compose_associativity", assoc, 1e-10},       {"euler_recomposition", euler, 1e-8},
      {"euler_K_orthogonal", orth, 1e-8},            {"inverse", inv, kLongCircuitTol},
      {"omega_invariance", phase, 1e-8},             {"otoc_unit_modulus", otoc, 1e-12},
  };
  auto& t = rec.table("checks", {"check", "value", "tolerance", "pass"});
  json names = json::array();
  bool all = true;
  int id = 0;
  for (const auto& c : checks) {
    const bool pass = c.value <= c.tol;
    all = all && pass;
    t.add_row({static_cast<double>(id++), c.value, c.tol, pass ? 1.0 : 0.0});
    names.push_back({{"check", c.name}, {"value", c.value}, {"tolerance", c.tol}, {"pass", pass}});
  }
  rec.reports["checks"] = names;
  rec.reports["all_pass"] = all;
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- single-walk -----------------------------------------------------------

ExperimentRecord run_single_walk(const SingleWalkParams& p) {
  require(p.T >= 1 && p.samples >= 2 && p.R >= 0.0 && p.bins >= 1, "need T >= 1, samples >= 2, R >= 0, bins >= 1");
  Stopwatch sw;
  auto rec = start("single-walk", p.seed);
  rec.params = {{"T", p.T}, {"R", p.R}, {"samples", p.samples}, {"bins", p.bins}, {"seed", p.seed}};
  const auto w = single_mode_walk(p.T, SqueezeDist{0.0, p.R}, p.samples, p.seed);
  auto& s = rec.table("series", {"t", "mean_r_tot", "var_r_tot"});
  for (int t = 0; t <= p.T; ++t) s.add_row({static_cast<double>(t), w.mean[t], w.var[t]});
  const auto h = histogram(w.final_r, p.bins);
  auto& ht = rec.table("histogram", {"lo", "hi", "count"});
  const double width = (h.hi - h.lo) / p.bins;
  for (int b = 0; b < p.bins; ++b)
    ht.add_row({h.lo + b * width, h.lo + (b + 1) * width, static_cast<double>(h.counts[b])});
  const double m = w.mean.back(), v = w.var.back();
  rec.reports["final"] = {{"mean", m}, {"var", v}, {"var_over_mean", m > 0.0 ? v / m : 0.0}, {"samples", p.samples}};
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- brickwork -------------------------------------------------------------

ExperimentRecord run_brickwork(const BrickworkParams& p) {
  require(!p.n.empty(), "at least one n is required");
  for (double n : p.n) require(n > 0.0, "n must be > 0");
  require(p.threshold > 0.0 && p.threshold < 1.0, "threshold must lie in (0,1)");
  Stopwatch sw;
  auto rec = start("brickwork", p.seed);
  rec.params = {{"L", p.L},           {"T", p.T},       {"R", p.R},
                {"n", p.n},           {"samples", p.samples}, {"seed", p.seed},
                {"threshold", p.threshold}, {"entanglement", p.entanglement}};
  CircuitConfig cfg;
  cfg.L = p.L;
  cfg.T = p.T;
  cfg.R = p.R;
  cfg.samples = p.samples;
  cfg.seed = p.seed;
  const auto r = brickwork_run(cfg, p.n);

  if (p.field) {
    std::vector<std::string> cols{"t", "x", "fbar"};
    for (std::size_t k = 0; k < p.n.size(); ++k) cols.push_back("C2_n" + std::to_string(k));
    auto& f = rec.table("field", cols);
    for (int t = 0; t <= p.T; ++t)
      for (int x = -std::min(t, p.L); x <= std::min(t, p.L); ++x) {
        std::vector<double> row{static_cast<double>(t), static_cast<double>(x), r.fbar(t, x + p.L)};
        for (const auto& c : r.otoc) row.push_back(c(t, x + p.L));
        f.add_row(std::move(row));
      }
  }
  std::vector<HydroFit> fits;
  for (std::size_t k = 0; k < p.n.size(); ++k) fits.push_back(fit_hydro(r, k, p.threshold));
  std::vector<std::string> cols{"t", "Fbar", "lnF_mean", "x2"};
  for (std::size_t k = 0; k < p.n.size(); ++k) cols.push_back("front_n" + std::to_string(k));
  auto& fr = rec.table("front", cols);
  for (int t = 0; t <= p.T; ++t) {
    std::vector<double> row{static_cast<double>(t), r.Fbar[t], r.lnF_mean[t], fits[0].x2[t]};
    for (const auto& f : fits) row.push_back(f.front[t]);
    fr.add_row(std::move(row));
  }
  auto& ft = rec.table("fit", {"n", "c_R", "D", "v_B", "v_hydro", "v_hydro_half", "v_binomial", "c_R_residual",
                               "D_residual", "v_B_residual"});
  for (std::size_t k = 0; k < p.n.size(); ++k) {
    const auto& f = fits[k];
    ft.add_row({p.n[k], f.c_R, f.D, f.v_B, f.v_hydro, f.v_hydro_half, f.v_binomial, f.c_R_residual, f.D_residual,
                f.v_B_residual});
  }
  rec.reports["max_outside_lightcone"] = r.max_outside_lightcone;

  if (p.entanglement) {
    EntanglementOptions opt;
    opt.cuts = p.cuts;
    opt.eval_every = p.eval_every;
    const auto e = entanglement_run(cfg, opt);
    const double unit = p.bits ? 1.0 / std::numbers::ln2 : 1.0;
    auto& et = rec.table("entanglement", {"t", "h", "w", "live"});
    std::vector<double> ts, hs, ws;
    for (std::size_t k = 0; k < e.times.size(); ++k) {
      et.add_row({static_cast<double>(e.times[k]), e.h[k] * unit, e.w[k] * unit, static_cast<double>(e.live[k])});
      if (e.times[k] > 0 && std::isfinite(e.h[k])) {
        ts.push_back(e.times[k]);
        hs.push_back(e.h[k] * unit);
        ws.push_back(e.w[k] * unit);
      }
    }
    auto& st = rec.table("entropy", {"t", "cut", "mean_S"});
    for (std::size_t c = 0; c < e.cuts.size(); ++c)
      for (std::size_t k = 0; k < e.times.size(); ++k) {
        KahanSum s;
        long n = 0;
        for (long i = 0; i < e.S[c].rows(); ++i)
          if (std::isfinite(e.S[c](i, k))) {
            s.add(e.S[c](i, k));
            ++n;
          }
        st.add_row({static_cast<double>(e.times[k]), static_cast<double>(e.cuts[c]),
                    n ? s.value() / n * unit : std::nan("")});
      }
    json ej = {{"aborted", e.aborted}, {"window", {e.window_lo, e.window_hi}}, {"units", p.bits ? "bits" : "nats"}};
    if (ts.size() >= 2) {
      const auto q = quad_fit_no_intercept(ts, hs);
      ej["h_fit"] = {{"linear", q.a}, {"quadratic", q.b}};
      ej["w_slope"] = slope_through_origin(ts, ws);
    }
    rec.reports["entanglement"] = ej;
  }
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- frame-potential -------------------------------------------------------

ExperimentRecord run_frame_potential(const FramePotentialParams& p) {
  require(p.modes >= 1 && p.k >= 1 && p.samples >= 2 && p.nth >= 0.0, "need modes >= 1, k >= 1, samples >= 2, nth >= 0");
  Stopwatch sw;
  auto rec = start("frame-potential", p.seed);
  rec.params = {{"ensemble", p.ensemble}, {"n", p.n},         {"nth", p.nth},         {"k", p.k},
                {"modes", p.modes},       {"points", p.points}, {"spacing", p.spacing}, {"samples", p.samples},
                {"seed", p.seed}};
  const auto state = GaussianState::thermal(p.modes, p.nth);
  auto& t = rec.table("frame_potential", {"analytic", "monte_carlo", "stderr", "J1", "H_bound"});
  double analytic = std::nan(""), J = std::nan("");
  EnsembleSampler sampler;
  if (p.ensemble == "isotropic") {
    require(p.n > 0.0, "n must be > 0");
    const auto e = DisplacementEnsemble::isotropic(p.modes, p.n);
    sampler = sampler_of(e);
    if (p.k == 1) analytic = frame_potential_gaussian(e.covariance(), p.nth);
    J = twice_regulated_J(p.n, p.nth, p.modes);
    // the thermal volume needs n_th > 0
    rec.reports["volume"] = p.nth > 0.0 ? json(ensemble_volume(e, state)) : json(nullptr);
  } else if (p.ensemble == "sparse") {
    require(p.points >= 1 && p.spacing > 0.0, "sparse ensemble needs points >= 1 and spacing > 0");
    std::vector<DisplacementVector> pts;
    for (int i = 0; i < p.points; ++i) {
      Vec x = Vec::Zero(2 * p.modes);
      x[0] = p.spacing * i;
      pts.emplace_back(x);
    }
    sampler = discrete_sampler(pts);
    analytic = 1.0 / p.points;  // well-separated limit
  } else if (p.ensemble == "point") {
    sampler = discrete_sampler({DisplacementVector::zero(p.modes)});
    analytic = 1.0;
  } else {
    throw ParameterError("ensemble must be isotropic, sparse or point");
  }
  const auto mc = frame_potential_mc(sampler, state, p.k, p.samples, p.seed);
  const double H = p.k <= 2 ? H_bound(p.k, state) : std::nan("");
  t.add_row({analytic, mc.value.real(), mc.stderr_, J, H});
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- otoc ------------------------------------------------------------------

ExperimentRecord run_otoc_cubic(const OtocCubicParams& p) {
  require(p.steps >= 1 && p.t_max >= 0.0 && p.nth >= 0.0, "need steps >= 1, t_max >= 0, nth >= 0");
  Stopwatch sw;
  auto rec = start("otoc cubic", 0);
  rec.params = {{"alpha", cjson(p.alpha)}, {"beta", cjson(p.beta)}, {"gamma", p.gamma}, {"nth", p.nth},
                {"t_max", p.t_max},        {"steps", p.steps},      {"dcut", p.dcut}};
  std::vector<std::string> cols{"t", "re", "im", "abs"};
  if (p.dcut > 0) cols.insert(cols.end(), {"fock_re", "fock_im", "fock_abs"});
  auto& t = rec.table("curve", cols);
  TruncationConfig cfg;
  if (p.dcut > 0) cfg.d_cut = p.dcut;
  TruncationReport rep;
  rep.d_cut = cfg.d_cut;
  std::vector<std::pair<double, FockState>> mix;
  if (p.dcut > 0) {
    const auto w = thermal_weights(p.nth, cfg.d_cut);
    for (int n = 0; n < cfg.d_cut; ++n)
      if (w[n] > 1e-14) mix.emplace_back(w[n], FockState::basis(n, cfg.d_cut));
  }
  for (int k = 0; k <= p.steps; ++k) {
    const double tt = p.t_max * k / p.steps;
    const cplx c = otoc_cubic(p.alpha, p.beta, tt, p.gamma, p.nth).value;
    std::vector<double> row{tt, c.real(), c.imag(), std::abs(c)};
    if (p.dcut > 0) {
      FockCircuit U;
      U.add(cubic_gate_fock(p.gamma * tt, cfg));
      const auto f = correlator_fock_mixed(CorrelatorKind::OTOC, U, DisplacementVector::from_alpha(p.alpha),
                                           DisplacementVector::from_alpha(p.beta), mix, cfg);
      rep.absorb(f.report.max_tail, cfg.tail_tol);
      row.insert(row.end(), {f.value.real(), f.value.imag(), std::abs(f.value)});
    }
    t.add_row(std::move(row));
  }
  if (p.dcut > 0) rec.reports["truncation"] = truncation_json(rep, cfg.tail_tol);
  rec.wall_time = sw.seconds();
  return rec;
}

ExperimentRecord run_otoc_gaussian(const OtocGaussianParams& p) {
  require(p.modes >= 1 && p.depth >= 1 && p.samples >= 1, "need modes, depth, samples >= 1");
  Stopwatch sw;
  auto rec = start("otoc gaussian", p.seed);
  rec.params = {{"modes", p.modes}, {"depth", p.depth}, {"samples", p.samples}, {"dcut", p.dcut}, {"seed", p.seed}};
  auto& t = rec.table("samples", {"sample", "re", "im", "abs_minus_one"});
  double worst = 0.0;
  for (long s = 0; s < p.samples; ++s) {
    Rng rng = stream_rng(p.seed, static_cast<std::uint64_t>(s));
    const int depth = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(p.depth));
    const auto U = random_gaussian_circuit(p.modes, depth, rng, 0.5, 1.0);
    std::normal_distribution<double> n01;
    Vec x1(2 * p.modes), x2(2 * p.modes);
    for (int i = 0; i < 2 * p.modes; ++i) {
      x1[i] = n01(rng);
      x2[i] = n01(rng);
    }
    const cplx c = otoc_gaussian(U, DisplacementVector(x1), DisplacementVector(x2)).value;
    worst = std::max(worst, std::abs(std::abs(c) - 1.0));
    t.add_row({static_cast<double>(s), c.real(), c.imag(), std::abs(c) - 1.0});
  }
  rec.reports["max_abs_deviation"] = worst;
  if (p.dcut > 0) {
    TruncationConfig cfg;
    cfg.d_cut = p.dcut;
    auto& ft = rec.table("fock", {"case", "analytic_re", "analytic_im", "fock_re", "fock_im", "abs_diff"});
    double fw = 0.0;
    for (int c = 0; c < 20; ++c) {
      Rng rng = stream_rng(p.seed ^ 0x5eed, static_cast<std::uint64_t>(c));
      const auto U = random_gaussian_circuit(1, 4, rng, 0.3, 0.3);
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      const auto x1 = DisplacementVector::from_alpha({u(rng), u(rng)});
      const auto x2 = DisplacementVector::from_alpha({u(rng), u(rng)});
      FockCircuit F;
      F.add(gaussian_unitary_fock(U, cfg));
      const auto f = correlator_fock(CorrelatorKind::OTOC, F, x1, x2, FockState::basis(0, cfg.d_cut), cfg);
      const cplx a = otoc_gaussian(U, x1, x2).value;
      fw = std::max(fw, std::abs(f.value - a));
      ft.add_row({static_cast<double>(c), a.real(), a.imag(), f.value.real(), f.value.imag(), std::abs(f.value - a)});
    }
    rec.reports["fock_max_diff"] = fw;
  }
  rec.wall_time = sw.seconds();
  return rec;
}

ExperimentRecord run_otoc_snap(const OtocSnapParams& p) {
  require(p.samples >= 2 && p.steps >= 1 && p.t_max >= 0.0, "need samples >= 2, steps >= 1, t_max >= 0");
  Stopwatch sw;
  auto rec = start("otoc snap", p.seed);
  rec.params = {{"alpha", cjson(p.alpha)}, {"beta", cjson(p.beta)}, {"gamma", cjson(p.gamma)},
                {"dcut", p.dcut},          {"samples", p.samples},  {"t_max", p.t_max},
                {"steps", p.steps},        {"heatmap", p.heatmap},  {"seed", p.seed}};
  TruncationConfig cfg;
  cfg.d_cut = p.dcut;
  cfg.validate();
  const auto psi = coherent_state(p.gamma, cfg);
  const auto x1 = DisplacementVector::from_alpha(p.alpha), x2 = DisplacementVector::from_alpha(p.beta);
  const auto times = linspace(0.0, p.t_max, p.steps + 1);
  Mat vals(p.samples, times.size());
  std::vector<double> tails(p.samples, 0.0);
  std::vector<std::vector<double>> energies(p.samples);
  for (long s = 0; s < p.samples; ++s) {
    Rng rng = stream_rng(p.seed, static_cast<std::uint64_t>(s));
    energies[s] = random_snap_energies(cfg.d_cut, rng);
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (long s = 0; s < p.samples; ++s)
    for (std::size_t k = 0; k < times.size(); ++k) {
      FockCircuit U;
      U.add(random_snap(energies[s], times[k]));
      const auto c = correlator_fock(CorrelatorKind::OTOC, U, x1, x2, psi, cfg);
      vals(s, k) = std::abs(c.value);
      tails[s] = std::max(tails[s], c.report.max_tail);
    }
  TruncationReport rep;
  rep.d_cut = cfg.d_cut;
  for (double t : tails) rep.absorb(t, cfg.tail_tol);
  // Gaussian contrast: exp(-i t (p^2 + q^2))
  auto& t = rec.table("curve", {"t", "mean_abs", "stderr", "gaussian_abs"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> col(vals.rows());
    for (long s = 0; s < vals.rows(); ++s) col[s] = vals(s, k);
    const auto ms = mean_std(col);
    FockCircuit G;
    G.add(harmonic_evolution(times[k], cfg.d_cut));
    const auto g = correlator_fock(CorrelatorKind::OTOC, G, x1, x2, psi, cfg);
    rep.absorb(g.report.max_tail, cfg.tail_tol);
    t.add_row({times[k], ms.mean, ms.stderr_, std::abs(g.value)});
  }
  if (p.heatmap) {
    require(p.heatmap_step > 0.0, "heatmap step must be > 0");
    // the TOC support lies within |gamma| + |alpha| of -gamma; the square's
    // corners would displace psi past d_cut, so only the disk is evaluated
    const double R = std::abs(p.gamma) + std::abs(p.alpha) + 3.0;
    std::vector<double> re, im;
    for (double x = -p.gamma.real() - R; x <= -p.gamma.real() + R + 1e-12; x += p.heatmap_step) re.push_back(x);
    for (double y = -p.gamma.imag() - R; y <= -p.gamma.imag() + R + 1e-12; y += p.heatmap_step) im.push_back(y);
    auto& h = rec.table("heatmap", {"t", "re_beta", "im_beta", "snap", "gaussian"});
    auto& pr = rec.table("participation", {"t", "snap", "gaussian"});
    for (double tt : p.heatmap_times) {
      FockCircuit U, G;
      U.add(random_snap(energies[0], tt));
      G.add(harmonic_evolution(tt, cfg.d_cut));
      const HeatmapDisk disk{-p.gamma, R};
      const auto hs = toc_heatmap(U, p.alpha, re, im, psi, cfg, disk);
      const auto hg = toc_heatmap(G, p.alpha, re, im, psi, cfg, disk);
      rep.absorb(std::max(hs.report.max_tail, hg.report.max_tail), cfg.tail_tol);
      for (std::size_t i = 0; i < im.size(); ++i)
        for (std::size_t j = 0; j < re.size(); ++j) h.add_row({tt, re[j], im[i], hs.values(i, j), hg.values(i, j)});
      pr.add_row({tt, participation_ratio(hs.values), participation_ratio(hg.values)});
    }
  }
  rec.reports["truncation"] = truncation_json(rep, cfg.tail_tol);
  rec.wall_time = sw.seconds();
  return rec;
}

ExperimentRecord run_otoc_grid(const OtocGridParams& p) {
  require(p.steps >= 1 && p.t_max >= 0.0, "need steps >= 1 and t_max >= 0");
  Stopwatch sw;
  auto rec = start("otoc grid", 0);
  rec.params = {{"gamma", p.gamma}, {"mass", p.mass},     {"alpha", cjson(p.alpha)}, {"beta", cjson(p.beta)},
                {"t_max", p.t_max}, {"steps", p.steps},   {"points", p.points},      {"extent", p.extent},
                {"dt", p.dt}};
  Grid1D g;
  g.n = p.points;
  g.extent = p.extent;
  g.dt = p.dt;
  g.mass = p.mass;
  g.hbar = 2.0;  // qt = a + a^dag, the scale of the cubic closed form
  g.validate();
  const double gam = p.gamma;
  SplitStep1D solver(g, [gam](double q) { return gam * q * q * q / 6.0; });
  const auto times = linspace(0.0, p.t_max, p.steps + 1);
  const auto vals = otoc_grid_1d(solver, 0.0, p.alpha, p.beta, times);
  auto& t = rec.table("curve", {"t", "grid_re", "grid_im", "grid_abs", "closed_abs"});
  for (std::size_t k = 0; k < times.size(); ++k)
    t.add_row({times[k], vals[k].real(), vals[k].imag(), std::abs(vals[k]),
               otoc_cubic(p.alpha, p.beta, times[k], p.gamma, 0.0).magnitude});
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- snap-two-mode ---------------------------------------------------------

ExperimentRecord run_snap_two_mode(const SnapTwoModeParams& p) {
  std::vector<double> thetas = p.thetas;
  if (thetas.empty()) {
    require(p.count >= 1, "count must be >= 1");
    thetas = linspace(0.0, std::numbers::pi / 2.0, p.count);
  }
  Stopwatch sw;
  auto rec = start("snap-two-mode", p.seed);
  rec.params = {{"thetas", thetas},          {"samples", p.samples},      {"dcut", p.dcut},
                {"alpha", cjson(p.alpha)},   {"beta", cjson(p.beta)},     {"gamma1", cjson(p.gamma1)},
                {"gamma2", cjson(p.gamma2)}, {"seed", p.seed}};
  TruncationConfig cfg;
  cfg.d_cut = p.dcut;
  const auto sweep = snap_circuit_otoc_sweep(thetas, p.samples, p.alpha, p.beta, p.gamma1, p.gamma2, cfg, p.seed);
  auto& t = rec.table("sweep", {"theta", "transmissivity", "mean11", "std11", "mean12", "std12"});
  for (const auto& pt : sweep.points)
    t.add_row({pt.theta, std::cos(pt.theta) * std::cos(pt.theta), pt.mean11, pt.std11, pt.mean12, pt.std12});
  rec.reports["truncation"] = truncation_json(sweep.report, cfg.tail_tol);
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- henon-heiles ----------------------------------------------------------

ExperimentRecord run_henon_heiles(const HenonHeilesParams& p) {
  require(p.points >= 1 && p.t_max > 0.0, "need points >= 1 and t_max > 0");
  require((p.w == 1 || p.w == 2) && (p.v == 1 || p.v == 2), "modes w, v must be 1 or 2");
  require(p.potential == "henon-heiles" || p.potential == "gaussian", "potential must be henon-heiles or gaussian");
  require(p.snapshot_stride >= 1, "snapshot stride must be >= 1");
  Stopwatch sw;
  auto rec = start("henon-heiles", 0);
  Grid2D g;
  g.n = p.grid;
  g.extent = p.extent;
  g.dt = p.dt;
  g.mass = p.mass;
  g.hbar = 2.0;
  g.validate();
  const HenonHeiles hh{p.U, p.lambda};
  const double tc = hh.t_c(g.mass);
  cplx g1 = p.gamma1, g2 = p.gamma2;
  if (!p.gamma_set) {
    // packet near the origin with energy ~ V_C, momentum tilted by 10 degrees
    const double a = std::sqrt(7.0 * hh.V_C() / 40.0), th = 10.0 * std::numbers::pi / 180.0;
    g1 = {0.15 * hh.r_C(), a * std::cos(th)};
    g2 = {0.0, a * std::sin(th)};
  }
  rec.params = {{"potential", p.potential}, {"grid", p.grid},       {"extent", p.extent},   {"dt", p.dt},
                {"mass", p.mass},           {"U", p.U},             {"lambda", p.lambda},   {"gamma1", cjson(g1)},
                {"gamma2", cjson(g2)},      {"alpha", cjson(p.alpha)}, {"beta", cjson(p.beta)}, {"w", p.w},
                {"v", p.v},                 {"t_max_tc", p.t_max},  {"points", p.points}};
  Potential2D V;
  if (p.potential == "gaussian") {
    const double U = p.U;
    V = [U](double a, double b) { return 0.5 * U * (a * a + b * b); };
  } else {
    V = hh;
  }
  SplitStepSolver solver(g, V);
  const auto xi1 = DisplacementVector::from_alpha(p.alpha, p.v - 1, 2);
  const auto xi2 = DisplacementVector::from_alpha(p.beta, p.w - 1, 2);
  std::vector<double> times;
  for (int k = 1; k <= p.points; ++k) times.push_back(p.t_max * tc * k / p.points);
  const auto curve = otoc_grid(solver, g1, g2, xi1, xi2, times);
  auto& t = rec.table("curve", {"t_over_tc", "t", "re", "im", "abs"});
  t.add_row({0.0, 0.0, 1.0, 0.0, 1.0});
  for (std::size_t k = 0; k < times.size(); ++k)
    t.add_row({times[k] / tc, times[k], curve.values[k].real(), curve.values[k].imag(), std::abs(curve.values[k])});
  rec.reports["scales"] = {{"r_C", hh.r_C()}, {"V_C", hh.V_C()}, {"t_c", tc}};
  rec.reports["evolution"] = {{"energy0", curve.report.energy0},
                              {"max_energy_drift", curve.report.max_energy_drift},
                              {"max_norm_drift", curve.report.max_norm_drift},
                              {"max_edge_population", curve.report.max_edge_population}};
  if (p.snapshot_time > 0.0) {
    auto psi = coherent_packet(g, g1, g2);
    solver.evolve(psi, std::lround(p.snapshot_time * tc / g.dt));
    const Mat d = psi.density();
    auto& s = rec.table("density", {"q1", "q2", "density"});
    for (int i = 0; i < g.n; i += p.snapshot_stride)
      for (int j = 0; j < g.n; j += p.snapshot_stride) s.add_row({g.coord(i), g.coord(j), d(i, j)});
  }
  rec.wall_time = sw.seconds();
  return rec;
}

// ---- teleport --------------------------------------------------------------

ExperimentRecord run_teleport(const TeleportParams& p) {
  Stopwatch sw;
  auto rec = start("teleport", p.seed);
  rec.params = {{"m", p.m},       {"epr_r", p.epr_r},     {"noise", p.noise}, {"input", cjson(p.input)},
                {"sweep", p.sweep}, {"samples", p.samples}, {"seed", p.seed}};
  auto config = [&](double m, double r, double noise, cplx in) {
    TeleportConfig c;
    c.m = m;
    c.epr_r = r;
    c.noise = noise;
    c.input = GaussianState::coherent({in});
    c.validate();
    return c;
  };
  auto mean_fidelity = [&](const TeleportConfig& c, std::uint64_t salt) {
    std::vector<double> f(p.samples);
    for (long s = 0; s < p.samples; ++s) {
      Rng rng = stream_rng(p.seed ^ salt, static_cast<std::uint64_t>(s));
      f[s] = run_protocol(c, rng).fidelity;
    }
    return mean_std(f);
  };
  if (p.sweep == "none") {
    Rng rng = stream_rng(p.seed, 0);
    const auto c = config(p.m, p.epr_r, p.noise, p.input);
    const auto o = run_protocol(c, rng);
    auto& t = rec.table("outcome", {"Q", "P", "correction_q", "correction_p", "out_q", "out_p", "fidelity"});
    t.add_row({o.Q, o.P, o.correction[0], o.correction[1], o.output.mu()[0], o.output.mu()[1], o.fidelity});
  } else if (p.sweep == "epr") {
    require(p.samples >= 2, "samples must be >= 2");
    auto& t = rec.table("epr_sweep", {"epr_r", "fidelity", "stderr"});
    for (double r : linspace(0.0, p.epr_r, 11)) {
      const auto ms = mean_fidelity(config(p.m, r, p.noise, p.input), 1);
      t.add_row({r, ms.mean, ms.stderr_});
    }
  } else if (p.sweep == "noise") {
    require(p.samples >= 2, "samples must be >= 2");
    auto& t = rec.table("noise_sweep", {"noise", "fidelity", "stderr"});
    const double top = p.noise > 0.0 ? p.noise : 1.0;
    for (double nz : linspace(0.0, top, 10)) {
      const auto ms = mean_fidelity(config(p.m, p.epr_r, nz, p.input), 2);
      t.add_row({nz, ms.mean, ms.stderr_});
    }
  } else if (p.sweep == "gkp") {
    auto& t = rec.table("gkp", {"m", "delta_Q", "delta_P", "q_R", "p_R", "correctable"});
    for (int m = 2; m <= 20; ++m)
      for (double dq : linspace(0.0, 3.0, 13)) {
        Vec dxi(2);
        dxi << dq, dq;
        const Vec dz = induced_error(static_cast<double>(m), dxi);
        t.add_row({static_cast<double>(m), dq, dq, dz[0], dz[1], gkp_correctable(dz) ? 1.0 : 0.0});
      }
    rec.reports["gkp_threshold"] = gkp_threshold();
  } else if (p.sweep == "random") {
    auto& t = rec.table("random", {"m", "input_re", "input_im", "fidelity"});
    for (long s = 0; s < p.samples; ++s) {
      Rng rng = stream_rng(p.seed, static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> um(2.0, 20.0), ua(-2.0, 2.0);
      const double m = um(rng);
      const cplx in(ua(rng), ua(rng));
      const auto o = run_protocol(config(m, p.epr_r, p.noise, in), rng);
      t.add_row({m, in.real(), in.imag(), o.fidelity});
    }
  } else {
    throw ParameterError("sweep must be none, epr, noise, gkp or random");
  }
  rec.wall_time = sw.seconds();
  return rec;
}

}  // namespace cvscramble::cli
