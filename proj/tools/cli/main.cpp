// cvscramble: seeded experiment runner. Every subcommand prints (or writes)
// an ExperimentRecord; identical flags give identical tables.

#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "commands.hpp"
#include "cvscramble/types.hpp"

namespace {

using cvscramble::cli::ExperimentRecord;

int emit_error(const char* type, const std::string& msg, int code) {
  nlohmann::ordered_json j;
  j["error"] = {{"type", type}, {"message", msg}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

void add_seed(CLI::App* s, std::uint64_t& seed) { s->add_option("--seed", seed, "RNG seed")->capture_default_str(); }

}  // namespace

int main(int argc, char** argv) {
  using namespace cvscramble::cli;
  CLI::App app{"Phase-space scrambling experiments for continuous-variable systems"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_config("--config", "", "TOML or INI file; subcommand keys go under [subcommand] sections");
  std::string out_dir;
  int threads = 0;
  app.add_option("--out", out_dir, "write CSV tables and a JSON record to this directory");
  app.add_option("--threads", threads, "worker cap (default: CVSCRAMBLE_THREADS or all cores)");
  bool show_digest = false;
  app.add_flag("--digest", show_digest, "print only the table digest");

  GateCheckParams gc;
  auto* s_gc = app.add_subcommand("gate-check", "symplectic invariant suite");
  s_gc->add_option("--trials", gc.trials)->capture_default_str();
  s_gc->add_option("--depth", gc.depth)->capture_default_str();
  add_seed(s_gc, gc.seed);

  SingleWalkParams sw;
  auto* s_sw = app.add_subcommand("single-walk", "single-mode squeezing random walk");
  s_sw->add_option("--T", sw.T)->capture_default_str();
  s_sw->add_option("--R", sw.R, "squeezing r ~ uniform[0, R]")->capture_default_str();
  s_sw->add_option("--samples", sw.samples)->capture_default_str();
  s_sw->add_option("--bins", sw.bins)->capture_default_str();
  add_seed(s_sw, sw.seed);

  BrickworkParams bw;
  auto* s_bw = app.add_subcommand("brickwork", "brickwork circuit: amplitude fields, fronts, fits, entanglement");
  s_bw->add_option("--L", bw.L)->capture_default_str();
  s_bw->add_option("--T", bw.T)->capture_default_str();
  s_bw->add_option("--R", bw.R)->capture_default_str();
  s_bw->add_option("--n", bw.n, "ensemble widths of the averaged OTOC")->capture_default_str();
  s_bw->add_option("--samples", bw.samples)->capture_default_str();
  s_bw->add_option("--threshold", bw.threshold)->capture_default_str();
  bool no_field = false;
  s_bw->add_flag("--no-field", no_field, "skip the long-format field table");
  s_bw->add_flag("--entanglement", bw.entanglement);
  s_bw->add_option("--eval-every", bw.eval_every)->capture_default_str();
  s_bw->add_option("--cuts", bw.cuts)->capture_default_str();
  s_bw->add_flag("--bits", bw.bits, "entropies in bits");
  add_seed(s_bw, bw.seed);

  FramePotentialParams fp;
  auto* s_fp = app.add_subcommand("frame-potential", "analytic and Monte-Carlo frame potentials");
  s_fp->add_option("--ensemble", fp.ensemble)->check(CLI::IsMember({"isotropic", "sparse", "point"}))->capture_default_str();
  s_fp->add_option("--n", fp.n)->capture_default_str();
  s_fp->add_option("--nth", fp.nth)->capture_default_str();
  s_fp->add_option("--k", fp.k)->capture_default_str();
  s_fp->add_option("--modes", fp.modes)->capture_default_str();
  s_fp->add_option("--points", fp.points)->capture_default_str();
  s_fp->add_option("--spacing", fp.spacing)->capture_default_str();
  s_fp->add_option("--samples", fp.samples)->capture_default_str();
  add_seed(s_fp, fp.seed);

  auto* s_otoc = app.add_subcommand("otoc", "correlator curves");
  s_otoc->require_subcommand(1);
  OtocCubicParams oc;
  auto* s_oc = s_otoc->add_subcommand("cubic", "cubic gate closed form (optional Fock check)");
  s_oc->add_option("--alpha", oc.alpha)->capture_default_str();
  s_oc->add_option("--beta", oc.beta)->capture_default_str();
  s_oc->add_option("--gamma", oc.gamma)->capture_default_str();
  s_oc->add_option("--nth", oc.nth)->capture_default_str();
  s_oc->add_option("--t-max", oc.t_max)->capture_default_str();
  s_oc->add_option("--steps", oc.steps)->capture_default_str();
  s_oc->add_option("--dcut", oc.dcut)->capture_default_str();
  OtocGaussianParams og;
  auto* s_og = s_otoc->add_subcommand("gaussian", "random Gaussian circuits: |C2| = 1");
  s_og->add_option("--modes", og.modes)->capture_default_str();
  s_og->add_option("--depth", og.depth)->capture_default_str();
  s_og->add_option("--samples", og.samples)->capture_default_str();
  s_og->add_option("--dcut", og.dcut)->capture_default_str();
  add_seed(s_og, og.seed);
  OtocSnapParams os;
  auto* s_os = s_otoc->add_subcommand("snap", "random SNAP OTOC curve and TOC heatmaps");
  s_os->add_option("--alpha", os.alpha)->capture_default_str();
  s_os->add_option("--beta", os.beta)->capture_default_str();
  s_os->add_option("--gamma", os.gamma)->capture_default_str();
  s_os->add_option("--dcut", os.dcut)->capture_default_str();
  s_os->add_option("--samples", os.samples)->capture_default_str();
  s_os->add_option("--t-max", os.t_max)->capture_default_str();
  s_os->add_option("--steps", os.steps)->capture_default_str();
  s_os->add_flag("--heatmap", os.heatmap);
  s_os->add_option("--heatmap-times", os.heatmap_times)->capture_default_str();
  s_os->add_option("--heatmap-step", os.heatmap_step)->capture_default_str();
  add_seed(s_os, os.seed);
  OtocGridParams ogr;
  auto* s_ogr = s_otoc->add_subcommand("grid", "1D cubic potential on a position grid vs closed form");
  s_ogr->add_option("--gamma", ogr.gamma)->capture_default_str();
  s_ogr->add_option("--mass", ogr.mass)->capture_default_str();
  s_ogr->add_option("--alpha", ogr.alpha)->capture_default_str();
  s_ogr->add_option("--beta", ogr.beta)->capture_default_str();
  s_ogr->add_option("--t-max", ogr.t_max)->capture_default_str();
  s_ogr->add_option("--steps", ogr.steps)->capture_default_str();
  s_ogr->add_option("--points", ogr.points)->capture_default_str();
  s_ogr->add_option("--extent", ogr.extent)->capture_default_str();
  s_ogr->add_option("--dt", ogr.dt)->capture_default_str();

  SnapTwoModeParams st;
  auto* s_st = app.add_subcommand("snap-two-mode", "two-mode SNAP circuit: mean |C2| vs beamsplitter angle");
  s_st->add_option("--thetas", st.thetas, "explicit angles (default: --count points on [0, pi/2])");
  s_st->add_option("--count", st.count)->capture_default_str();
  s_st->add_option("--samples", st.samples)->capture_default_str();
  s_st->add_option("--dcut", st.dcut)->capture_default_str();
  s_st->add_option("--alpha", st.alpha)->capture_default_str();
  s_st->add_option("--beta", st.beta)->capture_default_str();
  s_st->add_option("--gamma1", st.gamma1)->capture_default_str();
  s_st->add_option("--gamma2", st.gamma2)->capture_default_str();
  add_seed(s_st, st.seed);

  HenonHeilesParams hh;
  auto* s_hh = app.add_subcommand("henon-heiles", "2D grid OTOC under the Henon-Heiles (or harmonic) potential");
  s_hh->add_option("--potential", hh.potential)->check(CLI::IsMember({"henon-heiles", "gaussian"}))->capture_default_str();
  s_hh->add_option("--grid", hh.grid)->capture_default_str();
  s_hh->add_option("--extent", hh.extent)->capture_default_str();
  s_hh->add_option("--dt", hh.dt)->capture_default_str();
  s_hh->add_option("--mass", hh.mass)->capture_default_str();
  s_hh->add_option("--U", hh.U)->capture_default_str();
  s_hh->add_option("--lambda", hh.lambda)->capture_default_str();
  auto* o_g1 = s_hh->add_option("--gamma1", hh.gamma1);
  auto* o_g2 = s_hh->add_option("--gamma2", hh.gamma2);
  s_hh->add_option("--alpha", hh.alpha)->capture_default_str();
  s_hh->add_option("--beta", hh.beta)->capture_default_str();
  s_hh->add_option("--w", hh.w, "mode of beta")->capture_default_str();
  s_hh->add_option("--v", hh.v, "mode of the evolved alpha")->capture_default_str();
  s_hh->add_option("--t-max", hh.t_max, "in units of t_c")->capture_default_str();
  s_hh->add_option("--points", hh.points)->capture_default_str();
  s_hh->add_option("--snapshot", hh.snapshot_time, "density snapshot time in t_c (0: none)")->capture_default_str();
  s_hh->add_option("--snapshot-stride", hh.snapshot_stride)->capture_default_str();

  TeleportParams tp;
  auto* s_tp = app.add_subcommand("teleport", "teleportation-based verification protocol");
  s_tp->add_option("--m", tp.m)->capture_default_str();
  s_tp->add_option("--epr-r", tp.epr_r)->capture_default_str();
  s_tp->add_option("--noise", tp.noise)->capture_default_str();
  s_tp->add_option("--input", tp.input, "coherent input amplitude")->capture_default_str();
  s_tp->add_option("--sweep", tp.sweep)->check(CLI::IsMember({"none", "epr", "noise", "gkp", "random"}))->capture_default_str();
  s_tp->add_option("--samples", tp.samples)->capture_default_str();
  add_seed(s_tp, tp.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("ParseError", e.what(), 1);
  }

  if (threads <= 0) {
    if (const char* env = std::getenv("CVSCRAMBLE_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    ExperimentRecord rec;
    if (*s_gc) {
      rec = run_gate_check(gc);
    } else if (*s_sw) {
      rec = run_single_walk(sw);
    } else if (*s_bw) {
      bw.field = !no_field;
      rec = run_brickwork(bw);
    } else if (*s_fp) {
      rec = run_frame_potential(fp);
    } else if (*s_oc) {
      rec = run_otoc_cubic(oc);
    } else if (*s_og) {
      rec = run_otoc_gaussian(og);
    } else if (*s_os) {
      rec = run_otoc_snap(os);
    } else if (*s_ogr) {
      rec = run_otoc_grid(ogr);
    } else if (*s_st) {
      rec = run_snap_two_mode(st);
    } else if (*s_hh) {
      hh.gamma_set = o_g1->count() > 0 || o_g2->count() > 0;
      rec = run_henon_heiles(hh);
    } else if (*s_tp) {
      rec = run_teleport(tp);
    }
    if (show_digest) {
      std::cout << hex64(rec.digest()) << '\n';
    } else if (!out_dir.empty()) {
      write_record(rec, out_dir);
      std::cout << rec.to_json(false).dump(2) << '\n';
    } else {
      std::cout << rec.to_json(true).dump() << '\n';
    }
    if (rec.reports.contains("all_pass") && !rec.reports["all_pass"].get<bool>()) return 2;
    return 0;
  } catch (const cvscramble::ParameterError& e) {
    return emit_error("ParameterError", e.what(), 1);
  } catch (const cvscramble::NumericalAbort& e) {
    return emit_error("NumericalAbort", e.what(), 2);
  } catch (const std::exception& e) {
    return emit_error("InternalError", e.what(), 2);
  }
}
