#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "record.hpp"

namespace cvscramble::cli {

using cplx = std::complex<double>;

struct GateCheckParams {
  int trials = 200;
  int depth = 50;
  std::uint64_t seed = 1;
};

struct SingleWalkParams {
  int T = 2000;
  double R = 0.5;  // r ~ uniform[0, R]
  long samples = 2000;
  int bins = 40;
  std::uint64_t seed = 1;
};

struct BrickworkParams {
  int L = 200;
  int T = 150;
  double R = 0.1;
  std::vector<double> n{100.0};
  long samples = 100;
  std::uint64_t seed = 1;
  double threshold = 0.5;
  bool field = true;  // emit the long-format fbar / C2 table
  bool entanglement = false;
  int eval_every = 10;
  std::vector<int> cuts{0};
  bool bits = false;
};

struct FramePotentialParams {
  std::string ensemble = "isotropic";  // isotropic | sparse | point
  double n = 1.0;                      // ensemble width (isotropic)
  double nth = 1.0;
  int k = 1;
  int modes = 1;
  int points = 10;       // sparse ensemble size
  double spacing = 10.0; // sparse ensemble lattice spacing
  long samples = 100000;
  std::uint64_t seed = 1;
};

struct OtocCubicParams {
  cplx alpha{1.0, 0.0};
  cplx beta{1.0, 0.0};
  double gamma = 1.0;
  double nth = 0.0;
  double t_max = 0.2;
  int steps = 20;
  int dcut = 0;  // > 0 adds a truncated-Fock cross-check
};

struct OtocGaussianParams {
  int modes = 2;
  int depth = 100;
  long samples = 1000;
  int dcut = 0;  // > 0 adds single-mode Fock cross-checks
  std::uint64_t seed = 1;
};

struct OtocSnapParams {
  cplx alpha{2.0, 2.0};
  cplx beta{2.0, -2.0};
  cplx gamma{8.0, 0.0};
  int dcut = 500;
  long samples = 20;
  double t_max = 6.283185307179586;
  int steps = 40;
  bool heatmap = false;
  std::vector<double> heatmap_times{0.0, 0.314159, 0.628319, 3.141593, 6.283185};
  double heatmap_step = 0.5;
  std::uint64_t seed = 1;
};

struct OtocGridParams {
  double gamma = 1.0;  // V = gamma q^3 / 6
  double mass = 1e4;
  cplx alpha{1.0, 0.0};
  cplx beta{1.0, 0.0};
  double t_max = 0.2;
  int steps = 10;
  int points = 2048;
  double extent = 20.0;
  double dt = 1e-3;
};

struct SnapTwoModeParams {
  std::vector<double> thetas;  // empty: `count` points on [0, pi/2]
  int count = 11;
  long samples = 100;
  int dcut = 60;
  cplx alpha{0.5, 0.5};
  cplx beta{0.5, -0.5};
  cplx gamma1{2.0, 0.0};
  cplx gamma2{2.0, 0.0};
  std::uint64_t seed = 1;
};

struct HenonHeilesParams {
  std::string potential = "henon-heiles";  // henon-heiles | gaussian
  int grid = 512;
  double extent = 64.0;
  double dt = 2e-3;
  double mass = 0.5;
  double U = 1.0;
  double lambda = 0.025;
  cplx gamma1{0.0, 0.0};  // zero: the default initial state
  cplx gamma2{0.0, 0.0};
  bool gamma_set = false;
  cplx alpha{0.25, -0.25};
  cplx beta{0.25, 0.25};
  int w = 1;  // mode of beta (1-based)
  int v = 1;  // mode of alpha, the evolved displacement
  double t_max = 5.0;  // units of t_c
  int points = 10;
  double snapshot_time = 0.0;  // units of t_c; > 0 emits a density table
  int snapshot_stride = 8;
};

struct TeleportParams {
  double m = 5.0;
  double epr_r = 10.0;
  double noise = 0.0;
  cplx input{0.0, 0.0};
  std::string sweep = "none";  // none | epr | noise | gkp | random
  long samples = 200;
  std::uint64_t seed = 1;
};

ExperimentRecord run_gate_check(const GateCheckParams& p);
ExperimentRecord run_single_walk(const SingleWalkParams& p);
ExperimentRecord run_brickwork(const BrickworkParams& p);
ExperimentRecord run_frame_potential(const FramePotentialParams& p);
ExperimentRecord run_otoc_cubic(const OtocCubicParams& p);
ExperimentRecord run_otoc_gaussian(const OtocGaussianParams& p);
ExperimentRecord run_otoc_snap(const OtocSnapParams& p);
ExperimentRecord run_otoc_grid(const OtocGridParams& p);
ExperimentRecord run_snap_two_mode(const SnapTwoModeParams& p);
ExperimentRecord run_henon_heiles(const HenonHeilesParams& p);
ExperimentRecord run_teleport(const TeleportParams& p);

}  // namespace cvscramble::cli
