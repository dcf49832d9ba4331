#include <benchmark/benchmark.h>

#include "cvscramble/correlators.hpp"
#include "cvscramble/fock.hpp"
#include "cvscramble/grid.hpp"
#include "cvscramble/random_circuits.hpp"
#include "cvscramble/symplectic.hpp"

using namespace cvscramble;

static void BM_DisplacementMatrix(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const TruncationConfig cfg{d, 1e-6};
  for (auto _ : st) benchmark::DoNotOptimize(displacement_matrix({2.0, -1.0}, cfg));
  st.SetComplexityN(d);
}
BENCHMARK(BM_DisplacementMatrix)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

static void BM_BrickworkField(benchmark::State& st) {
  const int L = static_cast<int>(st.range(0));
  const CircuitConfig cfg{L, L, 0.5, 1, 3};
  long s = 0;
  for (auto _ : st) benchmark::DoNotOptimize(brickwork_field(cfg, s++));
  st.SetItemsProcessed(st.iterations() * long(L) * L);
}
BENCHMARK(BM_BrickworkField)->Arg(100)->Arg(200)->Arg(400);

static void BM_EntanglementRun(benchmark::State& st) {
  const int T = static_cast<int>(st.range(0));
  const CircuitConfig cfg{2 * T, T, 0.2, 1, 5};
  EntanglementOptions opt;
  opt.eval_every = T;
  for (auto _ : st) benchmark::DoNotOptimize(entanglement_run(cfg, opt));
}
BENCHMARK(BM_EntanglementRun)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_GaussianOtoc(benchmark::State& st) {
  Rng rng(1);
  const auto U = random_gaussian_circuit(static_cast<int>(st.range(0)), 100, rng);
  Vec a = Vec::Zero(2 * U.modes()), b = Vec::Zero(2 * U.modes());
  a[0] = 0.3;
  b[1] = 0.2;
  const DisplacementVector x1(a), x2(b);
  for (auto _ : st) benchmark::DoNotOptimize(otoc_gaussian(U, x1, x2));
}
BENCHMARK(BM_GaussianOtoc)->Arg(1)->Arg(4)->Arg(16);

static void BM_SplitStep(benchmark::State& st) {
  Grid2D g;
  g.n = static_cast<int>(st.range(0));
  g.extent = 40.0;
  g.dt = 2e-3;
  const HenonHeiles hh;
  const SplitStepSolver solver(g, [&](double q1, double q2) { return hh(q1, q2); });
  auto psi = coherent_packet(g, {1.0, 0.0}, {0.0, 0.0});
  for (auto _ : st) solver.evolve(psi, 10);
  st.SetItemsProcessed(st.iterations() * 10);
}
BENCHMARK(BM_SplitStep)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
