#include <benchmark/benchmark.h>

#include <cmath>

#include "flock/kernels.hpp"
#include "flock/solver.hpp"

namespace {

using namespace flock;

KernelSpec make_kernel(KernelVariant v) {
  KernelSpec k;
  k.variant = v;
  k.lambda = 1.0;
  k.r0 = 1.0;
  k.alpha = 0.5;
  k.tau = v == KernelVariant::Topological ? 0.5 : 0.0;
  return k;
}

FlockState make_state(int n) {
  GridPtr grid = TorusGrid::make(n);
  FlockState s{Field(grid), Field(grid), 0.0};
  for (int i = 0; i < n; ++i) {
    double x = grid->center(i);
    s.rho[i] = 1.0 + 0.5 * std::cos(x);
    s.u[i] = 0.1 * std::sin(x);
  }
  return s;
}

void BM_lpsi(benchmark::State& state, KernelVariant v) {
  FlockState s = make_state(static_cast<int>(state.range(0)));
  KernelSpec k = make_kernel(v);
  for (auto _ : state) {
    Field out = l_psi(k, s.rho, s.rho);
    benchmark::DoNotOptimize(out);
  }
}

void BM_alignment_force(benchmark::State& state, KernelVariant v) {
  FlockState s = make_state(static_cast<int>(state.range(0)));
  KernelSpec k = make_kernel(v);
  for (auto _ : state) {
    Field out = alignment_force(k, s.rho, s.u);
    benchmark::DoNotOptimize(out);
  }
}

void BM_step(benchmark::State& state, KernelVariant v) {
  FlockState s = make_state(static_cast<int>(state.range(0)));
  KernelSpec k = make_kernel(v);
  SolverConfig cfg;
  cfg.t_end = 1.0;
  for (auto _ : state) {
    FlockState next = step(s, k, cfg);
    benchmark::DoNotOptimize(next);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_lpsi, lipschitz, flock::KernelVariant::Lipschitz)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_lpsi, geometric, flock::KernelVariant::Geometric)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_lpsi, topological, flock::KernelVariant::Topological)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_alignment_force, lipschitz, flock::KernelVariant::Lipschitz)->Arg(256);
BENCHMARK_CAPTURE(BM_alignment_force, topological, flock::KernelVariant::Topological)->Arg(256);
BENCHMARK_CAPTURE(BM_step, lipschitz, flock::KernelVariant::Lipschitz)->Arg(256);
BENCHMARK_CAPTURE(BM_step, topological, flock::KernelVariant::Topological)->Arg(256);

BENCHMARK_MAIN();
