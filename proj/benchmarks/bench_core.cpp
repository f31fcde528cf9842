#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "habitat/convolution.hpp"
#include "habitat/frame_solver.hpp"
#include "habitat/spectral.hpp"

using namespace habitat;

namespace {

struct BenchSetup {
  Grid grid;
  Kernel kernel = Kernel::gaussian(1.0);
  ConvolutionOperator op;
  std::vector<double> in, out;

  explicit BenchSetup(int n)
      : grid(Grid::make(60.0, n)),
        op(ConvolutionOperator::build(kernel, grid.dx, grid.n)),
        in(static_cast<std::size_t>(n)),
        out(static_cast<std::size_t>(n)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& x : in) x = unit(rng);
  }
};

void BM_ConvolveDense(benchmark::State& state) {
  BenchSetup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    s.op.apply_dense(s.in, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
}
BENCHMARK(BM_ConvolveDense)->Arg(1024)->Arg(2048)->Arg(4096);

void BM_ConvolveFFT(benchmark::State& state) {
  BenchSetup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    s.op.apply_fft(s.in, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
}
BENCHMARK(BM_ConvolveFFT)->Arg(1024)->Arg(2048)->Arg(4096);

void BM_MovingFrameStep(benchmark::State& state) {
  BenchSetup s(static_cast<int>(state.range(0)));
  GrowthModel growth;
  growth.L = 10.0;
  Field field = Field::constant(s.grid, 1.0);
  const double dt = 0.5 * EvolveSettings::cfl_bound(s.grid, 0.5, growth);
  for (auto _ : state) {
    field = step_moving_frame(field, 0.5, s.op, growth, dt);
    benchmark::DoNotOptimize(field.values.data());
  }
}
BENCHMARK(BM_MovingFrameStep)->Arg(2048);

void BM_PrincipalEigenvalue(benchmark::State& state) {
  BenchSetup s(static_cast<int>(state.range(0)));
  GrowthModel growth;
  growth.L = 10.0;
  for (auto _ : state) {
    const SpectralReport report =
        principal_eigenvalue_operator(0.5, growth, s.grid, s.op);
    benchmark::DoNotOptimize(report.lambda_cl);
  }
}
BENCHMARK(BM_PrincipalEigenvalue)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
