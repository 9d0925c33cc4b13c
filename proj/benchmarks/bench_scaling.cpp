#include <cmath>

#include <benchmark/benchmark.h>

#include "rabi/fss.hpp"
#include "rabi/scaling.hpp"

using namespace rabi;

namespace {

FssDataset synthetic(int sizes) {
  FssDataset d;
  d.gc = 2.0;
  for (int k = 0; k < sizes; ++k) {
    const double eta = std::ldexp(32.0, k);
    for (double t : log_spaced(1e-3, 1e-1, 13)) {
      const double x = t * std::pow(eta, 2.0 / 3.0);
      const double v = std::pow(eta, -2.0 / 3.0) * (1.0 + x);
      d.rows.push_back({eta, 2.0 * (1.0 - t), v});
      d.rows.push_back({eta, 2.0 * (1.0 + t), v});
    }
  }
  return d;
}

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
  return v;
}

void BM_Collapse(benchmark::State& state) {
  const FssDataset d = synthetic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(collapse(d, 1.0, 2.0 / 3.0));
}
BENCHMARK(BM_Collapse)->DenseRange(3, 9, 3);

void BM_ExponentScan(benchmark::State& state) {
  const FssDataset d = synthetic(6);
  const auto bg = steps(0.25, 2.0, 0.05), ng = steps(0.25, 1.5, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(scan_exponents(d, bg, ng, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ExponentScan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GenerateFss(benchmark::State& state) {
  FssConfig cfg;
  cfg.tau = 2.0;
  cfg.kappa = 3.0;
  cfg.gc = 2.0;
  cfg.etas = {32, 64, 128, 256};
  cfg.ts = log_spaced(1e-3, 1e-1, 7);
  for (auto _ : state) benchmark::DoNotOptimize(generate_fss(cfg));
}
BENCHMARK(BM_GenerateFss)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
