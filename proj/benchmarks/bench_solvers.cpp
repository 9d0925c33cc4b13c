#include <benchmark/benchmark.h>

#include "rabi/eigensolver.hpp"
#include "rabi/model.hpp"
#include "rabi/spectra.hpp"

using namespace rabi;

namespace {

BandedSymmetric sector(int n_max) {
  const ModelParams p = params_from_rescaled(2.5, 2.0, 3.0, 1024.0);
  return sector_hamiltonian(RabiCouplings::from(p), n_max, Parity::Even);
}

void BM_BandedLowest(benchmark::State& state) {
  const BandedSymmetric h = sector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(banded_lowest(h, 2, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BandedLowest)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond)->Complexity();

void BM_LanczosLowest(benchmark::State& state) {
  const BandedSymmetric h = sector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_lowest(h, 2, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LanczosLowest)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity();

// Full adaptive solve including cutoff doubling, on either side of gc = 2.
void BM_GroundSpectrum(benchmark::State& state) {
  const double gt = state.range(0) / 100.0;
  const ModelParams p = params_from_rescaled(gt, 2.0, 3.0, static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ground_spectrum(p));
}
BENCHMARK(BM_GroundSpectrum)
    ->ArgsProduct({{150, 250}, {256, 4096}})
    ->ArgNames({"gtx100", "eta"})
    ->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  std::vector<double> gts;
  for (int i = 0; i <= 40; ++i) gts.push_back(1.5 + 0.025 * i);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_coupling(2.0, 3.0, 1024.0, 1.0, gts, {}, 1));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

}  // namespace
