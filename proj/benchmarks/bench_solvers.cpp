#include "wpcn/joint.hpp"
#include "wpcn/zero_forcing.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

wpcn::NonNegMatrix random_nonneg(int n) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  wpcn::RealMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(gen);
  }
  return wpcn::NonNegMatrix(m);
}

void BM_SpectralRadius(benchmark::State& state) {
  const wpcn::NonNegMatrix m = random_nonneg(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wpcn::spectral_radius(m));
}
BENCHMARK(BM_SpectralRadius)->Arg(5)->Arg(9)->Arg(33);

void BM_MaxMinEnergy(benchmark::State& state) {
  const wpcn::ChannelSet ch = wpcn::fixture_channels();
  const wpcn::RealVector costs = wpcn::RealVector::Constant(4, 5e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpcn::maxmin_energy_covariance(costs, 1.0, ch).value);
  }
}
BENCHMARK(BM_MaxMinEnergy);

void BM_UplinkSolve(benchmark::State& state) {
  const wpcn::ChannelSet ch = wpcn::fixture_channels();
  const wpcn::RealVector budgets = wpcn::RealVector::Constant(4, 5e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpcn::solve_ul_for_budgets(budgets, 0.5, ch, {}).gamma);
  }
}
BENCHMARK(BM_UplinkSolve);

void BM_DownlinkFixedReceivers(benchmark::State& state) {
  const wpcn::ChannelSet ch = wpcn::fixture_channels();
  const wpcn::ReceiverBank w{ch.uplink.colwise().normalized()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpcn::solve_dl_fixed_w(w, 0.5, ch, {}).value);
  }
}
BENCHMARK(BM_DownlinkFixedReceivers)->Unit(benchmark::kMillisecond);

void BM_SolveFixedTau(benchmark::State& state) {
  const wpcn::ChannelSet ch = wpcn::fixture_channels();
  for (auto _ : state) benchmark::DoNotOptimize(wpcn::solve_fixed_tau(0.5, ch, {}).rate);
}
BENCHMARK(BM_SolveFixedTau)->Unit(benchmark::kMillisecond);

void BM_Suboptimal1(benchmark::State& state) {
  const wpcn::ChannelSet ch = wpcn::fixture_channels();
  for (auto _ : state) benchmark::DoNotOptimize(wpcn::suboptimal1(ch, {}).rate);
}
BENCHMARK(BM_Suboptimal1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
