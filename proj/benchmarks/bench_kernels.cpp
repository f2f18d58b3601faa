// serial reference vs OpenMP kernels on representative sizes
#include <benchmark/benchmark.h>

#include "vcde/lgp.hpp"
#include "vcde/rng.hpp"
#include "vcde/simulate.hpp"
#include "vcde/tessellation.hpp"

namespace {

vcde::Dataset bench_data(int n) {
  return vcde::simulate(vcde::Scenario::piecewise, n, 42);
}

vcde::Tessellation bench_tess(const vcde::Dataset& data, int m) {
  vcde::Tessellation tess;
  for (int i = 0; i < m; ++i)
    tess.center_idx.push_back(static_cast<int>((data.n() / m) * i));
  tess.w = Eigen::VectorXd::Constant(data.p(), 1.0 / data.p());
  return tess;
}

void bm_assign_serial(benchmark::State& state) {
  const auto data = bench_data(static_cast<int>(state.range(0)));
  const auto tess = bench_tess(data, 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(vcde::ref::assign_regions(data, tess));
}

void bm_assign_parallel(benchmark::State& state) {
  const auto data = bench_data(static_cast<int>(state.range(0)));
  const auto tess = bench_tess(data, 8);
  for (auto _ : state) benchmark::DoNotOptimize(vcde::assign_regions(data, tess));
}

const vcde::RegionPredicate pred_a = [](const Eigen::VectorXd& v) {
  return v[0] + v[1] < 1.0;
};
const vcde::RegionPredicate pred_b = [](const Eigen::VectorXd& v) {
  return v[0] + 0.9 * v[1] < 1.0;
};

void bm_symmdiff_serial(benchmark::State& state) {
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        vcde::ref::partition_symmdiff_estimate(pred_a, pred_b, lo, hi,
                                               state.range(0), 7));
}

void bm_symmdiff_parallel(benchmark::State& state) {
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(vcde::partition_symmdiff_estimate(
        pred_a, pred_b, lo, hi, state.range(0), 7));
}

vcde::RegionFit bench_fit() {
  const auto data = bench_data(500);
  return vcde::fit_region(data.y, 100, 0.1, {}, {}, {});
}

void bm_draws_serial(benchmark::State& state) {
  const auto fit = bench_fit();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        vcde::ref::density_draws(fit, static_cast<int>(state.range(0)), 3));
}

void bm_draws_parallel(benchmark::State& state) {
  const auto fit = bench_fit();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        vcde::density_draws(fit, static_cast<int>(state.range(0)), 3));
}

BENCHMARK(bm_assign_serial)->Arg(2000)->Arg(20000);
BENCHMARK(bm_assign_parallel)->Arg(2000)->Arg(20000);
BENCHMARK(bm_symmdiff_serial)->Arg(100000);
BENCHMARK(bm_symmdiff_parallel)->Arg(100000);
BENCHMARK(bm_draws_serial)->Arg(4000);
BENCHMARK(bm_draws_parallel)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
