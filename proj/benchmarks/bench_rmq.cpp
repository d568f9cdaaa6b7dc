#include <benchmark/benchmark.h>

#include <vector>

#include "rmq/collapse.hpp"
#include "rmq/dynamics.hpp"
#include "rmq/ensembles.hpp"
#include "rmq/geometry.hpp"

namespace {

using rmq::Grid;
using rmq::RandomStream;

void BM_SampleGue(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(1);
  Eigen::MatrixXcd h;
  for (auto _ : state) {
    rmq::sample_gue_into(h, n, 1.0, rng);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_SampleGue)->Arg(64)->Arg(128);

// Full-space kick on an n-point grid: eigendecomposition vs Taylor action.
template <rmq::KickPropagator P>
void BM_Kick(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g(n, static_cast<double>(n), -0.5 * static_cast<double>(n));
  rmq::KickConfig cfg;
  cfg.scale = 0.01;
  cfg.propagator = P;
  rmq::KickOperator op(g, cfg);
  auto psi = rmq::make_packet({0.0, 4.0, 0.0}, g).amplitudes();
  RandomStream rng(2);
  for (auto _ : state) {
    op.apply(psi, rng);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_Kick<rmq::KickPropagator::eigendecomposition>)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Kick<rmq::KickPropagator::taylor>)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

// Windowed kick used by the Born scenario (64 Gaussians on 512 points).
void BM_WindowKick(benchmark::State& state) {
  const auto g = Grid::centered(512, 16.0);
  rmq::KickConfig cfg;
  cfg.scale = 0.01;
  cfg.window = rmq::GaussianWindow{};
  cfg.propagator = rmq::KickPropagator::taylor;
  rmq::KickOperator op(g, cfg);
  auto psi = rmq::make_packet({0.0, 0.5, 0.0}, g).amplitudes();
  RandomStream rng(3);
  for (auto _ : state) {
    op.apply(psi, rng);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_WindowKick)->Unit(benchmark::kMicrosecond);

void BM_FreeStep(benchmark::State& state) {
  const auto g = Grid::centered(static_cast<std::size_t>(state.range(0)), 32.0);
  const rmq::FreeHamiltonian h{g, {}, rmq::Potential::free()};
  const rmq::SplitStepPropagator prop(h, 0.01);
  auto psi = rmq::make_packet({0.0, 1.0, 1.0}, g).amplitudes();
  for (auto _ : state) {
    prop.step(psi);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_FreeStep)->Arg(512)->Arg(1024)->Arg(4096);

// One collapse walk capped at 100 kicks (detectors out of reach).
void BM_CollapseSteps(benchmark::State& state) {
  const auto g = Grid::centered(512, 16.0);
  const std::vector<std::complex<double>> amps{{0.8, 0.0}, {0.6, 0.0}};
  const std::vector<double> centers{-4.0, 4.0};
  const auto phi = rmq::superposition(g, amps, centers, 0.5);
  const std::vector<rmq::ClassSpec> detectors{{-4.0, 0.5}, {4.0, 0.5}};
  rmq::KickConfig cfg;
  cfg.scale = 0.01;
  cfg.window = rmq::GaussianWindow{};
  cfg.propagator = rmq::KickPropagator::taylor;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RandomStream rng(seed++);
    const auto run = rmq::run_collapse(phi, detectors, cfg, 100, rng, {false, {}});
    benchmark::DoNotOptimize(run.hitting_step);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_CollapseSteps)->Unit(benchmark::kMillisecond);

void BM_Survival(benchmark::State& state) {
  RandomStream rng(4);
  for (auto _ : state) {
    const auto r = rmq::survival_simulation(rmq::StepLaw::gaussian, 10000, 64, rng);
    benchmark::DoNotOptimize(r.max_abs_deviation);
  }
  state.SetItemsProcessed(state.iterations() * 10000 * 64);
}
BENCHMARK(BM_Survival)->Unit(benchmark::kMillisecond);

void BM_SparreAndersenExact(benchmark::State& state) {
  std::uint64_t n = 310000000;
  for (auto _ : state) benchmark::DoNotOptimize(rmq::sparre_andersen_exact(n++));
}
BENCHMARK(BM_SparreAndersenExact);

}  // namespace

BENCHMARK_MAIN();
