#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "teleport/figures_of_merit.hpp"
#include "teleport/mode_register.hpp"
#include "teleport/optimizer.hpp"
#include "teleport/protocol.hpp"
#include "teleport/scattering.hpp"

using namespace teleport;

namespace {

void BM_ScatteringMap(benchmark::State& state) {
  const int orders = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_scattering_map(2.0, orders));
}
BENCHMARK(BM_ScatteringMap)->Arg(3)->Arg(6)->Arg(10);

void BM_FinalAtomicState(benchmark::State& state) {
  ProtocolParams params;
  params.kappa = 2.0;
  params.envelope = Envelope::normalized({0.7, 0.5, 0.4, 0.3});
  params.imperfections = ImperfectionConfig{0.1, 0.1, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(final_atomic_state(params));
}
BENCHMARK(BM_FinalAtomicState);

void BM_NoiseQuadraticForm(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const ImperfectionConfig cfg{0.1, 0.1, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(noise_quadratic_form(2.0, order, cfg, 0.9));
}
BENCHMARK(BM_NoiseQuadraticForm)->DenseRange(0, 6, 2);

void BM_MinimizeOnSphere(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i) m.data()[i] = normal(rng);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = normal(rng);
  const QuadraticForm q{0.5 * (m + m.transpose()), b, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(minimize_on_sphere(q));
}
BENCHMARK(BM_MinimizeOnSphere)->Arg(4)->Arg(8);

void BM_OptimizePoint(benchmark::State& state) {
  const ImperfectionConfig cfg{0.1, 0.1, 0.1};
  const Objective objectives[] = {Objective::unit_gain(), Objective::coherent_average(2.0), Objective::qubit()};
  const Objective& objective = objectives[state.range(0)];
  for (auto _ : state) benchmark::DoNotOptimize(optimize_point(1.5, 3, cfg, objective));
  state.SetLabel(std::string(to_string(objective.kind)));
}
BENCHMARK(BM_OptimizePoint)->DenseRange(0, 2);

void BM_KappaSweep(benchmark::State& state) {
  const auto kappas = kappa_grid(0.1, 3.0, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(kappa_sweep(kappas, 3, ImperfectionConfig{}, Objective::unit_gain()));
}
BENCHMARK(BM_KappaSweep)->Unit(benchmark::kMillisecond);

void BM_QubitOracle(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qubit_fidelity_oracle({0.9, 0.1}));
}
BENCHMARK(BM_QubitOracle);

void BM_ModeGram(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mode_gram(4, kDefaultOmegaT));
}
BENCHMARK(BM_ModeGram)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
