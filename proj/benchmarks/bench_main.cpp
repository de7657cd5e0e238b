#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "qtur/degeneracy.hpp"
#include "qtur/quasiprobability.hpp"
#include "qtur/thermodynamics.hpp"

namespace {

using namespace qtur;

Operator random_matrix(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Operator m(d, d);
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < d; ++r) m(r, c) = Complex(normal(rng), normal(rng));
  }
  return m;
}

struct Instance {
  LindbladModel model;
  QuantumState rho;
  Operator x;
};

Instance make_instance(Index d, int pairs) {
  std::mt19937_64 rng(42);
  std::vector<JumpPair> jumps;
  for (int k = 0; k < pairs; ++k) {
    Operator lt = random_matrix(d, rng);
    lt /= lt.norm();
    jumps.push_back({lt, std::exp(-0.25) * Operator(lt.adjoint()), 0.5});
  }
  const Operator h = random_matrix(d, rng);
  const Operator g = random_matrix(d, rng);
  Operator rho = g * g.adjoint() + 0.05 * Operator::Identity(d, d);
  rho /= rho.trace().real();
  const Operator x = random_matrix(d, rng);
  return {LindbladModel(hermitian_part(h), std::move(jumps)), QuantumState(hermitian_part(rho)),
          hermitian_part(x)};
}

void BM_FluxMatrix(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 3);
  const auto x = ObservableDecomposition::from_operator(inst.x);
  for (auto _ : state) benchmark::DoNotOptimize(flux_matrix(inst.model, inst.rho, x));
}
BENCHMARK(BM_FluxMatrix)->RangeMultiplier(2)->Range(4, 32);

void BM_TurCheck(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(tur_check(inst.model, inst.rho, inst.x));
}
BENCHMARK(BM_TurCheck)->RangeMultiplier(2)->Range(4, 32);

void BM_TmhTable(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2);
  const auto x = ObservableDecomposition::from_operator(inst.x);
  for (auto _ : state) benchmark::DoNotOptimize(tmh_table(inst.model, inst.rho, x, 0.1));
}
BENCHMARK(BM_TmhTable)->Arg(4)->Arg(8)->Arg(16);

void BM_GeometricRepresentation(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(geometric_representation(inst.model, inst.rho));
}
BENCHMARK(BM_GeometricRepresentation)->Arg(4)->Arg(8)->Arg(16);

void BM_CollectiveIntegratedFluxes(benchmark::State& state) {
  CollectiveModelParams p;
  p.n_levels = static_cast<int>(state.range(0));
  const LindbladModel model = build_collective_model(p);
  const QuantumState rho = build_plus_minus_state(p, CollectiveState::kPlus);
  const DegenerateBasis basis = fourier_basis(p);
  for (auto _ : state) benchmark::DoNotOptimize(integrated_fluxes(model, rho, basis));
}
BENCHMARK(BM_CollectiveIntegratedFluxes)->RangeMultiplier(2)->Range(4, 128);

void BM_ScalingSweep(benchmark::State& state) {
  SweepOptions o;
  o.n_values = {4, 8, 16, 32, 64};
  o.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scaling_sweep(o));
}
BENCHMARK(BM_ScalingSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
