#include <benchmark/benchmark.h>

#include <random>

#include "tncirc/analysis.hpp"
#include "tncirc/circuit.hpp"
#include "tncirc/dmrg.hpp"
#include "tncirc/effective_model.hpp"
#include "tncirc/svd.hpp"

namespace {

using namespace tncirc;

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return m;
}

void BM_TruncatedSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix m = random_matrix(n, n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncated_svd(m, 1e-11, n / 2));
  }
}
BENCHMARK(BM_TruncatedSvd)->Arg(128)->Arg(512);

void BM_BlockLanczos(benchmark::State& state) {
  const Index n = state.range(0);
  Matrix h = random_matrix(n, n, 2);
  h = 0.5 * (h + h.adjoint()).eval();
  const Matrix v0 = random_matrix(n, 4, 3);
  LanczosOptions opts;
  opts.tol = 1e-10;
  for (auto _ : state) {
    auto r = block_lanczos([&h](const Matrix& in, Matrix& out) { out.noalias() = h * in; }, v0, 4,
                           opts);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_BlockLanczos)->Arg(512)->Arg(2048);

void BM_BuildHamiltonianMpo(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CircuitParams p = CircuitParams::homogeneous(n, 40.0, 7.5, 25.0, 0.03, 0.1, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_hamiltonian_mpo(p, 8));
  }
}
BENCHMARK(BM_BuildHamiltonianMpo)->Arg(20)->Arg(60);

void BM_DmrgSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CircuitParams p = CircuitParams::homogeneous(n, 8.0, 6.0, 22.0, 0.06, 0.1, 0.37);
  const CircuitOperators ops = build_circuit_operators(p, 8);
  DmrgConfig cfg;
  cfg.k_excitations = 3;
  cfg.max_sweeps = 1;
  const BundledMps init = default_initial_state(ops.sites, 3, cfg.seed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_multitarget_dmrg(ops.hamiltonian, init, cfg));
  }
}
BENCHMARK(BM_DmrgSweep)->Arg(8)->Arg(16);

void BM_SiteEigenbasis(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(site_eigenbasis(0.6, 132.6, 0.25, 15, default_charge_cutoff(15)));
  }
}
BENCHMARK(BM_SiteEigenbasis);

void BM_DisplacementMatrix(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(displacement_matrix(Complex(0.0, 1.3), 400));
  }
}
BENCHMARK(BM_DisplacementMatrix);

void BM_SingleModeDiagonalization(benchmark::State& state) {
  const CircuitParams p = CircuitParams::homogeneous(120, 40.0, 7.5, 25.0, 0.03);
  const EffectiveModel m = effective_model_from_circuit(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonalize_single_mode(m, 0.5, 6, 400));
  }
}
BENCHMARK(BM_SingleModeDiagonalization);

}  // namespace

BENCHMARK_MAIN();
