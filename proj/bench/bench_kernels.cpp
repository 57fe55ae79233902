// Serial reference vs OpenMP kernels at envelope-grid sizes (N bands x m^d k-points, Q cell harmonics).

#include "envkp/kernels.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <complex>
#include <map>
#include <numeric>
#include <random>

using namespace envkp;
using cd = std::complex<double>;

namespace {

constexpr int kBands = 6;
constexpr int kHarmonics = 33;

struct Data {
  kernels::Blocks blocks;
  Eigen::MatrixXcd g, factors, coeffs;
  Eigen::VectorXcd spectrum;
  kernels::Table table;

  explicit Data(long cols) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    auto rnd = [&](long r, long c) {
      Eigen::MatrixXcd m(r, c);
      for (long i = 0; i < m.size(); ++i) m.data()[i] = cd(n(rng), n(rng));
      return m;
    };
    for (long j = 0; j < cols; ++j) {
      const Eigen::MatrixXcd a = rnd(kBands, kBands);
      blocks.push_back(0.5 * (a + a.adjoint()));
    }
    g = rnd(kBands, cols);
    factors = rnd(kBands, cols);
    coeffs = rnd(kBands, kHarmonics);
    spectrum = rnd(cols * kHarmonics, 1);
    table.resize(cols * kHarmonics);
    std::iota(table.begin(), table.end(), 0L);
    std::shuffle(table.begin(), table.end(), rng);
  }
};

const Data& data(long cols) {
  static std::map<long, Data> cache;
  auto it = cache.find(cols);
  if (it == cache.end()) it = cache.emplace(cols, Data(cols)).first;
  return it->second;
}

template <void (*F)(const kernels::Blocks&, Eigen::MatrixXcd&)>
void BM_block_matvec(benchmark::State& state) {
  const Data& d = data(state.range(0));
  Eigen::MatrixXcd g = d.g;
  for (auto _ : state) {
    F(d.blocks, g);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*F)(const Eigen::MatrixXcd&, Eigen::MatrixXcd&)>
void BM_scale_elements(benchmark::State& state) {
  const Data& d = data(state.range(0));
  Eigen::MatrixXcd g = d.g;
  for (auto _ : state) {
    F(d.factors, g);
    g = d.g;
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*F)(const Eigen::MatrixXcd&, const kernels::Table&, const Eigen::VectorXcd&, Eigen::MatrixXcd&)>
void BM_gather_bands(benchmark::State& state) {
  const Data& d = data(state.range(0));
  Eigen::MatrixXcd out(kBands, state.range(0));
  for (auto _ : state) {
    F(d.coeffs, d.table, d.spectrum, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*F)(const Eigen::MatrixXcd&, const kernels::Table&, const Eigen::MatrixXcd&, Eigen::VectorXcd&)>
void BM_scatter_bands(benchmark::State& state) {
  const Data& d = data(state.range(0));
  Eigen::VectorXcd spectrum = d.spectrum;
  for (auto _ : state) {
    F(d.coeffs, d.table, d.g, spectrum);
    benchmark::DoNotOptimize(spectrum.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*F)(const kernels::Blocks&, double, kernels::Blocks&)>
void BM_hermitian_exponentials(benchmark::State& state) {
  const Data& d = data(state.range(0));
  kernels::Blocks out;
  for (auto _ : state) {
    F(d.blocks, 0.01, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

#define ENVKP_BENCH(name)                                                                                 \
  BENCHMARK_TEMPLATE(BM_##name, kernels::serial::name)->Name("serial/" #name)->RangeMultiplier(4)->Range(256, 16384); \
  BENCHMARK_TEMPLATE(BM_##name, kernels::omp::name)->Name("omp/" #name)->RangeMultiplier(4)->Range(256, 16384)

ENVKP_BENCH(block_matvec);
ENVKP_BENCH(scale_elements);
ENVKP_BENCH(gather_bands);
ENVKP_BENCH(scatter_bands);
ENVKP_BENCH(hermitian_exponentials);

BENCHMARK_MAIN();
