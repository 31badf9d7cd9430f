// Serial reference loops against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "qleb/kernels.hpp"
#include "qleb/presets.hpp"
#include "support/random_states.hpp"

using namespace qleb;

namespace {

std::vector<std::pair<HermitianMatrix, HermitianMatrix>> random_pairs(int count) {
  testing::Rng rng(7);
  std::vector<std::pair<HermitianMatrix, HermitianMatrix>> out;
  for (int t = 0; t < count; ++t) {
    const auto p = testing::random_pair(rng);
    out.emplace_back(p.sigma, p.rho);
  }
  return out;
}

struct QcfInputs {
  HermitianMatrix rho;
  std::vector<HermitianMatrix> obs;
  std::vector<std::vector<RVector>> queries;
};

QcfInputs qcf_inputs(int count) {
  testing::Rng rng(8);
  QcfInputs in{testing::random_faithful(rng, 4), {testing::random_hermitian(rng, 4), testing::random_hermitian(rng, 4)}, {}};
  for (int q = 0; q < count; ++q) in.queries.push_back({testing::random_real_query(rng, 2, 1)[0].real()});
  return in;
}

template <bool Parallel>
void BM_Kakutani(benchmark::State& state) {
  const ToleranceConfig tol;
  const auto fam = presets::qubit_product_sqrt(tol);
  for (auto _ : state) {
    auto s = Parallel ? kernels::kakutani_summands(fam.factors, state.range(0), tol)
                      : kernels::reference::kakutani_summands(fam.factors, state.range(0), tol);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Decompose(benchmark::State& state) {
  const ToleranceConfig tol;
  const auto pairs = random_pairs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto d = Parallel ? kernels::decompose_batch(pairs, tol) : kernels::reference::decompose_batch(pairs, tol);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_IidQcf(benchmark::State& state) {
  const QcfInputs in = qcf_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto v = Parallel ? kernels::iid_qcf_batch(in.rho, in.obs, in.queries, 1000000)
                      : kernels::reference::iid_qcf_batch(in.rho, in.obs, in.queries, 1000000);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Kakutani<false>)->Name("kakutani/serial")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kakutani<true>)->Name("kakutani/openmp")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decompose<false>)->Name("decompose/serial")->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decompose<true>)->Name("decompose/openmp")->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IidQcf<false>)->Name("iid_qcf/serial")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IidQcf<true>)->Name("iid_qcf/openmp")->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
