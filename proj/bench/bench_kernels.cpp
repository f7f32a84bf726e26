// Serial reference kernels against their OpenMP counterparts.
//
//   ./bench_kernels --benchmark_filter=EncryptRows

#include <benchmark/benchmark.h>

#include "cpad/kernels.hpp"
#include "cpad/random.hpp"

namespace {

using namespace cpad;

struct Inputs {
  explicit Inputs(std::size_t n) {
    SeededRandom rng(n);
    const GroupElem& g = GroupElem::generator();
    g_a = g.pow(Scalar::random_nonzero(rng));
    L = g.pow(Scalar::random_nonzero(rng));
    for (std::size_t i = 0; i < n; ++i) {
      bases.push_back(g.pow(Scalar::random_nonzero(rng)));
      keys.push_back(g.pow(Scalar::random_nonzero(rng)));
    }
    for (std::size_t i = 0; i < n; ++i) rows.push_back(RowInput{&bases[i], Scalar::random(rng), Scalar::random(rng)});
    cipher = kernels::encrypt_rows_serial(g, g_a, rows);
    for (std::size_t i = 0; i < n; ++i) {
      terms.push_back(PairingTerm{&cipher[i].C, &cipher[i].D, &keys[i], Scalar::random(rng)});
    }
  }

  GroupElem g_a;
  GroupElem L;
  std::vector<GroupElem> bases;
  std::vector<GroupElem> keys;
  std::vector<RowInput> rows;
  std::vector<CipherRow> cipher;
  std::vector<PairingTerm> terms;
};

template <Exec E>
void EncryptRows(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::encrypt_rows(E, GroupElem::generator(), in.g_a, in.rows));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = E == Exec::Parallel ? kernels::parallel_threads() : 1;
}

template <Exec E>
void PairingTerms(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::pairing_terms(E, in.L, in.terms));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = E == Exec::Parallel ? kernels::parallel_threads() : 1;
}

BENCHMARK(EncryptRows<Exec::Serial>)->DenseRange(10, 50, 10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(EncryptRows<Exec::Parallel>)->DenseRange(10, 50, 10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(PairingTerms<Exec::Serial>)->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(PairingTerms<Exec::Parallel>)->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
