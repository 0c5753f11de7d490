#include <benchmark/benchmark.h>

#include "hjt/large.hpp"
#include "hjt/lines.hpp"
#include "hjt/union.hpp"
#include "hjt/word.hpp"

using namespace hjt;

namespace {

VectorTree binary(int height, int dim = 1) {
  return VectorTree(std::vector<Tree>(static_cast<std::size_t>(dim),
                                      Tree(std::vector<Index>(static_cast<std::size_t>(height - 1), 2))));
}

int zero_parity(const Word& w) {
  int z = 0;
  for (auto s : w.symbols()) z += s == Symbol::letter(0);
  return z % 2;
}

void BM_HjNumber(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hj_number(2, r, 4, workers));
}
BENCHMARK(BM_HjNumber)->Args({2, 1})->Args({3, 1})->Args({3, 4})->Unit(benchmark::kMillisecond);

void BM_CombinatorialLines(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(combinatorial_lines(3, n));
}
BENCHMARK(BM_CombinatorialLines)->DenseRange(2, 6, 2);

void BM_VariableWordEnumeration(benchmark::State& state) {
  const CellSpace s(binary(static_cast<int>(state.range(0))));
  const Alphabet a(2);
  for (auto _ : state) {
    std::size_t n = 0;
    for_each_variable_word(s, a, {0, s.height(), full_level(s.vtree(), 0)}, [&](const Word&) {
      ++n;
      return true;
    });
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_VariableWordEnumeration)->Arg(2)->Arg(3);

void BM_SpanSequence(benchmark::State& state) {
  const CellSpace s(binary(4));
  const Alphabet a(static_cast<int>(state.range(0)));
  const auto x = standard_subspace(s, 0, 0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(span_sequence(a, x));
}
BENCHMARK(BM_SpanSequence)->Arg(2)->Arg(3);

void BM_TreeHjSearch(benchmark::State& state) {
  const CellSpace s(binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  const auto q = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tree_hj_search(s, a, zero_parity, x, q));
}
BENCHMARK(BM_TreeHjSearch)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SpanU(benchmark::State& state) {
  const CellSpace s(binary(static_cast<int>(state.range(0))));
  std::vector<VectorLevelSubset> levels;
  for (int n = 0; n < s.height(); ++n) levels.push_back(full_level(s.vtree(), n));
  const auto u = UFamily::singletons(s, VectorSubset(levels));
  for (auto _ : state) benchmark::DoNotOptimize(span_u(s, u));
}
BENCHMARK(BM_SpanU)->Arg(3)->Arg(4);

void BM_FolkmanNumber(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(folkman_number(2, 2, 5));
}
BENCHMARK(BM_FolkmanNumber)->Unit(benchmark::kMillisecond);

void BM_VerifyCounterexample(benchmark::State& state) {
  const Tree tree({2, 2, 2});
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_counterexample(tree, 2, 4, std::uint64_t{1} << 22, workers));
}
BENCHMARK(BM_VerifyCounterexample)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
