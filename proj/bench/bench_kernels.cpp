// Serial vs OpenMP cosine scoring, plus hashing-embedder batch throughput.
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "membias/embedding.hpp"
#include "membias/kernels.hpp"
#include "membias/rng.hpp"

namespace {

using membias::kernels::DenseMatrix;

struct Pool {
  DenseMatrix matrix;
  std::vector<double> query;
};

Pool make_pool(std::size_t rows, std::size_t dim) {
  membias::Rng rng(42);
  Pool p{DenseMatrix(dim), std::vector<double>(dim)};
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& x : row) x = rng.uniform01() - 0.5;
    p.matrix.append(row);
  }
  for (auto& x : p.query) x = rng.uniform01() - 0.5;
  return p;
}

template <void (*Kernel)(std::span<const double>, const DenseMatrix&, std::span<double>)>
void BM_CosineScores(benchmark::State& state) {
  const auto pool = make_pool(static_cast<std::size_t>(state.range(0)), 384);
  std::vector<double> out(pool.matrix.rows());
  for (auto _ : state) {
    Kernel(pool.query, pool.matrix, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_TEMPLATE(BM_CosineScores, membias::kernels::cosine_scores_serial)->Arg(1000)->Arg(10000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_CosineScores, membias::kernels::cosine_scores_parallel)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_HashingEmbedBatch(benchmark::State& state) {
  std::vector<std::string> texts;
  for (int i = 0; i < state.range(0); ++i) {
    texts.push_back("She is a registered nurse with " + std::to_string(i % 30) +
                    " years of experience in pediatric and emergency care.");
  }
  membias::HashingEmbedder embedder;
  for (auto _ : state) {
    auto v = membias::embed_batch(texts, embedder);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HashingEmbedBatch)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
