#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "logbatch/kernels.hpp"
#include "logbatch/preprocess.hpp"
#include "logbatch/vectorize.hpp"

using namespace logbatch;

namespace {

struct Chunk {
  std::vector<LogRecord> records;
  std::vector<TokenizedLog> logs;
  Vocabulary vocab;
  std::vector<LogVector> unit_vectors;
};

// Synthetic chunk: 40 message shapes with random ids and numbers.
const Chunk& chunk_of(std::size_t n) {
  static std::vector<std::unique_ptr<Chunk>> cache;
  for (const auto& c : cache) {
    if (c->records.size() == n) return *c;
  }
  auto c = std::make_unique<Chunk>();
  std::mt19937_64 rng(n);
  std::uniform_int_distribution<int> shape(0, 39);
  std::uniform_int_distribution<int> num(0, 99999);
  for (std::size_t i = 0; i < n; ++i) {
    const int s = shape(rng);
    std::string msg = "event" + std::to_string(s) + " component c" + std::to_string(s % 7);
    for (int w = 0; w < 3 + s % 5; ++w) msg += " field" + std::to_string(w) + "=" + std::to_string(num(rng));
    msg += " user u" + std::to_string(num(rng) % 50);
    c->records.push_back({i, msg, msg});
  }
  for (const auto& r : c->records) c->logs.push_back(preprocess(r));
  c->vocab = build_vocabulary(c->logs);
  for (const auto& v : kernels::serial::vectorize_all(c->logs, c->vocab)) c->unit_vectors.push_back(normalized(v));
  cache.push_back(std::move(c));
  return *cache.back();
}

void BM_vectorize_serial(benchmark::State& state) {
  const auto& c = chunk_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::vectorize_all(c.logs, c.vocab));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_vectorize_parallel(benchmark::State& state) {
  const auto& c = chunk_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::vectorize_all(c.logs, c.vocab));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_neighborhoods_serial(benchmark::State& state) {
  const auto& c = chunk_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::neighborhoods(c.unit_vectors, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_neighborhoods_parallel(benchmark::State& state) {
  const auto& c = chunk_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::neighborhoods(c.unit_vectors, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_similarity_row_serial(benchmark::State& state) {
  const auto& c = chunk_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::similarity_row(c.unit_vectors, 0));
}

void BM_similarity_row_parallel(benchmark::State& state) {
  const auto& c = chunk_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::similarity_row(c.unit_vectors, 0));
}

}  // namespace

BENCHMARK(BM_vectorize_serial)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_vectorize_parallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_neighborhoods_serial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_neighborhoods_parallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_similarity_row_serial)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_similarity_row_parallel)->Arg(2000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
