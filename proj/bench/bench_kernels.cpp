// Forward apply of the cusp12 operator: OpenMP matrix-free kernel, serial
// reference kernel and the dense product, for grids of 2^k nodes per axis.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "foldlab/operator.hpp"
#include "foldlab/phase.hpp"

using namespace foldlab;

namespace {

DiscreteOperator cusp_operator(std::size_t count) {
  const std::size_t counts[] = {count, count};
  return discretize_with_counts(make_model_phase(ModelKind::Cusp12, 2, 1), Amplitude{TensorBump::uniform(1), {}},
                                1024.0, counts);
}

void run(benchmark::State& state, ApplyPath path, bool adjoint) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  omp_set_num_threads(threads);
  const auto op = cusp_operator(count);
  const CMatrix u = CMatrix::Random(static_cast<Eigen::Index>(count), 4);
  if (path == ApplyPath::Dense) benchmark::DoNotOptimize(op.dense_kernel().data());
  for (auto _ : state) {
    CMatrix v = adjoint ? op.apply_adjoint(u, path) : op.apply(u, path);
    benchmark::DoNotOptimize(v.data());
  }
  state.counters["entries/s"] = benchmark::Counter(static_cast<double>(count * count * 4) * state.iterations(),
                                                   benchmark::Counter::kIsRate);
}

void BM_MatrixFree(benchmark::State& s) { run(s, ApplyPath::MatrixFree, false); }
void BM_MatrixFreeAdjoint(benchmark::State& s) { run(s, ApplyPath::MatrixFree, true); }
void BM_Reference(benchmark::State& s) { run(s, ApplyPath::Reference, false); }
void BM_Dense(benchmark::State& s) { run(s, ApplyPath::Dense, false); }

void sizes(benchmark::internal::Benchmark* b, bool threaded) {
  const int max_threads = omp_get_max_threads();
  for (int c : {256, 1024, 2048})
    for (int t = 1; t <= (threaded ? max_threads : 1); t *= 2) b->Args({c, t});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_MatrixFree)->Apply([](auto* b) { sizes(b, true); });
BENCHMARK(BM_MatrixFreeAdjoint)->Apply([](auto* b) { sizes(b, true); });
BENCHMARK(BM_Reference)->Apply([](auto* b) { sizes(b, false); });
BENCHMARK(BM_Dense)->Apply([](auto* b) { sizes(b, true); });

BENCHMARK_MAIN();
