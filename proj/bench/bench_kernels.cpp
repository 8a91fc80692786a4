// Serial versus OpenMP kernels: sparse matrix-vector products on Q1
// stiffness matrices and the convolution-quadrature history sum.

#include <benchmark/benchmark.h>

#include <vector>

#include "subdiff/cq.hpp"
#include "subdiff/fem.hpp"
#include "subdiff/mesh.hpp"
#include "subdiff/sparse.hpp"

using namespace subdiff;

namespace {

CsrMatrix stiffness_2d(int cells) {
  const Interval box[2] = {{0.0, 1.0}, {0.0, 1.0}};
  return assemble_stiffness(build_mesh(box, cells));
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
  const CsrMatrix A = stiffness_2d(static_cast<int>(state.range(0)));
  std::vector<double> x(A.n, 1.0), y(A.n);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + 1e-3 * double(i % 97);
  for (auto _ : state) {
    if constexpr (Parallel) {
      spmv(A, x, y);
    } else {
      spmv_serial(A, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(A.val.size()));
}

template <bool Parallel>
void BM_CqMemory(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const CQWeights w = cq_weights(0.5, steps, 0.01);
  History hist(nodes, steps + 1);
  std::vector<double> level(nodes);
  for (std::size_t n = 0; n <= steps; ++n) {
    for (std::size_t k = 0; k < nodes; ++k) level[k] = 1.0 + 1e-3 * double((n * 31 + k) % 101);
    hist.push(level);
  }
  std::vector<double> out(nodes);
  for (auto _ : state) {
    if constexpr (Parallel) {
      cq_memory(w, hist, steps, out);
    } else {
      cq_memory_serial(w, hist, steps, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(nodes * steps));
}

}  // namespace

BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->Arg(64)->Arg(128)->Arg(300);
BENCHMARK(BM_Spmv<true>)->Name("spmv/openmp")->Arg(64)->Arg(128)->Arg(300);
BENCHMARK(BM_CqMemory<false>)->Name("cq_memory/serial")->Args({1001, 500})->Args({10201, 200})->Args({90601, 100});
BENCHMARK(BM_CqMemory<true>)->Name("cq_memory/openmp")->Args({1001, 500})->Args({10201, 200})->Args({90601, 100});

BENCHMARK_MAIN();
