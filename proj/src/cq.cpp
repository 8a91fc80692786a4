#include "subdiff/cq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

CQWeights cq_weights(double alpha, std::size_t N, double tau) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError("cq_weights: alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  if (N < 1) throw InputError("cq_weights: need at least one step");
  if (!(tau > 0.0)) throw InputError("cq_weights: tau must be positive");
  CQWeights w{alpha, tau, std::vector<double>(N + 1)};
  w.b[0] = 1.0;
  for (std::size_t j = 1; j <= N; ++j) {
    w.b[j] = w.b[j - 1] * (static_cast<double>(j) - 1.0 - alpha) / static_cast<double>(j);
  }
  return w;
}

History::History(std::size_t nodes, std::size_t reserve_levels) : nodes_(nodes) {
  data_.reserve(nodes * reserve_levels);
}

void History::push(std::span<const double> level) {
  if (level.size() != nodes_) throw InputError("History::push: level has wrong size");
  data_.insert(data_.end(), level.begin(), level.end());
}

namespace {

void check_memory_args(const CQWeights& w, const History& hist, std::size_t n, std::size_t out_size) {
  if (n > w.steps()) throw InputError("cq_memory: step index beyond weight table");
  if (hist.levels() < n) {
    throw InputError("cq_memory: history has " + std::to_string(hist.levels()) +
                     " levels, need " + std::to_string(n));
  }
  if (out_size != hist.nodes()) throw InputError("cq_memory: output has wrong size");
}

void memory_block(const CQWeights& w, const History& hist, std::size_t n, std::size_t lo,
                  std::size_t hi, double* out) {
  const auto u0 = hist.level(0);
  std::fill(out + lo, out + hi, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const double bj = w.b[j];
    if (bj == 0.0) continue;
    const double* u = hist.level(n - j).data();
    for (std::size_t i = lo; i < hi; ++i) out[i] += bj * (u[i] - u0[i]);
  }
}

constexpr std::size_t kBlock = 512;

}  // namespace

void cq_memory(const CQWeights& w, const History& hist, std::size_t n, std::span<double> out) {
  check_memory_args(w, hist, n, out.size());
  const std::size_t nodes = hist.nodes();
  const auto blocks = static_cast<std::ptrdiff_t>((nodes + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    memory_block(w, hist, n, lo, std::min(nodes, lo + kBlock), out.data());
  }
}

void cq_memory_serial(const CQWeights& w, const History& hist, std::size_t n, std::span<double> out) {
  check_memory_args(w, hist, n, out.size());
  memory_block(w, hist, n, 0, hist.nodes(), out.data());
}

std::vector<double> discrete_caputo(const History& hist, const CQWeights& w, std::size_t n) {
  if (hist.levels() < n + 1) {
    throw InputError("discrete_caputo: history has " + std::to_string(hist.levels()) +
                     " levels, need " + std::to_string(n + 1));
  }
  std::vector<double> out(hist.nodes(), 0.0);
  if (n == 0) return out;
  cq_memory(w, hist, n, out);
  const auto un = hist.level(n);
  const auto u0 = hist.level(0);
  const double scale = std::pow(w.tau, -w.alpha);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * (w.b[0] * (un[i] - u0[i]) + out[i]);
  return out;
}

}  // namespace subdiff
