#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace subdiff {

/// Backward-Euler convolution quadrature weights: the coefficients of
/// (1 - xi)^alpha = sum_j b_j xi^j, j = 0..N, for time step tau.
struct CQWeights {
  double alpha = 1.0;
  double tau = 1.0;
  std::vector<double> b;

  std::size_t steps() const { return b.empty() ? 0 : b.size() - 1; }
};

/// b_0 = 1, b_j = b_{j-1} (j - 1 - alpha) / j. Throws InputError unless
/// alpha in (0,1], N >= 1 and tau > 0.
CQWeights cq_weights(double alpha, std::size_t N, double tau = 1.0);

/// Time levels u^0..u^n of a nodal vector, stored contiguously by level.
class History {
 public:
  explicit History(std::size_t nodes, std::size_t reserve_levels = 0);

  std::size_t nodes() const { return nodes_; }
  std::size_t levels() const { return nodes_ == 0 ? 0 : data_.size() / nodes_; }
  void push(std::span<const double> level);
  std::span<const double> level(std::size_t j) const {
    return {data_.data() + j * nodes_, nodes_};
  }

 private:
  std::size_t nodes_;
  std::vector<double> data_;
};

/// out_i = sum_{j=1}^{n} b_j (u^{n-j}_i - u^0_i), the memory part of the
/// CQ sum at level n (the j = 0 term is excluded). OpenMP-parallel over
/// node blocks; every node accumulates j in increasing order, so the
/// result matches cq_memory_serial bitwise.
void cq_memory(const CQWeights& w, const History& hist, std::size_t n, std::span<double> out);
void cq_memory_serial(const CQWeights& w, const History& hist, std::size_t n, std::span<double> out);

/// tau^{-alpha} sum_{j=0}^{n} b_j (u^{n-j} - u^0). Requires n + 1 levels.
std::vector<double> discrete_caputo(const History& hist, const CQWeights& w, std::size_t n);

}  // namespace subdiff
