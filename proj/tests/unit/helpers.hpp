#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "subdiff/forward.hpp"
#include "subdiff/sparse.hpp"

namespace testing_support {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const subdiff::CsrMatrix& A) {
  Dense D(A.n, std::vector<double>(A.n, 0.0));
  for (std::size_t i = 0; i < A.n; ++i)
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) D[i][A.col[k]] = A.val[k];
  return D;
}

/// Gaussian elimination with partial pivoting; the oracle for linear solves.
inline std::vector<double> dense_solve(Dense A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    std::swap(b[c], b[p]);
    if (A[c][c] == 0.0) throw std::runtime_error("dense_solve: singular");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= m * A[c][k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

inline std::vector<double> dense_mul(const Dense& A, const std::vector<double>& x) {
  std::vector<double> y(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
  return y;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// The 1D experiment on (0,10): b = 1, v = x(10-x)/50 + 1, f = 10, M1 = 5.
inline subdiff::ProblemSpec reference_1d(double alpha, double T, int cells, std::size_t steps) {
  subdiff::ProblemSpec s;
  s.alpha = alpha;
  s.T = T;
  s.num_steps = steps;
  s.mesh = subdiff::build_mesh(subdiff::Interval{0.0, 10.0}, cells);
  s.v = subdiff::FieldExpr::parse("x*(10-x)/50+1");
  s.b = subdiff::FieldExpr::parse("1");
  s.f = subdiff::FieldExpr::parse("10");
  s.M1 = 5.0;
  s.seed = 11;
  return s;
}

inline const char* kSmoothPotential = "3+cos(0.6*pi*x)";
inline const char* kTrianglePotential = "4-tri(x)";
inline const char* kStepPotential = "4-chi(2,4,x)-chi(6,8,x)";

}  // namespace testing_support
