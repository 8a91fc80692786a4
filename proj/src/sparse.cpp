#include "subdiff/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

double* CsrMatrix::find(std::size_t i, std::size_t j) {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return nullptr;
  return &val[static_cast<std::size_t>(it - col.begin())];
}

CsrMatrix csr_from_triplets(std::size_t n, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= n || t.col >= n) throw InputError("csr_from_triplets: index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix A;
  A.n = n;
  A.row_ptr.assign(n + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& t = entries[k];
    if (!A.col.empty() && k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
      A.val.back() += t.value;
      continue;
    }
    A.col.push_back(t.col);
    A.val.push_back(t.value);
    ++A.row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
  return A;
}

CsrMatrix identity_matrix(std::size_t n) {
  CsrMatrix A;
  A.n = n;
  A.row_ptr.resize(n + 1);
  A.col.resize(n);
  A.val.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    A.row_ptr[i] = i;
    A.col[i] = i;
  }
  A.row_ptr[n] = n;
  return A;
}

CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
  if (A.n != B.n || A.row_ptr != B.row_ptr || A.col != B.col) {
    throw InputError("linear_combination: sparsity patterns differ");
  }
  CsrMatrix C = A;
  for (std::size_t k = 0; k < C.val.size(); ++k) C.val[k] = a * A.val[k] + b * B.val[k];
  return C;
}

CsrMatrix transpose(const CsrMatrix& A) {
  std::vector<Triplet> t;
  t.reserve(A.nnz());
  for (std::size_t i = 0; i < A.n; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) t.push_back({A.col[k], i, A.val[k]});
  }
  return csr_from_triplets(A.n, std::move(t));
}

double asymmetry(const CsrMatrix& A) {
  double worst = 0.0;
  for (std::size_t i = 0; i < A.n; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      worst = std::max(worst, std::abs(A.val[k] - A.at(A.col[k], i)));
    }
  }
  return worst;
}

namespace {

void check_dims(const CsrMatrix& A, std::size_t nx, std::size_t ny) {
  if (nx != A.n || ny != A.n) {
    throw InputError("spmv: dimension mismatch (matrix " + std::to_string(A.n) + ", x " +
                     std::to_string(nx) + ", y " + std::to_string(ny) + ")");
  }
}

}  // namespace

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
  check_dims(A, x.size(), y.size());
  const auto n = static_cast<std::ptrdiff_t>(A.n);
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double s = 0.0;
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& A, std::span<const double> x) {
  std::vector<double> y(A.n);
  spmv(A, x, y);
  return y;
}

void spmv_serial(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
  check_dims(A, x.size(), y.size());
  for (std::size_t i = 0; i < A.n; ++i) {
    double s = 0.0;
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
    y[i] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SolveResult solve_spd(const CsrMatrix& A, std::span<const double> rhs, double rel_tol,
                      std::span<const double> initial_guess) {
  if (rhs.size() != A.n) throw InputError("solve_spd: rhs size does not match matrix");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InputError("solve_spd: rel_tol must lie in (0,1)");
  const std::size_t n = A.n;
  SolveResult out;
  out.x.assign(n, 0.0);
  if (!initial_guess.empty()) {
    if (initial_guess.size() != n) throw InputError("solve_spd: initial guess has wrong size");
    std::copy(initial_guess.begin(), initial_guess.end(), out.x.begin());
  }

  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    out.report = {0, 0.0, true};
    return out;
  }

  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = A.at(i, i);
    if (!(d > 0.0)) throw NumericalError("solve_spd: non-positive diagonal entry at row " + std::to_string(i));
    inv_diag[i] = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), Ap(n);
  spmv(A, out.x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
  double res = norm2(r) / rhs_norm;
  const std::size_t cap = 10 * n;
  std::size_t it = 0;
  if (res > rel_tol) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (it < cap) {
      spmv(A, p, Ap);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0)) break;
      const double step = rz / pAp;
      for (std::size_t i = 0; i < n; ++i) {
        out.x[i] += step * p[i];
        r[i] -= step * Ap[i];
      }
      ++it;
      res = norm2(r) / rhs_norm;
      if (res <= rel_tol) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // The recursive residual drifts from the true one; report the true value.
    spmv(A, out.x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
    res = norm2(r) / rhs_norm;
  }
  out.report = {it, res, res <= rel_tol};
  return out;
}

std::vector<double> solve_spd_or_throw(const CsrMatrix& A, std::span<const double> rhs,
                                       double rel_tol, const char* context) {
  auto result = solve_spd(A, rhs, rel_tol);
  if (!result.report.converged) {
    throw NumericalError(std::string(context) + ": conjugate gradients stopped after " +
                         std::to_string(result.report.iterations) + " iterations with relative residual " +
                         std::to_string(result.report.final_residual));
  }
  return std::move(result.x);
}

BandedCholesky::BandedCholesky(const CsrMatrix& A) : n_(A.n) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const std::size_t j = A.col[k];
      if (j < i) bw_ = std::max(bw_, i - j);
    }
  }
  const std::size_t w = bw_ + 1;
  band_.assign(n_ * w, 0.0);
  auto L = [&](std::size_t i, std::size_t j) -> double& { return band_[i * w + (j + bw_ - i)]; };

  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      if (A.col[k] <= i) L(i, A.col[k]) = A.val[k];
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      const std::size_t k0 = std::max(j0, j > bw_ ? j - bw_ : 0);
      double s = L(i, j);
      for (std::size_t k = k0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (j == i) {
        if (!(s > 0.0)) {
          throw NumericalError("BandedCholesky: matrix is not positive definite (pivot " +
                               std::to_string(i) + ")");
        }
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
}

void BandedCholesky::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) throw InputError("BandedCholesky::solve_in_place: size mismatch");
  const std::size_t w = bw_ + 1;
  auto L = [&](std::size_t i, std::size_t j) { return band_[i * w + (j + bw_ - i)]; };
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > bw_ ? i - bw_ : 0;
    double s = b[i];
    for (std::size_t j = j0; j < i; ++j) s -= L(i, j) * b[j];
    b[i] = s / L(i, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t j1 = std::min(n_ - 1, ii + bw_);
    double s = b[ii];
    for (std::size_t j = ii + 1; j <= j1; ++j) s -= L(j, ii) * b[j];
    b[ii] = s / L(ii, ii);
  }
}

}  // namespace subdiff
