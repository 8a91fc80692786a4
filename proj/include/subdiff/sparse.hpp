#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace subdiff {

/// Square matrix in compressed-row storage. Column indices within a row
/// are strictly increasing.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  /// Pointer to the stored entry (i, j), nullptr when not stored.
  double* find(std::size_t i, std::size_t j);
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Builds a CSR matrix from triplets; duplicate entries are summed.
CsrMatrix csr_from_triplets(std::size_t n, std::vector<Triplet> entries);
CsrMatrix identity_matrix(std::size_t n);

/// Same sparsity pattern with values a*A + b*B. Patterns must match.
CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B);
CsrMatrix transpose(const CsrMatrix& A);
/// Largest componentwise |A - A^T|.
double asymmetry(const CsrMatrix& A);

/// y = A x. OpenMP-parallel over rows; each row is accumulated in column
/// order, so the result is bitwise identical to spmv_serial.
void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& A, std::span<const double> x);
/// Single-threaded reference kernel.
void spmv_serial(const CsrMatrix& A, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct SolveReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;  // relative 2-norm ||Ax - b|| / ||b||
  bool converged = false;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Jacobi-preconditioned conjugate gradients for SPD A. Stops when
/// ||A x - rhs|| <= rel_tol ||rhs|| or after 10 n iterations. The caller
/// checks report.converged; use solve_spd_or_throw to fail loudly.
SolveResult solve_spd(const CsrMatrix& A, std::span<const double> rhs, double rel_tol = 1e-12,
                      std::span<const double> initial_guess = {});
std::vector<double> solve_spd_or_throw(const CsrMatrix& A, std::span<const double> rhs,
                                       double rel_tol, const char* context);

/// Cholesky factorization of an SPD matrix in symmetric band storage.
/// Factor once, then solve repeatedly; cost is O(n bw^2) to factor and
/// O(n bw) per solve.
class BandedCholesky {
 public:
  BandedCholesky() = default;
  /// Throws NumericalError if A is not numerically positive definite.
  explicit BandedCholesky(const CsrMatrix& A);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }
  void solve_in_place(std::span<double> b) const;

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  // Row i holds L(i, i-bw .. i) at band_[i*(bw+1) + (j - i + bw)].
  std::vector<double> band_;
};

}  // namespace subdiff
