#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fracgfm {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small sizes only (a few hundred rows at most).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Row-major data; throws std::invalid_argument on size mismatch or non-finite entries.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  /// Matrix whose columns are the given vectors (all of equal length).
  static DenseMatrix from_columns(std::size_t rows, const std::vector<Vector>& columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> v);

  DenseMatrix transpose() const;
  /// First `count` columns.
  DenseMatrix left_columns(std::size_t count) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// a^T b without forming the transpose.
DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b);
/// out = A x.
void matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> out);
/// out = A^T x.
void matvec_transpose(const DenseMatrix& a, std::span<const double> x, std::span<double> out);
Vector matvec(const DenseMatrix& a, std::span<const double> x);
Vector matvec_transpose(const DenseMatrix& a, std::span<const double> x);

double frobenius_norm(const DenseMatrix& a);
/// max_ij |A_ij - B_ij|.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
/// y += alpha x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector scaled(std::span<const double> x, double alpha);

/// Default rank cutoff factor 1e-10 * max(r, n) for an r x n matrix.
double default_rank_tol(const DenseMatrix& m);

/// Orthonormal bases of the row space and the null space of M, split by a
/// column-pivoted Householder QR of M^T. Singular directions whose pivot is at
/// most tol * |largest pivot| count as null.
struct RowNullSplit {
  DenseMatrix row_space;   ///< n x rank
  DenseMatrix null_space;  ///< n x (n - rank)
  std::size_t rank = 0;
};
RowNullSplit row_null_split(const DenseMatrix& m, std::optional<double> tol = std::nullopt);

/// n x q matrix with orthonormal columns spanning ker(M), q = n - rank(M).
DenseMatrix orthonormal_null_basis(const DenseMatrix& m, std::optional<double> tol = std::nullopt);

struct SpectralNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on A^T A. Two deterministic
/// starts are run (the normalized all-ones vector, then a fixed irregular
/// vector) and the larger estimate wins. Each run stops when the relative
/// change of the estimate is below tol.
SpectralNormResult spectral_norm(const DenseMatrix& a, double tol = 1e-14, int max_iter = 20000);

struct EigenDecomposition {
  Vector values;        ///< ascending
  DenseMatrix vectors;  ///< column j pairs with values[j]
};

/// Cyclic Jacobi eigensolver. Throws std::invalid_argument if S is not square
/// or not symmetric to within 1e-12 * max(1, max|S_ij|).
EigenDecomposition symmetric_eigh(const DenseMatrix& s);

}  // namespace fracgfm
