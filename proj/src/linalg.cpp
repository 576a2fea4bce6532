#include "fracgfm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fracgfm {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw std::invalid_argument("DenseMatrix: size mismatch");
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("DenseMatrix: non-finite entry");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_columns(std::size_t rows, const std::vector<Vector>& columns) {
  DenseMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != rows) throw std::invalid_argument("from_columns: ragged columns");
    m.set_column(j, columns[j]);
  }
  return m;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::left_columns(std::size_t count) const {
  DenseMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, j);
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("multiply_at_b: dimension mismatch");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  return c;
}

void matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    out[i] = s;
  }
}

void matvec_transpose(const DenseMatrix& a, std::span<const double> x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j] * xi;
  }
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  Vector out(a.rows());
  matvec(a, x, out);
  return out;
}

Vector matvec_transpose(const DenseMatrix& a, std::span<const double> x) {
  Vector out(a.cols());
  matvec_transpose(a, x, out);
  return out;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(std::span<const double> x, double alpha) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

double default_rank_tol(const DenseMatrix& m) {
  return 1e-10 * static_cast<double>(std::max<std::size_t>({m.rows(), m.cols(), 1}));
}

RowNullSplit row_null_split(const DenseMatrix& m, std::optional<double> tol) {
  const double rel_tol = tol.value_or(default_rank_tol(m));
  const std::size_t n = m.cols();
  const std::size_t r = m.rows();
  // Work on A = M^T (n x r); range(A) is the row space of M.
  DenseMatrix a = m.transpose();

  const std::size_t steps = std::min(n, r);
  std::vector<Vector> reflectors;
  double first_pivot = 0.0;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    // Pivot on the largest remaining column norm, recomputed each step.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < r; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += a(i, j) * a(i, j);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, best));
    }
    const double pivot = std::sqrt(std::max(best_norm, 0.0));
    if (k == 0) first_pivot = pivot;
    if (pivot == 0.0 || pivot <= rel_tol * first_pivot) break;
    ++rank;

    Vector v(n, 0.0);
    for (std::size_t i = k; i < n; ++i) v[i] = a(i, k);
    const double alpha = v[k] >= 0.0 ? -pivot : pivot;
    v[k] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm > 0.0) {
      for (double& x : v) x /= vnorm;
      for (std::size_t j = k; j < r; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += v[i] * a(i, j);
        for (std::size_t i = k; i < n; ++i) a(i, j) -= 2.0 * s * v[i];
      }
    }
    reflectors.push_back(std::move(v));
  }

  // Full Q = H_0 H_1 ... H_{rank-1}, applied to the identity.
  DenseMatrix q = DenseMatrix::identity(n);
  for (std::size_t idx = reflectors.size(); idx-- > 0;) {
    const Vector& v = reflectors[idx];
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = idx; i < n; ++i) s += v[i] * q(i, j);
      if (s == 0.0) continue;
      for (std::size_t i = idx; i < n; ++i) q(i, j) -= 2.0 * s * v[i];
    }
  }

  RowNullSplit out;
  out.rank = rank;
  out.row_space = DenseMatrix(n, rank);
  out.null_space = DenseMatrix(n, n - rank);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < rank; ++j) out.row_space(i, j) = q(i, j);
    for (std::size_t j = rank; j < n; ++j) out.null_space(i, j - rank) = q(i, j);
  }
  return out;
}

DenseMatrix orthonormal_null_basis(const DenseMatrix& m, std::optional<double> tol) {
  return row_null_split(m, tol).null_space;
}

namespace {

SpectralNormResult power_iteration(const DenseMatrix& a, Vector x, double tol, int max_iter) {
  SpectralNormResult res;
  Vector ax(a.rows());
  Vector y(a.cols());
  double estimate = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    matvec(a, x, ax);
    matvec_transpose(a, ax, y);
    const double ny = norm2(y);
    res.iterations = it;
    if (ny == 0.0) {
      // x landed in the kernel; A is nonzero here, so restart from a basis vector.
      std::fill(x.begin(), x.end(), 0.0);
      x[static_cast<std::size_t>(it) % x.size()] = 1.0;
      continue;
    }
    const double next = norm2(ax);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / ny;
    if (it > 1 && std::abs(next - estimate) <= tol * next) {
      estimate = next;
      res.converged = true;
      break;
    }
    estimate = next;
  }
  // Final Rayleigh quotient on the normalized iterate.
  matvec(a, x, ax);
  res.value = std::max(estimate, norm2(ax));
  return res;
}

}  // namespace

SpectralNormResult spectral_norm(const DenseMatrix& a, double tol, int max_iter) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (frobenius_norm(a) == 0.0) return {0.0, 0, true};
  const std::size_t n = a.cols();
  SpectralNormResult best = power_iteration(a, Vector(n, 1.0 / std::sqrt(static_cast<double>(n))), tol, max_iter);
  // Structured matrices (block-diagonal incidences, for one) can make the
  // all-ones start exactly orthogonal to the top singular vector. An
  // irregular second start has no such alignment.
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(1.0 + 0.7548776662466927 * static_cast<double>(i * i + i));
  const double nx = norm2(x);
  for (double& v : x) v /= nx;
  const SpectralNormResult second = power_iteration(a, std::move(x), tol, max_iter);
  if (second.value > best.value) {
    best.value = second.value;
    best.converged = second.converged;
  }
  best.iterations += second.iterations;
  return best;
}

EigenDecomposition symmetric_eigh(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw std::invalid_argument("symmetric_eigh: matrix not square");
  double scale = 1.0;
  for (double v : s.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale)
        throw std::invalid_argument("symmetric_eigh: matrix not symmetric");

  DenseMatrix a = s;
  DenseMatrix v = DenseMatrix::identity(n);
  const double fro = frobenius_norm(s);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= 1e-15 * fro || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

}  // namespace fracgfm
