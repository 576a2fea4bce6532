#include "fracgfm/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace fracgfm {

namespace {

ColumnStats compute_column_stats(const EdgeIncidence& inc, const DenseMatrix& v) {
  ColumnStats s;
  const std::size_t m = v.cols();
  s.forward.resize(m);
  s.reversed.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    const Vector col = v.column(c);
    s.forward[c] = inc.variation(col, false);
    s.reversed[c] = inc.variation(col, true);
    if (s.forward[c] < s.forward[s.forward_argmin]) s.forward_argmin = c;
    if (s.reversed[c] < s.reversed[s.reversed_argmin]) s.reversed_argmin = c;
  }
  return s;
}

}  // namespace

FractionalProblem::FractionalProblem(EdgeIncidence inc, DiagonalMetric q, DenseMatrix v)
    : inc_(std::move(inc)), q_(std::move(q)), v_(std::move(v)) {
  const std::size_t n = v_.rows();
  if (static_cast<std::size_t>(inc_.cols()) != n || q_.size() != n)
    throw std::invalid_argument("FractionalProblem: dimension mismatch");
  if (v_.cols() == 0) throw std::invalid_argument("FractionalProblem: empty basis");
  const DenseMatrix vtv = multiply_at_b(v_, v_);
  if (max_abs_diff(vtv, DenseMatrix::identity(v_.cols())) > 1e-10)
    throw std::invalid_argument("FractionalProblem: basis columns are not orthonormal");

  const std::size_t m = v_.cols();
  cv_ = DenseMatrix(inc_.rows(), m);
  for (std::size_t k = 0; k < inc_.rows(); ++k) {
    const auto a = v_.row(static_cast<std::size_t>(inc_.tail()[k]));
    const auto b = v_.row(static_cast<std::size_t>(inc_.head()[k]));
    for (std::size_t j = 0; j < m; ++j) cv_(k, j) = a[j] - b[j];
  }
  norm_cv_ = inc_.rows() == 0 ? 0.0 : spectral_norm(cv_).value;

  gram_ = DenseMatrix(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = v_.row(i);
    const double di = q_.d[i];
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) gram_(a, b) += di * r[a] * r[b];
  }
  stats_ = compute_column_stats(inc_, v_);
}

Vector FractionalProblem::lift(std::span<const double> x) const { return matvec(v_, x); }

void FractionalProblem::apply_cv(std::span<const double> x, std::span<double> out,
                                 std::span<double> scratch_n) const {
  matvec(v_, x, scratch_n);
  inc_.apply(scratch_n, out);
}

void FractionalProblem::apply_cv_transpose(std::span<const double> u, std::span<double> out,
                                           std::span<double> scratch_n) const {
  inc_.apply_transpose(u, scratch_n);
  matvec_transpose(v_, scratch_n, out);
}

double FractionalProblem::numerator(std::span<const double> x) const {
  return inc_.variation(lift(x));
}

double FractionalProblem::denominator(std::span<const double> x) const {
  const Vector mx = matvec(gram_, x);
  return std::sqrt(std::max(dot(x, mx), 0.0));
}

double dv_eval(const EdgeIncidence& inc, std::span<const double> y, bool reversed) {
  if (y.size() != static_cast<std::size_t>(inc.cols()))
    throw std::invalid_argument("dv_eval: signal length does not match vertex count");
  return inc.variation(y, reversed);
}

RatioValue evaluate(const FractionalProblem& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw std::invalid_argument("evaluate: dimension mismatch");
  RatioValue r;
  r.b = p.denominator(x);
  if (!(r.b > 0.0)) throw std::invalid_argument("evaluate: B(x) = 0, x is outside the domain");
  r.t = p.numerator(x);
  r.e = r.t / r.b;
  return r;
}

Vector b_gradient(const FractionalProblem& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw std::invalid_argument("b_gradient: dimension mismatch");
  Vector mx = matvec(p.gram(), x);
  const double b = std::sqrt(std::max(dot(x, mx), 0.0));
  if (!(b > 0.0)) throw std::invalid_argument("b_gradient: B is not differentiable at 0");
  for (double& v : mx) v /= b;
  return mx;
}

ColumnStats column_stats(const FractionalProblem& p) { return p.column_stats(); }

}  // namespace fracgfm
