#pragma once

#include <span>
#include <vector>

#include "fracgfm/graph.hpp"
#include "fracgfm/linalg.hpp"

namespace fracgfm {

/// Per-column variations of the constraint basis and their argmins
/// (lowest index wins ties).
struct ColumnStats {
  Vector forward;   ///< T(v_s)
  Vector reversed;  ///< T_1(v_s) = T(-v_s)
  std::size_t forward_argmin = 0;
  std::size_t reversed_argmin = 0;
};

/// The ratio T(Vx) / ||Q^{1/2} V x|| over x in R^m \ {0}, with T the graph
/// directed variation. Immutable once built; every cached quantity is
/// computed in the constructor.
class FractionalProblem {
 public:
  /// Throws std::invalid_argument if dimensions disagree or V^T V deviates
  /// from the identity by more than 1e-10.
  FractionalProblem(EdgeIncidence inc, DiagonalMetric q, DenseMatrix v);

  const EdgeIncidence& incidence() const { return inc_; }
  const DiagonalMetric& metric() const { return q_; }
  const DenseMatrix& basis() const { return v_; }
  /// C V, |E| x m.
  const DenseMatrix& cv() const { return cv_; }
  double norm_cv() const { return norm_cv_; }
  /// V^T Q V, m x m.
  const DenseMatrix& gram() const { return gram_; }
  const ColumnStats& column_stats() const { return stats_; }

  std::size_t dim() const { return v_.cols(); }
  std::size_t vertex_count() const { return v_.rows(); }
  std::size_t edge_count() const { return inc_.rows(); }

  /// V x.
  Vector lift(std::span<const double> x) const;
  /// out = C V x, computed as C (V x).
  void apply_cv(std::span<const double> x, std::span<double> out, std::span<double> scratch_n) const;
  /// out = V^T C^T u.
  void apply_cv_transpose(std::span<const double> u, std::span<double> out, std::span<double> scratch_n) const;

  /// T(V x).
  double numerator(std::span<const double> x) const;
  /// B(x) = sqrt(x^T V^T Q V x).
  double denominator(std::span<const double> x) const;

 private:
  EdgeIncidence inc_;
  DiagonalMetric q_;
  DenseMatrix v_;
  DenseMatrix cv_;
  double norm_cv_ = 0.0;
  DenseMatrix gram_;
  ColumnStats stats_;
};

struct RatioValue {
  double t = 0.0;  ///< T(Vx)
  double b = 0.0;  ///< B(x)
  double e = 0.0;  ///< t / b
};

/// Directed variation of a vertex signal y; reversed evaluates T(-y).
/// Throws std::invalid_argument if y has the wrong length.
double dv_eval(const EdgeIncidence& inc, std::span<const double> y, bool reversed = false);

/// Throws std::invalid_argument for x = 0 (B vanishes only there).
RatioValue evaluate(const FractionalProblem& p, std::span<const double> x);

/// Gradient of B at x != 0: V^T Q V x / B(x).
Vector b_gradient(const FractionalProblem& p, std::span<const double> x);

ColumnStats column_stats(const FractionalProblem& p);

}  // namespace fracgfm
