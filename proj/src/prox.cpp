#include "fracgfm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracgfm {

namespace {

/// Scratch buffers and operator access for one prox evaluation.
class DualQp {
 public:
  DualQp(const FractionalProblem& p, std::span<const double> z, double lambda)
      : p_(p), z_(z), lambda_(lambda), w_(p.incidence().weights()),
        scratch_(p.vertex_count()), atu_(p.dim()) {}

  std::size_t edges() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }

  /// x = z - lambda A^T u.
  void primal(std::span<const double> u, std::span<double> x) {
    p_.apply_cv_transpose(u, atu_, scratch_);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = z_[i] - lambda_ * atu_[i];
  }

  /// r = A x.
  void residual(std::span<const double> x, std::span<double> r) { p_.apply_cv(x, r, scratch_); }

  /// Primal minus dual objective for the pair (x(u), u); equals
  /// sum_k w_k max(0, r_k) - u_k r_k with r = A x(u).
  double gap(std::span<const double> u, std::span<const double> r) const {
    double g = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) g += w_[k] * std::max(0.0, r[k]) - u[k] * r[k];
    return std::max(g, 0.0);
  }

 private:
  const FractionalProblem& p_;
  std::span<const double> z_;
  double lambda_;
  const std::vector<double>& w_;
  Vector scratch_;
  Vector atu_;
};

void clip_to_box(std::span<double> u, const std::vector<double>& w) {
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::clamp(u[k], 0.0, w[k]);
}

}  // namespace

ProxResult prox_dv(const FractionalProblem& p, std::span<const double> z, double lambda,
                   const InnerConfig& cfg, std::span<const double> warm_dual) {
  if (!(lambda > 0.0)) throw std::invalid_argument("prox_dv: lambda must be positive");
  if (z.size() != p.dim()) throw std::invalid_argument("prox_dv: dimension mismatch");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.restart_every < 0) throw std::invalid_argument("prox_dv: invalid InnerConfig");

  DualQp qp(p, z, lambda);
  const auto& w = qp.weights();
  const std::size_t ne = qp.edges();
  const std::size_t m = p.dim();

  ProxResult res;
  res.dual.assign(ne, 0.0);
  if (warm_dual.size() == ne) {
    std::copy(warm_dual.begin(), warm_dual.end(), res.dual.begin());
    clip_to_box(res.dual, w);
  }
  res.point.assign(m, 0.0);

  const double target = std::max(cfg.abs_tol, cfg.tol * (1.0 + dot(z, z) / lambda));
  Vector r(ne);
  auto certify = [&](std::span<const double> u, Vector& x) {
    qp.primal(u, x);
    qp.residual(x, r);
    return qp.gap(u, r);
  };

  res.gap = certify(res.dual, res.point);
  if (!warm_dual.empty()) {
    // A warm start is only kept when it certifies better than u = 0.
    Vector zero_dual(ne, 0.0);
    Vector zero_point(m);
    const double g0 = certify(zero_dual, zero_point);
    if (g0 < res.gap) {
      res.gap = g0;
      res.dual = std::move(zero_dual);
      res.point = std::move(zero_point);
    }
  }
  if (res.gap <= target || ne == 0 || p.norm_cv() == 0.0) {
    res.converged = res.gap <= target;
    if (ne == 0 || p.norm_cv() == 0.0) res.converged = true;
    return res;
  }

  const double lip = lambda * p.norm_cv() * p.norm_cv() * (1.0 + 1e-9);
  const double step = 1.0 / lip;
  constexpr int kCheckEvery = 5;

  Vector u = res.dual;
  Vector u_prev = u;
  Vector y = u;
  Vector xy(m);
  Vector ry(ne);
  Vector x_cand(m);
  double momentum_t = 1.0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    res.inner_iters = it;
    // Projected gradient step at y: grad f(y) = -A x(y).
    qp.primal(y, xy);
    qp.residual(xy, ry);
    u_prev.swap(u);
    for (std::size_t k = 0; k < ne; ++k) u[k] = std::clamp(y[k] + step * ry[k], 0.0, w[k]);

    if (cfg.accelerated) {
      // Gradient restart: reset when (y - u) . (u - u_prev) > 0.
      double align = 0.0;
      for (std::size_t k = 0; k < ne; ++k) align += (y[k] - u[k]) * (u[k] - u_prev[k]);
      if (align > 0.0 || (cfg.restart_every > 0 && it % cfg.restart_every == 0)) {
        momentum_t = 1.0;
        y = u;
      } else {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
        const double beta = (momentum_t - 1.0) / t_next;
        for (std::size_t k = 0; k < ne; ++k) y[k] = u[k] + beta * (u[k] - u_prev[k]);
        momentum_t = t_next;
      }
    } else {
      y = u;
    }

    if (it % kCheckEvery != 0 && it != cfg.max_iter) continue;
    const double g = certify(u, x_cand);
    if (g < res.gap) {
      res.gap = g;
      res.dual = u;
      res.point = x_cand;
    }
    if (res.gap <= target) {
      res.converged = true;
      return res;
    }
  }
  res.converged = res.gap <= target;
  return res;
}

double prox_objective(const FractionalProblem& p, std::span<const double> z, double lambda,
                      std::span<const double> x) {
  if (!(lambda > 0.0)) throw std::invalid_argument("prox_objective: lambda must be positive");
  return p.numerator(x) + 0.5 * distance(x, z) * distance(x, z) / lambda;
}

}  // namespace fracgfm
