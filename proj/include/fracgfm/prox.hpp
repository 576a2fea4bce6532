#pragma once

#include <span>

#include "fracgfm/functionals.hpp"

namespace fracgfm {

/// Settings for the inner box-QP solve.
struct InnerConfig {
  /// Relative duality-gap target: gap <= tol * (1 + |z|^2 / lambda).
  double tol = 1e-10;
  /// Absolute gap floor; the solve stops once gap <= max(abs_tol, relative target).
  /// Zero disables the floor.
  double abs_tol = 0.0;
  int max_iter = 5000;
  /// Accelerated (FISTA-style) vs plain projected gradient. Momentum is reset
  /// whenever the step direction turns against it.
  bool accelerated = true;
  /// Extra unconditional momentum reset period; 0 disables it.
  int restart_every = 0;
};

struct ProxResult {
  Vector point;  ///< prox output x = z - lambda (CV)^T u
  Vector dual;   ///< u, 0 <= u <= w componentwise
  double gap = 0.0;
  int inner_iters = 0;
  bool converged = false;
};

/// argmin_x T(Vx) + |x - z|^2 / (2 lambda), through the dual box QP
///   min_{0 <= u <= w} (lambda/2) |(CV)^T u|^2 - u^T CV z.
/// Hitting max_iter returns the best iterate with converged = false.
/// An optional warm-start dual is clipped into the box before use.
ProxResult prox_dv(const FractionalProblem& p, std::span<const double> z, double lambda,
                   const InnerConfig& cfg = {}, std::span<const double> warm_dual = {});

/// T(Vx) + |x - z|^2 / (2 lambda).
double prox_objective(const FractionalProblem& p, std::span<const double> z, double lambda,
                      std::span<const double> x);

}  // namespace fracgfm
