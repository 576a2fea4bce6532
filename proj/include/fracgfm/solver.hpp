#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fracgfm/functionals.hpp"
#include "fracgfm/prox.hpp"
#include "fracgfm/rng.hpp"

namespace fracgfm {

/// Rule for the DCA regularization rho_k.
enum class RhoRule {
  RatioAtCandidate,  ///< rho_k = E(l^k)
};

struct SolverConfig {
  /// lambda_k = lambda_scale / |CV|.
  double lambda_scale = 100.0;
  RhoRule rho_rule = RhoRule::RatioAtCandidate;
  /// The DCA point replaces the candidate only if its d.c. value is below -eps_accept.
  double eps_accept = 1e-6;
  /// Stop once |E(x^{k+1}) - E(x^k)| < tol.
  double tol = 1e-6;
  int max_iter = 20;
  /// Seed for the random branch of the w selection.
  std::uint64_t seed = 0;
  /// false turns PS-DCA into PSA.
  bool dca_enabled = true;
  /// false skips the projection onto the unit sphere (PGSA-style ablation).
  bool normalize = true;
  /// Inner prox settings. The solver tightens the relative gap target to at most 1e-8 * tol.
  InnerConfig inner{.tol = 1e-10, .abs_tol = 0.0, .max_iter = 50000, .accelerated = true, .restart_every = 0};

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

enum class DcaBranch { None, ConditionFired, Random };
enum class RunStatus { Converged, MaxIter };

std::string to_string(DcaBranch b);
std::string to_string(RunStatus s);

struct PsaStep {
  Vector x_next;
  Vector l;
  double e_x = 0.0;
  double e_l = 0.0;
  double b_l = 0.0;
  double step_norm = 0.0;  ///< |x - l|
  double lambda = 0.0;
  ProxResult prox;
};

struct WChoice {
  Vector w;
  DcaBranch branch = DcaBranch::None;
};

struct DcaResult {
  Vector t;
  double delta = 0.0;  ///< T(Vt) - E(l) B(t)
  double e_l = 0.0;
  double rho = 0.0;
  double t_norm_sq = 0.0;
  ProxResult prox;
};

struct IterationRecord {
  double e_x = 0.0;     ///< E(x^k)
  double e_l = 0.0;     ///< E(l^k)
  double e_next = 0.0;  ///< E(x^{k+1})
  double step_norm = 0.0;
  double b_l = 0.0;
  double lambda = 0.0;
  double move = 0.0;  ///< |x^k - x^{k+1}|
  DcaBranch branch = DcaBranch::None;
  bool dca_accepted = false;
  double dca_delta = 0.0;
  double dca_rho = 0.0;
  double dca_t_norm_sq = 0.0;
  double e_t = 0.0;  ///< E(t^k), 0 when t^k = 0
  int inner_iters = 0;
  double inner_gap = 0.0;
  bool inner_converged = true;
};

struct SolverTrace {
  double initial_value = 0.0;
  std::vector<IterationRecord> iterations;
  Vector final_point;
  double final_value = 0.0;
  RunStatus status = RunStatus::MaxIter;
};

/// lambda = lambda_scale / |CV| (lambda_scale when CV vanishes).
double step_size(const FractionalProblem& p, const SolverConfig& cfg);

/// One proximal-subgradient step from a unit vector x.
/// Throws std::runtime_error if the prox output is 0.
PsaStep psa_step(const FractionalProblem& p, std::span<const double> x, const SolverConfig& cfg,
                 std::span<const double> warm_dual = {});

/// Subgradient w of B at 0 for the DCA step. Uses the column-variation
/// bound when it certifies improvement, otherwise a random signed axis.
WChoice select_w(const FractionalProblem& p, double e_l, Rng& rng);

/// One DCA step from 0 on T - E(l) B with regularization rho:
/// t = prox_{T/rho}(E(l) w / rho).
DcaResult dca_refine(const FractionalProblem& p, std::span<const double> l, double rho,
                     std::span<const double> w, const SolverConfig& cfg);

/// PS-DCA (PSA when cfg.dca_enabled is false) from the unit vector x0.
SolverTrace ps_dca_run(const FractionalProblem& p, std::span<const double> x0, const SolverConfig& cfg);

/// |x - prox_{lambda T}(x + lambda E(x) grad B(x))|; zero exactly at critical points.
double criticality_residual(const FractionalProblem& p, std::span<const double> x, double lambda);

/// One JSON object per iteration, newline separated.
void write_trace_jsonl(std::ostream& os, const SolverTrace& trace);

}  // namespace fracgfm
