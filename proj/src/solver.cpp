#include "fracgfm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace fracgfm {

namespace {

InnerConfig inner_for(const SolverConfig& cfg) {
  InnerConfig in = cfg.inner;
  in.tol = std::min(in.tol, 1e-8 * cfg.tol);
  return in;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda_scale > 0.0)) throw std::invalid_argument("SolverConfig: lambda_scale must be positive");
  if (!(eps_accept > 0.0)) throw std::invalid_argument("SolverConfig: eps_accept must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
}

std::string to_string(DcaBranch b) {
  switch (b) {
    case DcaBranch::None: return "none";
    case DcaBranch::ConditionFired: return "condition_fired";
    case DcaBranch::Random: return "random";
  }
  return "unknown";
}

std::string to_string(RunStatus s) { return s == RunStatus::Converged ? "converged" : "max_iter"; }

double step_size(const FractionalProblem& p, const SolverConfig& cfg) {
  return p.norm_cv() > 0.0 ? cfg.lambda_scale / p.norm_cv() : cfg.lambda_scale;
}

PsaStep psa_step(const FractionalProblem& p, std::span<const double> x, const SolverConfig& cfg,
                 std::span<const double> warm_dual) {
  PsaStep s;
  s.lambda = step_size(p, cfg);
  const RatioValue ex = evaluate(p, x);
  s.e_x = ex.e;
  Vector z(x.begin(), x.end());
  axpy(s.lambda * ex.e, b_gradient(p, x), z);
  s.prox = prox_dv(p, z, s.lambda, inner_for(cfg), warm_dual);
  s.l = s.prox.point;
  const double nl = norm2(s.l);
  if (!(nl > 0.0)) throw std::runtime_error("psa_step: prox returned the zero vector");
  const RatioValue el = evaluate(p, s.l);
  s.e_l = el.e;
  s.b_l = el.b;
  s.step_norm = distance(x, s.l);
  s.x_next = cfg.normalize ? scaled(s.l, 1.0 / nl) : s.l;
  return s;
}

WChoice select_w(const FractionalProblem& p, double e_l, Rng& rng) {
  const std::size_t m = p.dim();
  const double radius = std::sqrt(p.metric().d_min);
  const ColumnStats& st = p.column_stats();
  const double t_min = st.forward[st.forward_argmin];
  const double t1_min = st.reversed[st.reversed_argmin];
  WChoice c;
  c.w.assign(m, 0.0);
  if (radius * e_l > std::min(t_min, t1_min)) {
    c.branch = DcaBranch::ConditionFired;
    if (t_min <= t1_min)
      c.w[st.forward_argmin] = radius;
    else
      c.w[st.reversed_argmin] = -radius;
  } else {
    c.branch = DcaBranch::Random;
    const auto i = static_cast<std::size_t>(rng.below(m));
    c.w[i] = rng.below(2) == 0 ? radius : -radius;
  }
  return c;
}

DcaResult dca_refine(const FractionalProblem& p, std::span<const double> l, double rho,
                     std::span<const double> w, const SolverConfig& cfg) {
  if (!(rho > 0.0)) throw std::invalid_argument("dca_refine: rho must be positive");
  DcaResult d;
  d.rho = rho;
  d.e_l = evaluate(p, l).e;
  const Vector z = scaled(w, d.e_l / rho);
  d.prox = prox_dv(p, z, 1.0 / rho, inner_for(cfg));
  d.t = d.prox.point;
  d.t_norm_sq = dot(d.t, d.t);
  d.delta = p.numerator(d.t) - d.e_l * p.denominator(d.t);
  return d;
}

SolverTrace ps_dca_run(const FractionalProblem& p, std::span<const double> x0, const SolverConfig& cfg) {
  cfg.validate();
  if (x0.size() != p.dim()) throw std::invalid_argument("ps_dca_run: dimension mismatch");
  const double n0 = norm2(x0);
  if (!(n0 > 0.0)) throw std::invalid_argument("ps_dca_run: initial point is zero");

  SolverTrace trace;
  Vector x = scaled(x0, 1.0 / n0);
  double e_x = evaluate(p, x).e;
  trace.initial_value = e_x;
  Rng rng(cfg.seed);
  Vector warm;

  for (int k = 0; k < cfg.max_iter; ++k) {
    PsaStep step = psa_step(p, x, cfg, warm);
    warm = step.prox.dual;

    IterationRecord rec;
    rec.e_x = e_x;
    rec.e_l = step.e_l;
    rec.step_norm = step.step_norm;
    rec.b_l = step.b_l;
    rec.lambda = step.lambda;
    rec.inner_iters = step.prox.inner_iters;
    rec.inner_gap = step.prox.gap;
    rec.inner_converged = step.prox.converged;

    Vector next = std::move(step.x_next);
    double e_next = step.e_l;
    if (cfg.dca_enabled && step.e_l > 0.0) {
      const double rho = step.e_l;  // RhoRule::RatioAtCandidate
      const WChoice wc = select_w(p, step.e_l, rng);
      const DcaResult dca = dca_refine(p, step.l, rho, wc.w, cfg);
      rec.branch = wc.branch;
      rec.dca_delta = dca.delta;
      rec.dca_rho = rho;
      rec.dca_t_norm_sq = dca.t_norm_sq;
      rec.inner_iters += dca.prox.inner_iters;
      rec.inner_gap = std::max(rec.inner_gap, dca.prox.gap);
      rec.inner_converged = rec.inner_converged && dca.prox.converged;
      const double tn = std::sqrt(dca.t_norm_sq);
      if (tn > 0.0) rec.e_t = evaluate(p, dca.t).e;
      if (dca.delta < -cfg.eps_accept && tn > 0.0) {
        rec.dca_accepted = true;
        next = cfg.normalize ? scaled(dca.t, 1.0 / tn) : dca.t;
        e_next = rec.e_t;
        // The previous dual belongs to a distant point.
        warm.clear();
      }
    }
    // Recompute on the stored point so the trace matches what the next step sees.
    e_next = evaluate(p, next).e;
    rec.e_next = e_next;
    rec.move = distance(x, next);
    trace.iterations.push_back(rec);

    const bool done = std::abs(e_next - e_x) < cfg.tol;
    x = std::move(next);
    e_x = e_next;
    if (done) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  trace.final_point = std::move(x);
  trace.final_value = e_x;
  return trace;
}

double criticality_residual(const FractionalProblem& p, std::span<const double> x, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("criticality_residual: lambda must be positive");
  const RatioValue ev = evaluate(p, x);
  Vector z(x.begin(), x.end());
  axpy(lambda * ev.e, b_gradient(p, x), z);
  InnerConfig in;
  in.tol = 1e-14;
  in.max_iter = 20000;
  const ProxResult pr = prox_dv(p, z, lambda, in);
  return distance(x, pr.point);
}

void write_trace_jsonl(std::ostream& os, const SolverTrace& trace) {
  for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
    const auto& r = trace.iterations[k];
    nlohmann::json j{{"iter", k + 1},
                     {"e_x", r.e_x},
                     {"e_l", r.e_l},
                     {"e_next", r.e_next},
                     {"step_norm", r.step_norm},
                     {"b_l", r.b_l},
                     {"lambda", r.lambda},
                     {"move", r.move},
                     {"dca_branch", to_string(r.branch)},
                     {"dca_accepted", r.dca_accepted},
                     {"dca_delta", r.dca_delta},
                     {"dca_rho", r.dca_rho},
                     {"e_t", r.e_t},
                     {"inner_iters", r.inner_iters},
                     {"inner_gap", r.inner_gap},
                     {"inner_converged", r.inner_converged}};
    os << j.dump() << '\n';
  }
}

}  // namespace fracgfm
