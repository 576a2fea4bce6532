#include "fracgfm/gfm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace fracgfm {

namespace {

void make_first_nonzero_positive(std::span<double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  for (double& x : v) {
    if (std::abs(x) > 1e-12 * scale) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

double q_norm(std::span<const double> u, const DiagonalMetric& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += q.d[i] * u[i] * u[i];
  return std::sqrt(s);
}

}  // namespace

DenseMatrix constraint_basis(const DenseMatrix& u_prev, const DiagonalMetric& q) {
  const std::size_t n = q.size();
  if (u_prev.rows() != n) throw std::invalid_argument("constraint_basis: dimension mismatch");
  DenseMatrix m(u_prev.cols(), n);
  for (std::size_t j = 0; j < u_prev.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) m(j, i) = u_prev(i, j) * q.d[i];
  DenseMatrix v = orthonormal_null_basis(m);
  if (v.cols() == 0) throw std::invalid_argument("constraint_basis: no directions left");
  return v;
}

DenseMatrix subspace_reduction(const DenseMatrix& x_basis, const DenseMatrix& m) {
  if (m.cols() != x_basis.rows()) throw std::invalid_argument("subspace_reduction: dimension mismatch");
  const RowNullSplit split = row_null_split(multiply(m, x_basis));
  return multiply(x_basis, split.row_space);
}

DenseMatrix laplacian_basis(const WeightedDigraph& g) {
  const auto n = static_cast<std::size_t>(g.vertex_count());
  DenseMatrix lap(n, n);
  for (const auto& e : g.edges()) {
    const double h = 0.5 * e.w;
    lap(e.i, e.j) -= h;
    lap(e.j, e.i) -= h;
    lap(e.i, e.i) += h;
    lap(e.j, e.j) += h;
  }
  EigenDecomposition eig = symmetric_eigh(lap);
  for (std::size_t j = 0; j < n; ++j) {
    Vector c = eig.vectors.column(j);
    make_first_nonzero_positive(c);
    eig.vectors.set_column(j, c);
  }
  return eig.vectors;
}

Vector constant_mode(const DiagonalMetric& q) {
  double s = 0.0;
  for (double d : q.d) s += d;
  return Vector(q.size(), 1.0 / std::sqrt(s));
}

DenseMatrix metric_seed_basis(const DiagonalMetric& q) {
  const std::size_t n = q.size();
  const Vector u1 = constant_mode(q);
  Vector v1(n);
  for (std::size_t i = 0; i < n; ++i) v1[i] = std::sqrt(q.d[i]) * u1[i];
  const DenseMatrix rest = orthonormal_null_basis(DenseMatrix(1, n, v1));
  DenseMatrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 1.0 / std::sqrt(q.d[i]);
    u(i, 0) = s * v1[i];
    for (std::size_t j = 0; j < rest.cols(); ++j) u(i, j + 1) = s * rest(i, j);
  }
  return u;
}

Vector adversarial_combination(std::span<const double> x1, std::span<const double> x2, double a, double b) {
  Vector v(x1.size(), 0.0);
  axpy(a, x1, v);
  axpy(b, x2, v);
  const double nv = norm2(v);
  if (!(nv > 0.0)) throw std::invalid_argument("adversarial_combination: zero combination");
  for (double& x : v) x /= nv;
  return v;
}

std::vector<Vector> initial_points(const FractionalProblem& p, const DenseMatrix& u_full, int k,
                                   int n_adv, int n_rand, Rng& rng) {
  if (k < 2) throw std::invalid_argument("initial_points: k must be >= 2");
  if (u_full.rows() != p.vertex_count()) throw std::invalid_argument("initial_points: seed basis size mismatch");
  if (n_adv < 0 || n_rand < 0) throw std::invalid_argument("initial_points: negative count");
  const std::size_t m = p.dim();
  const DenseMatrix& v = p.basis();
  constexpr int kMaxRetries = 100;

  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(n_adv + n_rand));

  if (n_adv > 0) {
    // Seed columns k..n (1-based) in V-coordinates, ranked by ratio.
    struct Candidate {
      double e;
      std::size_t col;
      Vector x;
    };
    std::vector<Candidate> cands;
    for (std::size_t c = static_cast<std::size_t>(k - 1); c < u_full.cols(); ++c) {
      Vector x = matvec_transpose(v, u_full.column(c));
      const double nx = norm2(x);
      if (!(nx > 1e-12) || !(p.denominator(x) > 0.0)) continue;
      for (double& xi : x) xi /= nx;
      cands.push_back({evaluate(p, x).e, c, std::move(x)});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.e > b.e; });
    for (int s = 0; s < n_adv; ++s) {
      if (cands.empty()) {
        // Nothing usable in the seed basis; fall back to random directions.
        Vector x(m);
        for (double& xi : x) xi = rng.normal();
        points.push_back(scaled(x, 1.0 / norm2(x)));
        continue;
      }
      const Vector& x1 = cands[0].x;
      const Vector& x2 = cands.size() > 1 ? cands[1].x : cands[0].x;
      Vector pt;
      for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        const double a = rng.uniform_open();
        const double b = rng.uniform_open();
        Vector trial(m, 0.0);
        axpy(a, x1, trial);
        axpy(b, x2, trial);
        if (norm2(trial) > 1e-12 && p.denominator(trial) > 0.0) {
          pt = adversarial_combination(x1, x2, a, b);
          break;
        }
      }
      if (pt.empty()) pt = x1;
      points.push_back(std::move(pt));
    }
  }

  for (int s = 0; s < n_rand; ++s) {
    Vector x(m);
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      for (double& xi : x) xi = rng.normal();
      if (norm2(x) > 0.0) break;
    }
    const double nx = norm2(x);
    if (!(nx > 0.0)) throw std::runtime_error("initial_points: could not draw a nonzero point");
    points.push_back(scaled(x, 1.0 / nx));
  }
  return points;
}

ModeSet compute_modes(const WeightedDigraph& g, const DiagonalMetric& q, int count, const SolverConfig& cfg,
                      const StartSpec& starts) {
  const int n = g.vertex_count();
  if (count < 2 || count > n) throw std::invalid_argument("compute_modes: need 2 <= K <= n");
  if (static_cast<int>(q.size()) != n) throw std::invalid_argument("compute_modes: metric size mismatch");
  if (g.has_isolated_vertex()) throw std::invalid_argument("compute_modes: graph has an isolated vertex");
  if (starts.n_adv + starts.n_rand < 1) throw std::invalid_argument("compute_modes: need at least one start");

  const EdgeIncidence inc(g);
  const bool symmetric = g.is_symmetric();
  const DenseMatrix seed_basis = laplacian_basis(g);

  ModeSet out;
  out.q = q;
  std::vector<Vector> modes{constant_mode(q)};
  out.values.push_back(dv_eval(inc, modes[0]));

  for (int k = 2; k <= count; ++k) {
    const DenseMatrix u_prev = DenseMatrix::from_columns(static_cast<std::size_t>(n), modes);
    const FractionalProblem p(inc, q, constraint_basis(u_prev, q));
    Rng rng(derive_seed(starts.seed, static_cast<std::uint64_t>(k)));
    const std::vector<Vector> x0s = initial_points(p, seed_basis, k, starts.n_adv, starts.n_rand, rng);

    const auto runs = static_cast<long>(x0s.size());
    std::vector<std::optional<SolverTrace>> traces(x0s.size());
#pragma omp parallel for schedule(dynamic)
    for (long s = 0; s < runs; ++s) {
      SolverConfig run_cfg = cfg;
      run_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k * 100003 + s));
      try {
        traces[s] = ps_dca_run(p, x0s[s], run_cfg);
      } catch (const std::exception&) {
        traces[s].reset();
      }
    }

    std::optional<std::size_t> best;
    for (std::size_t s = 0; s < traces.size(); ++s) {
      if (!traces[s]) continue;
      if (!best || traces[s]->final_value < traces[*best]->final_value) best = s;
    }
    if (!best) throw std::runtime_error("compute_modes: every start failed for mode " + std::to_string(k));

    Vector u = p.lift(traces[*best]->final_point);
    const double qn = q_norm(u, q);
    for (double& x : u) x /= qn;
    if (symmetric) make_first_nonzero_positive(u);
    out.values.push_back(dv_eval(inc, u));
    modes.push_back(std::move(u));
  }
  out.modes = DenseMatrix::from_columns(static_cast<std::size_t>(n), modes);
  return out;
}

void write_modes_json(std::ostream& os, const ModeSet& modes) {
  nlohmann::json j;
  j["n"] = modes.modes.rows();
  j["Q"] = modes.q.d;
  j["K"] = modes.count();
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t c = 0; c < modes.count(); ++c) cols.push_back(modes.modes.column(c));
  j["modes"] = cols;
  j["values"] = modes.values;
  os << j.dump(2) << '\n';
}

ModeSet read_modes_json(std::istream& is) {
  const nlohmann::json j = nlohmann::json::parse(is);
  ModeSet m;
  const auto n = j.at("n").get<std::size_t>();
  m.q = DiagonalMetric(j.at("Q").get<std::vector<double>>());
  std::vector<Vector> cols;
  for (const auto& c : j.at("modes")) cols.push_back(c.get<Vector>());
  if (cols.size() != j.at("K").get<std::size_t>()) throw std::runtime_error("read_modes_json: K does not match modes");
  m.modes = DenseMatrix::from_columns(n, cols);
  m.values = j.at("values").get<Vector>();
  return m;
}

}  // namespace fracgfm
