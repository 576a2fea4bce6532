#include "fracgfm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fracgfm/rng.hpp"

namespace fracgfm {

namespace {

bool edge_less(const Edge& a, const Edge& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

struct Point {
  double x, y;
};

std::vector<Point> uniform_points(int n, Rng& rng) {
  std::vector<Point> p(static_cast<std::size_t>(n));
  for (auto& pt : p) {
    pt.x = rng.uniform();
    pt.y = rng.uniform();
  }
  return p;
}

double sq_dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

void require_vertices(int n) {
  if (n < 1) throw std::invalid_argument("graph generator: n must be >= 1");
}

}  // namespace

WeightedDigraph::WeightedDigraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 0) throw std::invalid_argument("WeightedDigraph: negative vertex count");
  for (const auto& e : edges_) {
    if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= n_)
      throw std::invalid_argument("WeightedDigraph: vertex out of range");
    if (e.i == e.j) throw std::invalid_argument("WeightedDigraph: self-loop");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw std::invalid_argument("WeightedDigraph: weights must be finite and positive");
  }
  std::sort(edges_.begin(), edges_.end(), edge_less);
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j)
      throw std::invalid_argument("WeightedDigraph: duplicate ordered pair");
  }
}

bool WeightedDigraph::is_symmetric() const {
  for (const auto& e : edges_) {
    const Edge key{e.j, e.i, 0.0};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key, edge_less);
    if (it == edges_.end() || it->i != e.j || it->j != e.i || it->w != e.w) return false;
  }
  return true;
}

bool WeightedDigraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
  for (const auto& e : edges_) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == n_;
}

bool WeightedDigraph::has_isolated_vertex() const {
  std::vector<char> touched(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) touched[e.i] = touched[e.j] = 1;
  return std::find(touched.begin(), touched.end(), 0) != touched.end();
}

EdgeIncidence::EdgeIncidence(const WeightedDigraph& g) : n_(g.vertex_count()) {
  const auto& edges = g.edges();
  tail_.reserve(edges.size());
  head_.reserve(edges.size());
  w_.reserve(edges.size());
  for (const auto& e : edges) {
    tail_.push_back(e.i);
    head_.push_back(e.j);
    w_.push_back(e.w);
  }
}

void EdgeIncidence::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t k = 0; k < tail_.size(); ++k) out[k] = x[tail_[k]] - x[head_[k]];
}

void EdgeIncidence::apply_transpose(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < tail_.size(); ++k) {
    out[tail_[k]] += u[k];
    out[head_[k]] -= u[k];
  }
}

double EdgeIncidence::variation(std::span<const double> x, bool reversed) const {
  double total = 0.0;
  for (std::size_t k = 0; k < tail_.size(); ++k) {
    const double diff = reversed ? x[head_[k]] - x[tail_[k]] : x[tail_[k]] - x[head_[k]];
    if (diff > 0.0) total += w_[k] * diff;
  }
  return total;
}

DiagonalMetric::DiagonalMetric(std::vector<double> diag) : d(std::move(diag)) {
  if (d.empty()) throw std::invalid_argument("DiagonalMetric: empty diagonal");
  d_min = std::numeric_limits<double>::infinity();
  for (double v : d) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("DiagonalMetric: entries must be finite and positive");
    d_min = std::min(d_min, v);
  }
}

DiagonalMetric DiagonalMetric::identity(int n) {
  return DiagonalMetric(std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

EdgeIncidence incidence(const WeightedDigraph& g) { return EdgeIncidence(g); }

DiagonalMetric degree_metric(const WeightedDigraph& g) {
  std::vector<double> d(static_cast<std::size_t>(g.vertex_count()), 0.0);
  for (const auto& e : g.edges()) {
    d[e.i] += 0.5 * e.w;
    d[e.j] += 0.5 * e.w;
  }
  for (double v : d) {
    if (v == 0.0) throw std::invalid_argument("degree_metric: graph has an isolated vertex");
  }
  return DiagonalMetric(std::move(d));
}

WeightedDigraph generate_rgg(int n, std::uint64_t seed) {
  require_vertices(n);
  Rng rng(seed);
  const auto pts = uniform_points(n, rng);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = std::exp(-sq_dist(pts[i], pts[j]) / 0.5);
      if (w < 0.7) continue;
      edges.push_back({i, j, w});
      edges.push_back({j, i, w});
    }
  }
  return WeightedDigraph(n, std::move(edges));
}

WeightedDigraph generate_drgg(int n, std::uint64_t seed) {
  require_vertices(n);
  Rng rng(seed);
  const auto pts = uniform_points(n, rng);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double p = 1.0 - std::exp(-sq_dist(pts[i], pts[j]) / 0.5);
      if (rng.bernoulli(p)) edges.push_back({i, j, 1.0});
    }
  }
  return WeightedDigraph(n, std::move(edges));
}

WeightedDigraph generate_community(int n, int k_clusters, double p_in, double p_out,
                                   std::uint64_t seed, int max_attempts) {
  if (k_clusters < 1 || n < k_clusters)
    throw std::invalid_argument("generate_community: need n >= k_clusters >= 1");
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0))
    throw std::invalid_argument("generate_community: need 0 <= p_out <= p_in <= 1");
  Rng rng(seed);
  auto block = [&](int v) {
    return static_cast<int>(static_cast<long long>(v) * k_clusters / n);
  };
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double p = block(i) == block(j) ? p_in : p_out;
        if (rng.bernoulli(p)) {
          edges.push_back({i, j, 1.0});
          edges.push_back({j, i, 1.0});
        }
      }
    }
    WeightedDigraph g(n, std::move(edges));
    if (g.is_connected()) return g;
  }
  throw std::runtime_error("generate_community: no connected sample within the attempt budget");
}

void write_graph(std::ostream& os, const WeightedDigraph& g) {
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : g.edges()) os << e.i + 1 << ' ' << e.j + 1 << ' ' << e.w << '\n';
}

WeightedDigraph read_graph(std::istream& is) {
  long long n = 0, m = 0;
  if (!(is >> n >> m) || n < 0 || m < 0) throw std::runtime_error("read_graph: bad header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    long long i = 0, j = 0;
    double w = 0.0;
    if (!(is >> i >> j >> w)) throw std::runtime_error("read_graph: truncated edge list");
    edges.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), w});
  }
  return WeightedDigraph(static_cast<int>(n), std::move(edges));
}

void save_graph(const std::string& path, const WeightedDigraph& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_graph: cannot open " + path);
  write_graph(os, g);
}

WeightedDigraph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_graph: cannot open " + path);
  return read_graph(is);
}

}  // namespace fracgfm
