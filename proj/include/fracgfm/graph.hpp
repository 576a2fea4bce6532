#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fracgfm {

/// Directed link i -> j with positive weight. Vertices are 0-based in memory
/// and 1-based in the edge-list file format.
struct Edge {
  int i = 0;
  int j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted directed graph. Edges are kept sorted lexicographically by (i, j).
/// Undirected graphs carry both (i, j, w) and (j, i, w).
class WeightedDigraph {
 public:
  WeightedDigraph() = default;

  /// Throws std::invalid_argument on non-positive weights, self-loops,
  /// out-of-range vertices or duplicate ordered pairs.
  WeightedDigraph(int n, std::vector<Edge> edges);

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// True when every (i, j, w) has a matching (j, i, w).
  bool is_symmetric() const;

  /// Weakly connected: connected once edge directions are ignored.
  bool is_connected() const;

  /// True if some vertex has neither incoming nor outgoing edges.
  bool has_isolated_vertex() const;

  friend bool operator==(const WeightedDigraph&, const WeightedDigraph&) = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Sparse edge-incidence operator C (|E| x n) with weights. Row k has +1 at
/// column tail[k] and -1 at column head[k].
class EdgeIncidence {
 public:
  EdgeIncidence() = default;
  explicit EdgeIncidence(const WeightedDigraph& g);

  std::size_t rows() const { return tail_.size(); }
  int cols() const { return n_; }
  const std::vector<int>& tail() const { return tail_; }
  const std::vector<int>& head() const { return head_; }
  const std::vector<double>& weights() const { return w_; }

  /// out = C x.
  void apply(std::span<const double> x, std::span<double> out) const;
  /// out = C^T u.
  void apply_transpose(std::span<const double> u, std::span<double> out) const;

  /// sum_k w_k max(0, (C x)_k); with reversed, sum_k w_k max(0, -(C x)_k).
  double variation(std::span<const double> x, bool reversed = false) const;

 private:
  int n_ = 0;
  std::vector<int> tail_;
  std::vector<int> head_;
  std::vector<double> w_;
};

/// Diagonal positive-definite metric Q.
struct DiagonalMetric {
  std::vector<double> d;
  double d_min = 0.0;

  DiagonalMetric() = default;
  /// Throws std::invalid_argument if any entry is not strictly positive.
  explicit DiagonalMetric(std::vector<double> diag);

  static DiagonalMetric identity(int n);
  std::size_t size() const { return d.size(); }
};

EdgeIncidence incidence(const WeightedDigraph& g);

/// d_i = (sum_j w_ij + sum_j w_ji) / 2, which is the usual degree for
/// symmetric graphs. Throws std::invalid_argument on an isolated vertex.
DiagonalMetric degree_metric(const WeightedDigraph& g);

/// Random geometric graph on n uniform points of the unit square with
/// w_ij = exp(-|p_i - p_j|^2 / 0.5), dropping weights below 0.7.
WeightedDigraph generate_rgg(int n, std::uint64_t seed);

/// Directed variant: each ordered pair gets a unit edge with probability
/// 1 - exp(-|p_i - p_j|^2 / 0.5).
WeightedDigraph generate_drgg(int n, std::uint64_t seed);

/// Planted-partition community graph: k near-equal blocks, unit symmetric
/// edges with probability p_in inside a block and p_out across blocks,
/// resampled until connected. Throws std::runtime_error after max_attempts.
WeightedDigraph generate_community(int n, int k_clusters, double p_in, double p_out,
                                   std::uint64_t seed, int max_attempts = 1000);

/// Edge-list text format: "n m" then m lines "i j w" with 1-based vertices.
void write_graph(std::ostream& os, const WeightedDigraph& g);
WeightedDigraph read_graph(std::istream& is);
void save_graph(const std::string& path, const WeightedDigraph& g);
WeightedDigraph load_graph(const std::string& path);

}  // namespace fracgfm
