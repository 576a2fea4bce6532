#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracgfm/gfm.hpp"
#include "fracgfm/graph.hpp"
#include "fracgfm/solver.hpp"

namespace fracgfm {

enum class GraphType { Rgg, Drgg, Community };
enum class MetricKind { Identity, Degree };
enum class Algorithm { Psa, PsDca };

std::string to_string(GraphType t);
std::string to_string(MetricKind q);
std::string to_string(Algorithm a);
GraphType parse_graph_type(const std::string& s);
MetricKind parse_metric_kind(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

struct GraphSpec {
  GraphType type = GraphType::Rgg;
  int n = 20;
  std::uint64_t seed = 1;
  // Community generator only. The defaults give about 95 undirected edges at
  // n = 20: two complete blocks plus cross edges at density 1/n.
  int k_clusters = 2;
  double p_in = 1.0;
  double p_out = 0.05;

  std::string id() const;
};

/// Builds the experiment graph. RGG/DRGG draws that are disconnected are
/// redrawn with derived seeds (up to 1000 times) so every vertex has an edge.
WeightedDigraph build_graph(const GraphSpec& spec);

struct SolverOverrides {
  double lambda_scale_psa = 80.0;
  double lambda_scale_ps_dca = 100.0;
  double tol = 1e-6;
  int max_iter = 20;
  double eps_accept = 1e-6;
  /// false drops the unit-sphere projection (PGSA-style ablation).
  bool normalize = true;
};

struct ExperimentConfig {
  std::vector<GraphSpec> graphs;
  std::vector<MetricKind> metrics{MetricKind::Identity};
  std::vector<int> ks{2, 3, 4, 5};
  std::vector<Algorithm> algorithms{Algorithm::Psa, Algorithm::PsDca};
  StartSpec starts;
  SolverOverrides solver;
  std::string records_path;
  std::string summary_path;
  double split = 0.3;
  /// Serial execution is the reference path; both produce identical records.
  bool parallel = true;

  /// Throws std::invalid_argument on empty or out-of-range fields.
  void validate() const;
};

ExperimentConfig parse_experiment_config(std::istream& is);

struct RunRecord {
  std::string graph_id;
  std::string q_tag;
  int k = 0;
  std::string algorithm;
  int start_index = 0;
  std::string start_class;  ///< "adversarial" or "random"
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  std::string status;
  double wall_time = 0.0;
  double criticality_residual = 0.0;
  int dca_accepted = 0;
  std::string error;  ///< empty on success

  /// The full trace is kept in memory for the acceptance checks; it is not serialized.
  SolverTrace trace;
};

/// Solver settings used for one algorithm under the given overrides.
SolverConfig solver_config_for(Algorithm a, const SolverOverrides& o);

/// Runs every (graph, Q, k, algorithm, start) cell. Records come back in grid
/// order regardless of execution order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
  std::string graph_id;
  std::string q_tag;
  int k = 0;
  std::string algorithm;
  std::string subset;  ///< "adversarial" or "all"
  std::size_t count = 0;
  double mean_objective = 0.0;
  double mean_iterations = 0.0;
  double mean_time = 0.0;
};

/// Per (graph, Q, k, algorithm): means over the first round(split * N) starts
/// by start index, then over all starts. Failed runs are left out of the means.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, double split);

inline constexpr const char* kSummaryHeader =
    "graph,q,k,algorithm,subset,count,mean_objective,mean_iterations,mean_time";

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_records_jsonl(std::ostream& os, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_jsonl(std::istream& is);

/// Prefixes a relative path with $FRACGFM_OUTPUT_DIR when that variable is set.
std::string resolve_output_path(const std::string& path);

}  // namespace fracgfm
