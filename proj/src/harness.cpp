#include "fracgfm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace fracgfm {

using nlohmann::json;

std::string to_string(GraphType t) {
  switch (t) {
    case GraphType::Rgg: return "rgg";
    case GraphType::Drgg: return "drgg";
    case GraphType::Community: return "community";
  }
  return "unknown";
}

std::string to_string(MetricKind q) { return q == MetricKind::Identity ? "identity" : "degree"; }

std::string to_string(Algorithm a) { return a == Algorithm::Psa ? "psa" : "ps_dca"; }

GraphType parse_graph_type(const std::string& s) {
  if (s == "rgg") return GraphType::Rgg;
  if (s == "drgg") return GraphType::Drgg;
  if (s == "community") return GraphType::Community;
  throw std::invalid_argument("unknown graph type: " + s);
}

MetricKind parse_metric_kind(const std::string& s) {
  if (s == "identity" || s == "I") return MetricKind::Identity;
  if (s == "degree" || s == "D") return MetricKind::Degree;
  throw std::invalid_argument("unknown metric: " + s);
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "psa") return Algorithm::Psa;
  if (s == "ps_dca" || s == "ps-dca") return Algorithm::PsDca;
  throw std::invalid_argument("unknown algorithm: " + s);
}

std::string GraphSpec::id() const {
  std::ostringstream os;
  os << to_string(type) << "-n" << n << "-s" << seed;
  return os.str();
}

WeightedDigraph build_graph(const GraphSpec& spec) {
  if (spec.type == GraphType::Community)
    return generate_community(spec.n, spec.k_clusters, spec.p_in, spec.p_out, spec.seed);
  constexpr int kMaxDraws = 1000;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    const std::uint64_t s = draw == 0 ? spec.seed : derive_seed(spec.seed, static_cast<std::uint64_t>(draw));
    WeightedDigraph g = spec.type == GraphType::Rgg ? generate_rgg(spec.n, s) : generate_drgg(spec.n, s);
    if (g.is_connected() && !g.has_isolated_vertex()) return g;
  }
  throw std::runtime_error("build_graph: no connected draw for " + spec.id());
}

void ExperimentConfig::validate() const {
  if (graphs.empty()) throw std::invalid_argument("ExperimentConfig: no graphs");
  if (metrics.empty()) throw std::invalid_argument("ExperimentConfig: no metrics");
  if (ks.empty()) throw std::invalid_argument("ExperimentConfig: no mode indices");
  if (algorithms.empty()) throw std::invalid_argument("ExperimentConfig: no algorithms");
  if (starts.n_adv < 0 || starts.n_rand < 0 || starts.n_adv + starts.n_rand < 1)
    throw std::invalid_argument("ExperimentConfig: need at least one start");
  if (!(split > 0.0 && split <= 1.0)) throw std::invalid_argument("ExperimentConfig: split must be in (0, 1]");
  for (const auto& g : graphs) {
    if (g.n < 2) throw std::invalid_argument("ExperimentConfig: graphs need n >= 2");
    for (int k : ks)
      if (k < 2 || k > g.n) throw std::invalid_argument("ExperimentConfig: k must lie in [2, n]");
  }
  if (!(solver.lambda_scale_psa > 0.0) || !(solver.lambda_scale_ps_dca > 0.0) || !(solver.tol > 0.0) ||
      solver.max_iter < 1 || !(solver.eps_accept > 0.0))
    throw std::invalid_argument("ExperimentConfig: invalid solver overrides");
}

ExperimentConfig parse_experiment_config(std::istream& is) {
  const json j = json::parse(is);
  ExperimentConfig cfg;
  for (const auto& g : j.at("graphs")) {
    GraphSpec spec;
    spec.type = parse_graph_type(g.at("type").get<std::string>());
    spec.n = g.value("n", spec.n);
    spec.seed = g.value("seed", spec.seed);
    spec.k_clusters = g.value("k_clusters", spec.k_clusters);
    spec.p_in = g.value("p_in", spec.p_in);
    spec.p_out = g.value("p_out", spec.p_out);
    cfg.graphs.push_back(spec);
  }
  if (j.contains("q")) {
    cfg.metrics.clear();
    const auto& q = j.at("q");
    if (q.is_array()) {
      for (const auto& s : q) cfg.metrics.push_back(parse_metric_kind(s.get<std::string>()));
    } else {
      cfg.metrics.push_back(parse_metric_kind(q.get<std::string>()));
    }
  }
  if (j.contains("ks")) cfg.ks = j.at("ks").get<std::vector<int>>();
  if (j.contains("algorithms")) {
    cfg.algorithms.clear();
    for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  }
  if (j.contains("starts")) {
    const auto& s = j.at("starts");
    cfg.starts.n_adv = s.value("n_adv", cfg.starts.n_adv);
    cfg.starts.n_rand = s.value("n_rand", cfg.starts.n_rand);
    cfg.starts.seed = s.value("seed", cfg.starts.seed);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.solver.lambda_scale_psa = s.value("lambda_scale_psa", cfg.solver.lambda_scale_psa);
    cfg.solver.lambda_scale_ps_dca = s.value("lambda_scale_ps_dca", cfg.solver.lambda_scale_ps_dca);
    cfg.solver.tol = s.value("tol", cfg.solver.tol);
    cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
    cfg.solver.eps_accept = s.value("eps_accept", cfg.solver.eps_accept);
    cfg.solver.normalize = s.value("normalize", cfg.solver.normalize);
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.records_path = o.value("records", cfg.records_path);
    cfg.summary_path = o.value("summary", cfg.summary_path);
  }
  cfg.split = j.value("split", cfg.split);
  cfg.parallel = j.value("parallel", cfg.parallel);
  cfg.validate();
  return cfg;
}

SolverConfig solver_config_for(Algorithm a, const SolverOverrides& o) {
  SolverConfig s;
  s.dca_enabled = a == Algorithm::PsDca;
  s.lambda_scale = a == Algorithm::PsDca ? o.lambda_scale_ps_dca : o.lambda_scale_psa;
  s.tol = o.tol;
  s.max_iter = o.max_iter;
  s.eps_accept = o.eps_accept;
  s.normalize = o.normalize;
  return s;
}

namespace {

/// One (graph, Q, k) block: the shared problem and starts.
struct Block {
  std::string graph_id;
  MetricKind metric;
  int k;
  std::shared_ptr<const FractionalProblem> problem;
  std::vector<Vector> starts;
  std::string error;
};

struct Cell {
  std::size_t block;
  Algorithm algorithm;
  int start;
};

RunRecord run_cell(const Block& b, const Cell& c, const ExperimentConfig& cfg, std::uint64_t run_seed) {
  RunRecord r;
  r.graph_id = b.graph_id;
  r.q_tag = to_string(b.metric);
  r.k = b.k;
  r.algorithm = to_string(c.algorithm);
  r.start_index = c.start;
  r.start_class = c.start < cfg.starts.n_adv ? "adversarial" : "random";
  if (!b.error.empty()) {
    r.error = b.error;
    return r;
  }
  try {
    SolverConfig sc = solver_config_for(c.algorithm, cfg.solver);
    sc.seed = run_seed;
    const auto t0 = std::chrono::steady_clock::now();
    SolverTrace tr = ps_dca_run(*b.problem, b.starts[static_cast<std::size_t>(c.start)], sc);
    const auto t1 = std::chrono::steady_clock::now();
    r.wall_time = std::chrono::duration<double>(t1 - t0).count();
    r.initial_objective = tr.initial_value;
    r.final_objective = tr.final_value;
    r.iterations = static_cast<int>(tr.iterations.size());
    r.status = to_string(tr.status);
    for (const auto& it : tr.iterations) r.dca_accepted += it.dca_accepted ? 1 : 0;
    r.criticality_residual = criticality_residual(*b.problem, tr.final_point, 1.0);
    r.trace = std::move(tr);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Block> blocks;
  for (std::size_t gi = 0; gi < cfg.graphs.size(); ++gi) {
    const GraphSpec& spec = cfg.graphs[gi];
    const WeightedDigraph g = build_graph(spec);
    const EdgeIncidence inc(g);
    for (std::size_t qi = 0; qi < cfg.metrics.size(); ++qi) {
      const MetricKind mk = cfg.metrics[qi];
      const DiagonalMetric q = mk == MetricKind::Identity ? DiagonalMetric::identity(g.vertex_count()) : degree_metric(g);
      const DenseMatrix seed_basis = mk == MetricKind::Identity ? laplacian_basis(g) : metric_seed_basis(q);
      for (int k : cfg.ks) {
        Block b{spec.id(), mk, k, nullptr, {}, {}};
        try {
          const DenseMatrix u_prev = seed_basis.left_columns(static_cast<std::size_t>(k - 1));
          b.problem = std::make_shared<const FractionalProblem>(inc, q, constraint_basis(u_prev, q));
          Rng rng(derive_seed(cfg.starts.seed, gi * 1000003ULL + qi * 1009ULL + static_cast<std::uint64_t>(k)));
          b.starts = initial_points(*b.problem, seed_basis, k, cfg.starts.n_adv, cfg.starts.n_rand, rng);
        } catch (const std::exception& e) {
          b.error = e.what();
        }
        blocks.push_back(std::move(b));
      }
    }
  }

  const int n_starts = cfg.starts.n_adv + cfg.starts.n_rand;
  std::vector<Cell> cells;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
    for (Algorithm a : cfg.algorithms)
      for (int s = 0; s < n_starts; ++s) cells.push_back({bi, a, s});

  std::vector<RunRecord> records(cells.size());
  const auto n_cells = static_cast<long>(cells.size());
  auto seed_of = [&](const Cell& c) {
    return derive_seed(cfg.starts.seed ^ 0x5eedULL, c.block * 100003ULL + static_cast<std::uint64_t>(c.start));
  };
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n_cells; ++i) records[i] = run_cell(blocks[cells[i].block], cells[i], cfg, seed_of(cells[i]));
  } else {
    for (long i = 0; i < n_cells; ++i) records[i] = run_cell(blocks[cells[i].block], cells[i], cfg, seed_of(cells[i]));
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, double split) {
  if (!(split > 0.0 && split <= 1.0)) throw std::invalid_argument("summarize: split must be in (0, 1]");
  using Key = std::tuple<std::string, std::string, int, std::string>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  std::vector<Key> order;
  for (const auto& r : records) {
    Key key{r.graph_id, r.q_tag, r.k, r.algorithm};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    auto group = groups.at(key);
    std::stable_sort(group.begin(), group.end(),
                     [](const RunRecord* a, const RunRecord* b) { return a->start_index < b->start_index; });
    const auto head = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(split * static_cast<double>(group.size()))));
    for (const std::string subset : {"adversarial", "all"}) {
      const std::size_t limit = subset == "all" ? group.size() : std::min(head, group.size());
      SummaryRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), subset, 0, 0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < limit; ++i) {
        const RunRecord& r = *group[i];
        if (!r.error.empty()) continue;
        ++row.count;
        row.mean_objective += r.final_objective;
        row.mean_iterations += r.iterations;
        row.mean_time += r.wall_time;
      }
      if (row.count == 0) continue;
      const auto c = static_cast<double>(row.count);
      row.mean_objective /= c;
      row.mean_iterations /= c;
      row.mean_time /= c;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    os << r.graph_id << ',' << r.q_tag << ',' << r.k << ',' << r.algorithm << ',' << r.subset << ',' << r.count << ','
       << r.mean_objective << ',' << r.mean_iterations << ',' << r.mean_time << '\n';
  }
}

void write_records_jsonl(std::ostream& os, const std::vector<RunRecord>& records) {
  for (const auto& r : records) {
    json j{{"graph", r.graph_id},
           {"q", r.q_tag},
           {"k", r.k},
           {"algorithm", r.algorithm},
           {"start_index", r.start_index},
           {"start_class", r.start_class},
           {"initial_objective", r.initial_objective},
           {"final_objective", r.final_objective},
           {"iterations", r.iterations},
           {"status", r.status},
           {"wall_time", r.wall_time},
           {"criticality_residual", r.criticality_residual},
           {"dca_accepted", r.dca_accepted},
           {"error", r.error}};
    os << j.dump() << '\n';
  }
}

std::vector<RunRecord> read_records_jsonl(std::istream& is) {
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line);
    RunRecord r;
    r.graph_id = j.at("graph").get<std::string>();
    r.q_tag = j.at("q").get<std::string>();
    r.k = j.at("k").get<int>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.start_index = j.at("start_index").get<int>();
    r.start_class = j.value("start_class", std::string{});
    r.initial_objective = j.value("initial_objective", 0.0);
    r.final_objective = j.at("final_objective").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.status = j.value("status", std::string{});
    r.wall_time = j.value("wall_time", 0.0);
    r.criticality_residual = j.value("criticality_residual", 0.0);
    r.dca_accepted = j.value("dca_accepted", 0);
    r.error = j.value("error", std::string{});
    out.push_back(std::move(r));
  }
  return out;
}

std::string resolve_output_path(const std::string& path) {
  const char* dir = std::getenv("FRACGFM_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0' || path.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

}  // namespace fracgfm
