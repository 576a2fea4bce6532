#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "fracgfm/harness.hpp"

using namespace fracgfm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.graphs = {{GraphType::Rgg, 12, 3}};
  cfg.ks = {2};
  cfg.starts = {2, 2, 9};
  return cfg;
}

RunRecord record(const std::string& alg, int start, double obj, int iters = 3, double time = 0.5) {
  RunRecord r;
  r.graph_id = "g";
  r.q_tag = "identity";
  r.k = 2;
  r.algorithm = alg;
  r.start_index = start;
  r.final_objective = obj;
  r.iterations = iters;
  r.wall_time = time;
  return r;
}

bool same_except_time(const RunRecord& a, const RunRecord& b) {
  return a.graph_id == b.graph_id && a.q_tag == b.q_tag && a.k == b.k && a.algorithm == b.algorithm &&
         a.start_index == b.start_index && a.start_class == b.start_class &&
         a.initial_objective == b.initial_objective && a.final_objective == b.final_objective &&
         a.iterations == b.iterations && a.status == b.status && a.criticality_residual == b.criticality_residual &&
         a.dca_accepted == b.dca_accepted && a.error == b.error;
}

}  // namespace

TEST_CASE("name parsing") {
  CHECK(parse_graph_type("drgg") == GraphType::Drgg);
  CHECK(parse_metric_kind("D") == MetricKind::Degree);
  CHECK(parse_metric_kind("identity") == MetricKind::Identity);
  CHECK(parse_algorithm("ps-dca") == Algorithm::PsDca);
  CHECK(parse_algorithm(to_string(Algorithm::Psa)) == Algorithm::Psa);
  CHECK_THROWS_AS(parse_graph_type("grid"), std::invalid_argument);
  CHECK(GraphSpec{GraphType::Community, 20, 4}.id() == "community-n20-s4");
}

TEST_CASE("build_graph yields graphs without isolated vertices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (GraphType t : {GraphType::Rgg, GraphType::Drgg, GraphType::Community}) {
      const WeightedDigraph g = build_graph({t, 20, seed});
      CHECK(g.vertex_count() == 20);
      CHECK_FALSE(g.has_isolated_vertex());
      CHECK(g.is_connected());
    }
  }
  CHECK(build_graph({GraphType::Drgg, 20, 7}) == build_graph({GraphType::Drgg, 20, 7}));
}

TEST_CASE("default step scales per algorithm") {
  CHECK(solver_config_for(Algorithm::PsDca, {}).lambda_scale == 100.0);
  CHECK(solver_config_for(Algorithm::Psa, {}).lambda_scale == 80.0);
  CHECK(solver_config_for(Algorithm::PsDca, {}).dca_enabled);
  CHECK_FALSE(solver_config_for(Algorithm::Psa, {}).dca_enabled);
  CHECK(solver_config_for(Algorithm::Psa, {}).max_iter == 20);
}

TEST_CASE("run_experiment grid cardinality and determinism") {
  const ExperimentConfig cfg = small_config();
  const auto a = run_experiment(cfg);
  REQUIRE(a.size() == 8);
  int adversarial = 0;
  for (const auto& r : a) {
    CHECK(r.error.empty());
    CHECK(r.final_objective >= 0.0);
    CHECK(r.final_objective <= r.initial_objective + 1e-10);
    CHECK(r.iterations <= 20);
    CHECK(r.graph_id == "rgg-n12-s3");
    adversarial += r.start_class == "adversarial" ? 1 : 0;
  }
  CHECK(adversarial == 4);
  CHECK(a[0].algorithm == "psa");
  CHECK(a[4].algorithm == "ps_dca");
  // Both algorithms share each start.
  for (int s = 0; s < 4; ++s) CHECK(a[static_cast<std::size_t>(s)].initial_objective == a[static_cast<std::size_t>(4 + s)].initial_objective);

  const auto b = run_experiment(cfg);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_except_time(a[i], b[i]));

  ExperimentConfig serial = cfg;
  serial.parallel = false;
  const auto c = run_experiment(serial);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_except_time(a[i], c[i]));
}

TEST_CASE("larger grids keep grid order") {
  ExperimentConfig cfg;
  cfg.graphs = {{GraphType::Drgg, 10, 1}, {GraphType::Community, 10, 2}};
  cfg.metrics = {MetricKind::Identity, MetricKind::Degree};
  cfg.ks = {2, 4};
  cfg.starts = {1, 2, 5};
  const auto recs = run_experiment(cfg);
  REQUIRE(recs.size() == 2 * 2 * 2 * 2 * 3);
  CHECK(recs.front().graph_id == "drgg-n10-s1");
  CHECK(recs.back().graph_id == "community-n10-s2");
  CHECK(recs.back().q_tag == "degree");
  CHECK(recs.back().k == 4);
  CHECK(recs.back().start_index == 2);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.algorithms.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.ks = {13};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.split = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.starts = {0, 0, 1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("parse_experiment_config") {
  std::istringstream is(R"({
    "graphs": [{"type": "community", "n": 16, "seed": 4, "k_clusters": 2, "p_in": 0.9, "p_out": 0.1},
               {"type": "rgg", "n": 12}],
    "q": ["identity", "degree"],
    "ks": [2, 3],
    "algorithms": ["ps_dca"],
    "starts": {"n_adv": 3, "n_rand": 7, "seed": 11},
    "solver": {"lambda_scale_psa": 60, "tol": 1e-7, "max_iter": 30, "normalize": false},
    "output": {"records": "r.jsonl", "summary": "s.csv"},
    "split": 0.5,
    "parallel": false
  })");
  const ExperimentConfig cfg = parse_experiment_config(is);
  REQUIRE(cfg.graphs.size() == 2);
  CHECK(cfg.graphs[0].type == GraphType::Community);
  CHECK(cfg.graphs[0].p_in == 0.9);
  CHECK(cfg.graphs[1].seed == 1);
  CHECK(cfg.metrics == std::vector<MetricKind>{MetricKind::Identity, MetricKind::Degree});
  CHECK(cfg.ks == std::vector<int>{2, 3});
  CHECK(cfg.algorithms == std::vector<Algorithm>{Algorithm::PsDca});
  CHECK(cfg.starts.n_rand == 7);
  CHECK(cfg.starts.seed == 11);
  CHECK(cfg.solver.lambda_scale_psa == 60.0);
  CHECK(cfg.solver.lambda_scale_ps_dca == 100.0);
  CHECK(cfg.solver.tol == 1e-7);
  CHECK(cfg.solver.max_iter == 30);
  CHECK_FALSE(cfg.solver.normalize);
  CHECK(cfg.records_path == "r.jsonl");
  CHECK(cfg.summary_path == "s.csv");
  CHECK(cfg.split == 0.5);
  CHECK_FALSE(cfg.parallel);

  std::istringstream single(R"({"graphs": [{"type": "drgg"}], "q": "D"})");
  CHECK(parse_experiment_config(single).metrics == std::vector<MetricKind>{MetricKind::Degree});
  std::istringstream bad(R"({"graphs": [], "ks": [2]})");
  CHECK_THROWS_AS(parse_experiment_config(bad), std::invalid_argument);
  std::istringstream unknown(R"({"graphs": [{"type": "lattice"}]})");
  CHECK_THROWS_AS(parse_experiment_config(unknown), std::invalid_argument);
}

TEST_CASE("summarize examples") {
  const auto one = summarize({record("psa", 0, 2.5, 4, 0.25)}, 0.3);
  REQUIRE(one.size() == 2);
  CHECK(one[0].subset == "adversarial");
  CHECK(one[1].subset == "all");
  for (const auto& r : one) {
    CHECK(r.count == 1);
    CHECK(r.mean_objective == 2.5);
    CHECK(r.mean_iterations == 4.0);
    CHECK(r.mean_time == 0.25);
  }

  const auto two = summarize({record("psa", 0, 1.0), record("psa", 1, 3.0)}, 1.0);
  CHECK(two[1].mean_objective == 2.0);

  // Records out of order and one failure.
  std::vector<RunRecord> recs;
  for (int s = 49; s >= 0; --s) recs.push_back(record("ps_dca", s, static_cast<double>(s)));
  const auto fifty = summarize(recs, 0.3);
  REQUIRE(fifty.size() == 2);
  CHECK(fifty[0].count == 15);
  CHECK(fifty[0].mean_objective == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(fifty[1].count == 50);

  recs[0].error = "boom";  // start 49
  CHECK(summarize(recs, 0.3)[1].count == 49);
  CHECK_THROWS_AS(summarize(recs, 1.5), std::invalid_argument);
}

TEST_CASE("summary means agree with an independent recomputation") {
  ExperimentConfig cfg;
  cfg.graphs = {{GraphType::Drgg, 12, 2}};
  cfg.ks = {2, 3};
  cfg.starts = {3, 7, 4};
  const auto recs = run_experiment(cfg);
  const auto rows = summarize(recs, 0.3);
  REQUIRE(rows.size() == 2 * 2 * 2);
  for (const auto& row : rows) {
    double sum_obj = 0.0, sum_it = 0.0, sum_t = 0.0;
    std::size_t n = 0;
    for (const auto& r : recs) {
      if (r.k != row.k || r.algorithm != row.algorithm) continue;
      if (row.subset == "adversarial" && r.start_index >= 3) continue;
      sum_obj += r.final_objective;
      sum_it += r.iterations;
      sum_t += r.wall_time;
      ++n;
    }
    CHECK(row.count == n);
    CHECK(std::abs(row.mean_objective - sum_obj / n) <= 1e-12);
    CHECK(std::abs(row.mean_iterations - sum_it / n) <= 1e-12);
    CHECK(std::abs(row.mean_time - sum_t / n) <= 1e-12);
  }
}

TEST_CASE("records and summary serialization") {
  const auto recs = run_experiment(small_config());
  std::stringstream ss;
  write_records_jsonl(ss, recs);
  const auto back = read_records_jsonl(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(same_except_time(back[i], recs[i]));
    CHECK(back[i].wall_time == recs[i].wall_time);
  }

  std::ostringstream csv;
  write_summary_csv(csv, summarize(recs, 0.3));
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == kSummaryHeader);
  std::string row;
  std::getline(lines, row);
  CHECK(row.rfind("rgg-n12-s3,identity,2,psa,adversarial,1,", 0) == 0);
}

TEST_CASE("output directory override") {
  CHECK(resolve_output_path("/abs/file.csv") == "/abs/file.csv");
  ::setenv("FRACGFM_OUTPUT_DIR", "/tmp/out", 1);
  CHECK(resolve_output_path("file.csv") == "/tmp/out/file.csv");
  CHECK(resolve_output_path("/abs/file.csv") == "/abs/file.csv");
  ::unsetenv("FRACGFM_OUTPUT_DIR");
  CHECK(resolve_output_path("file.csv") == "file.csv");
}
