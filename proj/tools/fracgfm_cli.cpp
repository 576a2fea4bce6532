#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "fracgfm/gfm.hpp"
#include "fracgfm/graph.hpp"
#include "fracgfm/harness.hpp"

namespace {

using namespace fracgfm;

std::ofstream open_out(const std::string& path) {
  std::ofstream os(resolve_output_path(path));
  if (!os) throw std::runtime_error("cannot open output file: " + resolve_output_path(path));
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open input file: " + path);
  return is;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed-variation graph Fourier modes and fractional-program solvers"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random graph and write it as an edge list");
  GraphSpec gspec;
  std::string gen_type = "rgg";
  std::string gen_out;
  gen->add_option("--type", gen_type, "rgg | drgg | community")->check(CLI::IsMember({"rgg", "drgg", "community"}));
  gen->add_option("--n", gspec.n, "Vertex count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gspec.seed, "Generator seed");
  gen->add_option("--clusters", gspec.k_clusters, "Community count (community only)");
  gen->add_option("--p-in", gspec.p_in, "Within-community edge probability");
  gen->add_option("--p-out", gspec.p_out, "Between-community edge probability");
  gen->add_option("-o,--output", gen_out, "Output path (stdout when omitted)");

  // modes
  auto* modes = app.add_subcommand("modes", "Compute generalized graph Fourier modes");
  std::string modes_graph, modes_q = "identity", modes_out;
  int modes_k = 3;
  StartSpec modes_starts;
  SolverConfig modes_cfg;
  modes->add_option("--graph", modes_graph, "Graph edge-list file")->required();
  modes->add_option("--q", modes_q, "identity | degree")->check(CLI::IsMember({"identity", "degree"}));
  modes->add_option("--K", modes_k, "Number of modes including the constant one");
  modes->add_option("--n-adv", modes_starts.n_adv, "Adversarial starts per mode");
  modes->add_option("--n-rand", modes_starts.n_rand, "Random starts per mode");
  modes->add_option("--seed", modes_starts.seed, "Start seed");
  modes->add_option("--lambda-scale", modes_cfg.lambda_scale, "Step size numerator");
  modes->add_flag("--psa", "Disable the DCA refinement step");
  modes->add_option("-o,--output", modes_out, "Output path (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment sweep from a JSON config");
  std::string bench_config;
  bool bench_serial = false;
  bench->add_option("--config", bench_config, "Experiment config (JSON)")->required();
  bench->add_flag("--serial", bench_serial, "Run the sweep on one thread");

  // summarize
  auto* summ = app.add_subcommand("summarize", "Aggregate run records into a CSV table");
  std::string summ_records, summ_out;
  double summ_split = 0.3;
  summ->add_option("--records", summ_records, "Records file (JSON lines)")->required();
  summ->add_option("--split", summ_split, "Fraction of starts forming the adversarial subset");
  summ->add_option("-o,--output", summ_out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) {
      gspec.type = parse_graph_type(gen_type);
      const WeightedDigraph g = build_graph(gspec);
      if (gen_out.empty()) {
        write_graph(std::cout, g);
      } else {
        auto os = open_out(gen_out);
        write_graph(os, g);
      }
    } else if (*modes) {
      auto is = open_in(modes_graph);
      const WeightedDigraph g = read_graph(is);
      const DiagonalMetric q = parse_metric_kind(modes_q) == MetricKind::Identity
                                   ? DiagonalMetric::identity(g.vertex_count())
                                   : degree_metric(g);
      if (modes->count("--psa") > 0) {
        modes_cfg.dca_enabled = false;
        if (modes->count("--lambda-scale") == 0) modes_cfg.lambda_scale = SolverOverrides{}.lambda_scale_psa;
      }
      const ModeSet ms = compute_modes(g, q, modes_k, modes_cfg, modes_starts);
      if (modes_out.empty()) {
        write_modes_json(std::cout, ms);
      } else {
        auto os = open_out(modes_out);
        write_modes_json(os, ms);
      }
    } else if (*bench) {
      auto is = open_in(bench_config);
      ExperimentConfig cfg = parse_experiment_config(is);
      if (bench_serial) cfg.parallel = false;
      const std::vector<RunRecord> records = run_experiment(cfg);
      std::size_t failures = 0;
      for (const auto& r : records) failures += r.error.empty() ? 0 : 1;
      if (cfg.records_path.empty()) {
        write_records_jsonl(std::cout, records);
      } else {
        auto os = open_out(cfg.records_path);
        write_records_jsonl(os, records);
      }
      if (!cfg.summary_path.empty()) {
        auto os = open_out(cfg.summary_path);
        write_summary_csv(os, summarize(records, cfg.split));
      }
      std::cerr << records.size() << " runs, " << failures << " failed\n";
    } else if (*summ) {
      auto is = open_in(summ_records);
      const auto rows = summarize(read_records_jsonl(is), summ_split);
      if (summ_out.empty()) {
        write_summary_csv(std::cout, rows);
      } else {
        auto os = open_out(summ_out);
        write_summary_csv(os, rows);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "fracgfm: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
