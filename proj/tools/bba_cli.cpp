#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "bba/bench.hpp"

namespace {

int cmd_attack(const std::string& dataset, const std::string& config,
               const std::string& out, int workers,
               std::optional<std::uint64_t> seed) {
  bba::BenchOptions options;
  options.workers = workers;
  options.seed_override = seed;
  const bba::RunReport report =
      bba::run_benchmark(dataset, config, out, options);
  std::cout << bba::aggregate_to_json(report.aggregate).dump(2) << std::endl;
  return 0;
}

int cmd_metrics(const std::string& in) {
  const std::vector<bba::InstanceRow> rows = bba::load_rows(in);
  const bba::Aggregate agg = bba::compute_metrics(rows);
  std::cout << bba::aggregate_to_json(agg).dump(2) << std::endl;

  // Cross-check a stored summary when present.
  std::filesystem::path summary = in;
  summary += ".summary.json";
  if (std::filesystem::exists(summary)) {
    std::ifstream f(summary);
    const nlohmann::json stored = nlohmann::json::parse(f);
    const nlohmann::json fresh = bba::aggregate_to_json(agg);
    if (stored != fresh) {
      std::cerr << "stored aggregate does not match recomputation"
                << std::endl;
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blockwise Bayesian attack benchmark"};
  app.require_subcommand(1);

  std::string dataset, config, out, in;
  int workers = 1;
  std::optional<std::uint64_t> seed;

  CLI::App* attack = app.add_subcommand("attack", "attack every instance");
  attack->add_option("--dataset", dataset, "JSONL dataset")->required();
  attack->add_option("--config", config, "JSON run configuration")->required();
  attack->add_option("--out", out, "output JSONL path")->required();
  attack->add_option("--workers", workers, "parallel attack instances");
  attack->add_option("--seed", seed, "override the config seed");

  CLI::App* metrics =
      app.add_subcommand("metrics", "recompute aggregates from a report");
  metrics->add_option("--in", in, "report JSONL path")->required();

  CLI::App* oracle =
      app.add_subcommand("oracle", "exhaustive minimum-perturbation search");
  oracle->add_option("--dataset", dataset, "JSONL dataset")->required();
  oracle->add_option("--config", config, "JSON run configuration")->required();
  oracle->add_option("--out", out, "output JSONL path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (attack->parsed()) return cmd_attack(dataset, config, out, workers, seed);
    if (metrics->parsed()) return cmd_metrics(in);
    if (oracle->parsed()) {
      const bba::Dataset ds = bba::load_dataset(dataset);
      bba::RunConfig cfg = bba::load_run_config(config);
      cfg.method = "oracle";
      const bba::RunReport report = bba::run_benchmark(ds, cfg, {});
      bba::write_report(report, out);
      std::cout << bba::aggregate_to_json(report.aggregate).dump(2)
                << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
