#include "bba/bench.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include "bba/baselines.hpp"
#include "bba/errors.hpp"

namespace bba {

namespace {

Rng instance_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

InstanceRow attack_one(const InstanceRecord& instance, const RunConfig& config,
                       std::uint64_t seed, std::size_t index) {
  Rng rng = instance_rng(seed, index);
  const CandidateSets cands(instance.candidates);
  const std::unique_ptr<Victim> victim = make_victim(config.victim);

  try {
    if (config.method == "bba") {
      const AttackOutcome outcome = run_attack(
          instance.tokens, instance.label, cands, *victim, config.attack, rng);
      return make_row(instance, outcome);
    }
    if (config.method == "random") {
      if (!config.attack.global_budget) {
        throw std::runtime_error("random method requires global_budget");
      }
      const AttackOutcome outcome = random_search_baseline(
          instance.tokens, instance.label, cands, *victim,
          *config.attack.global_budget, rng);
      return make_row(instance, outcome);
    }
    // oracle
    const OracleResult oracle =
        exhaustive_oracle(instance.tokens, instance.label, cands, *victim);
    InstanceRow row;
    row.id = instance.id;
    if (oracle.refused) {
      row.error = "attack space too large for exhaustive enumeration";
      return row;
    }
    row.success = oracle.feasible;
    row.originally_correct = !(oracle.feasible && oracle.optimal_hamming == 0);
    row.queries = oracle.queries;
    row.phase_queries.block = oracle.queries;
    if (oracle.feasible) {
      row.hamming = oracle.optimal_hamming;
      row.modification_rate = 100.0 * static_cast<double>(row.hamming) /
                              static_cast<double>(instance.tokens.size());
      row.adv_tokens = oracle.optimal;
    }
    return row;
  } catch (const ProtocolError& e) {
    InstanceRow row;
    row.id = instance.id;
    row.error = e.what();
    return row;
  } catch (const std::exception& e) {
    InstanceRow row;
    row.id = instance.id;
    row.error = e.what();
    return row;
  }
}

}  // namespace

RunReport run_benchmark(const Dataset& dataset, const RunConfig& config,
                        const BenchOptions& options) {
  const std::uint64_t seed =
      options.seed_override ? *options.seed_override : config.attack.seed;
  const std::size_t n = dataset.instances.size();
  RunReport report;
  report.rows.resize(n);

  const int workers =
      std::max(1, std::min<int>(options.workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      report.rows[i] = attack_one(dataset.instances[i], config, seed, i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) break;
          report.rows[i] = attack_one(dataset.instances[i], config, seed, i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  report.aggregate = compute_metrics(report.rows);
  return report;
}

RunReport run_benchmark(const std::filesystem::path& dataset_path,
                        const std::filesystem::path& config_path,
                        const std::filesystem::path& out_path,
                        const BenchOptions& options) {
  const Dataset dataset = load_dataset(dataset_path);
  const RunConfig config = load_run_config(config_path);
  RunReport report = run_benchmark(dataset, config, options);
  write_report(report, out_path);
  return report;
}

void write_report(const RunReport& report,
                  const std::filesystem::path& out_path) {
  std::ofstream rows(out_path);
  if (!rows) {
    throw std::runtime_error("cannot write report: " + out_path.string());
  }
  for (const InstanceRow& row : report.rows) {
    rows << row_to_json(row).dump() << '\n';
  }
  rows.close();

  std::filesystem::path summary = out_path;
  summary += ".summary.json";
  std::ofstream agg(summary);
  if (!agg) {
    throw std::runtime_error("cannot write summary: " + summary.string());
  }
  agg << aggregate_to_json(report.aggregate).dump(2) << '\n';
}

std::vector<InstanceRow> load_rows(const std::filesystem::path& rows_path) {
  std::ifstream in(rows_path);
  if (!in) {
    throw std::runtime_error("cannot open report: " + rows_path.string());
  }
  std::vector<InstanceRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      rows.push_back(row_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return rows;
}

}  // namespace bba
