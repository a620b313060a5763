#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "bba/dataset.hpp"
#include "bba/metrics.hpp"

namespace bba {

struct BenchOptions {
  int workers = 1;
  std::optional<std::uint64_t> seed_override;
};

struct RunReport {
  std::vector<InstanceRow> rows;
  Aggregate aggregate;
};

/// Attacks every instance of the dataset with the configured method and
/// writes per-instance JSONL rows to `out_path` plus the aggregate to
/// `out_path` + ".summary.json". Rows appear in input order; a fixed seed
/// reproduces them byte for byte regardless of the worker count.
RunReport run_benchmark(const std::filesystem::path& dataset_path,
                        const std::filesystem::path& config_path,
                        const std::filesystem::path& out_path,
                        const BenchOptions& options = {});

/// In-memory variant used by tests and the CLI plumbing.
RunReport run_benchmark(const Dataset& dataset, const RunConfig& config,
                        const BenchOptions& options = {});

/// Reads rows back from a JSONL report.
std::vector<InstanceRow> load_rows(const std::filesystem::path& rows_path);

void write_report(const RunReport& report,
                  const std::filesystem::path& out_path);

}  // namespace bba
