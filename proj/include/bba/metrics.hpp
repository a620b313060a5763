#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bba/blockopt.hpp"
#include "bba/dataset.hpp"
#include "bba/seq.hpp"

namespace bba {

struct PhaseQueries {
  long long init = 0;
  long long block = 0;
  long long post = 0;
};

/// One per-instance outcome line of a run report.
struct InstanceRow {
  std::string id;
  bool success = false;
  bool originally_correct = true;
  long long queries = 0;
  int hamming = 0;
  double modification_rate = 0.0;  // percent of positions changed
  Sequence adv_tokens;
  PhaseQueries phase_queries;
  std::optional<std::string> error;
};

struct Aggregate {
  std::optional<double> asr;  // percent; empty when nothing was originally correct
  std::optional<double> mr;   // percent; empty when there were no successes
  double qrs = 0.0;
  int n = 0;
};

/// ASR over originally-correct instances, MR over successes, Qrs over all
/// attacked instances. Throws on an empty row list.
Aggregate compute_metrics(const std::vector<InstanceRow>& rows);

InstanceRow make_row(const InstanceRecord& instance,
                     const AttackOutcome& outcome);

nlohmann::ordered_json row_to_json(const InstanceRow& row);
InstanceRow row_from_json(const nlohmann::json& j);
nlohmann::ordered_json aggregate_to_json(const Aggregate& agg);

}  // namespace bba
