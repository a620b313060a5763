#include "bba/metrics.hpp"

#include <stdexcept>

namespace bba {

Aggregate compute_metrics(const std::vector<InstanceRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("compute_metrics: no rows");
  Aggregate agg;
  agg.n = static_cast<int>(rows.size());

  int correct = 0;
  int fooled = 0;
  double mr_sum = 0.0;
  double qrs_sum = 0.0;
  for (const InstanceRow& r : rows) {
    qrs_sum += static_cast<double>(r.queries);
    if (!r.originally_correct) continue;
    ++correct;
    if (r.success) {
      ++fooled;
      mr_sum += r.modification_rate;
    }
  }
  agg.qrs = qrs_sum / static_cast<double>(rows.size());
  if (correct > 0) {
    agg.asr = 100.0 * static_cast<double>(fooled) / static_cast<double>(correct);
  }
  if (fooled > 0) {
    agg.mr = mr_sum / static_cast<double>(fooled);
  }
  return agg;
}

InstanceRow make_row(const InstanceRecord& instance,
                     const AttackOutcome& outcome) {
  InstanceRow row;
  row.id = instance.id;
  row.success = outcome.success;
  row.originally_correct = outcome.originally_correct;
  row.queries = outcome.queries;
  row.hamming = outcome.hamming;
  row.modification_rate =
      100.0 * static_cast<double>(outcome.hamming) /
      static_cast<double>(instance.tokens.size());
  row.adv_tokens = outcome.adversarial;
  row.phase_queries = {outcome.init_queries, outcome.block_queries,
                       outcome.post_queries};
  row.error = outcome.error;
  return row;
}

nlohmann::ordered_json row_to_json(const InstanceRow& row) {
  nlohmann::ordered_json j;
  j["id"] = row.id;
  j["success"] = row.success;
  j["originally_correct"] = row.originally_correct;
  j["queries"] = row.queries;
  j["hamming"] = row.hamming;
  j["modification_rate"] = row.modification_rate;
  j["adv_tokens"] = row.adv_tokens;
  j["phase_queries"] = {{"init", row.phase_queries.init},
                        {"block", row.phase_queries.block},
                        {"post", row.phase_queries.post}};
  if (row.error) {
    j["error"] = *row.error;
  } else {
    j["error"] = nullptr;
  }
  return j;
}

InstanceRow row_from_json(const nlohmann::json& j) {
  InstanceRow row;
  row.id = j.at("id").get<std::string>();
  row.success = j.at("success").get<bool>();
  row.originally_correct = j.at("originally_correct").get<bool>();
  row.queries = j.at("queries").get<long long>();
  row.hamming = j.at("hamming").get<int>();
  row.modification_rate = j.at("modification_rate").get<double>();
  row.adv_tokens = j.at("adv_tokens").get<Sequence>();
  const auto& pq = j.at("phase_queries");
  row.phase_queries.init = pq.at("init").get<long long>();
  row.phase_queries.block = pq.at("block").get<long long>();
  row.phase_queries.post = pq.at("post").get<long long>();
  if (!j.at("error").is_null()) {
    row.error = j.at("error").get<std::string>();
  }
  return row;
}

nlohmann::ordered_json aggregate_to_json(const Aggregate& agg) {
  nlohmann::ordered_json j;
  if (agg.asr) {
    j["asr"] = *agg.asr;
  } else {
    j["asr"] = nullptr;
  }
  if (agg.mr) {
    j["mr"] = *agg.mr;
  } else {
    j["mr"] = nullptr;
  }
  j["qrs"] = agg.qrs;
  j["n"] = agg.n;
  return j;
}

}  // namespace bba
