#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bba/blockopt.hpp"
#include "bba/seq.hpp"
#include "bba/victim.hpp"

namespace bba {

struct DatasetHeader {
  int classes = 2;
  int vocab = 0;
};

struct InstanceRecord {
  std::string id;
  Sequence tokens;
  int label = 0;
  std::vector<std::vector<Token>> candidates;
};

struct Dataset {
  DatasetHeader header;
  std::vector<InstanceRecord> instances;
};

/// JSONL dataset: a header line `{"classes": int, "vocab": int}` followed by
/// one instance per line. Malformed lines raise errors carrying the line
/// number.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

struct VictimConfig {
  std::string type;  // "linear" | "keyword" | "constant" | "remote"
  std::vector<std::vector<double>> weights;  // linear: [class][token]
  std::vector<Token> triggers;               // keyword
  int base_class = 0;
  int trigger_class = 1;
  Logits logits;    // constant
  std::string url;  // remote
};

struct RunConfig {
  AttackConfig attack;
  std::string method = "bba";  // bba | random | oracle
  VictimConfig victim;
};

RunConfig load_run_config(const std::filesystem::path& path);

std::unique_ptr<Victim> make_victim(const VictimConfig& config);

}  // namespace bba
