#include "bba/dataset.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "bba/remote_victim.hpp"

namespace bba {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

InstanceRecord parse_instance(const json& j, const DatasetHeader& header,
                              std::size_t line) {
  InstanceRecord rec;
  try {
    rec.id = j.at("id").get<std::string>();
    rec.tokens = j.at("tokens").get<Sequence>();
    rec.label = j.at("label").get<int>();
    rec.candidates = j.at("candidates").get<std::vector<std::vector<Token>>>();
  } catch (const json::exception& e) {
    line_error(line, e.what());
  }
  if (rec.tokens.empty()) line_error(line, "empty token list");
  if (rec.candidates.size() != rec.tokens.size()) {
    line_error(line, "candidates length does not match tokens length");
  }
  if (rec.label < 0 || rec.label >= header.classes) {
    line_error(line, "label out of range");
  }
  for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
    if (rec.tokens[i] < 0 || rec.tokens[i] >= header.vocab) {
      line_error(line, "token id out of vocabulary range");
    }
    bool found = false;
    for (Token t : rec.candidates[i]) {
      if (t < 0 || t >= header.vocab) {
        line_error(line, "candidate token out of vocabulary range");
      }
      if (t == rec.tokens[i]) found = true;
    }
    if (!found) {
      line_error(line, "original token missing from its candidate set");
    }
  }
  return rec;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path.string());

  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      line_error(lineno, e.what());
    }
    if (lineno == 1) {
      try {
        ds.header.classes = j.at("classes").get<int>();
        ds.header.vocab = j.at("vocab").get<int>();
      } catch (const json::exception& e) {
        line_error(lineno, e.what());
      }
      if (ds.header.classes < 2) line_error(lineno, "classes must be >= 2");
      if (ds.header.vocab < 1) line_error(lineno, "vocab must be >= 1");
      continue;
    }
    ds.instances.push_back(parse_instance(j, ds.header, lineno));
  }
  if (lineno == 0) throw std::runtime_error("dataset is empty: " + path.string());
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path.string());
  out << nlohmann::ordered_json{{"classes", dataset.header.classes},
                                {"vocab", dataset.header.vocab}}
             .dump()
      << '\n';
  for (const InstanceRecord& rec : dataset.instances) {
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["tokens"] = rec.tokens;
    j["label"] = rec.label;
    j["candidates"] = rec.candidates;
    out << j.dump() << '\n';
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("config parse error: " + std::string(e.what()));
  }

  RunConfig cfg;
  AttackConfig& a = cfg.attack;
  try {
    a.block_size = j.value("m", a.block_size);
    a.iterations = j.value("R", a.iterations);
    a.acq.batch_size = j.value("n_b", a.acq.batch_size);
    a.acq.screen_size = j.value("t", a.acq.screen_size);
    a.post_budget = j.value("n_post", a.post_budget);
    a.post_radius = j.value("r", a.post_radius);
    a.post_samples = j.value("post_samples", a.post_samples);
    if (j.contains("global_budget") && !j["global_budget"].is_null()) {
      a.global_budget = j["global_budget"].get<long long>();
    }
    a.seed = j.value("seed", a.seed);
    a.standardize_targets = j.value("standardize_targets", true);
    a.subsample_history = j.value("subsample", true);
    cfg.method = j.value("method", cfg.method);

    if (j.contains("victim")) {
      const json& v = j["victim"];
      cfg.victim.type = v.at("type").get<std::string>();
      if (cfg.victim.type == "linear") {
        cfg.victim.weights = v.at("weights").get<std::vector<std::vector<double>>>();
      } else if (cfg.victim.type == "keyword") {
        cfg.victim.triggers = v.at("triggers").get<std::vector<Token>>();
        cfg.victim.base_class = v.value("base_class", 0);
        cfg.victim.trigger_class = v.value("trigger_class", 1);
      } else if (cfg.victim.type == "constant") {
        cfg.victim.logits = v.at("logits").get<Logits>();
      } else if (cfg.victim.type == "remote") {
        cfg.victim.url = v.at("url").get<std::string>();
      } else {
        throw std::runtime_error("unknown victim type: " + cfg.victim.type);
      }
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("config error: " + std::string(e.what()));
  }

  if (a.block_size < 1 || a.iterations < 1 || a.post_radius < 1) {
    throw std::runtime_error("config error: m, R and r must be >= 1");
  }
  if (a.acq.batch_size < 1 || a.acq.batch_size > a.acq.screen_size) {
    throw std::runtime_error("config error: need 1 <= n_b <= t");
  }
  if (cfg.method != "bba" && cfg.method != "random" && cfg.method != "oracle") {
    throw std::runtime_error("config error: unknown method " + cfg.method);
  }
  return cfg;
}

std::unique_ptr<Victim> make_victim(const VictimConfig& config) {
  if (config.type == "linear") {
    return std::make_unique<LinearToyVictim>(config.weights);
  }
  if (config.type == "keyword") {
    return std::make_unique<KeywordToyVictim>(config.triggers,
                                              config.base_class,
                                              config.trigger_class);
  }
  if (config.type == "constant") {
    return std::make_unique<ConstantVictim>(config.logits);
  }
  if (config.type == "remote") {
    return std::make_unique<RemoteVictim>(config.url);
  }
  throw std::runtime_error("unknown victim type: " + config.type);
}

}  // namespace bba
