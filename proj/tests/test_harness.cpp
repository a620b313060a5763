#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bba/baselines.hpp"
#include "bba/bench.hpp"
#include "bba/dataset.hpp"
#include "bba/metrics.hpp"
#include "support.hpp"

using namespace bba;

namespace {

InstanceRow row(bool success, bool correct, long long queries,
                double mod_rate) {
  InstanceRow r;
  r.success = success;
  r.originally_correct = correct;
  r.queries = queries;
  r.modification_rate = mod_rate;
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

Dataset keyword_dataset(int count, Rng& rng) {
  Dataset ds;
  ds.header.classes = 2;
  ds.header.vocab = 64;
  for (int i = 0; i < count; ++i) {
    InstanceRecord rec;
    rec.id = "inst-" + std::to_string(i);
    rec.label = 0;
    rec.tokens = test::random_sequence(6, 8, rng);
    rec.candidates.resize(6);
    for (int p = 0; p < 6; ++p) {
      rec.candidates[p] = {rec.tokens[p], static_cast<Token>(16 + 2 * p),
                           static_cast<Token>(17 + 2 * p)};
    }
    // Trigger token 40 reachable at one random position.
    rec.candidates[rng() % 6][2] = 40;
    ds.instances.push_back(std::move(rec));
  }
  return ds;
}

RunConfig keyword_config() {
  RunConfig cfg;
  cfg.method = "bba";
  cfg.attack.block_size = 6;
  cfg.attack.iterations = 4;
  cfg.attack.global_budget = 500;
  cfg.attack.seed = 99;
  cfg.victim.type = "keyword";
  cfg.victim.triggers = {40};
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("metric aggregation") {
  SUBCASE("asr counts successes over originally correct") {
    const std::vector<InstanceRow> rows{
        row(true, true, 1, 10), row(true, true, 1, 10), row(true, true, 1, 10),
        row(false, true, 1, 0)};
    const Aggregate agg = compute_metrics(rows);
    CHECK(agg.asr.value() == doctest::Approx(75.0));
  }
  SUBCASE("mr averages over successes") {
    const std::vector<InstanceRow> rows{row(true, true, 1, 10.0),
                                        row(false, true, 1, 0.0)};
    const Aggregate agg = compute_metrics(rows);
    CHECK(agg.mr.value() == doctest::Approx(10.0));
  }
  SUBCASE("qrs averages over all attacked instances") {
    const std::vector<InstanceRow> rows{row(false, true, 10, 0.0),
                                        row(false, true, 30, 0.0)};
    CHECK(compute_metrics(rows).qrs == doctest::Approx(20.0));
  }
  SUBCASE("originally misclassified instances are excluded from asr and mr") {
    const std::vector<InstanceRow> rows{row(true, false, 1, 0.0),
                                        row(true, true, 7, 25.0)};
    const Aggregate agg = compute_metrics(rows);
    CHECK(agg.asr.value() == doctest::Approx(100.0));
    CHECK(agg.mr.value() == doctest::Approx(25.0));
    CHECK(agg.qrs == doctest::Approx(4.0));  // still counted in queries
  }
  SUBCASE("asr undefined without originally correct instances") {
    const std::vector<InstanceRow> rows{row(true, false, 1, 0.0)};
    const Aggregate agg = compute_metrics(rows);
    CHECK(!agg.asr.has_value());
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(compute_metrics({}), std::invalid_argument);
  }
}

TEST_CASE("dataset save and load round trip") {
  Rng rng(3);
  Dataset ds = keyword_dataset(4, rng);
  const auto path = temp_file("bba_ds_roundtrip.jsonl");
  save_dataset(ds, path);
  const Dataset back = load_dataset(path);
  CHECK(back.header.classes == ds.header.classes);
  CHECK(back.header.vocab == ds.header.vocab);
  REQUIRE(back.instances.size() == ds.instances.size());
  for (std::size_t i = 0; i < ds.instances.size(); ++i) {
    CHECK(back.instances[i].id == ds.instances[i].id);
    CHECK(back.instances[i].tokens == ds.instances[i].tokens);
    CHECK(back.instances[i].candidates == ds.instances[i].candidates);
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed dataset lines carry line numbers") {
  const auto path = temp_file("bba_ds_malformed.jsonl");
  {
    std::ofstream out(path);
    out << R"({"classes": 2, "vocab": 8})" << '\n';
    out << R"({"id": "a", "tokens": [1, 2], "label": 0, "candidates": [[1], [2]]})"
        << '\n';
    out << "{not json}" << '\n';
  }
  try {
    load_dataset(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("dataset validation rejects broken instances") {
  const auto path = temp_file("bba_ds_invalid.jsonl");
  auto write_and_expect = [&](const std::string& body,
                              const std::string& needle) {
    {
      std::ofstream out(path);
      out << R"({"classes": 2, "vocab": 8})" << '\n' << body << '\n';
    }
    try {
      load_dataset(path);
      FAIL("expected validation error for: ", body);
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  write_and_expect(
      R"({"id":"a","tokens":[1,2],"label":0,"candidates":[[1]]})",
      "candidates length");
  write_and_expect(
      R"({"id":"a","tokens":[1,2],"label":5,"candidates":[[1],[2]]})",
      "label out of range");
  write_and_expect(
      R"({"id":"a","tokens":[1,2],"label":0,"candidates":[[3],[2]]})",
      "original token missing");
  write_and_expect(
      R"({"id":"a","tokens":[1,99],"label":0,"candidates":[[1],[99]]})",
      "vocabulary range");
  std::filesystem::remove(path);
}

TEST_CASE("run config parsing") {
  const auto path = temp_file("bba_config.json");
  {
    std::ofstream out(path);
    out << R"({"m": 6, "R": 4, "n_b": 4, "t": 100, "n_post": 50, "r": 2,
               "global_budget": 500, "seed": 7, "method": "bba",
               "victim": {"type": "keyword", "triggers": [40]},
               "standardize_targets": true})";
  }
  const RunConfig cfg = load_run_config(path);
  CHECK(cfg.attack.block_size == 6);
  CHECK(cfg.attack.iterations == 4);
  CHECK(cfg.attack.acq.batch_size == 4);
  CHECK(cfg.attack.acq.screen_size == 100);
  CHECK(cfg.attack.post_budget == 50);
  CHECK(cfg.attack.post_radius == 2);
  CHECK(cfg.attack.global_budget.value() == 500);
  CHECK(cfg.attack.seed == 7);
  CHECK(cfg.method == "bba");
  CHECK(cfg.victim.type == "keyword");
  std::filesystem::remove(path);
}

TEST_CASE("random baseline semantics") {
  SUBCASE("already adversarial input needs one query") {
    KeywordToyVictim victim({9}, 0, 1);
    CandidateSets cands({{0, 9}, {1, 2}});
    Rng rng(3);
    const AttackOutcome out =
        random_search_baseline({9, 1}, 0, cands, victim, 100, rng);
    CHECK(out.success);
    CHECK(out.queries == 1);
    CHECK(!out.originally_correct);
  }
  SUBCASE("infeasible instances burn the exact budget") {
    ConstantVictim victim({1.0, 0.0});
    CandidateSets cands({{0, 1, 2}, {0, 3, 4}});
    Rng rng(5);
    const AttackOutcome out =
        random_search_baseline({0, 0}, 0, cands, victim, 25, rng);
    CHECK(!out.success);
    CHECK(out.queries == 25);
  }
  SUBCASE("successes come from the attack space") {
    KeywordToyVictim victim({40}, 0, 1);
    CandidateSets cands({{0, 40, 2}, {1, 3, 4}});
    Rng rng(7);
    const AttackOutcome out =
        random_search_baseline({0, 1}, 0, cands, victim, 200, rng);
    REQUIRE(out.success);
    CHECK(cands.covers(out.adversarial));
    CHECK(out.hamming == hamming_distance({0, 1}, out.adversarial));
  }
}

TEST_CASE("exhaustive oracle semantics") {
  SUBCASE("finds the one-flip optimum") {
    KeywordToyVictim victim({40}, 0, 1);
    CandidateSets cands({{0, 1, 2}, {1, 40, 5}, {2, 6, 7}});
    const OracleResult res = exhaustive_oracle({0, 1, 2}, 0, cands, victim);
    REQUIRE(res.feasible);
    CHECK(res.optimal_hamming == 1);
    CHECK(res.optimal[1] == 40);
  }
  SUBCASE("proves infeasibility") {
    ConstantVictim victim({1.0, 0.0});
    CandidateSets cands({{0, 1}, {0, 2}});
    const OracleResult res = exhaustive_oracle({0, 0}, 0, cands, victim);
    CHECK(!res.feasible);
    CHECK(res.queries == 4);  // the whole product space
  }
  SUBCASE("refuses oversized spaces") {
    ConstantVictim victim({1.0, 0.0});
    std::vector<std::vector<Token>> lists(30, {0, 1, 2});
    CandidateSets cands(lists);
    const OracleResult res =
        exhaustive_oracle(Sequence(30, 0), 0, cands, victim);
    CHECK(res.refused);
  }
}

TEST_CASE("benchmark reruns are byte-identical and order-independent") {
  Rng rng(41);
  const Dataset ds = keyword_dataset(6, rng);
  const RunConfig cfg = keyword_config();

  const auto out1 = temp_file("bba_rep1.jsonl");
  const auto out2 = temp_file("bba_rep2.jsonl");
  const auto out3 = temp_file("bba_rep3.jsonl");

  const RunReport r1 = run_benchmark(ds, cfg, {});
  write_report(r1, out1);
  const RunReport r2 = run_benchmark(ds, cfg, {});
  write_report(r2, out2);
  BenchOptions parallel;
  parallel.workers = 4;
  const RunReport r3 = run_benchmark(ds, cfg, parallel);
  write_report(r3, out3);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  const std::string b1 = slurp(out1);
  CHECK(b1 == slurp(out2));
  CHECK(b1 == slurp(out3));
  CHECK(!b1.empty());

  // Aggregates recompute exactly from rows.
  const std::vector<InstanceRow> rows = load_rows(out1);
  const Aggregate fresh = compute_metrics(rows);
  CHECK(aggregate_to_json(fresh) == aggregate_to_json(r1.aggregate));

  std::filesystem::remove(out1);
  std::filesystem::remove(out1.string() + ".summary.json");
  std::filesystem::remove(out2);
  std::filesystem::remove(out2.string() + ".summary.json");
  std::filesystem::remove(out3);
  std::filesystem::remove(out3.string() + ".summary.json");
}

TEST_CASE("originally misclassified instances follow the reporting rules") {
  // Token 40 is the trigger; an instance that already contains it is
  // trivially "successful" with zero modifications but excluded from ASR.
  Dataset ds;
  ds.header.classes = 2;
  ds.header.vocab = 64;
  InstanceRecord rec;
  rec.id = "already-flipped";
  rec.label = 0;
  rec.tokens = {40, 1, 2, 3, 4, 5};
  rec.candidates.resize(6);
  for (int p = 0; p < 6; ++p) {
    rec.candidates[p] = {rec.tokens[p], static_cast<Token>(16 + p)};
  }
  ds.instances.push_back(rec);

  const RunReport report = run_benchmark(ds, keyword_config(), {});
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].success);
  CHECK(!report.rows[0].originally_correct);
  CHECK(report.rows[0].queries == 1);
  CHECK(report.rows[0].hamming == 0);
  CHECK(!report.aggregate.asr.has_value());
  CHECK(report.aggregate.qrs == doctest::Approx(1.0));
}

TEST_CASE("oracle method produces rows") {
  Rng rng(43);
  const Dataset ds = keyword_dataset(3, rng);
  RunConfig cfg = keyword_config();
  cfg.method = "oracle";
  const RunReport report = run_benchmark(ds, cfg, {});
  REQUIRE(report.rows.size() == 3);
  for (const InstanceRow& r : report.rows) {
    CHECK(r.success);  // the trigger is always reachable
    CHECK(r.hamming == 1);
  }
}

}  // TEST_SUITE
