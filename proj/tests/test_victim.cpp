#include <doctest.h>

#include <algorithm>

#include "bba/errors.hpp"
#include "bba/victim.hpp"
#include "support.hpp"

using namespace bba;

TEST_SUITE("victim") {

TEST_CASE("attack criterion formula") {
  CHECK(attack_criterion({0.2, 0.5, 0.3}, 1) == doctest::Approx(-0.2));
  CHECK(attack_criterion({3, 1}, 1) == doctest::Approx(2.0));
  CHECK(attack_criterion({1, 1}, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(attack_criterion({1, 2}, 2), std::invalid_argument);
  CHECK_THROWS_AS(attack_criterion({1}, 0), std::invalid_argument);
}

TEST_CASE("criterion sign matches the argmax") {
  Rng rng(23);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    Logits logits(4);
    for (double& v : logits) v = unif(rng);
    const int argmax = static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    bool unique = true;
    for (int c = 0; c < 4; ++c) {
      if (c != argmax && logits[c] == logits[argmax]) unique = false;
    }
    if (unique) CHECK(attack_criterion(logits, argmax) < 0.0);
    for (int y = 0; y < 4; ++y) {
      if (y != argmax) CHECK(attack_criterion(logits, y) >= 0.0);
    }
  }
}

TEST_CASE("query charges one count per sequence") {
  ConstantVictim victim({1.0, 0.0});
  QueryLedger ledger;
  std::vector<Sequence> batch(4, Sequence{1, 2});
  ledger.charge(10, Phase::Block);
  query(victim, batch, ledger);
  CHECK(ledger.total() == 14);

  query(victim, std::vector<Sequence>{}, ledger);
  CHECK(ledger.total() == 14);
}

TEST_CASE("budget cap rejects the whole batch") {
  ConstantVictim victim({1.0, 0.0});
  QueryLedger ledger(5);
  std::vector<Sequence> four(4, Sequence{1});
  query(victim, four, ledger);
  CHECK(ledger.total() == 4);
  std::vector<Sequence> two(2, Sequence{1});
  CHECK_THROWS_AS(query(victim, two, ledger), BudgetExceededError);
  CHECK(ledger.total() == 4);  // nothing charged on refusal
  CHECK(ledger.remaining() == 1);
}

TEST_CASE("ledger total equals the sum of phase counts") {
  QueryLedger ledger;
  ledger.charge(3, Phase::Init);
  ledger.charge(5, Phase::Block);
  ledger.charge(2, Phase::Post);
  CHECK(ledger.total() == ledger.phase_count(Phase::Init) +
                              ledger.phase_count(Phase::Block) +
                              ledger.phase_count(Phase::Post));
}

TEST_CASE("linear toy victim sums per-token weights") {
  SUBCASE("constant rows") {
    LinearToyVictim victim({{1, 1, 1}, {0, 0, 0}});
    const auto logits = victim.score(std::vector<Sequence>{{0, 1, 2, 2}});
    CHECK(logits[0][0] == doctest::Approx(4.0));
    CHECK(logits[0][1] == doctest::Approx(0.0));
  }
  SUBCASE("single token") {
    LinearToyVictim victim({{0.3}, {0.9}});
    const auto logits = victim.score(std::vector<Sequence>{{0}});
    CHECK(logits[0][0] == doctest::Approx(0.3));
    CHECK(logits[0][1] == doctest::Approx(0.9));
  }
  SUBCASE("random instances match hand-computed sums") {
    Rng rng(31);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::vector<double>> weights(3, std::vector<double>(10));
    for (auto& row : weights) {
      for (double& w : row) w = unif(rng);
    }
    LinearToyVictim victim(weights);
    for (int trial = 0; trial < 10; ++trial) {
      const Sequence s = test::random_sequence(7, 10, rng);
      const auto logits = victim.score(std::vector<Sequence>{s});
      for (int c = 0; c < 3; ++c) {
        double expected = 0.0;
        for (Token t : s) expected += weights[c][t];
        CHECK(logits[0][c] == doctest::Approx(expected));
      }
    }
  }
  SUBCASE("unknown token id") {
    LinearToyVictim victim({{1.0}, {0.0}});
    CHECK_THROWS_AS(victim.score(std::vector<Sequence>{{5}}),
                    std::invalid_argument);
  }
}

TEST_CASE("keyword toy victim flips on a single trigger") {
  KeywordToyVictim victim({7, 9}, 0, 1);

  const auto clean = victim.score(std::vector<Sequence>{{1, 2, 3}});
  CHECK(attack_criterion(clean[0], 0) < 0.0);

  const auto hit = victim.score(std::vector<Sequence>{{1, 7, 3}});
  CHECK(attack_criterion(hit[0], 0) >= 0.0);

  // Any single insertion of a trigger flips the criterion sign.
  const Sequence s{1, 2, 3, 4};
  for (std::size_t i = 0; i < s.size(); ++i) {
    Sequence x = s;
    x[i] = 9;
    const auto flipped = victim.score(std::vector<Sequence>{x});
    CHECK(attack_criterion(flipped[0], 0) >= 0.0);
  }
}

TEST_CASE("keyword margin grows with trigger count") {
  KeywordToyVictim victim({7}, 0, 1);
  const auto one = victim.score(std::vector<Sequence>{{7, 1, 1}});
  const auto two = victim.score(std::vector<Sequence>{{7, 7, 1}});
  CHECK(attack_criterion(two[0], 0) > attack_criterion(one[0], 0));
}

}  // TEST_SUITE
