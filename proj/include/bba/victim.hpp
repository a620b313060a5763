#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bba/seq.hpp"

namespace bba {

using Logits = std::vector<double>;

enum class Phase { Init = 0, Block = 1, Post = 2 };

/// Attack criterion: largest non-true-class logit minus the true-class
/// logit. Non-negative exactly when the prediction is not `label` (ties
/// count as adversarial).
double attack_criterion(const Logits& logits, int label);

/// Exact query accounting. Every victim evaluation in the system is charged
/// here, one count per sequence scored.
class QueryLedger {
 public:
  QueryLedger() = default;
  explicit QueryLedger(std::optional<long long> budget_cap)
      : cap_(budget_cap) {}

  long long total() const { return total_; }
  long long phase_count(Phase p) const {
    return phase_[static_cast<int>(p)];
  }
  std::optional<long long> cap() const { return cap_; }
  long long remaining() const {
    return cap_ ? *cap_ - total_ : std::numeric_limits<long long>::max();
  }

  /// Charges `n` queries to `phase`. Throws BudgetExceededError (without
  /// charging) when a cap is set and would be exceeded.
  void charge(long long n, Phase phase);

 private:
  long long total_ = 0;
  std::array<long long, 3> phase_{0, 0, 0};
  std::optional<long long> cap_;
};

/// Black-box classifier interface. Implementations must return one logit
/// vector per input sequence, in order.
class Victim {
 public:
  virtual ~Victim() = default;
  virtual std::vector<Logits> score(std::span<const Sequence> batch) = 0;
};

/// Scores a batch through the victim, charging one query per sequence.
std::vector<Logits> query(Victim& victim, std::span<const Sequence> batch,
                          QueryLedger& ledger, Phase phase = Phase::Block);

/// Deterministic toy victim: logits are per-class sums of per-token weights.
/// Accepts any sequence length >= 1.
class LinearToyVictim : public Victim {
 public:
  /// weights[c][t] is the contribution of token t to class c.
  explicit LinearToyVictim(std::vector<std::vector<double>> weights);
  std::vector<Logits> score(std::span<const Sequence> batch) override;

 private:
  std::vector<std::vector<double>> weights_;
};

/// Binary toy victim with a known minimal perturbation: predicts
/// `trigger_class` when the sequence contains a trigger token, with margin
/// growing in the trigger count, else `base_class`.
class KeywordToyVictim : public Victim {
 public:
  KeywordToyVictim(std::vector<Token> triggers, int base_class,
                   int trigger_class);
  std::vector<Logits> score(std::span<const Sequence> batch) override;

 private:
  std::vector<Token> triggers_;
  int base_class_;
  int trigger_class_;
};

/// Victim with fixed logits regardless of the input; useful for forcing an
/// infeasible attack (full budget burn).
class ConstantVictim : public Victim {
 public:
  explicit ConstantVictim(Logits logits) : logits_(std::move(logits)) {}
  std::vector<Logits> score(std::span<const Sequence> batch) override {
    return std::vector<Logits>(batch.size(), logits_);
  }

 private:
  Logits logits_;
};

}  // namespace bba
