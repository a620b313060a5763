#include "bba/victim.hpp"

#include <cmath>
#include <stdexcept>

#include "bba/errors.hpp"

namespace bba {

double attack_criterion(const Logits& logits, int label) {
  if (logits.size() < 2) {
    throw std::invalid_argument("attack_criterion: need at least 2 classes");
  }
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw std::invalid_argument("attack_criterion: label out of range");
  }
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < logits.size(); ++c) {
    if (static_cast<int>(c) == label) continue;
    best_other = std::max(best_other, logits[c]);
  }
  return best_other - logits[label];
}

void QueryLedger::charge(long long n, Phase phase) {
  if (n < 0) throw std::invalid_argument("charge: negative count");
  if (cap_ && total_ + n > *cap_) {
    throw BudgetExceededError("query budget exceeded");
  }
  total_ += n;
  phase_[static_cast<int>(phase)] += n;
}

std::vector<Logits> query(Victim& victim, std::span<const Sequence> batch,
                          QueryLedger& ledger, Phase phase) {
  if (batch.empty()) return {};
  ledger.charge(static_cast<long long>(batch.size()), phase);
  std::vector<Logits> out = victim.score(batch);
  if (out.size() != batch.size()) {
    throw ProtocolError("victim returned wrong number of logit vectors");
  }
  for (const Logits& l : out) {
    if (l.size() < 2) throw ProtocolError("victim returned <2 classes");
    for (double v : l) {
      if (!std::isfinite(v)) throw ProtocolError("victim returned non-finite logit");
    }
  }
  return out;
}

LinearToyVictim::LinearToyVictim(std::vector<std::vector<double>> weights)
    : weights_(std::move(weights)) {
  if (weights_.size() < 2) {
    throw std::invalid_argument("LinearToyVictim: need at least 2 classes");
  }
  for (const auto& row : weights_) {
    if (row.size() != weights_[0].size()) {
      throw std::invalid_argument("LinearToyVictim: ragged weight table");
    }
  }
}

std::vector<Logits> LinearToyVictim::score(std::span<const Sequence> batch) {
  std::vector<Logits> out;
  out.reserve(batch.size());
  const std::size_t vocab = weights_[0].size();
  for (const Sequence& s : batch) {
    if (s.empty()) throw std::invalid_argument("LinearToyVictim: empty sequence");
    Logits logits(weights_.size(), 0.0);
    for (Token t : s) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
        throw std::invalid_argument("LinearToyVictim: unknown token id " +
                                    std::to_string(t));
      }
      for (std::size_t c = 0; c < weights_.size(); ++c) {
        logits[c] += weights_[c][t];
      }
    }
    out.push_back(std::move(logits));
  }
  return out;
}

KeywordToyVictim::KeywordToyVictim(std::vector<Token> triggers, int base_class,
                                   int trigger_class)
    : triggers_(std::move(triggers)),
      base_class_(base_class),
      trigger_class_(trigger_class) {
  if (base_class_ == trigger_class_ ||
      (base_class_ != 0 && base_class_ != 1) ||
      (trigger_class_ != 0 && trigger_class_ != 1)) {
    throw std::invalid_argument("KeywordToyVictim: classes must be {0,1}");
  }
}

std::vector<Logits> KeywordToyVictim::score(std::span<const Sequence> batch) {
  std::vector<Logits> out;
  out.reserve(batch.size());
  for (const Sequence& s : batch) {
    int count = 0;
    for (Token t : s) {
      for (Token trig : triggers_) {
        if (t == trig) {
          ++count;
          break;
        }
      }
    }
    // Margin count - 0.5: base class wins with no trigger, trigger class
    // wins as soon as one is present.
    Logits logits(2, 0.0);
    logits[trigger_class_] = static_cast<double>(count);
    logits[base_class_] = 0.5;
    out.push_back(std::move(logits));
  }
  return out;
}

}  // namespace bba
