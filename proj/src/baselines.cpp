#include "bba/baselines.hpp"

#include <algorithm>

#include "bba/errors.hpp"

namespace bba {

AttackOutcome random_search_baseline(const Sequence& s, int label,
                                     const CandidateSets& cands,
                                     Victim& victim, long long budget,
                                     Rng& rng) {
  QueryLedger ledger(budget);
  AttackOutcome out;
  auto finish = [&](bool success, const Sequence& seq, double value) {
    out.success = success;
    out.adversarial = seq;
    out.best_criterion = value;
    out.hamming = hamming_distance(s, seq);
    out.pre_post_hamming = out.hamming;
    out.queries = ledger.total();
    out.init_queries = ledger.phase_count(Phase::Init);
    out.block_queries = ledger.phase_count(Phase::Block);
    out.post_queries = ledger.phase_count(Phase::Post);
  };

  Sequence best = s;
  double best_val;
  try {
    const std::vector<Sequence> self{s};
    best_val = attack_criterion(query(victim, self, ledger, Phase::Init)[0],
                                label);
    out.originally_correct = best_val < 0.0;
    if (best_val >= 0.0) {
      finish(true, s, best_val);
      return out;
    }

    while (true) {
      Sequence x = s;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& list = cands.at(i);
        std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
        x[i] = list[pick(rng)];
      }
      const std::vector<Sequence> batch{x};
      const double val =
          attack_criterion(query(victim, batch, ledger, Phase::Block)[0],
                           label);
      if (val > best_val) {
        best_val = val;
        best = x;
      }
      if (val >= 0.0) {
        finish(true, x, val);
        return out;
      }
    }
  } catch (const BudgetExceededError&) {
    finish(false, best, best_val);
    return out;
  }
}

OracleResult exhaustive_oracle(const Sequence& s, int label,
                               const CandidateSets& cands, Victim& victim,
                               std::uint64_t max_space) {
  OracleResult result;
  const std::vector<int> modifiable = cands.modifiable_positions();
  std::vector<int> all(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) all[i] = static_cast<int>(i);
  if (cands.subspace_size(all, max_space + 1) > max_space) {
    result.refused = true;
    return result;
  }

  QueryLedger ledger;  // uncapped; counts enumeration cost
  constexpr std::size_t kChunk = 256;
  std::vector<Sequence> buffer;
  std::vector<int> buffer_dist;

  int found_dist = -1;
  Sequence found;
  auto flush = [&]() -> bool {
    if (buffer.empty()) return false;
    const std::vector<Logits> logits =
        query(victim, buffer, ledger, Phase::Block);
    for (std::size_t i = 0; i < buffer.size(); ++i) {
      if (attack_criterion(logits[i], label) >= 0.0) {
        found = buffer[i];
        found_dist = buffer_dist[i];
        buffer.clear();
        buffer_dist.clear();
        return true;
      }
    }
    buffer.clear();
    buffer_dist.clear();
    return false;
  };

  // Distance shells: subsets of modifiable positions of size d, each filled
  // with every combination of non-original tokens.
  const int max_d = static_cast<int>(modifiable.size());
  for (int d = 0; d <= max_d && found_dist < 0; ++d) {
    if (d == 0) {
      buffer.push_back(s);
      buffer_dist.push_back(0);
      if (flush()) break;
      continue;
    }
    std::vector<int> subset(d);
    for (int i = 0; i < d; ++i) subset[i] = i;
    bool more_subsets = true;
    while (more_subsets && found_dist < 0) {
      // Alternatives per chosen position (original token excluded).
      std::vector<std::vector<Token>> alts(d);
      for (int i = 0; i < d; ++i) {
        const int pos = modifiable[subset[i]];
        for (Token t : cands.at(pos)) {
          if (t != s[pos]) alts[i].push_back(t);
        }
      }
      std::vector<std::size_t> idx(d, 0);
      bool more_tokens = true;
      while (more_tokens) {
        Sequence x = s;
        for (int i = 0; i < d; ++i) {
          x[modifiable[subset[i]]] = alts[i][idx[i]];
        }
        buffer.push_back(std::move(x));
        buffer_dist.push_back(d);
        if (buffer.size() >= kChunk && flush()) {
          more_tokens = false;
          break;
        }
        int j = 0;
        for (; j < d; ++j) {
          if (++idx[j] < alts[j].size()) break;
          idx[j] = 0;
        }
        if (j == d) more_tokens = false;
      }
      if (found_dist >= 0) break;

      int j = d - 1;
      while (j >= 0 && subset[j] == max_d - d + j) --j;
      if (j < 0) {
        more_subsets = false;
      } else {
        ++subset[j];
        for (int t = j + 1; t < d; ++t) subset[t] = subset[t - 1] + 1;
      }
    }
    if (found_dist < 0) flush();
    if (found_dist >= 0) break;
  }

  result.queries = ledger.total();
  if (found_dist >= 0) {
    result.feasible = true;
    result.optimal = std::move(found);
    result.optimal_hamming = found_dist;
  }
  return result;
}

}  // namespace bba
