#pragma once

#include <cstddef>

#include "bba/blockopt.hpp"
#include "bba/seq.hpp"
#include "bba/victim.hpp"

namespace bba {

/// Uniform sampling from the attack space until the criterion flips or the
/// budget runs out. Comparison floor for the Bayesian attack.
AttackOutcome random_search_baseline(const Sequence& s, int label,
                                     const CandidateSets& cands,
                                     Victim& victim, long long budget,
                                     Rng& rng);

struct OracleResult {
  bool refused = false;       // attack space too large to enumerate
  bool feasible = false;
  Sequence optimal;           // minimum-Hamming adversarial when feasible
  int optimal_hamming = 0;
  long long queries = 0;      // victim evaluations spent
};

/// Enumerates the attack space in ascending Hamming distance and returns the
/// minimum-distance adversarial sequence, or an infeasibility proof.
/// Refuses spaces larger than `max_space` points.
OracleResult exhaustive_oracle(const Sequence& s, int label,
                               const CandidateSets& cands, Victim& victim,
                               std::uint64_t max_space = 1000000);

}  // namespace bba
