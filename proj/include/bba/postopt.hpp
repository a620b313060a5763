#pragma once

#include <vector>

#include "bba/seq.hpp"
#include "bba/stats.hpp"
#include "bba/victim.hpp"

namespace bba {

struct PostOptConfig {
  int budget = 50;        // N_post: queries allowed since the last improvement
  int batch_size = 4;     // N_b
  int radius = 2;         // r: exploration radius around the adversarial
  int sample_count = 300; // random proposals per round
  int screen_size = 100;
  bool standardize_targets = true;
  std::size_t dataset_cap = 512;
};

/// Up to `count` distinct sequences within Hamming radius `radius` of
/// `s_adv` and radius d_H(s, s_adv) - radius of `s`. Every such point
/// reverts exactly `radius` differing positions back to the original token,
/// so the result is empty when d_H(s, s_adv) <= radius.
std::vector<Sequence> sample_reduced_space(const Sequence& s,
                                           const Sequence& s_adv,
                                           const CandidateSets& cands,
                                           int radius, std::size_t count,
                                           Rng& rng);

/// Perturbation-size reduction: Bayesian optimization over
/// B_H(s, d_H(s, s_adv) - 1) ∩ B_H(s_adv, r), restarting the budget after
/// every accepted (strictly closer to `s`) adversarial. `dataset` seeds the
/// GP and must be non-empty; `s_adv` must already satisfy the attack
/// criterion. Budget exhaustion terminates normally with the current
/// adversarial.
Sequence post_optimize(const Sequence& s, const Sequence& s_adv, int label,
                       std::vector<EvalRecord> dataset, Victim& victim,
                       QueryLedger& ledger, const CandidateSets& cands,
                       const PostOptConfig& config, Rng& rng,
                       AttackStats* stats = nullptr);

}  // namespace bba
