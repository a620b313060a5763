#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bba/acquisition.hpp"
#include "bba/gp.hpp"
#include "bba/seq.hpp"
#include "bba/stats.hpp"
#include "bba/victim.hpp"

namespace bba {

/// One block of the decomposition: a set of consecutive modifiable
/// positions with its own evaluation history and surrogate model.
struct Block {
  int index = 0;
  std::vector<int> positions;  // M_k, sorted
  int budget = 0;              // N_k = sum over M_k of (|C_i| - 1)
  int explore_budget = 0;      // E_k
  double importance = 0.0;     // alpha_k
  std::vector<EvalRecord> history;  // D_k
  std::unique_ptr<GpModel> model;   // lazily created, warm-started
};

struct AttackConfig {
  int block_size = 40;   // m
  int iterations = 4;    // R
  AcqBatchConfig acq{};  // N_b, T
  int post_budget = 50;  // N_post
  int post_radius = 2;   // r
  int post_samples = 300;
  std::optional<long long> global_budget;
  std::uint64_t seed = 0;
  bool standardize_targets = true;
  bool subsample_history = true;
};

struct AttackOutcome {
  bool success = false;
  bool originally_correct = true;
  Sequence adversarial;  // adversarial on success, best-criterion point otherwise
  double best_criterion = -std::numeric_limits<double>::infinity();
  int hamming = 0;
  int pre_post_hamming = 0;  // distance of the first adversarial, before post-opt
  long long queries = 0;
  long long init_queries = 0;
  long long block_queries = 0;
  long long post_queries = 0;
  std::optional<std::string> error;
  AttackStats stats;
};

/// Shared state of one attack instance: ledger, evaluated-set, incumbent.
class AttackContext {
 public:
  AttackContext(const Sequence& original, int label,
                const CandidateSets& cands, Victim& victim,
                QueryLedger& ledger, const AttackConfig& config, Rng& rng)
      : original(original),
        label(label),
        cands(cands),
        victim(victim),
        ledger(ledger),
        config(config),
        rng(rng) {}

  /// Scores a batch, charging the ledger, recording sequences as evaluated
  /// and tracking the best criterion value seen. Returns the criteria.
  std::vector<double> evaluate(const std::vector<Sequence>& batch,
                               Phase phase);

  const Sequence& best_sequence() const { return best_seq_; }
  double best_value() const { return best_value_; }
  bool has_adversarial() const { return best_value_ >= 0.0; }

  const Sequence& original;
  int label;
  const CandidateSets& cands;
  Victim& victim;
  QueryLedger& ledger;
  const AttackConfig& config;
  Rng& rng;
  SeqSet evaluated;
  AttackStats stats;

 private:
  Sequence best_seq_;
  double best_value_ = -std::numeric_limits<double>::infinity();
};

/// Contiguous blocks of `block_size` positions; positions without
/// substitutes are dropped from membership without shifting boundaries.
/// Throws NothingToAttackError when no position is modifiable.
std::vector<Block> decompose(const CandidateSets& cands, int block_size);

/// Deletion-based importance: one query for `s` (skipped when
/// `base_criterion` is supplied) plus one masked query per block;
/// alpha_k = |L(s) - L(s without M_k)|. A single block covering the whole
/// sequence cannot be masked and scores 0 without a query.
std::vector<double> init_importance(const Sequence& s, int label,
                                    const std::vector<Block>& blocks,
                                    Victim& victim, QueryLedger& ledger,
                                    std::optional<double> base_criterion =
                                        std::nullopt);

/// Length-scale importance: alpha_k = sum over M_k of 1/beta_i, with beta
/// taken from a model over `model_positions`.
std::vector<double> update_importance(const GpParams& params,
                                      const std::vector<int>& model_positions,
                                      const std::vector<Block>& blocks);

/// One Bayesian-optimization pass over a block: subsample history, explore,
/// then screen the 1-Hamming ball and evaluate DPP batches until the block
/// budget runs out. Returns true as soon as the incumbent is adversarial.
bool optimize_block(Block& block, AttackContext& ctx);

/// The full attack loop: importance-ordered block optimization for R
/// iterations with post-optimization on first success.
AttackOutcome run_attack(const Sequence& s, int label,
                         const CandidateSets& cands, Victim& victim,
                         const AttackConfig& config, Rng& rng);

}  // namespace bba
