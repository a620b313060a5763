#include "bba/blockopt.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "bba/errors.hpp"
#include "bba/postopt.hpp"
#include "bba/subsample.hpp"

namespace bba {

std::vector<double> AttackContext::evaluate(const std::vector<Sequence>& batch,
                                            Phase phase) {
  const std::vector<Logits> logits = query(victim, batch, ledger, phase);
  std::vector<double> values(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    values[i] = attack_criterion(logits[i], label);
    evaluated.insert(batch[i]);
    if (values[i] > best_value_) {
      best_value_ = values[i];
      best_seq_ = batch[i];
    }
  }
  return values;
}

std::vector<Block> decompose(const CandidateSets& cands, int block_size) {
  if (block_size < 1) throw std::invalid_argument("decompose: block size must be >= 1");
  const std::size_t len = cands.num_positions();
  std::vector<Block> blocks;
  for (std::size_t start = 0; start < len;
       start += static_cast<std::size_t>(block_size)) {
    Block b;
    const std::size_t end =
        std::min(len, start + static_cast<std::size_t>(block_size));
    for (std::size_t i = start; i < end; ++i) {
      if (cands.modifiable(i)) {
        b.positions.push_back(static_cast<int>(i));
        b.budget += static_cast<int>(cands.size(i)) - 1;
      }
    }
    if (!b.positions.empty()) {
      b.index = static_cast<int>(start) / block_size;
      blocks.push_back(std::move(b));
    }
  }
  if (blocks.empty()) {
    throw NothingToAttackError("no position admits a substitution");
  }
  return blocks;
}

std::vector<double> init_importance(const Sequence& s, int label,
                                    const std::vector<Block>& blocks,
                                    Victim& victim, QueryLedger& ledger,
                                    std::optional<double> base_criterion) {
  double base;
  if (base_criterion) {
    base = *base_criterion;
  } else {
    const std::vector<Sequence> self{s};
    base = attack_criterion(query(victim, self, ledger, Phase::Init)[0], label);
  }
  std::vector<double> scores(blocks.size(), 0.0);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].positions.size() >= s.size()) {
      // Deleting the block would leave an empty sequence; with a single
      // block the ordering is moot anyway.
      scores[k] = 0.0;
      continue;
    }
    const std::vector<Sequence> masked{mask_block(s, blocks[k].positions)};
    const double val =
        attack_criterion(query(victim, masked, ledger, Phase::Init)[0], label);
    scores[k] = std::abs(base - val);
  }
  return scores;
}

std::vector<double> update_importance(const GpParams& params,
                                      const std::vector<int>& model_positions,
                                      const std::vector<Block>& blocks) {
  std::vector<double> scores(blocks.size(), 0.0);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    double acc = 0.0;
    for (int p : blocks[k].positions) {
      const auto it = std::lower_bound(model_positions.begin(),
                                       model_positions.end(), p);
      if (it == model_positions.end() || *it != p) {
        throw std::invalid_argument("update_importance: position not modeled");
      }
      const int idx = static_cast<int>(it - model_positions.begin());
      acc += 1.0 / params.beta(idx);
    }
    scores[k] = acc;
  }
  return scores;
}

namespace {

void timed_fit(GpModel& model, AttackStats& stats, bool block_fit,
               int block_budget) {
  const auto t0 = std::chrono::steady_clock::now();
  model.fit_map();
  const auto t1 = std::chrono::steady_clock::now();
  ++stats.fit_calls;
  stats.fit_time_ns +=
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  if (block_fit) {
    stats.max_block_fit_points =
        std::max(stats.max_block_fit_points, model.num_points());
    if (model.num_points() > 2 * static_cast<std::size_t>(block_budget)) {
      stats.block_fit_bound_ok = false;
    }
  } else {
    stats.max_refit_points = std::max(stats.max_refit_points,
                                      model.num_points());
  }
}

}  // namespace

bool optimize_block(Block& block, AttackContext& ctx) {
  if (block.budget < 1) {
    throw std::invalid_argument("optimize_block: block budget must be >= 1");
  }
  if (ctx.has_adversarial()) return true;  // nothing left to do in this block
  if (!block.model) {
    block.model = std::make_unique<GpModel>(block.positions,
                                            ctx.config.standardize_targets);
  }

  // (1) Subsample this block's history as the initial fit dataset.
  std::vector<EvalRecord> sub =
      ctx.config.subsample_history
          ? sod_fpc(block.history, static_cast<std::size_t>(block.budget),
                    ctx.rng)
          : block.history;

  // (2) Exploration: evaluate E_k random points of S(s_cur, M_k).
  long long explore = std::min<long long>(block.explore_budget,
                                          ctx.ledger.remaining());
  if (explore < block.explore_budget && explore <= 0) {
    throw BudgetExceededError("query budget exceeded");
  }
  std::vector<Sequence> samples =
      sample_space(ctx.best_sequence(), ctx.cands, block.positions,
                   static_cast<std::size_t>(explore), ctx.rng);
  long long spent = 0;
  if (!samples.empty()) {
    const std::vector<double> values = ctx.evaluate(samples, Phase::Block);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      sub.push_back({samples[i], values[i]});
      block.history.push_back({samples[i], values[i]});
    }
    spent = static_cast<long long>(samples.size());
  }
  block.model->set_data(sub);

  // (3) Batched Bayesian optimization until the block budget runs out.
  long long remaining = block.budget - spent;
  while (true) {
    const Sequence s_cur = ctx.best_sequence();
    if (ctx.has_adversarial()) return true;
    if (remaining <= 0) break;

    if (block.model->num_points() >= 2) {
      timed_fit(*block.model, ctx.stats, /*block_fit=*/true, block.budget);
    }

    const std::vector<Sequence> ball =
        one_ball(s_cur, ctx.cands, block.positions);
    const std::vector<Sequence> top =
        select_top_t(ball, *block.model, ctx.best_value(),
                     ctx.config.acq.screen_size, ctx.evaluated);
    if (top.empty()) break;  // everything nearby already evaluated

    long long n_batch =
        std::min<long long>(ctx.config.acq.batch_size, remaining);
    n_batch = std::min(n_batch, ctx.ledger.remaining());
    if (n_batch <= 0) throw BudgetExceededError("query budget exceeded");
    const std::vector<Sequence> batch =
        dpp_greedy_batch(top, *block.model, static_cast<int>(n_batch));
    if (batch.empty()) break;

    const std::vector<double> values = ctx.evaluate(batch, Phase::Block);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      block.model->add({batch[i], values[i]});
      block.history.push_back({batch[i], values[i]});
    }
    remaining -= static_cast<long long>(batch.size());
  }
  return ctx.has_adversarial();
}

namespace {

AttackOutcome finish_failure(AttackContext& ctx, const Sequence& s,
                             std::optional<std::string> error) {
  AttackOutcome out;
  out.success = false;
  out.error = std::move(error);
  if (!ctx.best_sequence().empty()) {
    out.adversarial = ctx.best_sequence();
    out.best_criterion = ctx.best_value();
    out.hamming = hamming_distance(s, out.adversarial);
  }
  out.stats = ctx.stats;
  return out;
}

void fill_ledger(AttackOutcome& out, const QueryLedger& ledger) {
  out.queries = ledger.total();
  out.init_queries = ledger.phase_count(Phase::Init);
  out.block_queries = ledger.phase_count(Phase::Block);
  out.post_queries = ledger.phase_count(Phase::Post);
}

}  // namespace

AttackOutcome run_attack(const Sequence& s, int label,
                         const CandidateSets& cands, Victim& victim,
                         const AttackConfig& config, Rng& rng) {
  if (s.empty()) throw std::invalid_argument("run_attack: empty sequence");
  if (!cands.covers(s)) {
    throw std::invalid_argument(
        "run_attack: original tokens missing from candidate sets");
  }

  QueryLedger ledger(config.global_budget);
  AttackContext ctx(s, label, cands, victim, ledger, config, rng);
  AttackOutcome out;

  try {
    const double base = ctx.evaluate({s}, Phase::Init)[0];
    out.originally_correct = base < 0.0;
    if (base >= 0.0) {
      out.success = true;
      out.adversarial = s;
      out.best_criterion = base;
      out.hamming = 0;
      out.pre_post_hamming = 0;
      out.stats = ctx.stats;
      fill_ledger(out, ledger);
      return out;
    }

    std::vector<Block> blocks = decompose(cands, config.block_size);
    for (Block& b : blocks) {
      b.explore_budget = std::min(b.budget, 2 * config.acq.batch_size);
    }

    {
      const std::vector<double> scores =
          init_importance(s, label, blocks, victim, ledger, base);
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        blocks[k].importance = scores[k];
      }
    }

    const std::vector<int> all_positions = cands.modifiable_positions();
    GpModel refit_model(all_positions, config.standardize_targets);

    for (int iter = 0; iter < config.iterations; ++iter) {
      std::vector<std::size_t> order(blocks.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return blocks[a].importance > blocks[b].importance;
                       });

      for (std::size_t k : order) {
        if (optimize_block(blocks[k], ctx)) {
          const Sequence s_adv = ctx.best_sequence();
          out.pre_post_hamming = hamming_distance(s, s_adv);

          std::vector<EvalRecord> handoff =
              sod_fpc(blocks[k].history,
                      static_cast<std::size_t>(blocks[k].budget), rng);
          if (handoff.empty()) handoff.push_back({s_adv, ctx.best_value()});

          PostOptConfig pc;
          pc.budget = config.post_budget;
          pc.batch_size = config.acq.batch_size;
          pc.radius = config.post_radius;
          pc.sample_count = config.post_samples;
          pc.screen_size = config.acq.screen_size;
          pc.standardize_targets = config.standardize_targets;
          const Sequence final_adv =
              post_optimize(s, s_adv, label, std::move(handoff), victim,
                            ledger, cands, pc, rng, &ctx.stats);

          out.success = true;
          out.adversarial = final_adv;
          out.best_criterion = ctx.best_value();
          out.hamming = hamming_distance(s, final_adv);
          out.stats = ctx.stats;
          fill_ledger(out, ledger);
          return out;
        }
      }

      // Refit on the union of per-block subsamples and reassign importance.
      std::vector<EvalRecord> unioned;
      for (const Block& b : blocks) {
        std::vector<EvalRecord> part =
            config.subsample_history
                ? sod_fpc(b.history, static_cast<std::size_t>(b.budget), rng)
                : b.history;
        unioned.insert(unioned.end(), part.begin(), part.end());
      }
      if (unioned.size() >= 2) {
        refit_model.set_data(std::move(unioned));
        timed_fit(refit_model, ctx.stats, /*block_fit=*/false, 0);
        const std::vector<double> scores = update_importance(
            refit_model.params(), all_positions, blocks);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          blocks[k].importance = scores[k];
        }
      }
    }

    out = finish_failure(ctx, s, std::nullopt);
    fill_ledger(out, ledger);
    return out;
  } catch (const BudgetExceededError&) {
    const bool orig = out.originally_correct;
    out = finish_failure(ctx, s, "budget exhausted");
    out.originally_correct = orig;
    fill_ledger(out, ledger);
    return out;
  } catch (const NothingToAttackError& e) {
    const bool orig = out.originally_correct;
    out = finish_failure(ctx, s, e.what());
    out.originally_correct = orig;
    fill_ledger(out, ledger);
    return out;
  }
}

}  // namespace bba
