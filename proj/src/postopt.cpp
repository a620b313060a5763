#include "bba/postopt.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "bba/acquisition.hpp"
#include "bba/errors.hpp"
#include "bba/gp.hpp"
#include "bba/subsample.hpp"

namespace bba {

namespace {

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    if (r >= cap) return cap;
  }
  return r;
}

}  // namespace

std::vector<Sequence> sample_reduced_space(const Sequence& s,
                                           const Sequence& s_adv,
                                           const CandidateSets& cands,
                                           int radius, std::size_t count,
                                           Rng& rng) {
  if (radius < 1) throw std::invalid_argument("sample_reduced_space: radius must be >= 1");
  const int dist = hamming_distance(s, s_adv);
  if (dist < 1) throw std::invalid_argument("sample_reduced_space: sequences are equal");
  // Radius dist - radius around s is negative: nothing qualifies. At
  // dist == radius the intersection is exactly {s}.
  if (count == 0 || dist < radius) return {};

  std::vector<int> delta;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != s_adv[i]) delta.push_back(static_cast<int>(i));
  }

  // Points of the intersection revert exactly `radius` differing positions
  // to the original token, so there are C(dist, radius) of them.
  auto revert = [&](const std::vector<int>& subset) {
    Sequence x = s_adv;
    for (int i : subset) x[delta[i]] = s[delta[i]];
    return x;
  };

  const std::uint64_t total = binomial_capped(dist, radius, 4 * count + 1);
  std::vector<Sequence> out;

  if (total <= count) {
    // Enumerate all subsets in lexicographic order.
    std::vector<int> subset(radius);
    for (int i = 0; i < radius; ++i) subset[i] = i;
    while (true) {
      out.push_back(revert(subset));
      int j = radius - 1;
      while (j >= 0 && subset[j] == dist - radius + j) --j;
      if (j < 0) break;
      ++subset[j];
      for (int t = j + 1; t < radius; ++t) subset[t] = subset[t - 1] + 1;
    }
    return out;
  }

  std::vector<int> pool(delta.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
  SeqSet seen;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 + 32 * count;
  while (out.size() < count && attempts < max_attempts) {
    ++attempts;
    // Partial Fisher-Yates: a uniform radius-subset of the differing positions.
    for (int i = 0; i < radius; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    Sequence x = revert(std::vector<int>(pool.begin(), pool.begin() + radius));
    if (seen.insert(x).second) out.push_back(std::move(x));
  }
  return out;
}

Sequence post_optimize(const Sequence& s, const Sequence& s_adv, int label,
                       std::vector<EvalRecord> dataset, Victim& victim,
                       QueryLedger& ledger, const CandidateSets& cands,
                       const PostOptConfig& config, Rng& rng,
                       AttackStats* stats) {
  if (dataset.empty()) {
    throw std::invalid_argument("post_optimize: empty initial dataset");
  }
  Sequence cur = s_adv;

  GpModel model(cands.modifiable_positions(), config.standardize_targets);
  if (dataset.size() > config.dataset_cap) {
    dataset = sod_fpc(dataset, config.dataset_cap, rng);
  }
  model.set_data(dataset);

  SeqSet evaluated;
  double best_val = -std::numeric_limits<double>::infinity();
  for (const EvalRecord& r : dataset) {
    evaluated.insert(r.seq);
    best_val = std::max(best_val, r.value);
  }
  evaluated.insert(s);  // the original is never adversarial here

  long long remaining = config.budget;
  try {
    while (true) {
      const int dist = hamming_distance(s, cur);
      if (dist <= 1) break;  // no smaller perturbation can exist
      if (remaining <= 0) break;

      if (model.num_points() >= 2) {
        const auto t0 = std::chrono::steady_clock::now();
        model.fit_map();
        const auto t1 = std::chrono::steady_clock::now();
        if (stats) {
          ++stats->fit_calls;
          stats->fit_time_ns +=
              std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                  .count();
        }
      }

      const std::vector<Sequence> samples = sample_reduced_space(
          s, cur, cands, config.radius, config.sample_count, rng);
      if (samples.empty()) break;

      // Pivot: EI-argmax among the sampled points.
      const Posterior sp = model.posterior(samples, /*full_cov=*/false);
      std::size_t pivot_idx = 0;
      double pivot_ei = -1.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double ei = expected_improvement(sp.mean[i], sp.var[i], best_val);
        if (ei > pivot_ei) {
          pivot_ei = ei;
          pivot_idx = i;
        }
      }
      const Sequence& pivot = samples[pivot_idx];

      // Refine within the 1-ball of the pivot, restricted to the reduced
      // search space B_H(s, dist - 1) ∩ B_H(cur, radius).
      std::vector<Sequence> pool{pivot};
      for (Sequence& x :
           one_ball(pivot, cands, cands.modifiable_positions())) {
        if (hamming_distance(s, x) <= dist - 1 &&
            hamming_distance(cur, x) <= config.radius) {
          pool.push_back(std::move(x));
        }
      }
      const std::vector<Sequence> top = select_top_t(
          pool, model, best_val, config.screen_size, evaluated);
      if (top.empty()) break;

      long long n_batch = std::min<long long>(config.batch_size, remaining);
      n_batch = std::min(n_batch, ledger.remaining());
      if (n_batch <= 0) break;
      const std::vector<Sequence> batch =
          dpp_greedy_batch(top, model, static_cast<int>(n_batch));
      if (batch.empty()) break;

      const std::vector<Logits> logits =
          query(victim, batch, ledger, Phase::Post);
      remaining -= static_cast<long long>(batch.size());

      const Sequence* accepted = nullptr;
      double accepted_val = 0.0;
      int accepted_dist = 0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double val = attack_criterion(logits[i], label);
        evaluated.insert(batch[i]);
        dataset.push_back({batch[i], val});
        model.add({batch[i], val});
        best_val = std::max(best_val, val);
        if (val >= 0.0) {
          const int d = hamming_distance(s, batch[i]);
          if (accepted == nullptr || d < accepted_dist ||
              (d == accepted_dist && val > accepted_val)) {
            accepted = &batch[i];
            accepted_val = val;
            accepted_dist = d;
          }
        }
      }
      if (accepted != nullptr) {
        cur = *accepted;
        remaining = config.budget;  // N_r <- N_post
      }

      if (dataset.size() > config.dataset_cap) {
        dataset = sod_fpc(dataset, config.dataset_cap, rng);
        model.set_data(dataset);
      }
    }
  } catch (const BudgetExceededError&) {
    // Global cap reached mid-phase: normal termination for this phase.
  }
  return cur;
}

}  // namespace bba
