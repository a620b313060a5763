#include "bba/subsample.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace bba {

std::vector<EvalRecord> sod_fpc(const std::vector<EvalRecord>& history,
                                std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sod_fpc: n must be >= 1");
  if (history.empty()) return {};

  // Collapse duplicate sequences, keeping first-occurrence order and the
  // most recent objective value.
  std::vector<EvalRecord> pool;
  pool.reserve(history.size());
  std::unordered_map<Sequence, std::size_t, SeqHash> index_of;
  for (const EvalRecord& r : history) {
    auto [it, inserted] = index_of.emplace(r.seq, pool.size());
    if (inserted) {
      pool.push_back(r);
    } else {
      pool[it->second].value = r.value;
    }
  }

  if (pool.size() < n) return pool;

  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const std::size_t seed = pick(rng);

  std::vector<std::size_t> selected{seed};
  std::vector<int> min_dist(pool.size(), std::numeric_limits<int>::max());
  std::vector<bool> taken(pool.size(), false);
  taken[seed] = true;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!taken[i]) min_dist[i] = hamming_distance(pool[i].seq, pool[seed].seq);
  }

  while (selected.size() < n) {
    std::size_t far = pool.size();
    int best = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!taken[i] && min_dist[i] > best) {
        best = min_dist[i];
        far = i;
      }
    }
    taken[far] = true;
    selected.push_back(far);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!taken[i]) {
        min_dist[i] =
            std::min(min_dist[i], hamming_distance(pool[i].seq, pool[far].seq));
      }
    }
  }

  std::vector<EvalRecord> out;
  out.reserve(n);
  for (std::size_t i : selected) out.push_back(pool[i]);
  return out;
}

}  // namespace bba
