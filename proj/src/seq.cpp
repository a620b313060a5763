#include "bba/seq.hpp"

#include <algorithm>
#include <stdexcept>

namespace bba {

CandidateSets::CandidateSets(std::vector<std::vector<Token>> lists)
    : lists_(std::move(lists)) {
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    auto& list = lists_[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) {
      throw std::invalid_argument("candidate list at position " +
                                  std::to_string(i) + " is empty");
    }
  }
}

bool CandidateSets::contains(std::size_t pos, Token t) const {
  const auto& list = lists_[pos];
  return std::binary_search(list.begin(), list.end(), t);
}

bool CandidateSets::covers(const Sequence& s) const {
  if (s.size() != lists_.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!contains(i, s[i])) return false;
  }
  return true;
}

std::vector<int> CandidateSets::modifiable_positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    if (modifiable(i)) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::uint64_t CandidateSets::subspace_size(const std::vector<int>& positions,
                                           std::uint64_t cap) const {
  std::uint64_t n = 1;
  for (int p : positions) {
    n *= static_cast<std::uint64_t>(lists_[p].size());
    if (n >= cap) return cap;
  }
  return n;
}

int hamming_distance(const Sequence& a, const Sequence& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: length mismatch");
  }
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) ++d;
  }
  return d;
}

std::vector<Sequence> one_ball(const Sequence& center,
                               const CandidateSets& cands,
                               const std::vector<int>& positions) {
  std::vector<int> sorted = positions;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Sequence> out;
  for (int p : sorted) {
    if (p < 0 || static_cast<std::size_t>(p) >= center.size()) {
      throw std::invalid_argument("one_ball: position out of range");
    }
    for (Token t : cands.at(p)) {
      if (t == center[p]) continue;
      Sequence s = center;
      s[p] = t;
      out.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

// Enumerates the subspace over `positions` in mixed-radix order.
std::vector<Sequence> enumerate_subspace(const Sequence& center,
                                         const CandidateSets& cands,
                                         const std::vector<int>& positions,
                                         std::size_t limit) {
  std::vector<Sequence> out;
  std::vector<std::size_t> idx(positions.size(), 0);
  while (out.size() < limit) {
    Sequence s = center;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      s[positions[j]] = cands.at(positions[j])[idx[j]];
    }
    out.push_back(std::move(s));
    std::size_t j = 0;
    for (; j < positions.size(); ++j) {
      if (++idx[j] < cands.size(positions[j])) break;
      idx[j] = 0;
    }
    if (j == positions.size()) break;
  }
  return out;
}

}  // namespace

std::vector<Sequence> sample_space(const Sequence& center,
                                   const CandidateSets& cands,
                                   const std::vector<int>& positions,
                                   std::size_t count, Rng& rng) {
  if (count == 0) return {};
  std::vector<int> sorted = positions;
  std::sort(sorted.begin(), sorted.end());

  const std::uint64_t cap = 4 * static_cast<std::uint64_t>(count) + 1;
  const std::uint64_t size = cands.subspace_size(sorted, cap);

  if (size < cap) {
    // Small subspace: enumerate fully and shuffle, no rejection needed.
    std::vector<Sequence> all =
        enumerate_subspace(center, cands, sorted, static_cast<std::size_t>(size));
    std::shuffle(all.begin(), all.end(), rng);
    if (all.size() > count) all.resize(count);
    return all;
  }

  // Large subspace: rejection sampling with a seen-set. Collision odds are
  // bounded because the subspace holds more than 4x `count` points.
  SeqSet seen;
  std::vector<Sequence> out;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 + 32 * count;
  while (out.size() < count && attempts < max_attempts) {
    ++attempts;
    Sequence s = center;
    for (int p : sorted) {
      const auto& list = cands.at(p);
      std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
      s[p] = list[pick(rng)];
    }
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

Sequence mask_block(const Sequence& s, const std::vector<int>& block) {
  std::vector<bool> drop(s.size(), false);
  std::size_t dropped = 0;
  for (int p : block) {
    if (p < 0 || static_cast<std::size_t>(p) >= s.size()) {
      throw std::invalid_argument("mask_block: position out of range");
    }
    if (!drop[p]) {
      drop[p] = true;
      ++dropped;
    }
  }
  if (dropped == s.size()) {
    throw std::invalid_argument("mask_block: block covers every position");
  }
  Sequence out;
  out.reserve(s.size() - dropped);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!drop[i]) out.push_back(s[i]);
  }
  return out;
}

}  // namespace bba
