#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace bba {

using Token = std::int32_t;
using Sequence = std::vector<Token>;
using Rng = std::mt19937_64;

/// One point of the evaluation history: a sequence and its objective value.
struct EvalRecord {
  Sequence seq;
  double value = 0.0;
};

struct SeqHash {
  std::size_t operator()(const Sequence& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Token t : s) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(t));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

using SeqSet = std::unordered_set<Sequence, SeqHash>;
using SeqValueMap = std::unordered_map<Sequence, double, SeqHash>;

/// Per-position substitute lists defining the attack space. Lists are kept
/// sorted and duplicate-free; every list is non-empty.
class CandidateSets {
 public:
  explicit CandidateSets(std::vector<std::vector<Token>> lists);

  std::size_t num_positions() const { return lists_.size(); }
  const std::vector<Token>& at(std::size_t pos) const { return lists_[pos]; }
  std::size_t size(std::size_t pos) const { return lists_[pos].size(); }
  bool modifiable(std::size_t pos) const { return lists_[pos].size() >= 2; }
  bool contains(std::size_t pos, Token t) const;

  /// True if every token of `s` is a member of its positional list.
  bool covers(const Sequence& s) const;

  /// Indices of positions with at least one substitute.
  std::vector<int> modifiable_positions() const;

  /// Product of list sizes over `positions`, saturating at `cap`.
  std::uint64_t subspace_size(const std::vector<int>& positions,
                              std::uint64_t cap) const;

 private:
  std::vector<std::vector<Token>> lists_;
};

/// Number of positions at which the two sequences differ.
int hamming_distance(const Sequence& a, const Sequence& b);

/// All sequences at Hamming distance exactly one from `center`, replacing a
/// position in `positions` with another member of its candidate list.
/// Ordered by position, then by token id.
std::vector<Sequence> one_ball(const Sequence& center,
                               const CandidateSets& cands,
                               const std::vector<int>& positions);

/// Up to `count` distinct sequences agreeing with `center` outside
/// `positions`, tokens drawn uniformly from the candidate lists. Stops early
/// when the subspace is exhausted.
std::vector<Sequence> sample_space(const Sequence& center,
                                   const CandidateSets& cands,
                                   const std::vector<int>& positions,
                                   std::size_t count, Rng& rng);

/// The sequence with `block` positions deleted. Throws when the block covers
/// every position (victims require length >= 1).
Sequence mask_block(const Sequence& s, const std::vector<int>& block);

}  // namespace bba
