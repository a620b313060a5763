#pragma once

#include <vector>

#include "bba/gp.hpp"
#include "bba/seq.hpp"

namespace bba {

struct AcqBatchConfig {
  int batch_size = 4;    // N_b
  int screen_size = 100; // T
};

/// Expected improvement E[max(g - best, 0)] for a Gaussian with the given
/// mean and variance. Falls back to max(mean - best, 0) when the standard
/// deviation underflows.
double expected_improvement(double mean, double variance, double best);

/// Candidates ranked by EI (descending, ties by input order), truncated to
/// at most `screen_size`, with previously evaluated sequences removed.
std::vector<Sequence> select_top_t(const std::vector<Sequence>& candidates,
                                   const GpModel& model, double best,
                                   int screen_size, const SeqSet& evaluated);

/// Greedy DPP batch: starts from top[0] and repeatedly appends the candidate
/// with the largest marginal gain in the determinant of the posterior
/// covariance of the batch. Ties and the fully degenerate (zero determinant)
/// case fall back to `top` order. Duplicated sequences are never co-selected.
std::vector<Sequence> dpp_greedy_batch(const std::vector<Sequence>& top,
                                       const GpModel& model, int batch_size);

}  // namespace bba
