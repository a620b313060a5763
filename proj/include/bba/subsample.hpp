#pragma once

#include <cstddef>
#include <vector>

#include "bba/seq.hpp"

namespace bba {

/// Subset-of-Data selection via Farthest Point Clustering. Records with the
/// same sequence are first collapsed to one entry (keeping the most recent
/// value). If fewer than `n` records remain they are returned unchanged;
/// otherwise a uniformly random seed record is chosen and records are added
/// by maximal min-Hamming-distance to the current subset, ties broken by
/// earliest history index.
std::vector<EvalRecord> sod_fpc(const std::vector<EvalRecord>& history,
                                std::size_t n, Rng& rng);

}  // namespace bba
