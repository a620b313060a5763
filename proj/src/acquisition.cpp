#include "bba/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bba {

namespace {

constexpr double kSigmaMin = 1e-9;

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double expected_improvement(double mean, double variance, double best) {
  if (variance < 0.0) throw std::invalid_argument("expected_improvement: negative variance");
  const double sigma = std::sqrt(variance);
  const double delta = mean - best;
  if (sigma <= kSigmaMin) return std::max(delta, 0.0);
  const double z = delta / sigma;
  return std::max(delta * norm_cdf(z) + sigma * norm_pdf(z), 0.0);
}

std::vector<Sequence> select_top_t(const std::vector<Sequence>& candidates,
                                   const GpModel& model, double best,
                                   int screen_size, const SeqSet& evaluated) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_top_t: empty candidate list");
  }
  std::vector<const Sequence*> fresh;
  fresh.reserve(candidates.size());
  for (const Sequence& c : candidates) {
    if (!evaluated.count(c)) fresh.push_back(&c);
  }
  if (fresh.empty()) return {};

  std::vector<Sequence> pts;
  pts.reserve(fresh.size());
  for (const Sequence* c : fresh) pts.push_back(*c);
  const Posterior post = model.posterior(pts, /*full_cov=*/false);

  std::vector<double> ei(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ei[i] = expected_improvement(post.mean[i], post.var[i], best);
  }
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ei[a] > ei[b]; });

  const std::size_t keep =
      std::min(order.size(), static_cast<std::size_t>(std::max(screen_size, 0)));
  std::vector<Sequence> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(pts[order[i]]));
  return out;
}

std::vector<Sequence> dpp_greedy_batch(const std::vector<Sequence>& top,
                                       const GpModel& model, int batch_size) {
  if (top.empty()) throw std::invalid_argument("dpp_greedy_batch: empty input");
  const std::size_t n = top.size();
  const std::size_t want =
      std::min(n, static_cast<std::size_t>(std::max(batch_size, 0)));
  if (want == 0) return {};

  const Posterior post = model.posterior(top, /*full_cov=*/true);
  const Eigen::MatrixXd& C = post.cov;

  std::vector<std::size_t> chosen{0};
  std::vector<bool> used(n, false);
  used[0] = true;

  // Incremental Cholesky of C restricted to the batch. Candidate j extends
  // the determinant by the Schur complement s_j = C_jj - v'v; with a fixed
  // current determinant, maximizing the marginal determinant gain is
  // maximizing s_j.
  Eigen::MatrixXd L(n, n);
  bool degenerate = false;
  if (C(0, 0) > 0.0) {
    L(0, 0) = std::sqrt(C(0, 0));
  } else {
    degenerate = true;
  }

  auto is_duplicate = [&](std::size_t j) {
    for (std::size_t c : chosen) {
      if (top[c] == top[j]) return true;
    }
    return false;
  };

  while (chosen.size() < want) {
    std::size_t best_j = n;
    double best_schur = -1.0;
    Eigen::VectorXd best_v;

    if (!degenerate) {
      const Eigen::Index k = static_cast<Eigen::Index>(chosen.size());
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j] || is_duplicate(j)) continue;
        Eigen::VectorXd c(k);
        for (Eigen::Index t = 0; t < k; ++t) c[t] = C(chosen[t], j);
        const Eigen::VectorXd v = L.topLeftCorner(k, k)
                                      .triangularView<Eigen::Lower>()
                                      .solve(c);
        const double schur = C(j, j) - v.squaredNorm();
        if (schur > best_schur) {
          best_schur = schur;
          best_j = j;
          best_v = v;
        }
      }
    }

    if (degenerate || best_j == n || best_schur <= 0.0) {
      // Zero-determinant batch: every extension has zero marginal gain, so
      // fill the remaining slots in EI (input) order.
      for (std::size_t j = 0; j < n && chosen.size() < want; ++j) {
        if (!used[j] && !is_duplicate(j)) {
          chosen.push_back(j);
          used[j] = true;
        }
      }
      break;
    }

    const Eigen::Index k = static_cast<Eigen::Index>(chosen.size());
    L.block(k, 0, 1, k) = best_v.transpose();
    L(k, k) = std::sqrt(best_schur);
    chosen.push_back(best_j);
    used[best_j] = true;
  }

  std::vector<Sequence> out;
  out.reserve(chosen.size());
  for (std::size_t j : chosen) out.push_back(top[j]);
  return out;
}

}  // namespace bba
