// Shared fixtures: instrumented victims, toy-instance generators and the
// independent oracles used to freeze expected values.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "bba/gp.hpp"
#include "bba/seq.hpp"
#include "bba/victim.hpp"

namespace bba::test {

/// Counts every sequence scored, independently of any ledger.
class InstrumentedVictim : public Victim {
 public:
  explicit InstrumentedVictim(Victim& inner) : inner_(inner) {}

  std::vector<Logits> score(std::span<const Sequence> batch) override {
    calls_ += static_cast<long long>(batch.size());
    for (const Sequence& s : batch) seen_.push_back(s);
    return inner_.score(batch);
  }

  long long calls() const { return calls_; }
  const std::vector<Sequence>& seen() const { return seen_; }

 private:
  Victim& inner_;
  long long calls_ = 0;
  std::vector<Sequence> seen_;
};

inline std::vector<int> iota_positions(std::size_t n) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
  return v;
}

/// Random candidate lists of size `width` per position, always containing
/// the original token.
inline std::vector<std::vector<Token>> random_candidates(const Sequence& s,
                                                         int vocab, int width,
                                                         Rng& rng) {
  std::vector<std::vector<Token>> lists(s.size());
  std::uniform_int_distribution<Token> tok(0, vocab - 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    lists[i].push_back(s[i]);
    while (static_cast<int>(lists[i].size()) < width) {
      const Token t = tok(rng);
      if (std::find(lists[i].begin(), lists[i].end(), t) == lists[i].end()) {
        lists[i].push_back(t);
      }
    }
  }
  return lists;
}

inline Sequence random_sequence(std::size_t len, int vocab, Rng& rng) {
  std::uniform_int_distribution<Token> tok(0, vocab - 1);
  Sequence s(len);
  for (auto& t : s) t = tok(rng);
  return s;
}

/// Independent Gaussian-conditioning oracle: builds the joint covariance of
/// [test, train], inverts the train block with a pivoted LU and conditions.
struct DenseConditioning {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline DenseConditioning condition_oracle(
    const std::vector<Sequence>& train_x, const Eigen::VectorXd& train_y,
    const std::vector<Sequence>& test_x, const GpParams& params,
    const std::vector<int>& positions) {
  const auto k = [&](const Sequence& a, const Sequence& b) {
    // Deliberately re-derived: per-position product of factors.
    double v = std::exp(params.log_signal_var);
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if (a[positions[j]] != b[positions[j]]) {
        v *= std::exp(-1.0 / std::exp(params.log_beta[j]));
      }
    }
    return v;
  };
  const Eigen::Index n = static_cast<Eigen::Index>(train_x.size());
  const Eigen::Index m = static_cast<Eigen::Index>(test_x.size());
  Eigen::MatrixXd ktt(n, n), kst(m, n), kss(m, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) ktt(i, j) = k(train_x[i], train_x[j]);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) kst(i, j) = k(test_x[i], train_x[j]);
    for (Eigen::Index j = 0; j < m; ++j) kss(i, j) = k(test_x[i], test_x[j]);
  }
  ktt.diagonal().array() += std::exp(params.log_noise_var);

  const Eigen::MatrixXd inv =
      Eigen::FullPivLU<Eigen::MatrixXd>(ktt).inverse();
  DenseConditioning out;
  const Eigen::VectorXd resid = train_y.array() - params.mean;
  out.mean = (kst * inv * resid).array() + params.mean;
  out.cov = kss - kst * inv * kst.transpose();
  return out;
}

/// Independent density evaluations for the prior terms.
inline double oracle_log_gamma_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
         std::lgamma(shape);
}

inline double oracle_log_beta_prior(double beta) {
  // beta^-1 ~ Gamma(3, 6) plus the 1/beta^2 change-of-variables factor.
  return oracle_log_gamma_pdf(1.0 / beta, 3.0, 6.0) - 2.0 * std::log(beta);
}

/// Brute-force max-min-distance trace of farthest point clustering starting
/// from a given seed index over a deduplicated pool.
inline std::vector<std::size_t> fpc_trace_oracle(
    const std::vector<Sequence>& pool, std::size_t seed, std::size_t n) {
  std::vector<std::size_t> picked{seed};
  while (picked.size() < n) {
    long best = -1;
    std::size_t who = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
      long nearest = std::numeric_limits<long>::max();
      for (std::size_t j : picked) {
        nearest = std::min<long>(nearest, hamming_distance(pool[i], pool[j]));
      }
      if (nearest > best) {
        best = nearest;
        who = i;
      }
    }
    picked.push_back(who);
  }
  return picked;
}

}  // namespace bba::test
