#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bba/seq.hpp"

namespace bba {

/// GP hyperparameters. Length-scales and variances are stored in log space
/// so positivity holds by construction.
struct GpParams {
  double mean = 0.0;          // eta
  Eigen::VectorXd log_beta;   // one per modeled position
  double log_signal_var = 0.0;
  double log_noise_var = std::log(0.09);

  double beta(int i) const { return std::exp(log_beta[i]); }
  double signal_var() const { return std::exp(log_signal_var); }
  double noise_var() const { return std::exp(log_noise_var); }

  /// Cold-start values: eta 0, beta 2, signal variance 1, noise 0.09.
  static GpParams defaults(int num_positions);
};

/// Categorical ARD kernel over the given positions:
///   sigma_f^2 * prod_i exp(-1[a_i != b_i] / beta_i).
double kernel_eval(const Sequence& a, const Sequence& b,
                   const GpParams& params, const std::vector<int>& positions);

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;   // marginal variances, clamped to >= 0
  Eigen::MatrixXd cov;   // empty unless full covariance was requested
};

struct FitResult {
  bool degraded = false;  // non-finite gradient: params were reverted
};

/// GP surrogate restricted to a set of sequence positions. Targets are
/// optionally standardized internally; predictions are returned on the
/// original scale.
class GpModel {
 public:
  GpModel(std::vector<int> positions, bool standardize_targets = true);

  const std::vector<int>& positions() const { return positions_; }
  std::size_t num_points() const { return train_x_.size(); }
  const GpParams& params() const { return params_; }
  void set_params(GpParams p);

  void set_data(std::vector<EvalRecord> records);
  void add(const EvalRecord& record);

  /// Log marginal likelihood of the (standardized) targets plus log priors
  /// on the natural scale: beta_i^-1 ~ Gamma(3, 6), sigma_n^2 ~ Gamma(0.9, 10),
  /// uniform (omitted) priors on eta and sigma_f^2.
  double log_posterior() const;

  /// Gradient of log_posterior with respect to
  /// [eta, log beta_0.., log sigma_f^2, log sigma_n^2].
  Eigen::VectorXd log_posterior_gradient() const;

  /// MAP fit: `steps` Adam iterations (lr 0.1) in log-parameter space on the
  /// posterior including the log-space change-of-variables terms, warm
  /// started from the current parameters.
  FitResult fit_map(int steps = 3);

  Posterior posterior(const std::vector<Sequence>& X,
                      bool full_cov = true) const;

  double kernel(const Sequence& a, const Sequence& b) const {
    return kernel_eval(a, b, params_, positions_);
  }

 private:
  struct Cache {
    bool valid = false;
    double y_shift = 0.0;
    double y_scale = 1.0;
    Eigen::VectorXd y_std;
    Eigen::MatrixXd kernel_matrix;  // noiseless K(X,X)
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;  // [K + sn2 I]^-1 (y_std - eta)
  };

  void ensure_cache() const;
  Eigen::MatrixXd cross_kernel(const std::vector<Sequence>& X) const;

  std::vector<int> positions_;
  bool standardize_;
  GpParams params_;
  std::vector<Sequence> train_x_;
  std::vector<double> train_y_;
  mutable Cache cache_;
};

}  // namespace bba
