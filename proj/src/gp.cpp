#include "bba/gp.hpp"

#include <algorithm>
#include <stdexcept>

#include "bba/errors.hpp"

namespace bba {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// beta^-1 ~ Gamma(shape 3, rate 6), i.e. beta ~ InvGamma(3, scale 6).
constexpr double kBetaShape = 3.0;
constexpr double kBetaScale = 6.0;
// sigma_n^2 ~ Gamma(shape 0.9, rate 10): mass concentrated near zero.
constexpr double kNoiseShape = 0.9;
constexpr double kNoiseRate = 10.0;

double log_inv_gamma_pdf(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - scale / x;
}

double log_gamma_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

}  // namespace

GpParams GpParams::defaults(int num_positions) {
  GpParams p;
  p.mean = 0.0;
  p.log_beta = Eigen::VectorXd::Constant(num_positions, std::log(2.0));
  p.log_signal_var = 0.0;
  p.log_noise_var = std::log(0.09);
  return p;
}

double kernel_eval(const Sequence& a, const Sequence& b,
                   const GpParams& params, const std::vector<int>& positions) {
  double exponent = 0.0;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    const int p = positions[j];
    if (a[p] != b[p]) exponent += std::exp(-params.log_beta[j]);
  }
  return params.signal_var() * std::exp(-exponent);
}

GpModel::GpModel(std::vector<int> positions, bool standardize_targets)
    : positions_(std::move(positions)), standardize_(standardize_targets) {
  std::sort(positions_.begin(), positions_.end());
  params_ = GpParams::defaults(static_cast<int>(positions_.size()));
}

void GpModel::set_params(GpParams p) {
  if (p.log_beta.size() != static_cast<Eigen::Index>(positions_.size())) {
    throw std::invalid_argument("set_params: length-scale count mismatch");
  }
  params_ = std::move(p);
  cache_.valid = false;
}

void GpModel::set_data(std::vector<EvalRecord> records) {
  train_x_.clear();
  train_y_.clear();
  train_x_.reserve(records.size());
  train_y_.reserve(records.size());
  for (auto& r : records) {
    train_x_.push_back(std::move(r.seq));
    train_y_.push_back(r.value);
  }
  cache_.valid = false;
}

void GpModel::add(const EvalRecord& record) {
  train_x_.push_back(record.seq);
  train_y_.push_back(record.value);
  cache_.valid = false;
}

void GpModel::ensure_cache() const {
  if (cache_.valid) return;
  const Eigen::Index n = static_cast<Eigen::Index>(train_x_.size());
  if (n == 0) throw std::invalid_argument("GpModel: no training data");

  cache_.y_shift = 0.0;
  cache_.y_scale = 1.0;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = train_y_[i];
  if (standardize_) {
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    const double sd = std::sqrt(var);
    cache_.y_shift = mean;
    cache_.y_scale = sd > 1e-12 ? sd : 1.0;
    y = (y.array() - cache_.y_shift) / cache_.y_scale;
  }
  cache_.y_std = y;

  const double sf2 = params_.signal_var();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = sf2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = kernel_eval(train_x_[i], train_x_[j], params_, positions_);
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  cache_.kernel_matrix = K;

  Eigen::MatrixXd A = K;
  A.diagonal().array() += params_.noise_var();
  // Escalating jitter; duplicate-heavy histories make A near singular.
  const double jitters[] = {0.0, 1e-8, 1e-6, 1e-4};
  bool ok = false;
  for (double j : jitters) {
    Eigen::MatrixXd Aj = A;
    Aj.diagonal().array() += j;
    cache_.llt.compute(Aj);
    if (cache_.llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) throw NumericalError("GP covariance is not positive definite");

  const Eigen::VectorXd resid =
      (cache_.y_std.array() - params_.mean).matrix();
  cache_.alpha = cache_.llt.solve(resid);
  cache_.valid = true;
}

Eigen::MatrixXd GpModel::cross_kernel(const std::vector<Sequence>& X) const {
  const Eigen::Index n = static_cast<Eigen::Index>(train_x_.size());
  const Eigen::Index m = static_cast<Eigen::Index>(X.size());
  Eigen::MatrixXd Ks(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Ks(i, j) = kernel_eval(train_x_[i], X[j], params_, positions_);
    }
  }
  return Ks;
}

double GpModel::log_posterior() const {
  ensure_cache();
  const Eigen::Index n = cache_.y_std.size();
  const Eigen::VectorXd r = cache_.y_std.array() - params_.mean;
  double lml = -0.5 * r.dot(cache_.alpha);
  lml -= cache_.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  lml -= 0.5 * static_cast<double>(n) * std::log(kTwoPi);

  double prior = 0.0;
  for (Eigen::Index i = 0; i < params_.log_beta.size(); ++i) {
    prior += log_inv_gamma_pdf(params_.beta(static_cast<int>(i)), kBetaShape,
                               kBetaScale);
  }
  prior += log_gamma_pdf(params_.noise_var(), kNoiseShape, kNoiseRate);
  return lml + prior;
}

Eigen::VectorXd GpModel::log_posterior_gradient() const {
  ensure_cache();
  const Eigen::Index n = cache_.y_std.size();
  const Eigen::Index p = params_.log_beta.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p + 3);

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a_inv = cache_.llt.solve(identity);
  const Eigen::VectorXd& alpha = cache_.alpha;
  const Eigen::MatrixXd Q = alpha * alpha.transpose() - a_inv;
  const Eigen::MatrixXd P = Q.cwiseProduct(cache_.kernel_matrix);

  // d/d eta
  grad[0] = alpha.sum();

  // d/d log beta_i: dK/dlog beta_i has entries K_jk * 1[mismatch at i] / beta_i.
  for (Eigen::Index i = 0; i < p; ++i) {
    const int pos = positions_[i];
    const double inv_beta = std::exp(-params_.log_beta[i]);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Token tj = train_x_[j][pos];
      for (Eigen::Index k = j + 1; k < n; ++k) {
        if (tj != train_x_[k][pos]) acc += 2.0 * P(j, k);
      }
    }
    grad[1 + i] = 0.5 * inv_beta * acc;
  }

  // d/d log sigma_f^2: dA/dlog sf2 = K.
  grad[1 + p] = 0.5 * P.sum();

  // d/d log sigma_n^2: dA/dlog sn2 = sn2 * I.
  const double sn2 = params_.noise_var();
  grad[2 + p] = 0.5 * sn2 * Q.trace();

  // Priors (natural scale, differentiated with respect to log parameters).
  for (Eigen::Index i = 0; i < p; ++i) {
    const double beta = params_.beta(static_cast<int>(i));
    grad[1 + i] += -(kBetaShape + 1.0) + kBetaScale / beta;
  }
  grad[2 + p] += (kNoiseShape - 1.0) - kNoiseRate * sn2;
  return grad;
}

FitResult GpModel::fit_map(int steps) {
  if (positions_.empty()) {
    throw std::invalid_argument("fit_map: no modeled positions");
  }
  if (train_x_.size() < 2) {
    throw std::invalid_argument("fit_map: need at least 2 training points");
  }

  const GpParams entry = params_;
  const Eigen::Index p = params_.log_beta.size();
  const Eigen::Index dim = p + 3;

  Eigen::VectorXd phi(dim);
  phi[0] = params_.mean;
  phi.segment(1, p) = params_.log_beta;
  phi[1 + p] = params_.log_signal_var;
  phi[2 + p] = params_.log_noise_var;

  constexpr double lr = 0.1;
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);

  for (int t = 1; t <= steps; ++t) {
    Eigen::VectorXd g = log_posterior_gradient();
    // Change-of-variables terms for the log-space parameterization; eta and
    // sigma_f^2 carry uniform priors with no contribution.
    g.segment(1, p).array() += 1.0;
    g[2 + p] += 1.0;
    if (!g.allFinite()) {
      params_ = entry;
      cache_.valid = false;
      return {.degraded = true};
    }
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    const double mc = 1.0 - std::pow(beta1, t);
    const double vc = 1.0 - std::pow(beta2, t);
    // Ascent on the MAP objective.
    phi += lr * (m / mc).cwiseQuotient(((v / vc).cwiseSqrt().array() + eps).matrix());

    params_.mean = phi[0];
    params_.log_beta = phi.segment(1, p);
    params_.log_signal_var = phi[1 + p];
    params_.log_noise_var = phi[2 + p];
    cache_.valid = false;
  }
  return {};
}

Posterior GpModel::posterior(const std::vector<Sequence>& X,
                             bool full_cov) const {
  ensure_cache();
  const Eigen::Index m = static_cast<Eigen::Index>(X.size());
  const double sf2 = params_.signal_var();

  const Eigen::MatrixXd Ks = cross_kernel(X);
  Posterior out;
  out.mean = Ks.transpose() * cache_.alpha;
  out.mean.array() += params_.mean;

  const Eigen::MatrixXd V = cache_.llt.matrixL().solve(Ks);
  if (full_cov) {
    Eigen::MatrixXd Kss(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      Kss(i, i) = sf2;
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const double k = kernel_eval(X[i], X[j], params_, positions_);
        Kss(i, j) = k;
        Kss(j, i) = k;
      }
    }
    Eigen::MatrixXd cov = Kss - V.transpose() * V;
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal() = cov.diagonal().cwiseMax(0.0).eval();
    out.cov = cov;
    out.var = cov.diagonal();
  } else {
    out.var.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      out.var[j] = std::max(0.0, sf2 - V.col(j).squaredNorm());
    }
  }

  // Back to the raw target scale.
  out.mean = (cache_.y_shift + cache_.y_scale * out.mean.array()).matrix();
  const double s2 = cache_.y_scale * cache_.y_scale;
  out.var *= s2;
  if (full_cov) out.cov *= s2;
  return out;
}

}  // namespace bba
