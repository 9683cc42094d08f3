#include "slim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slim {

double sample_inverse_gaussian(double mu, double lam, RngStream& rng) {
  if (mu <= 0.0 || lam <= 0.0)
    throw std::invalid_argument("sample_inverse_gaussian: parameters must be positive");
  // Michael, Schucany & Haas (1976)
  double v = rng.normal();
  double y = v * v;
  double x = mu + mu * mu * y / (2.0 * lam) -
             mu / (2.0 * lam) * std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
  if (x <= 0.0) x = std::numeric_limits<double>::min();
  if (rng.uniform() <= mu / (mu + x)) return x;
  return mu * mu / x;
}

double sample_heavy_tailed(const SignalKind& kind, RngStream& rng) {
  double ups = draw_prior_mixing_scale(kind, rng);
  double sigma2 = kind.type == SignalKind::Type::StudentT ? kind.sigma2 : 1.0;
  return std::sqrt(ups * sigma2) * rng.normal();
}

double draw_prior_mixing_scale(const SignalKind& kind, RngStream& rng) {
  switch (kind.type) {
    case SignalKind::Type::Laplace:
      if (kind.lambda <= 0.0) throw std::invalid_argument("laplace: lambda must be positive");
      // rate lambda^2 / 2 pairs with the IG(lambda/|z|, lambda^2) conditional
      return rng.exponential(0.5 * kind.lambda * kind.lambda);
    case SignalKind::Type::StudentT:
      if (kind.theta <= 0.0 || kind.sigma2 <= 0.0)
        throw std::invalid_argument("student_t: theta and sigma2 must be positive");
      return 1.0 / rng.gamma(kind.theta / 2.0, kind.theta / 2.0);
  }
  throw std::logic_error("unreachable");
}

double draw_conditional_mixing_scale(const SignalKind& kind, double z, RngStream& rng) {
  // scales are clamped to [1e-12, 1e12]: an inverse draw that underflows would
  // otherwise put an infinite rate into the downstream conditionals
  switch (kind.type) {
    case SignalKind::Type::Laplace: {
      double az = std::max(std::abs(z), 1e-12);
      double inv = sample_inverse_gaussian(kind.lambda / az, kind.lambda * kind.lambda, rng);
      return std::clamp(1.0 / inv, 1e-12, 1e12);
    }
    case SignalKind::Type::StudentT: {
      double inv = rng.gamma((kind.theta + 1.0) / 2.0,
                             kind.theta / 2.0 + z * z / (2.0 * kind.sigma2));
      return std::clamp(1.0 / inv, 1e-12, 1e12);
    }
  }
  throw std::logic_error("unreachable");
}

double sample_generalized_gaussian(double shape, RngStream& rng) {
  if (shape < 0.5 || shape > 2.0)
    throw std::invalid_argument("sample_generalized_gaussian: shape outside [0.5, 2]");
  // |x/a|^shape ~ Gamma(1/shape, 1); a fixes the variance at one.
  double a = std::sqrt(std::tgamma(1.0 / shape) / std::tgamma(3.0 / shape));
  double g = rng.gamma(1.0 / shape, 1.0);
  double x = a * std::pow(g, 1.0 / shape);
  return rng.bernoulli(0.5) ? x : -x;
}

double random_gg_shape(RngStream& rng) {
  // uniform over [0.5, 0.8] u [1.2, 2): keeps sources clearly non-Gaussian
  double len1 = 0.3, len2 = 0.8;
  double u = rng.uniform() * (len1 + len2);
  return u < len1 ? 0.5 + u : 1.2 + (u - len1);
}

double log_gaussian_diag(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& var) {
  if (x.size() != mean.size() || x.size() != var.size())
    throw std::invalid_argument("log_gaussian_diag: dimension mismatch");
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r = x[i] - mean[i];
    ll += -0.5 * (std::log(2.0 * M_PI * var[i]) + r * r / var[i]);
  }
  return ll;
}

Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt;
  double jitter = 1e-10 * cov.trace() / static_cast<double>(cov.rows());
  Eigen::MatrixXd c = cov;
  c.diagonal().array() += jitter;
  llt.compute(c);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cholesky_with_jitter: matrix not positive definite");
  return llt;
}

double log_gaussian_prefactored(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                const Eigen::LLT<Eigen::MatrixXd>& llt) {
  Eigen::VectorXd r = x - mean;
  Eigen::VectorXd w = llt.matrixL().solve(r);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    logdet += std::log(llt.matrixL()(i, i));
  return -0.5 * x.size() * std::log(2.0 * M_PI) - logdet - 0.5 * w.squaredNorm();
}

double log_gaussian_full(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& cov) {
  if (x.size() != mean.size() || cov.rows() != cov.cols() || cov.rows() != x.size())
    throw std::invalid_argument("log_gaussian_full: dimension mismatch");
  return log_gaussian_prefactored(x, mean, cholesky_with_jitter(cov));
}

}  // namespace slim
