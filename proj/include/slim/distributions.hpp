#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "slim/rng.hpp"

namespace slim {

// One draw from the inverse Gaussian IG(mu, lam) (mean/shape form).
double sample_inverse_gaussian(double mu, double lam, RngStream& rng);

// Distributional tag of a latent signal. Heavy tails provide the
// identifiability of the model; the Cauchy tag (Student-t, theta = 1)
// distinguishes latent from driving signals.
struct SignalKind {
  enum class Type { Laplace, StudentT };
  Type type = Type::Laplace;
  double lambda = 1.0;  // Laplace rate, mixing form: upsilon ~ Exponential(lambda^2)
  double theta = 1.0;   // Student-t degrees of freedom
  double sigma2 = 1.0;  // Student-t scale
  bool learn_lambda = false;  // pure-DAG driving signals learn lambda^2

  static SignalKind laplace(double lambda = 1.0) {
    SignalKind k;
    k.type = Type::Laplace;
    k.lambda = lambda;
    return k;
  }
  static SignalKind student_t(double theta, double sigma2 = 1.0) {
    SignalKind k;
    k.type = Type::StudentT;
    k.theta = theta;
    k.sigma2 = sigma2;
    return k;
  }
  static SignalKind cauchy() { return student_t(1.0, 1.0); }
};

// Two-stage mixture draw: scale from the mixing density, then Gaussian.
double sample_heavy_tailed(const SignalKind& kind, RngStream& rng);

// Mixing-scale draw from the prior (used by the predictive density).
double draw_prior_mixing_scale(const SignalKind& kind, RngStream& rng);

// Conditional mixing-scale draw given the current signal value z.
// Laplace: 1/upsilon ~ IG(lambda/|z|, lambda^2), |z| clamped at 1e-12.
// Student-t: 1/upsilon ~ Gamma((theta+1)/2, theta/2 + z^2/(2 sigma^2)).
double draw_conditional_mixing_scale(const SignalKind& kind, double z, RngStream& rng);

// Zero-mean unit-variance generalized Gaussian; shape in [0.5, 2]
// (shape = 2 recovers the Gaussian, shape = 1 the Laplace).
double sample_generalized_gaussian(double shape, RngStream& rng);

// Random non-Gaussian shape, uniform over [0.5, 0.8] u [1.2, 2).
double random_gg_shape(RngStream& rng);

double log_gaussian_diag(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& var);

// Cholesky with the one-shot jitter policy: on failure add 1e-10 trace/d to
// the diagonal once, then error out.
Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& cov);

double log_gaussian_prefactored(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                const Eigen::LLT<Eigen::MatrixXd>& llt);

double log_gaussian_full(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& cov);

}  // namespace slim
