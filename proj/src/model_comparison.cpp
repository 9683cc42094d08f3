#include "slim/model_comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "slim/distributions.hpp"
#include "slim/summary.hpp"

namespace slim {
namespace {

constexpr double kScaleCap = 1e12;  // keeps Cauchy mixing draws finite in Sigma

double mixture_column_ll(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& W, const Eigen::VectorXd& psi,
                         const std::vector<SignalKind>& kinds, int n_rep,
                         RngStream& rng) {
  const int K = static_cast<int>(W.cols());
  std::vector<double> logs(n_rep);
  Eigen::VectorXd u(K);
  for (int r = 0; r < n_rep; ++r) {
    for (int k = 0; k < K; ++k)
      u[k] = std::min(draw_prior_mixing_scale(kinds[k], rng), kScaleCap);
    Eigen::MatrixXd sigma = W * u.asDiagonal() * W.transpose();
    sigma.diagonal() += psi;
    logs[r] = log_gaussian_full(x, mean, sigma);
  }
  return log_sum_exp(logs) - std::log(static_cast<double>(n_rep));
}

}  // namespace

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double predictive_log_density(const Dataset& test, const Eigen::MatrixXd& C,
                              const Eigen::VectorXd& psi,
                              const std::vector<SignalKind>& kinds,
                              const Hyperparameters& hp, RngStream& rng) {
  if (static_cast<int>(kinds.size()) != C.cols())
    throw std::invalid_argument("predictive_log_density: one kind per factor required");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(test.dim());
  double ll = 0.0;
  for (int n = 0; n < test.n_obs(); ++n)
    ll += mixture_column_ll(test.values.col(n), zero, C, psi, kinds, hp.n_rep, rng);
  return ll;
}

double predictive_log_density_dag(const Dataset& test_pos, const DagSample& draw,
                                  const Hyperparameters& hp, RngStream& rng) {
  const int d = static_cast<int>(draw.B.rows());
  const int m = static_cast<int>(draw.C_l.cols());
  if (test_pos.dim() != d)
    throw std::invalid_argument("predictive_log_density_dag: dimension mismatch");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d + m);
  W.topLeftCorner(d, d).diagonal() = draw.c_d;
  if (m > 0) W.rightCols(m) = draw.C_l;
  std::vector<SignalKind> kinds;
  for (int j = 0; j < d; ++j) kinds.push_back(SignalKind::laplace(draw.lambda[j]));
  for (int k = 0; k < m; ++k) kinds.push_back(SignalKind::student_t(hp.theta));
  double ll = 0.0;
  for (int n = 0; n < test_pos.n_obs(); ++n) {
    Eigen::VectorXd x = test_pos.values.col(n);
    ll += mixture_column_ll(x, draw.B * x, W, draw.psi, kinds, hp.n_rep, rng);
  }
  return ll;
}

double predictive_log_density_snim(const Eigen::MatrixXd& train_pos,
                                   const Eigen::MatrixXd& test_pos,
                                   const SnimSample& draw, const Hyperparameters& hp,
                                   RngStream& rng) {
  const int d = static_cast<int>(draw.B.rows());
  if (test_pos.rows() != d || train_pos.rows() != d)
    throw std::invalid_argument("predictive_log_density_snim: dimension mismatch");
  // GP posterior means of the parent functions at the test points
  Eigen::MatrixXd Ystar(d, test_pos.cols());
  for (int i = 0; i < d; ++i)
    Ystar.row(i) = gp_posterior_mean(train_pos.row(i).transpose(),
                                     draw.Y.row(i).transpose(),
                                     test_pos.row(i).transpose(), draw.ups[i])
                       .transpose();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d);
  W.diagonal() = draw.c_d;
  std::vector<SignalKind> kinds;
  for (int j = 0; j < d; ++j) kinds.push_back(SignalKind::laplace(draw.lambda[j]));
  Eigen::MatrixXd means = draw.B * Ystar;
  double ll = 0.0;
  for (int n = 0; n < test_pos.cols(); ++n)
    ll += mixture_column_ll(test_pos.col(n), means.col(n), W, draw.psi, kinds, hp.n_rep,
                            rng);
  return ll;
}

double missing_value_log_density(const Dataset& data, const Eigen::MatrixXd& C,
                                 const Eigen::MatrixXd& Z, const Eigen::VectorXd& psi) {
  if (!data.mask)
    throw std::invalid_argument("missing_value_log_density: mask required");
  Eigen::MatrixXd M = C * Z;
  double ll = 0.0;
  long held_out = 0;
  for (int i = 0; i < data.dim(); ++i)
    for (int n = 0; n < data.n_obs(); ++n)
      if ((*data.mask)(i, n) == 0.0) {
        ++held_out;
        double r = data.values(i, n) - M(i, n);
        ll += -0.5 * std::log(2.0 * M_PI * psi[i]) - 0.5 * r * r / psi[i];
      }
  if (held_out == 0) {
    std::fprintf(stderr,
                 "missing_value_log_density: mask holds out no entries; returning 0\n");
    return 0.0;
  }
  return ll;
}

ComparisonReport compare_models(
    const std::vector<std::pair<std::string, std::vector<double>>>& models) {
  if (models.size() < 2)
    throw std::invalid_argument("compare_models: need at least two models");
  ComparisonReport rep;
  for (const auto& [label, lls] : models) {
    if (lls.empty()) throw std::invalid_argument("compare_models: empty sample vector");
    rep.labels.push_back(label);
    rep.test_lls.push_back(lls);
    Quantiles q = summarize_samples(lls);
    rep.q025.push_back(q.q025);
    rep.medians.push_back(q.median);
    rep.q975.push_back(q.q975);
  }
  rep.selected_index = 0;
  for (size_t i = 1; i < rep.medians.size(); ++i)
    if (rep.medians[i] > rep.medians[rep.selected_index])
      rep.selected_index = static_cast<int>(i);
  rep.selected = rep.labels[rep.selected_index];
  rep.tie = std::count(rep.medians.begin(), rep.medians.end(),
                       rep.medians[rep.selected_index]) > 1;

  // ratio of the best competitor against the first (reference) model
  size_t best = 1;
  for (size_t i = 2; i < rep.medians.size(); ++i)
    if (rep.medians[i] > rep.medians[best]) best = i;
  const auto& ref = rep.test_lls[0];
  const auto& cmp = rep.test_lls[best];
  if (ref.size() == cmp.size()) {
    for (size_t s = 0; s < ref.size(); ++s) rep.ratio_samples.push_back(cmp[s] - ref[s]);
  } else {
    rep.ratio_samples.push_back(rep.medians[best] - rep.medians[0]);
  }
  // difference of medians, so the sign agrees with the selection rule
  rep.ratio_median = rep.medians[best] - rep.medians[0];
  return rep;
}

}  // namespace slim
