#pragma once

#include <string>
#include <utility>
#include <vector>

#include "slim/dag_sampler.hpp"
#include "slim/factor_sampler.hpp"
#include "slim/gp.hpp"
#include "slim/types.hpp"

namespace slim {

double log_sum_exp(const std::vector<double>& v);

// Predictive log-density of held-out columns under one posterior draw,
// integrating the signals out by a mixture over n_rep prior draws of the
// mixing-scale diagonal (log-sum-exp averaged). Factor model: mean 0,
// Sigma = C U C^T + Psi.
double predictive_log_density(const Dataset& test, const Eigen::MatrixXd& C,
                              const Eigen::VectorXd& psi,
                              const std::vector<SignalKind>& kinds,
                              const Hyperparameters& hp, RngStream& rng);
inline double predictive_log_density(const Dataset& test, const FactorSample& draw,
                                     const std::vector<SignalKind>& kinds,
                                     const Hyperparameters& hp, RngStream& rng) {
  return predictive_log_density(test, draw.C, draw.psi, kinds, hp, rng);
}

// DAG variant: test columns already permuted to position space; mean = (R o B) x*,
// Sigma = W U W^T + Psi with W = [diag(c_d) C_l].
double predictive_log_density_dag(const Dataset& test_pos, const DagSample& draw,
                                  const Hyperparameters& hp, RngStream& rng);

// Non-linear variant: parent rows pass through the draw's GP functions; the
// test-point function values are GP posterior means given the training rows.
double predictive_log_density_snim(const Eigen::MatrixXd& train_pos,
                                   const Eigen::MatrixXd& test_pos,
                                   const SnimSample& draw, const Hyperparameters& hp,
                                   RngStream& rng);

// Gaussian log-likelihood of the masked-out entries (mask == 0) under the
// current reconstruction C Z; all-ones mask is defined as 0 with a warning.
double missing_value_log_density(const Dataset& data, const Eigen::MatrixXd& C,
                                 const Eigen::MatrixXd& Z, const Eigen::VectorXd& psi);

struct ComparisonReport {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> test_lls;
  std::vector<double> medians, q025, q975;
  std::vector<double> ratio_samples;  // competitor minus first model
  double ratio_median = 0.0;
  int selected_index = -1;
  std::string selected;
  bool tie = false;
};

// Medians per model, argmax selection with ties to the first label, and the
// log-ratio of the best competitor against the first model (sweep-paired when
// sample counts match, medians-difference otherwise).
ComparisonReport compare_models(
    const std::vector<std::pair<std::string, std::vector<double>>>& models);

}  // namespace slim
