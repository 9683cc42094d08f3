#pragma once

#include <vector>

#include "slim/dag_sampler.hpp"
#include "slim/factor_sampler.hpp"
#include "slim/types.hpp"

namespace slim {

// Linear-interpolation empirical quantile (the common "type 7" definition).
double quantile(std::vector<double> v, double p);

struct Quantiles {
  double q025 = 0.0, median = 0.0, q975 = 0.0;
};
Quantiles summarize_samples(const std::vector<double>& samples);

struct MatrixQuantiles {
  Eigen::MatrixXd q025, median, q975;
};
MatrixQuantiles summarize_samples(const std::vector<Eigen::MatrixXd>& samples);

// Factor-model posterior summary: elementwise quantiles of loadings and
// inclusion probabilities, plus noise and rate summaries.
struct FactorSummary {
  MatrixQuantiles C, eta;
  std::vector<Quantiles> psi, nu;
};
FactorSummary summarize_factor_chain(const std::vector<FactorSample>& samples);

struct EdgeSummary {
  int from = -1, to = -1;  // variable indices (from -> to); latent parents get from = d + k
  double weight_q025 = 0, weight_median = 0, weight_q975 = 0;
  double eta_median = 0;
  bool present = false;
};

// DAG posterior summary in original variable space. Edge decision: median
// eta above the rejection bound alpha_m (1 - nu_bar) of its column, or above
// 0.5 when the simple threshold is requested.
struct DagSummary {
  Permutation order;
  Eigen::MatrixXd b_median;    // d x d, variable space
  Eigen::MatrixXd eta_median;  // d x d, variable space
  Eigen::MatrixXi adjacency;   // decided edges, variable space
  Eigen::MatrixXd eta_latent_median;  // d x m
  Eigen::MatrixXi latent_adjacency;   // d x m
  std::vector<EdgeSummary> edges;     // decided edges only
  std::vector<Quantiles> psi;
  double median_train_ll = 0.0;
};
DagSummary summarize_dag_chain(const DagChainResult& chain, const Hyperparameters& hp,
                               bool half_threshold = false);

}  // namespace slim
