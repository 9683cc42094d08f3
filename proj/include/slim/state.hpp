#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slim/distributions.hpp"
#include "slim/types.hpp"

namespace slim {

// Full factor-model sampler state. C is d x K; in order-search mode K = d + m
// so the loadings can represent the mixing matrix of an equivalent DAG, in
// factor-only mode K = m.
struct FactorState {
  Eigen::MatrixXd C;        // d x K loadings
  Eigen::MatrixXd Z;        // K x N factors
  Eigen::VectorXd psi;      // d noise variances
  Eigen::MatrixXd tau;      // d x K slab variances
  Eigen::MatrixXi Q;        // d x K binary masks
  Eigen::MatrixXd eta;      // d x K inclusion probabilities (0 atom allowed)
  Eigen::VectorXd nu;       // K column rates
  Eigen::MatrixXd upsilon;  // K x N mixing scales
  std::vector<SignalKind> kinds;  // per factor row
  std::vector<bool> dense_columns;  // columns exempt from sparsity (eta fixed at 1)
  Permutation p, pf;        // row / factor permutations (order-search mode)

  int dim() const { return static_cast<int>(C.rows()); }
  int n_factors() const { return static_cast<int>(C.cols()); }

  // Throws if the mask-zero coupling (C = 0 iff Q = 0) or positivity
  // invariants are violated.
  void check_invariants() const;
};

FactorState init_factor_state(int d, int n_factors, int n_obs, const Hyperparameters& hp,
                              const std::vector<SignalKind>& kinds, RngStream& rng);

// DAG sampler state under a fixed ordering. Signals Z stack d driving rows
// followed by m latent rows.
struct DagState {
  Permutation order;        // position i holds variable order[i]
  Eigen::MatrixXd B;        // d x d connectivity weights (position space)
  Eigen::MatrixXi R;        // d x d masks, support strictly lower triangular
  Eigen::MatrixXd tau_b, eta_b;  // d x d
  Eigen::VectorXd nu_b;     // d column rates for B
  Eigen::VectorXd c_d;      // d diagonal driving-signal weights (slab only)
  Eigen::VectorXd tau_d;    // slab variances for c_d
  Eigen::MatrixXd C_l;      // d x m latent loadings
  Eigen::MatrixXi Q_l;      // d x m masks
  Eigen::MatrixXd tau_l, eta_l;  // d x m
  Eigen::VectorXd nu_l;     // m column rates
  Eigen::MatrixXd Z;        // (d + m) x N signals: driving then latent
  Eigen::MatrixXd upsilon;  // (d + m) x N mixing scales
  Eigen::VectorXd psi;      // d noise variances
  std::vector<SignalKind> kinds;  // per signal row
  bool fix_driving_weights = false;  // hold c_d at its initial value

  int dim() const { return static_cast<int>(B.rows()); }
  int n_latent() const { return static_cast<int>(C_l.cols()); }

  // Effective loading matrix for the signals: [diag(c_d) C_l], d x (d+m).
  Eigen::MatrixXd signal_loadings() const;
  // Masked connectivity R o B.
  Eigen::MatrixXd masked_b() const { return B.cwiseProduct(R.cast<double>()); }

  void check_invariants() const;  // acyclicity + mask coupling + positivity
};

// Fresh DAG state for ordering p with m latent variables. Driving signals are
// Laplace, latent signals Cauchy; B support covers the strictly lower
// triangle in position space.
DagState init_from_ordering(const Permutation& p, int d, int m, int n_obs,
                            const Hyperparameters& hp, RngStream& rng);

}  // namespace slim
