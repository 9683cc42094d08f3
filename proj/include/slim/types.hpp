#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace slim {

// d x N observation matrix: variables are rows, observations are columns.
// mask (optional) marks observed entries with 1; zeros are held out /
// missing.
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  std::optional<Eigen::MatrixXd> mask;

  int dim() const { return static_cast<int>(values.rows()); }
  int n_obs() const { return static_cast<int>(values.cols()); }
  bool observed(int i, int n) const { return !mask || (*mask)(i, n) != 0.0; }

  void validate() const;  // throws on invariant violation
};

struct StandardizeStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // sample sd (ddof = 1) over observed entries
};

// Row-wise standardization over observed entries; errors on constant rows.
Dataset standardize(const Dataset& data, StandardizeStats* stats = nullptr);

// Column-wise disjoint train/test split; test gets round(test_fraction * N)
// columns chosen uniformly by seed.
std::pair<Dataset, Dataset> partition(const Dataset& data, double test_fraction,
                                      std::uint64_t seed);

struct Permutation {
  std::vector<int> order;  // order[i] = original index placed at position i

  static Permutation identity(int d);
  int size() const { return static_cast<int>(order.size()); }
  bool valid() const;
  Permutation inverse() const;
  // (this o other): apply other first, then this.
  Permutation compose(const Permutation& other) const;
  bool operator==(const Permutation& other) const { return order == other.order; }
  bool operator<(const Permutation& other) const { return order < other.order; }
};

enum class SparsityMode { FactorModel, SparseDag, DenseDag };

struct Hyperparameters {
  double s_s = 20.0, s_r = 1.0;        // noise variance gamma shape/rate
  double alpha_p = 10.0, alpha_m = 0.95;  // element-level beta precision/mean
  double beta_p = 100.0;               // column-level beta precision
  double beta_m = -1.0;                // column-level beta mean; -1 = mode default
  double beta_m_latent = 0.9;          // latent loading columns lean dense: a pruned-out
                                       // column cannot re-enter through single-site flips
  double t_s = 2.0, t_r = 1.0;         // slab variance gamma shape/rate
  double u_s = 2.0, k_s = 2.0, k_r = 0.02;  // GP length-scale hyperpriors
  double lambda = 1.0;                 // Laplace rate (mixing form)
  double theta = 1.0;                  // Student-t dof; 1 = Cauchy
  int n_rep = 500;                     // predictive mixture sample count
  int n_samples = -1, n_burnin = -1;   // -1 = per-mode default
  int m_top = 10;                      // ordering candidates kept
  int mh_perm_reps = 10;               // permutation updates per sweep
};

// Fills mode-dependent defaults (beta_m: 0.9 factor, 0.1 sparse DAG,
// 0.99 dense DAG) and rejects invalid settings.
Hyperparameters validate_hyperparameters(Hyperparameters raw,
                                         SparsityMode mode = SparsityMode::FactorModel);

}  // namespace slim
