#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "slim/dag_sampler.hpp"
#include "slim/factor_sampler.hpp"
#include "slim/state.hpp"
#include "slim/types.hpp"

namespace slim {

// Hyperparameters of the GP rows: per-row inverse squared length scales with
// a shared gamma rate, updated by independence M-H from the prior.
struct GpHyperState {
  Eigen::VectorXd upsilon;  // per-row inverse squared length scales
  double kappa = 1.0;
  std::vector<long> acceptance_counts;
  std::vector<long> proposal_counts;
};

GpHyperState init_gp_hyper(int n_rows, const Hyperparameters& hp, RngStream& rng);

// Squared-exponential covariance exp(-ups (t - t')^2) over scalar inputs;
// unit diagonal by construction.
Eigen::MatrixXd build_covariance(const Eigen::VectorXd& inputs, double ups);

// Draw one GP row from its conditional N(V b, V) with diagonal likelihood
// precisions u (clamped at 1e-12) and information vector b, via the stable
// form V = K - K (U^-1 + K)^-1 K computed through a triangular factorization.
// V_out, if given, receives the posterior covariance.
Eigen::RowVectorXd sample_gp_row(const Eigen::VectorXd& b, const Eigen::VectorXd& u,
                                 const Eigen::MatrixXd& K, RngStream& rng,
                                 Eigen::MatrixXd* V_out = nullptr);

// Reference (numerically direct) posterior covariance (diag(u) + K^-1)^-1,
// for verification against the stable form.
Eigen::MatrixXd gp_posterior_cov_direct(const Eigen::VectorXd& u, const Eigen::MatrixXd& K);

// Independence M-H on each row's length scale (proposal = prior draw,
// Gamma(u_s, kappa)), then the conjugate kappa update
// Gamma(k_s + n_rows u_s, k_r + sum ups).
void update_gp_hyperparameters(GpHyperState& g, const Eigen::MatrixXd& rows,
                               const std::vector<Eigen::VectorXd>& inputs,
                               const Hyperparameters& hp, RngStream& rng);

// GP posterior mean at new inputs, with a small nugget on the training
// covariance for conditioning.
Eigen::VectorXd gp_posterior_mean(const Eigen::VectorXd& train_in,
                                  const Eigen::VectorXd& train_val,
                                  const Eigen::VectorXd& test_in, double ups);

struct GpChainMode {
  enum class Kind { Cslim, Snim };
  Kind kind = Kind::Cslim;
  std::optional<Permutation> order;  // SNIM; absent = enumerate orderings
  static GpChainMode cslim() { return {}; }
  static GpChainMode snim(std::optional<Permutation> p = std::nullopt) {
    GpChainMode m;
    m.kind = Kind::Snim;
    m.order = std::move(p);
    return m;
  }
};

struct SnimSample {
  Eigen::MatrixXd B, eta_b;  // position space
  Eigen::VectorXd c_d, nu_b, psi, lambda;
  Eigen::MatrixXd Y;         // GP-transformed parent rows (position space)
  Eigen::VectorXd ups;       // per-variable length scales
  double train_ll = 0.0;
};

struct GpChainOptions {
  int n_factors = -1;               // CSLIM
  std::vector<bool> dense_columns;  // CSLIM
  int thin = 1;
  bool keep_samples = true;
  int enumeration_bound = 6;        // SNIM ordering enumeration cap
  int invariant_check_interval = 0;
  std::function<void(int sweep)> on_sweep;
};

struct GpChainResult {
  std::vector<FactorSample> factor_samples;  // CSLIM
  std::vector<SnimSample> snim_samples;      // SNIM (best ordering if enumerated)
  GpHyperState gp;
  Permutation order;                         // SNIM
  std::vector<double> enumeration_median_lls;  // SNIM enumeration only
  int n_sweeps = 0, n_burnin = 0;
};

// CSLIM: the factor chain with GP rows (over time indices) replacing the
// scale-mixture factor updates. SNIM: the DAG chain where parent columns act
// through GP-transformed rows Y with covariance over observed parent values;
// without an ordering, all orderings up to the enumeration bound are run and
// the best by median training likelihood is returned.
GpChainResult run_gp_chain(const Dataset& data, const GpChainMode& mode, int m,
                           const Hyperparameters& hp, RngStream& rng,
                           const GpChainOptions& opts = {});

}  // namespace slim
