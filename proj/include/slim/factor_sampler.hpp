#pragma once

#include <functional>
#include <vector>

#include "slim/order_search.hpp"
#include "slim/state.hpp"
#include "slim/types.hpp"

namespace slim {

// Conditional updates for the sparse factor model x = (Q o C) z + eps.
// Each call recomputes the residual internally and respects the dataset
// mask: held-out entries contribute to no conditional.
void update_noise_variances(FactorState& s, const Dataset& data, const Hyperparameters& hp,
                            RngStream& rng);
void update_factors_and_scales(FactorState& s, const Dataset& data, const Hyperparameters& hp,
                               RngStream& rng);
void update_loadings_and_slab(FactorState& s, const Dataset& data, const Hyperparameters& hp,
                              RngStream& rng);
// Blocked (q, c) update with the slab integrated out, then eta and nu.
// Whenever q lands on 1 the weight is redrawn from its conditional.
// Columns flagged dense keep q = 1 and eta = 1.
void update_sparsity(FactorState& s, const Dataset& data, const Hyperparameters& hp,
                     RngStream& rng);

// Log posterior odds of inclusion for one mask entry, computed in log space.
// zz = sum_n z_jn^2, g = residual-signal inner product including the entry's
// own contribution.
double log_inclusion_odds(double g, double zz, double tau, double psi, double alpha_m,
                          double nu);

enum class FactorMode { Plain, OrderSearch, MissingValues };

struct FactorSample {
  Eigen::MatrixXd C, eta;
  Eigen::VectorXd psi, nu;
  Permutation p, pf;
};

struct FactorChainOptions {
  int n_factors = -1;              // -1: d + m_latent in order-search mode, else required
  int m_latent = 0;                // extra factor columns in order-search mode
  std::vector<SignalKind> kinds;   // empty: mode defaults
  std::vector<bool> dense_columns; // columns exempt from sparsity updates
  int thin = 1;
  bool keep_samples = true;
  int invariant_check_interval = 0;  // 0: only at the end
  std::function<void(const FactorState&, int sweep)> on_sample;  // post burn-in
};

struct FactorChainResult {
  std::vector<FactorSample> samples;
  PermutationCandidateSet candidates;  // order-search mode only
  int n_sweeps = 0, n_burnin = 0;
  long mh_proposals = 0, mh_accepts = 0;
};

// One full Gibbs chain. Sweep order: noise variances, factors and mixing
// scales, loadings and slab variances, sparsity, then (order-search mode)
// mh_perm_reps permutation updates. Accepted orderings are tallied after
// burn-in. Defaults: 10000 sweeps after a 5000-sweep burn-in. Throws with
// the sweep index if the state goes non-finite.
FactorChainResult run_factor_chain(const Dataset& data, const Hyperparameters& hp,
                                   FactorMode mode, RngStream& rng,
                                   const FactorChainOptions& opts = {});

}  // namespace slim
