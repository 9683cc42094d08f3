#include "slim/state.hpp"

#include <cmath>
#include <stdexcept>

namespace slim {

void FactorState::check_invariants() const {
  const int d = dim(), K = n_factors();
  for (int i = 0; i < d; ++i) {
    if (!(psi[i] > 0.0)) throw std::runtime_error("FactorState: psi not strictly positive");
    for (int j = 0; j < K; ++j) {
      if ((C(i, j) == 0.0) != (Q(i, j) == 0))
        throw std::runtime_error("FactorState: mask-zero coupling violated");
      if (eta(i, j) == 0.0 && Q(i, j) != 0)
        throw std::runtime_error("FactorState: eta = 0 requires Q = 0");
      if (!(tau(i, j) > 0.0)) throw std::runtime_error("FactorState: tau not positive");
    }
  }
  if ((upsilon.array() <= 0.0).any())
    throw std::runtime_error("FactorState: upsilon not positive");
}

FactorState init_factor_state(int d, int n_factors, int n_obs, const Hyperparameters& hp,
                              const std::vector<SignalKind>& kinds, RngStream& rng) {
  if (static_cast<int>(kinds.size()) != n_factors)
    throw std::invalid_argument("init_factor_state: one kind per factor required");
  FactorState s;
  s.kinds = kinds;
  s.psi = Eigen::VectorXd::Ones(d);
  s.tau.resize(d, n_factors);
  s.C = Eigen::MatrixXd::Zero(d, n_factors);
  s.Q.resize(d, n_factors);
  s.eta.resize(d, n_factors);
  s.nu.resize(n_factors);
  s.Z.resize(n_factors, n_obs);
  s.upsilon = Eigen::MatrixXd::Ones(n_factors, n_obs);
  for (int j = 0; j < n_factors; ++j) {
    s.nu[j] = rng.beta(hp.beta_p * hp.beta_m, hp.beta_p * (1.0 - hp.beta_m));
    for (int n = 0; n < n_obs; ++n) s.Z(j, n) = rng.normal();
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n_factors; ++j) {
      s.tau(i, j) = 1.0 / rng.gamma(hp.t_s, hp.t_r);
      // start dense-ish so the chain sees signal before pruning
      s.Q(i, j) = rng.bernoulli(0.5) ? 1 : 0;
      s.eta(i, j) = s.Q(i, j) ? rng.beta(hp.alpha_p * hp.alpha_m + 1.0,
                                         hp.alpha_p * (1.0 - hp.alpha_m))
                              : 0.0;
      s.C(i, j) = s.Q(i, j) ? 0.3 * rng.normal() : 0.0;
      if (s.Q(i, j) && s.C(i, j) == 0.0) s.C(i, j) = 1e-8;
    }
  s.p = Permutation::identity(d);
  s.pf = Permutation::identity(n_factors);
  return s;
}

Eigen::MatrixXd DagState::signal_loadings() const {
  const int d = dim(), m = n_latent();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d + m);
  W.topLeftCorner(d, d).diagonal() = c_d;
  if (m > 0) W.rightCols(m) = C_l.cwiseProduct(Q_l.cast<double>());
  return W;
}

void DagState::check_invariants() const {
  const int d = dim(), m = n_latent();
  Permutation inv = order.inverse();
  for (int i = 0; i < d; ++i) {
    if (!(psi[i] > 0.0)) throw std::runtime_error("DagState: psi not positive");
    if (!(tau_d[i] > 0.0)) throw std::runtime_error("DagState: tau_d not positive");
    for (int j = 0; j < d; ++j) {
      bool supported = i > j;  // strictly lower triangular in position space
      if (!supported && R(i, j) != 0)
        throw std::runtime_error("DagState: acyclicity violated (R off support)");
      if ((B(i, j) == 0.0) != (R(i, j) == 0))
        throw std::runtime_error("DagState: mask-zero coupling violated in B");
    }
    for (int j = 0; j < m; ++j)
      if ((C_l(i, j) == 0.0) != (Q_l(i, j) == 0))
        throw std::runtime_error("DagState: mask-zero coupling violated in C_l");
  }
  (void)inv;
  if ((upsilon.array() <= 0.0).any()) throw std::runtime_error("DagState: upsilon not positive");
}

DagState init_from_ordering(const Permutation& p, int d, int m, int n_obs,
                            const Hyperparameters& hp, RngStream& rng) {
  if (m < 0) throw std::invalid_argument("init_from_ordering: m must be non-negative");
  if (!p.valid() || p.size() != d)
    throw std::invalid_argument("init_from_ordering: invalid permutation");
  DagState s;
  s.order = p;
  s.psi = Eigen::VectorXd::Ones(d);
  s.B = Eigen::MatrixXd::Zero(d, d);
  s.R = Eigen::MatrixXi::Zero(d, d);
  s.tau_b.resize(d, d);
  s.eta_b = Eigen::MatrixXd::Zero(d, d);
  s.nu_b.resize(d);
  s.c_d.resize(d);
  s.tau_d.resize(d);
  s.C_l = Eigen::MatrixXd::Zero(d, m);
  s.Q_l = Eigen::MatrixXi::Zero(d, m);
  s.tau_l.resize(d, m);
  s.eta_l = Eigen::MatrixXd::Zero(d, m);
  s.nu_l.resize(m);
  s.Z.resize(d + m, n_obs);
  s.upsilon = Eigen::MatrixXd::Ones(d + m, n_obs);
  s.kinds.clear();
  for (int i = 0; i < d; ++i) s.kinds.push_back(SignalKind::laplace(hp.lambda));
  for (int j = 0; j < m; ++j) s.kinds.push_back(SignalKind::student_t(hp.theta));

  for (int j = 0; j < d; ++j)
    s.nu_b[j] = rng.beta(hp.beta_p * hp.beta_m, hp.beta_p * (1.0 - hp.beta_m));
  for (int j = 0; j < m; ++j)
    s.nu_l[j] = rng.beta(hp.beta_p * hp.beta_m_latent, hp.beta_p * (1.0 - hp.beta_m_latent));
  for (int i = 0; i < d; ++i) {
    s.tau_d[i] = 1.0 / rng.gamma(hp.t_s, hp.t_r);
    s.c_d[i] = std::sqrt(s.tau_d[i]) * rng.normal();
    if (s.c_d[i] == 0.0) s.c_d[i] = 1e-8;
    for (int j = 0; j < d; ++j) {
      s.tau_b(i, j) = 1.0 / rng.gamma(hp.t_s, hp.t_r);
      if (i > j) {
        s.R(i, j) = rng.bernoulli(0.5) ? 1 : 0;
        s.eta_b(i, j) = s.R(i, j) ? rng.beta(hp.alpha_p * hp.alpha_m + 1.0,
                                             hp.alpha_p * (1.0 - hp.alpha_m))
                                  : 0.0;
        s.B(i, j) = s.R(i, j) ? 0.3 * rng.normal() : 0.0;
        if (s.R(i, j) && s.B(i, j) == 0.0) s.B(i, j) = 1e-8;
      }
    }
    // latent loadings start active so the latent rows are data-informed from
    // the first sweep; a cold column cannot switch on through the single-site
    // updates because a prior-drawn signal row has no alignment with the data
    for (int j = 0; j < m; ++j) {
      s.tau_l(i, j) = 1.0 / rng.gamma(hp.t_s, hp.t_r);
      s.Q_l(i, j) = 1;
      s.eta_l(i, j) = rng.beta(hp.alpha_p * hp.alpha_m + 1.0,
                               hp.alpha_p * (1.0 - hp.alpha_m));
      s.C_l(i, j) = 0.3 * rng.normal();
      if (s.C_l(i, j) == 0.0) s.C_l(i, j) = 1e-8;
    }
  }
  for (int k = 0; k < d + m; ++k)
    for (int n = 0; n < n_obs; ++n) s.Z(k, n) = rng.normal();
  return s;
}

}  // namespace slim
