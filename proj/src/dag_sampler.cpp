#include "slim/dag_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "slim/factor_sampler.hpp"

namespace slim {
namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

Eigen::MatrixXd dag_residual(const DagState& s, const Eigen::MatrixXd& Xp,
                             const Eigen::MatrixXd& Rp) {
  return Xp - s.masked_b() * Rp - s.signal_loadings() * s.Z;
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty vector");
  size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  double hi = v[h];
  if (v.size() % 2) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + h);
  return 0.5 * (lo + hi);
}

}  // namespace

void dag_update_noise_variances(DagState& s, const Eigen::MatrixXd& Xp,
                                const Eigen::MatrixXd& Rp, const Hyperparameters& hp,
                                RngStream& rng) {
  const int d = s.dim(), m = s.n_latent(), N = static_cast<int>(Xp.cols());
  Eigen::MatrixXd E = dag_residual(s, Xp, Rp);
  for (int i = 0; i < d; ++i) {
    double u = E.row(i).squaredNorm();
    int active = 1;  // the driving weight is slab-only, always active
    u += s.c_d[i] * s.c_d[i] / s.tau_d[i];
    for (int j = 0; j < i; ++j)
      if (s.R(i, j)) {
        u += s.B(i, j) * s.B(i, j) / s.tau_b(i, j);
        ++active;
      }
    for (int k = 0; k < m; ++k)
      if (s.Q_l(i, k)) {
        u += s.C_l(i, k) * s.C_l(i, k) / s.tau_l(i, k);
        ++active;
      }
    s.psi[i] = 1.0 / rng.gamma(hp.s_s + 0.5 * (N + active), hp.s_r + 0.5 * u);
  }
}

void dag_update_signals_and_scales(DagState& s, const Eigen::MatrixXd& Xp,
                                   const Eigen::MatrixXd& Rp, const Hyperparameters& hp,
                                   RngStream& rng) {
  (void)hp;
  const int d = s.dim(), m = s.n_latent(), N = static_cast<int>(Xp.cols());
  Eigen::MatrixXd W = s.signal_loadings();
  Eigen::MatrixXd E = Xp - s.masked_b() * Rp - W * s.Z;
  for (int j = 0; j < d + m; ++j) {
    if (W.col(j).isZero()) {
      // unloaded row: its conditional is the prior; a joint (upsilon, z)
      // prior draw avoids the sticky heavy-tailed random walk that the
      // alternating updates produce without a likelihood term
      for (int n = 0; n < N; ++n) {
        s.upsilon(j, n) = draw_prior_mixing_scale(s.kinds[j], rng);
        s.Z(j, n) = std::sqrt(s.upsilon(j, n)) * rng.normal();
      }
      continue;
    }
    Eigen::VectorXd wj = W.col(j).cwiseQuotient(s.psi);
    double sj = W.col(j).dot(wj);
    Eigen::RowVectorXd b = wj.transpose() * E + sj * s.Z.row(j);
    Eigen::RowVectorXd zold = s.Z.row(j);
    for (int n = 0; n < N; ++n) {
      double u = 1.0 / (sj + 1.0 / s.upsilon(j, n));
      s.Z(j, n) = u * b[n] + std::sqrt(u) * rng.normal();
    }
    E.noalias() += W.col(j) * (zold - s.Z.row(j));
    for (int n = 0; n < N; ++n)
      s.upsilon(j, n) = draw_conditional_mixing_scale(s.kinds[j], s.Z(j, n), rng);
  }
  for (int j = 0; j < d; ++j)
    if (s.kinds[j].learn_lambda) {
      // conjugate Gamma(1, 1) hyperprior on lambda^2 against the exponential
      // mixing scales
      double lam2 = rng.gamma(1.0 + N, 1.0 + 0.5 * s.upsilon.row(j).sum());
      s.kinds[j].lambda = std::clamp(std::sqrt(lam2), 1e-6, 1e6);
    }
}

void dag_update_weights_and_slab(DagState& s, const Eigen::MatrixXd& Xp,
                                 const Eigen::MatrixXd& Rp, const Hyperparameters& hp,
                                 RngStream& rng) {
  const int d = s.dim(), m = s.n_latent();
  Eigen::VectorXd zz_x = Rp.rowwise().squaredNorm();
  Eigen::VectorXd zz_z = s.Z.rowwise().squaredNorm();
  Eigen::MatrixXd E = dag_residual(s, Xp, Rp);
  for (int i = 0; i < d; ++i) {
    Eigen::RowVectorXd e = E.row(i);
    for (int j = 0; j < i; ++j) {
      if (s.R(i, j)) {
        double g = e.dot(Rp.row(j)) + s.B(i, j) * zz_x[j];
        double u = 1.0 / (zz_x[j] + 1.0 / s.tau_b(i, j));
        double bnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
        if (bnew == 0.0) bnew = kTiny;
        e += (s.B(i, j) - bnew) * Rp.row(j);
        s.B(i, j) = bnew;
        s.tau_b(i, j) = 1.0 / rng.gamma(hp.t_s + 0.5,
                                        hp.t_r + s.B(i, j) * s.B(i, j) / (2.0 * s.psi[i]));
      } else {
        s.tau_b(i, j) = 1.0 / rng.gamma(hp.t_s, hp.t_r);
      }
    }
    if (!s.fix_driving_weights) {
      double g = e.dot(s.Z.row(i)) + s.c_d[i] * zz_z[i];
      double u = 1.0 / (zz_z[i] + 1.0 / s.tau_d[i]);
      double cnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
      if (cnew == 0.0) cnew = kTiny;
      e += (s.c_d[i] - cnew) * s.Z.row(i);
      s.c_d[i] = cnew;
    }
    s.tau_d[i] = 1.0 / rng.gamma(hp.t_s + 0.5,
                                 hp.t_r + s.c_d[i] * s.c_d[i] / (2.0 * s.psi[i]));
    for (int k = 0; k < m; ++k) {
      if (s.Q_l(i, k)) {
        double g = e.dot(s.Z.row(d + k)) + s.C_l(i, k) * zz_z[d + k];
        double u = 1.0 / (zz_z[d + k] + 1.0 / s.tau_l(i, k));
        double cnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
        if (cnew == 0.0) cnew = kTiny;
        e += (s.C_l(i, k) - cnew) * s.Z.row(d + k);
        s.C_l(i, k) = cnew;
        s.tau_l(i, k) = 1.0 / rng.gamma(hp.t_s + 0.5,
                                        hp.t_r + s.C_l(i, k) * s.C_l(i, k) /
                                                     (2.0 * s.psi[i]));
      } else {
        s.tau_l(i, k) = 1.0 / rng.gamma(hp.t_s, hp.t_r);
      }
    }
    E.row(i) = e;
  }
}

void dag_update_sparsity(DagState& s, const Eigen::MatrixXd& Xp, const Eigen::MatrixXd& Rp,
                         const Hyperparameters& hp, RngStream& rng) {
  const int d = s.dim(), m = s.n_latent();
  Eigen::VectorXd zz_x = Rp.rowwise().squaredNorm();
  Eigen::VectorXd zz_z = s.Z.rowwise().squaredNorm();
  Eigen::MatrixXd E = dag_residual(s, Xp, Rp);
  Eigen::MatrixXd u_b = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd u_l = Eigen::MatrixXd::Zero(d, std::max(m, 1));

  for (int i = 0; i < d; ++i) {
    Eigen::RowVectorXd e = E.row(i);
    for (int j = 0; j < i; ++j) {
      double g = e.dot(Rp.row(j)) + s.B(i, j) * zz_x[j];
      double lo = log_inclusion_odds(g, zz_x[j], s.tau_b(i, j), s.psi[i], hp.alpha_m,
                                     s.nu_b[j]);
      int qnew = rng.bernoulli(1.0 / (1.0 + std::exp(-lo))) ? 1 : 0;
      double bold = s.B(i, j);
      if (qnew) {
        double u = 1.0 / (zz_x[j] + 1.0 / s.tau_b(i, j));
        double bnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
        if (bnew == 0.0) bnew = kTiny;
        e += (bold - bnew) * Rp.row(j);
        s.B(i, j) = bnew;
        s.R(i, j) = 1;
      } else {
        e += bold * Rp.row(j);
        s.B(i, j) = 0.0;
        s.R(i, j) = 0;
      }
      int q = s.R(i, j);
      bool uin = q == 1 || rng.bernoulli(s.nu_b[j] * (1.0 - hp.alpha_m) /
                                         (1.0 - s.nu_b[j] * hp.alpha_m));
      if (uin) {
        double enew = rng.beta(hp.alpha_p * hp.alpha_m + q,
                               hp.alpha_p * (1.0 - hp.alpha_m) + 1 - q);
        s.eta_b(i, j) = enew > 0.0 ? enew : kTiny;
      } else {
        s.eta_b(i, j) = 0.0;
      }
      u_b(i, j) = uin ? 1.0 : 0.0;
    }
    for (int k = 0; k < m; ++k) {
      double g = e.dot(s.Z.row(d + k)) + s.C_l(i, k) * zz_z[d + k];
      double lo = log_inclusion_odds(g, zz_z[d + k], s.tau_l(i, k), s.psi[i], hp.alpha_m,
                                     s.nu_l[k]);
      int qnew = rng.bernoulli(1.0 / (1.0 + std::exp(-lo))) ? 1 : 0;
      double cold = s.C_l(i, k);
      if (qnew) {
        double u = 1.0 / (zz_z[d + k] + 1.0 / s.tau_l(i, k));
        double cnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
        if (cnew == 0.0) cnew = kTiny;
        e += (cold - cnew) * s.Z.row(d + k);
        s.C_l(i, k) = cnew;
        s.Q_l(i, k) = 1;
      } else {
        e += cold * s.Z.row(d + k);
        s.C_l(i, k) = 0.0;
        s.Q_l(i, k) = 0;
      }
      int q = s.Q_l(i, k);
      bool uin = q == 1 || rng.bernoulli(s.nu_l[k] * (1.0 - hp.alpha_m) /
                                         (1.0 - s.nu_l[k] * hp.alpha_m));
      if (uin) {
        double enew = rng.beta(hp.alpha_p * hp.alpha_m + q,
                               hp.alpha_p * (1.0 - hp.alpha_m) + 1 - q);
        s.eta_l(i, k) = enew > 0.0 ? enew : kTiny;
      } else {
        s.eta_l(i, k) = 0.0;
      }
      u_l(i, k) = uin ? 1.0 : 0.0;
    }
    E.row(i) = e;
  }
  for (int j = 0; j < d; ++j) {
    // column j of B has d-1-j supported rows
    double ones = u_b.col(j).sum();
    double support = d - 1 - j;
    s.nu_b[j] = rng.beta(hp.beta_p * hp.beta_m + ones,
                         hp.beta_p * (1.0 - hp.beta_m) + support - ones);
  }
  // latent loadings are factor-model columns, not connectivity: they keep the
  // factor-model column rate mean
  for (int k = 0; k < m; ++k) {
    double ones = u_l.col(k).sum();
    s.nu_l[k] = rng.beta(hp.beta_p * hp.beta_m_latent + ones,
                         hp.beta_p * (1.0 - hp.beta_m_latent) + d - ones);
  }
}

double dag_log_likelihood(const DagState& s, const Eigen::MatrixXd& Xp,
                          const Eigen::MatrixXd& Rp) {
  const int d = s.dim(), N = static_cast<int>(Xp.cols());
  Eigen::MatrixXd E = dag_residual(s, Xp, Rp);
  double ll = 0.0;
  for (int i = 0; i < d; ++i)
    ll += -0.5 * N * std::log(2.0 * M_PI * s.psi[i]) -
          0.5 * E.row(i).squaredNorm() / s.psi[i];
  return ll;
}

DagChainResult run_dag_chain(const Dataset& data, const Permutation& p, int m,
                             const Hyperparameters& hp_in, RngStream& rng,
                             const DagChainOptions& opts) {
  data.validate();
  Hyperparameters hp = validate_hyperparameters(hp_in, opts.sparsity_mode);
  const int d = data.dim(), N = data.n_obs();
  if (!p.valid() || p.size() != d)
    throw std::invalid_argument("run_dag_chain: invalid ordering");
  if (m < 0) throw std::invalid_argument("run_dag_chain: m must be non-negative");

  Eigen::MatrixXd Xp(d, N);
  for (int r = 0; r < d; ++r) Xp.row(r) = data.values.row(p.order[r]);

  const int n_keep = hp.n_samples > 0 ? hp.n_samples : (m > 0 ? 6000 : 3000);
  const int n_burn = hp.n_burnin >= 0 ? hp.n_burnin : (m > 0 ? 2000 : 1000);
  const int thin = opts.thin > 0 ? opts.thin : 1;
  const int total = n_burn + n_keep;

  DagState s = init_from_ordering(p, d, m, N, hp, rng);
  bool learn = opts.learn_lambda.value_or(m == 0);
  for (int j = 0; j < d; ++j) s.kinds[j].learn_lambda = learn;
  if (opts.fix_driving_weights) {
    s.fix_driving_weights = true;
    if (opts.fixed_c_d.size() == d) s.c_d = opts.fixed_c_d;
  }

  DagChainResult res;
  res.order = p;
  res.m = m;
  res.n_sweeps = total;
  res.n_burnin = n_burn;
  for (int t = 0; t < total; ++t) {
    dag_update_noise_variances(s, Xp, Xp, hp, rng);
    dag_update_signals_and_scales(s, Xp, Xp, hp, rng);
    dag_update_weights_and_slab(s, Xp, Xp, hp, rng);
    dag_update_sparsity(s, Xp, Xp, hp, rng);
    if (!s.B.allFinite() || !s.Z.allFinite() || !s.psi.allFinite() ||
        !s.C_l.allFinite() || !s.upsilon.allFinite())
      throw std::runtime_error("dag chain diverged (non-finite state) at sweep " +
                               std::to_string(t));
    if (opts.invariant_check_interval > 0 && t % opts.invariant_check_interval == 0)
      s.check_invariants();
    if (t >= n_burn && (t - n_burn) % thin == 0) {
      if (opts.keep_samples) {
        Eigen::VectorXd lam(d);
        for (int j = 0; j < d; ++j) lam[j] = s.kinds[j].lambda;
        res.samples.push_back({s.B, s.eta_b, s.c_d, s.C_l, s.eta_l, s.nu_b, s.nu_l, s.psi,
                               lam, dag_log_likelihood(s, Xp, Xp)});
      }
      if (opts.on_sample) opts.on_sample(s, t);
    }
  }
  s.check_invariants();
  return res;
}

CandidateSelection select_best_candidate(const std::vector<DagChainResult>& chains) {
  if (chains.empty()) throw std::invalid_argument("select_best_candidate: no candidates");
  CandidateSelection sel;
  for (const auto& c : chains) {
    if (c.samples.empty())
      throw std::invalid_argument("select_best_candidate: candidate chain has no samples");
    std::vector<double> lls;
    lls.reserve(c.samples.size());
    for (const auto& s : c.samples) lls.push_back(s.train_ll);
    sel.median_lls.push_back(median_of(std::move(lls)));
  }
  sel.index = 0;
  for (size_t i = 1; i < sel.median_lls.size(); ++i)
    if (sel.median_lls[i] > sel.median_lls[sel.index]) sel.index = static_cast<int>(i);
  return sel;
}

}  // namespace slim
