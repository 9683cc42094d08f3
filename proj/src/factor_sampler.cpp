#include "slim/factor_sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace slim {
namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

bool is_dense(const FactorState& s, int j) {
  return j < static_cast<int>(s.dense_columns.size()) && s.dense_columns[j];
}

}  // namespace

double log_inclusion_odds(double g, double zz, double tau, double psi, double alpha_m,
                          double nu) {
  // prior odds times the slab/spike marginal likelihood ratio
  double prior = std::log(alpha_m * nu) - std::log1p(-alpha_m * nu);
  double denom = zz + 1.0 / tau;
  return prior - 0.5 * std::log(tau) - 0.5 * std::log(denom) +
         g * g / (2.0 * psi * denom);
}

void update_noise_variances(FactorState& s, const Dataset& data, const Hyperparameters& hp,
                            RngStream& rng) {
  const int d = s.dim(), K = s.n_factors(), N = data.n_obs();
  Eigen::MatrixXd E = data.values - s.C * s.Z;
  for (int i = 0; i < d; ++i) {
    double u = 0.0;
    int cnt = 0;
    for (int n = 0; n < N; ++n)
      if (data.observed(i, n)) {
        u += E(i, n) * E(i, n);
        ++cnt;
      }
    // only active loadings carry a psi-scaled slab prior
    int active = 0;
    for (int j = 0; j < K; ++j)
      if (s.Q(i, j)) {
        u += s.C(i, j) * s.C(i, j) / s.tau(i, j);
        ++active;
      }
    s.psi[i] = 1.0 / rng.gamma(hp.s_s + 0.5 * (cnt + active), hp.s_r + 0.5 * u);
  }
}

void update_factors_and_scales(FactorState& s, const Dataset& data,
                               const Hyperparameters& hp, RngStream& rng) {
  (void)hp;
  const int K = s.n_factors(), N = data.n_obs();
  const bool masked = data.mask.has_value();
  Eigen::MatrixXd Om;
  if (masked) Om = (data.mask->array() != 0.0).cast<double>();
  Eigen::MatrixXd E = data.values - s.C * s.Z;
  if (masked) E = E.cwiseProduct(Om);

  for (int j = 0; j < K; ++j) {
    if (s.C.col(j).isZero()) {
      // pruned column: its conditional is the prior; a joint (upsilon, z)
      // prior draw avoids the sticky heavy-tailed random walk that the
      // alternating updates produce without a likelihood term
      for (int n = 0; n < N; ++n) {
        s.upsilon(j, n) = draw_prior_mixing_scale(s.kinds[j], rng);
        s.Z(j, n) = std::sqrt(s.upsilon(j, n)) * rng.normal();
      }
      continue;
    }
    Eigen::VectorXd wj = s.C.col(j).cwiseQuotient(s.psi);
    Eigen::VectorXd w2j = s.C.col(j).cwiseProduct(wj);
    Eigen::RowVectorXd sj = masked ? Eigen::RowVectorXd(w2j.transpose() * Om)
                                   : Eigen::RowVectorXd::Constant(N, w2j.sum());
    // elements of one factor row are conditionally independent across n
    Eigen::RowVectorXd b = wj.transpose() * E + sj.cwiseProduct(s.Z.row(j));
    Eigen::RowVectorXd zold = s.Z.row(j);
    for (int n = 0; n < N; ++n) {
      double u = 1.0 / (sj[n] + 1.0 / s.upsilon(j, n));
      s.Z(j, n) = u * b[n] + std::sqrt(u) * rng.normal();
    }
    Eigen::MatrixXd delta = s.C.col(j) * (zold - s.Z.row(j));
    E.noalias() += masked ? delta.cwiseProduct(Om).eval() : delta;
    for (int n = 0; n < N; ++n)
      s.upsilon(j, n) = draw_conditional_mixing_scale(s.kinds[j], s.Z(j, n), rng);
  }
}

void update_loadings_and_slab(FactorState& s, const Dataset& data,
                              const Hyperparameters& hp, RngStream& rng) {
  const int d = s.dim(), K = s.n_factors();
  const bool masked = data.mask.has_value();
  Eigen::MatrixXd Om;
  Eigen::MatrixXd zzm;  // K x d: per-row observed sum of squared signals
  Eigen::VectorXd zz_full;
  if (masked) {
    Om = (data.mask->array() != 0.0).cast<double>();
    zzm = s.Z.array().square().matrix() * Om.transpose();
  } else {
    zz_full = s.Z.rowwise().squaredNorm();
  }
  Eigen::MatrixXd E = data.values - s.C * s.Z;

  for (int i = 0; i < d; ++i) {
    Eigen::RowVectorXd e = E.row(i);
    Eigen::RowVectorXd eo = masked ? e.cwiseProduct(Om.row(i)).eval() : e;
    for (int j = 0; j < K; ++j) {
      double zz = masked ? zzm(j, i) : zz_full[j];
      if (s.Q(i, j)) {
        double g = (masked ? eo : e).dot(s.Z.row(j)) + s.C(i, j) * zz;
        double u = 1.0 / (zz + 1.0 / s.tau(i, j));
        double cnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
        if (cnew == 0.0) cnew = kTiny;
        e += (s.C(i, j) - cnew) * s.Z.row(j);
        if (masked) eo = e.cwiseProduct(Om.row(i));
        s.C(i, j) = cnew;
      }
      // pruned entries see no data through the spike: slab variance refreshes
      // from its prior
      s.tau(i, j) =
          s.Q(i, j) ? 1.0 / rng.gamma(hp.t_s + 0.5,
                                      hp.t_r + s.C(i, j) * s.C(i, j) / (2.0 * s.psi[i]))
                    : 1.0 / rng.gamma(hp.t_s, hp.t_r);
    }
    E.row(i) = e;
  }
}

void update_sparsity(FactorState& s, const Dataset& data, const Hyperparameters& hp,
                     RngStream& rng) {
  const int d = s.dim(), K = s.n_factors();
  const bool masked = data.mask.has_value();
  Eigen::MatrixXd Om, zzm;
  Eigen::VectorXd zz_full;
  if (masked) {
    Om = (data.mask->array() != 0.0).cast<double>();
    zzm = s.Z.array().square().matrix() * Om.transpose();
  } else {
    zz_full = s.Z.rowwise().squaredNorm();
  }
  Eigen::MatrixXd E = data.values - s.C * s.Z;
  Eigen::MatrixXd u_mat = Eigen::MatrixXd::Ones(d, K);  // auxiliary indicators

  for (int i = 0; i < d; ++i) {
    Eigen::RowVectorXd e = E.row(i);
    Eigen::RowVectorXd eo = masked ? e.cwiseProduct(Om.row(i)).eval() : e;
    for (int j = 0; j < K; ++j) {
      double zz = masked ? zzm(j, i) : zz_full[j];
      double g = (masked ? eo : e).dot(s.Z.row(j)) + s.C(i, j) * zz;
      int qnew = 1;
      if (!is_dense(s, j)) {
        double lo = log_inclusion_odds(g, zz, s.tau(i, j), s.psi[i], hp.alpha_m, s.nu[j]);
        qnew = rng.bernoulli(1.0 / (1.0 + std::exp(-lo))) ? 1 : 0;
      }
      double cold = s.C(i, j);
      if (qnew) {
        // the weight is redrawn from its conditional so the blocked move is exact
        double u = 1.0 / (zz + 1.0 / s.tau(i, j));
        double cnew = u * g + std::sqrt(u * s.psi[i]) * rng.normal();
        if (cnew == 0.0) cnew = kTiny;
        e += (cold - cnew) * s.Z.row(j);
        s.C(i, j) = cnew;
        s.Q(i, j) = 1;
      } else {
        e += cold * s.Z.row(j);
        s.C(i, j) = 0.0;
        s.Q(i, j) = 0;
      }
      if (masked) eo = e.cwiseProduct(Om.row(i));

      if (is_dense(s, j)) {
        s.eta(i, j) = 1.0;
      } else {
        int q = s.Q(i, j);
        bool uin = q == 1 ||
                   rng.bernoulli(s.nu[j] * (1.0 - hp.alpha_m) / (1.0 - s.nu[j] * hp.alpha_m));
        if (uin) {
          double enew = rng.beta(hp.alpha_p * hp.alpha_m + q,
                                 hp.alpha_p * (1.0 - hp.alpha_m) + 1 - q);
          s.eta(i, j) = enew > 0.0 ? enew : kTiny;
        } else {
          s.eta(i, j) = 0.0;
        }
        u_mat(i, j) = uin ? 1.0 : 0.0;
      }
    }
    E.row(i) = e;
  }
  for (int j = 0; j < K; ++j) {
    double ones = u_mat.col(j).sum();
    s.nu[j] = rng.beta(hp.beta_p * hp.beta_m + ones,
                       hp.beta_p * (1.0 - hp.beta_m) + d - ones);
  }
}

FactorChainResult run_factor_chain(const Dataset& data, const Hyperparameters& hp_in,
                                   FactorMode mode, RngStream& rng,
                                   const FactorChainOptions& opts) {
  data.validate();
  Hyperparameters hp = validate_hyperparameters(hp_in, SparsityMode::FactorModel);
  const int d = data.dim(), N = data.n_obs();
  int K = opts.n_factors;
  if (K < 0) {
    if (mode != FactorMode::OrderSearch)
      throw std::invalid_argument("run_factor_chain: n_factors required outside order search");
    K = d + opts.m_latent;
  }
  if (K < 1) throw std::invalid_argument("run_factor_chain: need at least one factor");
  if (mode == FactorMode::MissingValues && !data.mask)
    throw std::invalid_argument("run_factor_chain: missing-values mode needs a mask");

  std::vector<SignalKind> kinds = opts.kinds;
  if (kinds.empty()) {
    int m = std::min(opts.m_latent, K);
    for (int j = 0; j < K - m; ++j) kinds.push_back(SignalKind::laplace(hp.lambda));
    for (int j = 0; j < m; ++j) kinds.push_back(SignalKind::student_t(hp.theta));
  }
  if (static_cast<int>(kinds.size()) != K)
    throw std::invalid_argument("run_factor_chain: kind count does not match factor count");

  const int n_keep = hp.n_samples > 0 ? hp.n_samples : 10000;
  const int n_burn = hp.n_burnin >= 0 ? hp.n_burnin : 5000;
  const int thin = opts.thin > 0 ? opts.thin : 1;
  const int total = n_burn + n_keep;

  FactorState s = init_factor_state(d, K, N, hp, kinds, rng);
  s.dense_columns = opts.dense_columns;
  for (int j = 0; j < K && j < static_cast<int>(s.dense_columns.size()); ++j)
    if (s.dense_columns[j])
      for (int i = 0; i < d; ++i) {
        s.Q(i, j) = 1;
        s.eta(i, j) = 1.0;
        if (s.C(i, j) == 0.0) s.C(i, j) = 0.3 * rng.normal();
        if (s.C(i, j) == 0.0) s.C(i, j) = kTiny;
      }

  FactorChainResult res;
  res.n_sweeps = total;
  res.n_burnin = n_burn;
  for (int t = 0; t < total; ++t) {
    update_noise_variances(s, data, hp, rng);
    update_factors_and_scales(s, data, hp, rng);
    update_loadings_and_slab(s, data, hp, rng);
    update_sparsity(s, data, hp, rng);
    if (mode == FactorMode::OrderSearch) {
      double cur_ll = std::numeric_limits<double>::quiet_NaN();
      for (int r = 0; r < hp.mh_perm_reps; ++r) {
        bool acc = mh_update_permutations(s, data, rng, &cur_ll);
        ++res.mh_proposals;
        if (acc) {
          ++res.mh_accepts;
          if (t >= n_burn) res.candidates.record(s.p);
        }
      }
    }
    if (!s.C.allFinite() || !s.Z.allFinite() || !s.psi.allFinite() ||
        !s.upsilon.allFinite())
      throw std::runtime_error("factor chain diverged (non-finite state) at sweep " +
                               std::to_string(t));
    if (opts.invariant_check_interval > 0 && t % opts.invariant_check_interval == 0)
      s.check_invariants();
    if (t >= n_burn && (t - n_burn) % thin == 0) {
      if (opts.keep_samples)
        res.samples.push_back({s.C, s.eta, s.psi, s.nu, s.p, s.pf});
      if (opts.on_sample) opts.on_sample(s, t);
    }
  }
  s.check_invariants();
  return res;
}

}  // namespace slim
