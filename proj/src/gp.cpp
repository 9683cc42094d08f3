#include "slim/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slim/distributions.hpp"

namespace slim {
namespace {

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

GpHyperState init_gp_hyper(int n_rows, const Hyperparameters& hp, RngStream& rng) {
  GpHyperState g;
  g.kappa = rng.gamma(hp.k_s, hp.k_r);
  g.upsilon.resize(n_rows);
  for (int j = 0; j < n_rows; ++j)
    g.upsilon[j] = std::max(rng.gamma(hp.u_s, g.kappa), 1e-12);
  g.acceptance_counts.assign(n_rows, 0);
  g.proposal_counts.assign(n_rows, 0);
  return g;
}

Eigen::MatrixXd build_covariance(const Eigen::VectorXd& inputs, double ups) {
  if (!(ups > 0.0)) throw std::invalid_argument("build_covariance: ups must be positive");
  if (!inputs.allFinite())
    throw std::invalid_argument("build_covariance: non-finite inputs");
  const int N = static_cast<int>(inputs.size());
  Eigen::MatrixXd K(N, N);
  for (int a = 0; a < N; ++a) {
    K(a, a) = 1.0;
    for (int b = a + 1; b < N; ++b) {
      double dlt = inputs[a] - inputs[b];
      K(a, b) = K(b, a) = std::exp(-ups * dlt * dlt);
    }
  }
  return K;
}

Eigen::RowVectorXd sample_gp_row(const Eigen::VectorXd& b, const Eigen::VectorXd& u,
                                 const Eigen::MatrixXd& K, RngStream& rng,
                                 Eigen::MatrixXd* V_out) {
  const int N = static_cast<int>(K.rows());
  Eigen::MatrixXd M = K;
  for (int n = 0; n < N; ++n) M(n, n) += 1.0 / std::max(u[n], 1e-12);
  Eigen::LLT<Eigen::MatrixXd> llt = cholesky_with_jitter(M);
  Eigen::MatrixXd A = llt.matrixL().solve(K);
  Eigen::MatrixXd V = K - A.transpose() * A;
  V = 0.5 * (V + V.transpose()).eval();
  if (V_out) *V_out = V;
  Eigen::VectorXd mean = V * b;
  Eigen::LLT<Eigen::MatrixXd> lv = cholesky_with_jitter(V);
  Eigen::VectorXd z(N);
  for (int n = 0; n < N; ++n) z[n] = rng.normal();
  return (mean + lv.matrixL() * z).transpose();
}

Eigen::MatrixXd gp_posterior_cov_direct(const Eigen::VectorXd& u,
                                        const Eigen::MatrixXd& K) {
  Eigen::MatrixXd P = K.inverse();
  P.diagonal() += u.cwiseMax(1e-12);
  return P.inverse();
}

void update_gp_hyperparameters(GpHyperState& g, const Eigen::MatrixXd& rows,
                               const std::vector<Eigen::VectorXd>& inputs,
                               const Hyperparameters& hp, RngStream& rng) {
  const int n_rows = static_cast<int>(rows.rows());
  if (static_cast<int>(g.upsilon.size()) != n_rows)
    throw std::invalid_argument("update_gp_hyperparameters: row count mismatch");
  if (inputs.size() != 1 && static_cast<int>(inputs.size()) != n_rows)
    throw std::invalid_argument("update_gp_hyperparameters: need 1 or n_rows input sets");
  Eigen::VectorXd zero;
  for (int j = 0; j < n_rows; ++j) {
    const Eigen::VectorXd& in = inputs.size() == 1 ? inputs[0] : inputs[j];
    Eigen::VectorXd row = rows.row(j).transpose();
    if (zero.size() != row.size()) zero = Eigen::VectorXd::Zero(row.size());
    double cur = log_gaussian_prefactored(
        row, zero, cholesky_with_jitter(build_covariance(in, g.upsilon[j])));
    double star_ups = std::max(rng.gamma(hp.u_s, g.kappa), 1e-12);
    double star = log_gaussian_prefactored(
        row, zero, cholesky_with_jitter(build_covariance(in, star_ups)));
    ++g.proposal_counts[j];
    // independence proposal from the prior: the prior terms cancel
    if (std::log(rng.uniform()) < star - cur) {
      g.upsilon[j] = star_ups;
      ++g.acceptance_counts[j];
    }
  }
  g.kappa = rng.gamma(hp.k_s + n_rows * hp.u_s, hp.k_r + g.upsilon.sum());
}

Eigen::VectorXd gp_posterior_mean(const Eigen::VectorXd& train_in,
                                  const Eigen::VectorXd& train_val,
                                  const Eigen::VectorXd& test_in, double ups) {
  Eigen::MatrixXd K = build_covariance(train_in, ups);
  K.diagonal().array() += 1e-8;  // nugget for conditioning
  Eigen::LLT<Eigen::MatrixXd> llt = cholesky_with_jitter(K);
  Eigen::VectorXd alpha = llt.solve(train_val);
  const int T = static_cast<int>(test_in.size()), N = static_cast<int>(train_in.size());
  Eigen::MatrixXd Ks(T, N);
  for (int t = 0; t < T; ++t)
    for (int n = 0; n < N; ++n) {
      double dlt = test_in[t] - train_in[n];
      Ks(t, n) = std::exp(-ups * dlt * dlt);
    }
  return Ks * alpha;
}

namespace {

// GP replacement for the scale-mixture factor update: each factor row drawn
// from its GP conditional given loadings, noise, and residuals.
void cslim_update_factor_rows(FactorState& s, const Dataset& data, const GpHyperState& g,
                              const Eigen::VectorXd& t, RngStream& rng) {
  const int K = s.n_factors(), N = data.n_obs();
  const bool masked = data.mask.has_value();
  Eigen::MatrixXd Om;
  if (masked) Om = (data.mask->array() != 0.0).cast<double>();
  Eigen::MatrixXd E = data.values - s.C * s.Z;
  if (masked) E = E.cwiseProduct(Om);
  for (int j = 0; j < K; ++j) {
    Eigen::VectorXd wj = s.C.col(j).cwiseQuotient(s.psi);
    Eigen::VectorXd w2j = s.C.col(j).cwiseProduct(wj);
    Eigen::VectorXd u = masked ? Eigen::VectorXd(Om.transpose() * w2j)
                               : Eigen::VectorXd::Constant(N, w2j.sum());
    Eigen::VectorXd b =
        (wj.transpose() * E + u.transpose().cwiseProduct(s.Z.row(j))).transpose();
    Eigen::MatrixXd Kj = build_covariance(t, g.upsilon[j]);
    Eigen::RowVectorXd zold = s.Z.row(j);
    s.Z.row(j) = sample_gp_row(b, u, Kj, rng);
    Eigen::MatrixXd delta = s.C.col(j) * (zold - s.Z.row(j));
    E.noalias() += masked ? delta.cwiseProduct(Om).eval() : delta;
  }
}

GpChainResult run_cslim(const Dataset& data, const Hyperparameters& hp, RngStream& rng,
                        const GpChainOptions& opts) {
  const int d = data.dim(), N = data.n_obs();
  const int K = opts.n_factors;
  if (K < 1) throw std::invalid_argument("run_gp_chain: n_factors required for cslim");
  const int n_keep = hp.n_samples > 0 ? hp.n_samples : 10000;
  const int n_burn = hp.n_burnin >= 0 ? hp.n_burnin : 5000;
  const int thin = opts.thin > 0 ? opts.thin : 1;

  std::vector<SignalKind> kinds(K, SignalKind::laplace(hp.lambda));
  FactorState s = init_factor_state(d, K, N, hp, kinds, rng);
  s.dense_columns = opts.dense_columns;
  for (int j = 0; j < K && j < static_cast<int>(s.dense_columns.size()); ++j)
    if (s.dense_columns[j])
      for (int i = 0; i < d; ++i) {
        s.Q(i, j) = 1;
        s.eta(i, j) = 1.0;
        if (s.C(i, j) == 0.0) s.C(i, j) = 0.3 * rng.normal();
      }
  Eigen::VectorXd t(N);
  for (int n = 0; n < N; ++n) t[n] = n;

  GpChainResult res;
  res.gp = init_gp_hyper(K, hp, rng);
  res.n_sweeps = n_burn + n_keep;
  res.n_burnin = n_burn;
  for (int sweep = 0; sweep < n_burn + n_keep; ++sweep) {
    update_noise_variances(s, data, hp, rng);
    cslim_update_factor_rows(s, data, res.gp, t, rng);
    update_loadings_and_slab(s, data, hp, rng);
    update_sparsity(s, data, hp, rng);
    update_gp_hyperparameters(res.gp, s.Z, {t}, hp, rng);
    if (!s.C.allFinite() || !s.Z.allFinite() || !s.psi.allFinite())
      throw std::runtime_error("cslim chain diverged (non-finite state) at sweep " +
                               std::to_string(sweep));
    if (opts.invariant_check_interval > 0 && sweep % opts.invariant_check_interval == 0)
      s.check_invariants();
    if (sweep >= n_burn && (sweep - n_burn) % thin == 0 && opts.keep_samples)
      res.factor_samples.push_back({s.C, s.eta, s.psi, s.nu, s.p, s.pf});
    if (opts.on_sweep) opts.on_sweep(sweep);
  }
  s.check_invariants();
  return res;
}

GpChainResult run_snim(const Dataset& data, const Permutation& p, int m,
                       const Hyperparameters& hp, RngStream& rng,
                       const GpChainOptions& opts) {
  const int d = data.dim(), N = data.n_obs();
  if (!p.valid() || p.size() != d)
    throw std::invalid_argument("run_gp_chain: invalid snim ordering");
  Eigen::MatrixXd Xp(d, N);
  for (int r = 0; r < d; ++r) Xp.row(r) = data.values.row(p.order[r]);

  const int n_keep = hp.n_samples > 0 ? hp.n_samples : (m > 0 ? 6000 : 3000);
  const int n_burn = hp.n_burnin >= 0 ? hp.n_burnin : (m > 0 ? 2000 : 1000);
  const int thin = opts.thin > 0 ? opts.thin : 1;

  DagState s = init_from_ordering(p, d, m, N, hp, rng);
  bool learn = m == 0;
  for (int j = 0; j < d; ++j) s.kinds[j].learn_lambda = learn;
  Eigen::MatrixXd Yp = Xp;  // GP-transformed parent rows, identity start
  std::vector<Eigen::VectorXd> inputs(d);
  for (int i = 0; i < d; ++i) inputs[i] = Xp.row(i).transpose();

  GpChainResult res;
  res.order = p;
  res.gp = init_gp_hyper(d, hp, rng);
  res.n_sweeps = n_burn + n_keep;
  res.n_burnin = n_burn;
  for (int sweep = 0; sweep < n_burn + n_keep; ++sweep) {
    dag_update_noise_variances(s, Xp, Yp, hp, rng);
    dag_update_signals_and_scales(s, Xp, Yp, hp, rng);
    dag_update_weights_and_slab(s, Xp, Yp, hp, rng);
    dag_update_sparsity(s, Xp, Yp, hp, rng);
    // parent-function rows update after the connectivity weights
    Eigen::MatrixXd Bm = s.masked_b();
    Eigen::MatrixXd E = Xp - Bm * Yp - s.signal_loadings() * s.Z;
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd col = Bm.col(i).cwiseQuotient(s.psi);
      Eigen::VectorXd u = Eigen::VectorXd::Constant(N, Bm.col(i).dot(col));
      Eigen::VectorXd b =
          (col.transpose() * E + u.transpose().cwiseProduct(Yp.row(i))).transpose();
      Eigen::MatrixXd Ki = build_covariance(inputs[i], res.gp.upsilon[i]);
      Eigen::RowVectorXd yold = Yp.row(i);
      Yp.row(i) = sample_gp_row(b, u, Ki, rng);
      E.noalias() += Bm.col(i) * (yold - Yp.row(i));
    }
    update_gp_hyperparameters(res.gp, Yp, inputs, hp, rng);
    if (!s.B.allFinite() || !s.Z.allFinite() || !s.psi.allFinite() || !Yp.allFinite())
      throw std::runtime_error("snim chain diverged (non-finite state) at sweep " +
                               std::to_string(sweep));
    if (opts.invariant_check_interval > 0 && sweep % opts.invariant_check_interval == 0)
      s.check_invariants();
    if (sweep >= n_burn && (sweep - n_burn) % thin == 0 && opts.keep_samples) {
      Eigen::VectorXd lam(d);
      for (int j = 0; j < d; ++j) lam[j] = s.kinds[j].lambda;
      res.snim_samples.push_back({s.B, s.eta_b, s.c_d, s.nu_b, s.psi, lam, Yp,
                                  res.gp.upsilon, dag_log_likelihood(s, Xp, Yp)});
    }
    if (opts.on_sweep) opts.on_sweep(sweep);
  }
  s.check_invariants();
  return res;
}

}  // namespace

GpChainResult run_gp_chain(const Dataset& data, const GpChainMode& mode, int m,
                           const Hyperparameters& hp_in, RngStream& rng,
                           const GpChainOptions& opts) {
  data.validate();
  if (mode.kind == GpChainMode::Kind::Cslim) {
    Hyperparameters hp = validate_hyperparameters(hp_in, SparsityMode::FactorModel);
    return run_cslim(data, hp, rng, opts);
  }
  Hyperparameters hp = validate_hyperparameters(hp_in, SparsityMode::SparseDag);
  if (mode.order) return run_snim(data, *mode.order, m, hp, rng, opts);

  const int d = data.dim();
  if (d > opts.enumeration_bound)
    throw std::invalid_argument(
        "run_gp_chain: snim needs an ordering above the enumeration bound");
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  GpChainResult best;
  std::vector<double> med_lls;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::uint64_t k = 0;
  do {
    Permutation p;
    p.order = idx;
    RngStream sub = rng.substream(0x9410 + k);
    GpChainResult r = run_snim(data, p, m, hp, sub, opts);
    std::vector<double> lls;
    for (const auto& smp : r.snim_samples) lls.push_back(smp.train_ll);
    double med = median_of(std::move(lls));
    med_lls.push_back(med);
    if (med > best_ll) {
      best_ll = med;
      best = std::move(r);
    }
    ++k;
  } while (std::next_permutation(idx.begin(), idx.end()));
  best.enumeration_median_lls = std::move(med_lls);
  return best;
}

}  // namespace slim
