// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Optional arguments select a subset of criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slim/dag_sampler.hpp"
#include "slim/datagen.hpp"
#include "slim/distributions.hpp"
#include "slim/factor_sampler.hpp"
#include "slim/gp.hpp"
#include "slim/metrics.hpp"
#include "slim/model_comparison.hpp"
#include "slim/order_search.hpp"
#include "slim/summary.hpp"
#include "slim/workflow.hpp"

using namespace slim;
namespace fs = std::filesystem;

namespace {

double median_of(std::vector<double> v) {
  return quantile(std::move(v), 0.5);
}

// two-sample Kolmogorov-Smirnov statistic
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// one-sample Kolmogorov-Smirnov statistic against a CDF
double ks_against(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / x.size()),
                  std::abs(f - static_cast<double>(i + 1) / x.size())});
  }
  return d;
}

// does the candidate ordering place every parent before its child?
bool topological_for(const Permutation& cand, const Eigen::MatrixXi& R) {
  Permutation inv = cand.inverse();
  for (int i = 0; i < R.rows(); ++i)
    for (int j = 0; j < R.cols(); ++j)
      if (R(i, j) && inv.order[j] >= inv.order[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 1. Blocked spike/slab Gibbs updates against exhaustive enumeration of the
//    mask plus quadrature over the slab variance, on a d=2 one-factor model
//    with the factor, noise and inclusion rate held fixed. Tolerance 0.02.
bool criterion1(std::string& detail) {
  const double kTol = 0.02;
  const int N = 8;
  const double psi = 1.0, alpha_m = 0.95, nu = 0.6, t_s = 2.0, t_r = 1.0;
  RngStream gen(101);
  Eigen::RowVectorXd z(N);
  for (int n = 0; n < N; ++n) z(n) = gen.normal();
  const double zz = z.squaredNorm();
  Eigen::MatrixXd X(2, N);
  X.row(0) = 0.4 * z;
  X.row(1).setZero();
  for (int i = 0; i < 2; ++i)
    for (int n = 0; n < N; ++n) X(i, n) += std::sqrt(psi) * gen.normal();

  double max_dev = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double g = X.row(i).dot(z);

    // exact: P(q=1) by integrating the slab/spike likelihood ratio over the
    // inverse-gamma prior of the slab variance (log-grid trapezoid)
    const int G = 40000;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < G; ++k) {
      double lt = -10.0 + 20.0 * (k + 0.5) / G;
      double tau = std::exp(lt);
      // p(tau) dtau = InvGamma(t_s, t_r) with the log-grid Jacobian tau
      double w = std::pow(t_r, t_s) / std::tgamma(t_s) * std::pow(tau, -t_s) *
                 std::exp(-t_r / tau) * (20.0 / G);
      double r = std::exp(-0.5 * std::log(tau * zz + 1.0) +
                          g * g / (2.0 * psi * (zz + 1.0 / tau)));
      num += w * r;
      den += w;
    }
    double ratio = num / den;
    double pi = alpha_m * nu;
    double exact = pi * ratio / (pi * ratio + 1.0 - pi);

    // Gibbs: alternate the blocked (q, c) update with the slab-variance draw
    RngStream rng(300 + i);
    double tau = 1.0, c = 0.0;
    int q = 0;
    long hits = 0;
    const int burn = 2000, keep = 100000;
    for (int t = 0; t < burn + keep; ++t) {
      double lo = log_inclusion_odds(g, zz, tau, psi, alpha_m, nu);
      q = rng.bernoulli(1.0 / (1.0 + std::exp(-lo))) ? 1 : 0;
      if (q) {
        double u = 1.0 / (zz + 1.0 / tau);
        c = u * g + std::sqrt(u * psi) * rng.normal();
      } else {
        c = 0.0;
      }
      tau = q ? 1.0 / rng.gamma(t_s + 0.5, t_r + c * c / (2.0 * psi))
              : 1.0 / rng.gamma(t_s, t_r);
      if (t >= burn) hits += q;
    }
    double gibbs = static_cast<double>(hits) / keep;
    max_dev = std::max(max_dev, std::abs(gibbs - exact));
  }
  std::ostringstream os;
  os << "max inclusion-probability deviation " << max_dev << " (tol " << kTol << ")";
  detail = os.str();
  return max_dev < kTol;
}

// ---------------------------------------------------------------------------
// 2. Prior/posterior consistency: marginal draws of (state, data) against a
//    successive-conditional Gibbs run must agree in distribution; two-sample
//    KS on psi and nu at the 1% level.
bool criterion2(std::string& detail) {
  const int kRounds = 5000, kThin = 10;
  const int d = 2, K = 1, N = 10;
  Hyperparameters hp = validate_hyperparameters({}, SparsityMode::FactorModel);
  std::vector<SignalKind> kinds(K, SignalKind::laplace(hp.lambda));

  auto prior_draw = [&](FactorState& s, RngStream& rng) {
    for (int i = 0; i < d; ++i) s.psi[i] = 1.0 / rng.gamma(hp.s_s, hp.s_r);
    for (int j = 0; j < K; ++j)
      s.nu[j] = rng.beta(hp.beta_p * hp.beta_m, hp.beta_p * (1.0 - hp.beta_m));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < K; ++j) {
        s.tau(i, j) = 1.0 / rng.gamma(hp.t_s, hp.t_r);
        bool slab = rng.bernoulli(s.nu[j]);
        s.eta(i, j) = slab ? rng.beta(hp.alpha_p * hp.alpha_m,
                                      hp.alpha_p * (1.0 - hp.alpha_m))
                           : 0.0;
        s.Q(i, j) = s.eta(i, j) > 0.0 && rng.bernoulli(s.eta(i, j)) ? 1 : 0;
        s.C(i, j) = s.Q(i, j) ? std::sqrt(s.tau(i, j) * s.psi[i]) * rng.normal() : 0.0;
        if (s.Q(i, j) && s.C(i, j) == 0.0) s.C(i, j) = 1e-300;
      }
    for (int j = 0; j < K; ++j)
      for (int n = 0; n < N; ++n) {
        s.upsilon(j, n) = draw_prior_mixing_scale(kinds[j], rng);
        s.Z(j, n) = std::sqrt(s.upsilon(j, n)) * rng.normal();
      }
  };
  auto emit_data = [&](const FactorState& s, Dataset& data, RngStream& rng) {
    data.values = s.C * s.Z;
    for (int i = 0; i < d; ++i)
      for (int n = 0; n < N; ++n) data.values(i, n) += std::sqrt(s.psi[i]) * rng.normal();
  };

  RngStream rng_m(777), rng_s(778);
  FactorState ms = init_factor_state(d, K, N, hp, kinds, rng_m);
  FactorState ss = init_factor_state(d, K, N, hp, kinds, rng_s);
  Dataset data;
  data.values.resize(d, N);
  data.names = {"a", "b"};
  prior_draw(ss, rng_s);

  std::vector<double> psi_m, nu_m, psi_s, nu_s;
  for (int r = 0; r < kRounds; ++r) {
    prior_draw(ms, rng_m);
    psi_m.push_back(ms.psi[0]);
    nu_m.push_back(ms.nu[0]);
    for (int t = 0; t < kThin; ++t) {
      emit_data(ss, data, rng_s);
      update_noise_variances(ss, data, hp, rng_s);
      update_factors_and_scales(ss, data, hp, rng_s);
      update_loadings_and_slab(ss, data, hp, rng_s);
      update_sparsity(ss, data, hp, rng_s);
    }
    psi_s.push_back(ss.psi[0]);
    nu_s.push_back(ss.nu[0]);
  }
  // 1% critical value for n = m = 5000
  const double crit = 1.628 * std::sqrt(2.0 / kRounds);
  double d_psi = ks_two_sample(psi_m, psi_s);
  double d_nu = ks_two_sample(nu_m, nu_s);
  std::ostringstream os;
  os << "KS(psi) " << d_psi << ", KS(nu) " << d_nu << " (1% critical " << crit << ")";
  detail = os.str();
  return d_psi < crit && d_nu < crit;
}

// ---------------------------------------------------------------------------
// 3. Scale-mixture draws against the closed-form Laplace and Cauchy CDFs.
bool criterion3(std::string& detail) {
  const int n = 100000;
  const double kTol = 0.02;
  RngStream rng(404);
  std::vector<double> lap(n), cau(n);
  const double lam = std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    lap[i] = sample_heavy_tailed(SignalKind::laplace(lam), rng);
    cau[i] = sample_heavy_tailed(SignalKind::cauchy(), rng);
  }
  double d_lap = ks_against(lap, [&](double x) {
    return x < 0 ? 0.5 * std::exp(lam * x) : 1.0 - 0.5 * std::exp(-lam * x);
  });
  double d_cau =
      ks_against(cau, [](double x) { return 0.5 + std::atan(x) / M_PI; });
  std::ostringstream os;
  os << "KS(laplace) " << d_lap << ", KS(cauchy) " << d_cau << " (tol " << kTol << ")";
  detail = os.str();
  return d_lap < kTol && d_cau < kTol;
}

// ---------------------------------------------------------------------------
// 4. Ordering recovery: 50 generated DAG models, d=5, N=1000; a valid
//    topological ordering of the truth must appear in the top-10 candidates
//    in at least 70% of the runs.
bool criterion4(std::string& detail) {
  const int kRuns = 50;
  int hits = 0;
  for (int s = 0; s < kRuns; ++s) {
    auto [raw, gt] = generate_lingam_suite(5, 1000, 9000 + s);
    Dataset data = standardize(raw);
    Hyperparameters hp;
    hp.n_samples = 3000;
    hp.n_burnin = 1500;
    RngStream rng(5000 + s);
    FactorChainResult res = run_factor_chain(data, hp, FactorMode::OrderSearch, rng);
    hp = validate_hyperparameters(hp, SparsityMode::FactorModel);
    auto cands = top_candidates(res.candidates, hp.m_top);
    if (cands.empty() && !res.samples.empty()) cands.push_back(res.samples.back().p);
    bool ok = false;
    for (const auto& c : cands) ok = ok || topological_for(c, gt.R_true);
    hits += ok;
  }
  std::ostringstream os;
  os << hits << "/" << kRuns << " runs keep a valid ordering in the top 10 (need 35)";
  detail = os.str();
  return hits >= 35;
}

// ---------------------------------------------------------------------------
// 5. Model comparison on 100 datasets (half true DAGs, half true factor
//    models), d=5, N=500, 20% test: selection accuracy at least 0.85.
bool criterion5(std::string& detail) {
  const int kRuns = 100;
  fs::path out = fs::temp_directory_path() / "slim_acceptance_c5";
  int correct = 0;
  for (int s = 0; s < kRuns; ++s) {
    bool true_dag = s % 2 == 0;
    RunConfig cfg;
    cfg.model = ModelKind::Dag;
    cfg.generator = true_dag ? "lingam-suite d=5 N=500" : "fm d=5 N=500";
    cfg.seed = 2000 + s;
    cfg.out_dir = (out / std::to_string(s)).string();
    cfg.n_pred_draws = 30;
    cfg.hp.n_samples = 2500;
    cfg.hp.n_burnin = 1250;
    cfg.hp.n_rep = 300;
    WorkflowResult r = run_workflow(cfg);
    if (r.has_comparison && r.comparison.selected == (true_dag ? "dag" : "fm")) ++correct;
    fs::remove_all(cfg.out_dir);
  }
  fs::remove_all(out);
  std::ostringstream os;
  os << correct << "/" << kRuns << " correct selections (need 85)";
  detail = os.str();
  return correct >= 85;
}

// ---------------------------------------------------------------------------
// 6. Two-node latent toy: with a Cauchy-tagged latent signal the chains must
//    recover the generating direction in >= 9/10 runs; with an all-Laplace
//    latent both directions must appear and neither may exceed 9/10.
bool criterion6(std::string& detail) {
  // the two equivalent structures: the generating graph keeps the x1 -> x2
  // edge; the alternative drops it and explains the dependence through a
  // latent loading both variables. Controlled setting: driving loadings fixed
  // to the identity, dense-leaning edge prior, unit-variance Laplace drives.
  // The near-noiseless toy mixes slowly, so the chains run long enough for
  // each to commit to one mode; the classifier is the median edge weight.
  auto run_variant = [&](char variant) {
    auto [data, gt] = generate_toy_latent_pair(variant, 500, 606);
    Hyperparameters hp;
    hp.n_samples = 20000;
    hp.n_burnin = 6000;
    hp.lambda = std::sqrt(2.0);
    Hyperparameters hpv = validate_hyperparameters(hp, SparsityMode::DenseDag);
    DagChainOptions opts;
    opts.sparsity_mode = SparsityMode::DenseDag;
    opts.fix_driving_weights = true;
    opts.fixed_c_d = Eigen::VectorXd::Ones(2);
    int with_edge = 0;
    for (int c = 0; c < 10; ++c) {
      RngStream rng(70 + c, static_cast<std::uint64_t>(variant));
      DagChainResult res = run_dag_chain(data, Permutation::identity(2), 1, hp, rng, opts);
      DagSummary sum = summarize_dag_chain(res, hpv);
      with_edge += std::abs(sum.b_median(1, 0)) > 0.5 ? 1 : 0;
    }
    return with_edge;
  };
  int edge_i = run_variant('i');
  int edge_u = run_variant('u');
  std::ostringstream os;
  os << "tagged latent: " << edge_i << "/10 keep the generating edge; untagged "
     << edge_u << "/10";
  detail = os.str();
  return edge_i >= 9 && edge_u >= 1 && edge_u <= 9;
}

// ---------------------------------------------------------------------------
// 7. Latent-DAG recovery study: 20 generated datasets, d=5, m=1, N=500;
//    median structural errors <= 2.5 and median AUC >= 0.85 end to end.
bool criterion7(std::string& detail) {
  const int kRuns = 20;
  fs::path out = fs::temp_directory_path() / "slim_acceptance_c7";
  std::vector<double> errors, aucs;
  for (int s = 0; s < kRuns; ++s) {
    RunConfig cfg;
    cfg.model = ModelKind::DagLatent;
    cfg.generator = "latent-suite d=5 m=1 N=500";
    cfg.seed = 1 + s;
    cfg.out_dir = (out / std::to_string(s)).string();
    cfg.n_pred_draws = 10;
    cfg.hp.n_rep = 100;
    WorkflowResult r = run_workflow(cfg);
    const DagSummary& best = r.dag_summaries[r.best_candidate];
    StructureMetrics m =
        structure_metrics(best.eta_median, best.adjacency, r.truth->R_true);
    errors.push_back(m.structural_errors);
    aucs.push_back(m.auc);
    fs::remove_all(cfg.out_dir);
  }
  fs::remove_all(out);
  double med_err = median_of(errors), med_auc = median_of(aucs);
  std::ostringstream os;
  os << "median structural errors " << med_err << " (<= 2.5), median AUC " << med_auc
     << " (>= 0.85)";
  detail = os.str();
  return med_err <= 2.5 && med_auc >= 0.85;
}

// ---------------------------------------------------------------------------
// 8. Non-linear DAG toy: across all 24 orderings x 5 seeds at N=100, the
//    median structural error is 0 exactly for the two generating-compatible
//    orderings, and those two have the highest median test log-likelihoods.
bool criterion8(std::string& detail) {
  const int kSeeds = 5;
  std::vector<Permutation> orders;
  {
    std::vector<int> idx{0, 1, 2, 3};
    do
      orders.push_back(Permutation{idx});
    while (std::next_permutation(idx.begin(), idx.end()));
  }
  Hyperparameters hp;
  hp.n_samples = 400;
  hp.n_burnin = 150;
  hp.n_rep = 100;
  Hyperparameters hp_dag = validate_hyperparameters(hp, SparsityMode::SparseDag);

  std::vector<std::vector<double>> errs(orders.size()), tlls(orders.size());
  for (int s = 0; s < kSeeds; ++s) {
    auto [raw, gt] = generate_nonlinear_toy(100, 808 + s);
    auto [train_raw, test_raw] = partition(raw, 0.2, 808 + s);
    StandardizeStats st;
    Dataset train = standardize(train_raw, &st);
    Dataset test = test_raw;
    for (int i = 0; i < 4; ++i)
      test.values.row(i) = (test.values.row(i).array() - st.mean[i]) / st.stddev[i];

    for (size_t k = 0; k < orders.size(); ++k) {
      RngStream rng(900 + s, k);
      GpChainResult res = run_gp_chain(train, GpChainMode::snim(orders[k]), 0, hp, rng);
      const int d = 4;
      std::vector<Eigen::MatrixXd> eta_draws;
      Eigen::VectorXd nu_bar = Eigen::VectorXd::Zero(d);
      for (const auto& smp : res.snim_samples) {
        eta_draws.push_back(smp.eta_b);
        nu_bar += smp.nu_b;
      }
      nu_bar /= static_cast<double>(res.snim_samples.size());
      MatrixQuantiles eq = summarize_samples(eta_draws);
      const auto& ord = orders[k].order;
      Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(d, d);
      Eigen::MatrixXd eta_med = Eigen::MatrixXd::Zero(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < i; ++j) {
          eta_med(ord[i], ord[j]) = eq.median(i, j);
          adj(ord[i], ord[j]) =
              eq.median(i, j) > hp_dag.alpha_m * (1.0 - nu_bar[j]) ? 1 : 0;
        }
      StructureMetrics m = structure_metrics(eta_med, adj, gt.R_true);
      errs[k].push_back(m.structural_errors);

      Eigen::MatrixXd train_pos(d, train.n_obs()), test_pos(d, test.n_obs());
      for (int i = 0; i < d; ++i) {
        train_pos.row(i) = train.values.row(ord[i]);
        test_pos.row(i) = test.values.row(ord[i]);
      }
      std::vector<double> draw_lls;
      for (size_t t = 0; t < res.snim_samples.size(); t += 40) {
        RngStream pr(901 + s, 0x7E5700 + t);
        draw_lls.push_back(predictive_log_density_snim(train_pos, test_pos,
                                                       res.snim_samples[t], hp_dag, pr));
      }
      tlls[k].push_back(median_of(draw_lls));
    }
  }

  std::set<std::vector<int>> good{{0, 1, 2, 3}, {0, 2, 1, 3}};
  bool errors_ok = true;
  double min_good_ll = 1e300, best_bad_ll = -1e300;
  for (size_t k = 0; k < orders.size(); ++k) {
    double med_err = median_of(errs[k]);
    double med_ll = median_of(tlls[k]);
    if (good.count(orders[k].order)) {
      errors_ok = errors_ok && med_err == 0.0;
      min_good_ll = std::min(min_good_ll, med_ll);
    } else {
      errors_ok = errors_ok && med_err >= 1.0;
      best_bad_ll = std::max(best_bad_ll, med_ll);
    }
  }
  // both generating-compatible orderings must beat every other ordering
  bool lls_ok = min_good_ll > best_bad_ll;
  std::ostringstream os;
  os << "median errors " << (errors_ok ? "separate" : "do not separate")
     << " the generating orderings; test-likelihood margin "
     << (min_good_ll - best_bad_ll);
  detail = os.str();
  return errors_ok && lls_ok;
}

// ---------------------------------------------------------------------------
// 9. Stable GP posterior covariance equals the direct inverse to 1e-8.
bool criterion9(std::string& detail) {
  const double kTol = 1e-8;
  RngStream rng(909);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 5;
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = i + 0.3 * rng.normal();
    Eigen::MatrixXd K = build_covariance(t, 0.2 + 2.0 * rng.uniform());
    Eigen::VectorXd u(n), b(n);
    for (int i = 0; i < n; ++i) {
      u[i] = rng.gamma(2.0, 0.5);
      b[i] = rng.normal();
    }
    Eigen::MatrixXd V;
    sample_gp_row(b, u, K, rng, &V);
    worst = std::max(worst, (V - gp_posterior_cov_direct(u, K)).cwiseAbs().maxCoeff());
  }
  std::ostringstream os;
  os << "max |V - direct| " << worst << " (tol " << kTol << ")";
  detail = os.str();
  return worst < kTol;
}

// ---------------------------------------------------------------------------
// 10. Missing-value likelihood equals direct per-entry evaluation to 1e-10.
bool criterion10(std::string& detail) {
  const double kTol = 1e-10;
  RngStream rng(1010);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 4, K = 2, N = 30;
    Dataset data;
    data.values.resize(d, N);
    data.names = {"a", "b", "c", "e"};
    Eigen::MatrixXd C(d, K), Z(K, N);
    Eigen::VectorXd psi(d);
    for (int i = 0; i < d; ++i) {
      psi[i] = 0.2 + rng.uniform();
      for (int j = 0; j < K; ++j) C(i, j) = rng.normal();
    }
    for (int j = 0; j < K; ++j)
      for (int n = 0; n < N; ++n) Z(j, n) = rng.normal();
    data.mask = Eigen::MatrixXd::Ones(d, N);
    for (int i = 0; i < d; ++i)
      for (int n = 0; n < N; ++n) {
        data.values(i, n) = rng.normal();
        if (rng.bernoulli(0.25)) (*data.mask)(i, n) = 0.0;
      }
    Eigen::MatrixXd M = C * Z;
    double want = 0.0;
    for (int i = 0; i < d; ++i)
      for (int n = 0; n < N; ++n)
        if ((*data.mask)(i, n) == 0.0) {
          double r = data.values(i, n) - M(i, n);
          want += -0.5 * std::log(2.0 * M_PI * psi[i]) - 0.5 * r * r / psi[i];
        }
    worst = std::max(worst,
                     std::abs(missing_value_log_density(data, C, Z, psi) - want));
  }
  std::ostringstream os;
  os << "max |mixture - direct| " << worst << " (tol " << kTol << ")";
  detail = os.str();
  return worst < kTol;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.insert(std::atoi(argv[a]));

  struct Entry {
    int id;
    bool (*fn)(std::string&);
  };
  const Entry entries[] = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                           {4, criterion4}, {5, criterion5}, {6, criterion6},
                           {7, criterion7}, {8, criterion8}, {9, criterion9},
                           {10, criterion10}};
  bool all_ok = true;
  for (const auto& e : entries) {
    if (!wanted.empty() && !wanted.count(e.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = e.fn(detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s — %s [%.1fs]\n", e.id, ok ? "PASS" : "FAIL",
                detail.c_str(), secs);
    std::fflush(stdout);
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
