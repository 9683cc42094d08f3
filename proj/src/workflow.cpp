#include "slim/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "slim/dag_sampler.hpp"
#include "slim/factor_sampler.hpp"
#include "slim/metrics.hpp"
#include "slim/order_search.hpp"

namespace slim {
namespace {

std::map<std::string, std::string> parse_kv(std::istringstream& ss) {
  std::map<std::string, std::string> kv;
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("generator spec: expected key=value, got '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

int kv_int(const std::map<std::string, std::string>& kv, const std::string& key,
           int fallback = -1) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback < 0) throw std::invalid_argument("generator spec: missing " + key);
    return fallback;
  }
  return std::stoi(it->second);
}

// Evenly spaced draw indices used for test-likelihood scoring.
std::vector<int> pred_indices(int n_samples, int n_pred) {
  int n = std::min(std::max(n_pred, 1), n_samples);
  std::vector<int> idx(n);
  for (int k = 0; k < n; ++k)
    idx[k] = static_cast<int>((k + 0.5) * n_samples / n);
  return idx;
}

Eigen::MatrixXd to_position_space(const Eigen::MatrixXd& X, const Permutation& p) {
  Eigen::MatrixXd Xp(X.rows(), X.cols());
  for (int i = 0; i < p.size(); ++i) Xp.row(i) = X.row(p.order[i]);
  return Xp;
}

void append_lls_csv(std::string& csv, const std::vector<std::string>& cols,
                    const std::vector<std::vector<double>>& lls) {
  std::ostringstream out;
  out.precision(17);
  for (size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  size_t rows = 0;
  for (const auto& v : lls) rows = std::max(rows, v.size());
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < lls.size(); ++c) {
      if (c) out << ',';
      if (r < lls[c].size()) out << lls[c][r];
    }
    out << '\n';
  }
  csv = out.str();
}

}  // namespace

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "fm") return ModelKind::Fm;
  if (s == "dag") return ModelKind::Dag;
  if (s == "dag-latent") return ModelKind::DagLatent;
  if (s == "cslim") return ModelKind::Cslim;
  if (s == "snim") return ModelKind::Snim;
  throw std::invalid_argument("unknown model kind '" + s +
                              "' (expected fm, dag, dag-latent, cslim or snim)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Fm: return "fm";
    case ModelKind::Dag: return "dag";
    case ModelKind::DagLatent: return "dag-latent";
    case ModelKind::Cslim: return "cslim";
    case ModelKind::Snim: return "snim";
  }
  return "?";
}

int worker_count() {
  if (const char* env = std::getenv("SLIM_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = std::min(worker_count(), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::pair<Dataset, std::optional<GroundTruthModel>> load_or_generate(const RunConfig& cfg) {
  if (cfg.data_path.empty() == cfg.generator.empty())
    throw std::invalid_argument("exactly one of data path and generator spec required");
  if (!cfg.data_path.empty()) return {read_csv(cfg.data_path), std::nullopt};

  std::istringstream ss(cfg.generator);
  std::string name;
  ss >> name;
  auto kv = parse_kv(ss);
  if (name == "lingam-suite") {
    auto [data, gt] = generate_lingam_suite(kv_int(kv, "d"), kv_int(kv, "N"), cfg.seed);
    return {data, gt};
  }
  if (name == "latent-suite") {
    auto [data, gt] =
        generate_latent_suite(kv_int(kv, "d"), kv_int(kv, "m", 1), kv_int(kv, "N"), cfg.seed);
    return {data, gt};
  }
  if (name == "toy-latent") {
    auto it = kv.find("variant");
    char variant = it == kv.end() ? 'i' : it->second[0];
    auto [data, gt] = generate_toy_latent_pair(variant, kv_int(kv, "N"), cfg.seed);
    return {data, gt};
  }
  if (name == "nonlinear-toy") {
    auto [data, gt] = generate_nonlinear_toy(kv_int(kv, "N"), cfg.seed);
    return {data, gt};
  }
  if (name == "fm") {
    auto [data, gt] = generate_fm_dataset(kv_int(kv, "d"), kv_int(kv, "N"), cfg.seed);
    return {data, gt};
  }
  throw std::invalid_argument("unknown generator '" + name + "'");
}

WorkflowResult run_workflow(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  WorkflowResult res;

  auto write_json = [&](const std::string& rel, const json& j) {
    write_text(cfg.out_dir + "/" + rel, j.dump(2) + "\n");
    res.files.push_back(rel);
  };

  auto [raw, truth] = load_or_generate(cfg);
  res.truth = truth;
  if (truth) write_json("ground_truth.json", to_json(*truth));

  // Step 1: partition, then standardize the training block and carry its
  // statistics onto the test block.
  const bool with_test = cfg.model != ModelKind::Cslim && cfg.test_fraction > 0.0;
  Dataset train = raw, test;
  if (with_test) std::tie(train, test) = partition(raw, cfg.test_fraction, cfg.seed);
  StandardizeStats stats;
  train = standardize(train, &stats);
  if (with_test)
    for (int i = 0; i < test.dim(); ++i)
      test.values.row(i) = (test.values.row(i).array() - stats.mean[i]) / stats.stddev[i];
  write_csv(train, cfg.out_dir + "/train.csv");
  res.files.push_back("train.csv");
  if (with_test) {
    write_csv(test, cfg.out_dir + "/test.csv");
    res.files.push_back("test.csv");
  }
  res.train = train;
  res.test = test;
  const int d = train.dim();

  std::vector<std::string> ll_labels;
  std::vector<std::vector<double>> ll_columns;
  auto score_draws = [&](int n_samples, const std::function<double(int, RngStream&)>& eval) {
    auto idx = pred_indices(n_samples, cfg.n_pred_draws);
    std::vector<double> lls(idx.size());
    parallel_for(static_cast<int>(idx.size()), [&](int k) {
      RngStream pr(cfg.seed, 0xBEEF0000ULL + static_cast<std::uint64_t>(idx[k]));
      lls[k] = eval(idx[k], pr);
    });
    return lls;
  };

  if (cfg.model == ModelKind::Fm) {
    const int K = cfg.m_latent > 0 ? cfg.m_latent : d;
    RngStream rng(cfg.seed, 1);
    FactorChainOptions fopts;
    fopts.n_factors = K;
    FactorMode fmode = train.mask ? FactorMode::MissingValues : FactorMode::Plain;
    auto chain = run_factor_chain(train, cfg.hp, fmode, rng, fopts);
    res.factor_summary = summarize_factor_chain(chain.samples);
    write_json("factor_summary.json", to_json(res.factor_summary));
    if (with_test) {
      Hyperparameters hp = validate_hyperparameters(cfg.hp, SparsityMode::FactorModel);
      std::vector<SignalKind> kinds(K, SignalKind::laplace(hp.lambda));
      ll_labels.push_back("fm");
      ll_columns.push_back(score_draws(
          static_cast<int>(chain.samples.size()), [&](int s, RngStream& pr) {
            return predictive_log_density(test, chain.samples[s], kinds, hp, pr);
          }));
    }
  } else if (cfg.model == ModelKind::Dag || cfg.model == ModelKind::DagLatent) {
    const int m = cfg.model == ModelKind::DagLatent ? std::max(1, cfg.m_latent) : 0;
    Hyperparameters hp_fm = validate_hyperparameters(cfg.hp, SparsityMode::FactorModel);

    // Step 2: factor-model inference with the stochastic order search.
    RngStream fm_rng(cfg.seed, 1);
    FactorChainOptions fopts;
    fopts.m_latent = m;
    auto fm_chain = run_factor_chain(train, cfg.hp, FactorMode::OrderSearch, fm_rng, fopts);

    // Step 3: factor-model summary.
    res.factor_summary = summarize_factor_chain(fm_chain.samples);
    write_json("factor_summary.json", to_json(res.factor_summary));

    // Step 4: ordering candidates by acceptance count.
    res.candidates = top_candidates(fm_chain.candidates, hp_fm.m_top);
    if (res.candidates.empty())
      // no post-burn-in acceptances: the search locked in during burn-in, so
      // the chain's final ordering is the incumbent worth keeping
      res.candidates.push_back(fm_chain.samples.empty() ? Permutation::identity(d)
                                                        : fm_chain.samples.back().p);
    json cand;
    cand["tally"] = to_json(fm_chain.candidates);
    cand["selected"] = json::array();
    for (const auto& p : res.candidates) cand["selected"].push_back(to_json(p));
    cand["mh_proposals"] = fm_chain.mh_proposals;
    cand["mh_accepts"] = fm_chain.mh_accepts;
    write_json("candidates.json", cand);

    // Step 5: a DAG chain per candidate, scheduled across the worker pool.
    std::vector<DagChainResult> chains(res.candidates.size());
    parallel_for(static_cast<int>(chains.size()), [&](int i) {
      RngStream r(cfg.seed, 0x100 + static_cast<std::uint64_t>(i));
      chains[i] = run_dag_chain(train, res.candidates[i], m, cfg.hp, r);
    });
    auto sel = select_best_candidate(chains);
    res.best_candidate = sel.index;

    // Step 6: summaries, test likelihoods and the model comparison.
    Hyperparameters hp_dag = validate_hyperparameters(cfg.hp, SparsityMode::SparseDag);
    for (const auto& chain : chains)
      res.dag_summaries.push_back(summarize_dag_chain(chain, hp_dag, cfg.half_threshold));
    json dags = json::array();
    for (const auto& s : res.dag_summaries) dags.push_back(to_json(s, train.names));
    write_json("dag_summaries.json", dags);
    json best = to_json(res.dag_summaries[sel.index], train.names);
    best["candidate_index"] = sel.index;
    best["candidate_median_lls"] = sel.median_lls;
    write_json("dag_summary.json", best);
    if (truth && truth->R_true.rows() == d) {
      const auto& s = res.dag_summaries[sel.index];
      write_json("metrics.json",
                 to_json(structure_metrics(s.eta_median, s.adjacency, truth->R_true)));
    }
    if (with_test) {
      std::vector<SignalKind> kinds;
      for (int j = 0; j < d + m; ++j)
        kinds.push_back(j < d ? SignalKind::laplace(hp_fm.lambda)
                              : SignalKind::student_t(hp_fm.theta));
      ll_labels.push_back("fm");
      ll_columns.push_back(score_draws(
          static_cast<int>(fm_chain.samples.size()), [&](int s, RngStream& pr) {
            return predictive_log_density(test, fm_chain.samples[s], kinds, hp_fm, pr);
          }));
      const auto& best_chain = chains[sel.index];
      Dataset test_pos;
      test_pos.values = to_position_space(test.values, best_chain.order);
      ll_labels.push_back("dag");
      ll_columns.push_back(score_draws(
          static_cast<int>(best_chain.samples.size()), [&](int s, RngStream& pr) {
            return predictive_log_density_dag(test_pos, best_chain.samples[s], hp_dag, pr);
          }));
      res.comparison = compare_models({{"fm", ll_columns[0]}, {"dag", ll_columns[1]}});
      res.has_comparison = true;
      write_json("comparison.json", to_json(res.comparison));
    }
  } else if (cfg.model == ModelKind::Cslim) {
    const int K = cfg.m_latent > 0 ? cfg.m_latent : d;
    RngStream rng(cfg.seed, 1);
    GpChainOptions gopts;
    gopts.n_factors = K;
    auto chain = run_gp_chain(train, GpChainMode::cslim(), 0, cfg.hp, rng, gopts);
    res.factor_summary = summarize_factor_chain(chain.factor_samples);
    write_json("factor_summary.json", to_json(res.factor_summary));
  } else {  // snim
    RngStream rng(cfg.seed, 1);
    auto chain = run_gp_chain(train, GpChainMode::snim(), 0, cfg.hp, rng);
    Hyperparameters hp_dag = validate_hyperparameters(cfg.hp, SparsityMode::SparseDag);
    std::vector<Eigen::MatrixXd> b_draws, eta_draws;
    std::vector<double> ll_draws;
    for (const auto& s : chain.snim_samples) {
      b_draws.push_back(s.B);
      eta_draws.push_back(s.eta_b);
      ll_draws.push_back(s.train_ll);
    }
    MatrixQuantiles bq = summarize_samples(b_draws);
    MatrixQuantiles eq = summarize_samples(eta_draws);
    Eigen::VectorXd nu_bar = Eigen::VectorXd::Zero(d);
    for (const auto& s : chain.snim_samples) nu_bar += s.nu_b;
    nu_bar /= static_cast<double>(chain.snim_samples.size());
    // Variable-space medians and decided adjacency.
    Eigen::MatrixXd b_med = Eigen::MatrixXd::Zero(d, d), eta_med = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(d, d);
    const auto& ord = chain.order.order;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        b_med(ord[i], ord[j]) = bq.median(i, j);
        eta_med(ord[i], ord[j]) = eq.median(i, j);
        double bound = cfg.half_threshold ? 0.5 : hp_dag.alpha_m * (1.0 - nu_bar[j]);
        adj(ord[i], ord[j]) = j < i && eq.median(i, j) > bound ? 1 : 0;
      }
    json summ;
    summ["order"] = to_json(chain.order);
    summ["b_median"] = to_json(b_med);
    summ["eta_median"] = to_json(eta_med);
    summ["adjacency"] = to_json(adj);
    summ["median_train_ll"] = quantile(ll_draws, 0.5);
    if (!chain.enumeration_median_lls.empty())
      summ["enumeration_median_lls"] = chain.enumeration_median_lls;
    write_json("snim_summary.json", summ);
    if (truth && truth->R_true.rows() == d)
      write_json("metrics.json", to_json(structure_metrics(eta_med, adj, truth->R_true)));
    if (with_test) {
      Eigen::MatrixXd train_pos = to_position_space(train.values, chain.order);
      Eigen::MatrixXd test_pos = to_position_space(test.values, chain.order);
      ll_labels.push_back("snim");
      ll_columns.push_back(score_draws(
          static_cast<int>(chain.snim_samples.size()), [&](int s, RngStream& pr) {
            return predictive_log_density_snim(train_pos, test_pos, chain.snim_samples[s],
                                               hp_dag, pr);
          }));
    }
  }

  if (!ll_columns.empty()) {
    std::string csv;
    append_lls_csv(csv, ll_labels, ll_columns);
    write_text(cfg.out_dir + "/test_lls.csv", csv);
    res.files.push_back("test_lls.csv");
  }

  json cfg_echo;
  cfg_echo["model"] = to_string(cfg.model);
  if (!cfg.data_path.empty()) cfg_echo["data"] = cfg.data_path;
  if (!cfg.generator.empty()) cfg_echo["generator"] = cfg.generator;
  cfg_echo["seed"] = cfg.seed;
  cfg_echo["test_fraction"] = cfg.test_fraction;
  cfg_echo["m_latent"] = cfg.m_latent;
  cfg_echo["n_pred_draws"] = cfg.n_pred_draws;
  write_json("run_config.json", cfg_echo);

  write_manifest(cfg.out_dir, res.files);
  res.files.push_back("manifest.json");
  return res;
}

}  // namespace slim
