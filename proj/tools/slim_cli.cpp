// slim: sparse linear identifiable multivariate modeling.
//
// Verbs:
//   generate  write a synthetic dataset (CSV) and its generating model (JSON)
//   fit       run the full pipeline on a dataset or generator spec
//   compare   compare models from per-draw test log-likelihood CSVs
//   metrics   structure-recovery metrics of a fit against a ground truth

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "slim/io.hpp"
#include "slim/metrics.hpp"
#include "slim/model_comparison.hpp"
#include "slim/workflow.hpp"

namespace {

int fail(const std::string& what) {
  slim::json err{{"error", what}};
  std::fprintf(stderr, "%s\n", err.dump().c_str());
  return 1;
}

void add_hp_flags(CLI::App* cmd, slim::RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--test-fraction", cfg.test_fraction, "held-out column fraction");
  cmd->add_option("--samples", cfg.hp.n_samples, "retained sweeps per chain");
  cmd->add_option("--burnin", cfg.hp.n_burnin, "burn-in sweeps per chain");
  cmd->add_option("--m-top", cfg.hp.m_top, "ordering candidates kept");
  cmd->add_option("--beta-m", cfg.hp.beta_m, "column-level inclusion rate mean");
  cmd->add_option("--latents", cfg.m_latent, "latent count (dag-latent) / factor count (fm, cslim)");
  cmd->add_option("--pred-draws", cfg.n_pred_draws, "posterior draws scored on the test set");
  cmd->add_option("--n-rep", cfg.hp.n_rep, "mixture draws per predictive density");
  cmd->add_flag("--half-threshold", cfg.half_threshold, "decide edges at median eta > 0.5");
  cmd->add_option("--out", cfg.out_dir, "output directory")->required();
}

int cmd_generate(const std::string& spec, std::uint64_t seed, const std::string& out_dir) {
  slim::RunConfig cfg;
  cfg.generator = spec;
  cfg.seed = seed;
  auto [data, truth] = slim::load_or_generate(cfg);
  std::filesystem::create_directories(out_dir);
  slim::write_csv(data, out_dir + "/data.csv");
  std::vector<std::string> files{"data.csv"};
  if (truth) {
    slim::write_text(out_dir + "/ground_truth.json", to_json(*truth).dump(2) + "\n");
    files.push_back("ground_truth.json");
  }
  slim::write_manifest(out_dir, files);
  std::printf("wrote %s/data.csv (%d variables, %d observations)\n", out_dir.c_str(),
              data.dim(), data.n_obs());
  return 0;
}

int cmd_fit(const slim::RunConfig& cfg) {
  auto res = slim::run_workflow(cfg);
  std::printf("artifacts in %s:\n", cfg.out_dir.c_str());
  for (const auto& f : res.files) std::printf("  %s\n", f.c_str());
  if (res.has_comparison)
    std::printf("selected model: %s (log-ratio %.3f)\n", res.comparison.selected.c_str(),
                res.comparison.ratio_median);
  return 0;
}

// One column of per-draw test log-likelihoods per labeled model.
std::vector<std::pair<std::string, std::vector<double>>> read_ll_csv(const std::string& path) {
  slim::Dataset table = slim::read_csv(path);
  std::vector<std::pair<std::string, std::vector<double>>> models;
  for (int i = 0; i < table.dim(); ++i) {
    std::vector<double> lls;
    for (int n = 0; n < table.n_obs(); ++n)
      if (table.observed(i, n)) lls.push_back(table.values(i, n));
    models.emplace_back(table.names[i], std::move(lls));
  }
  return models;
}

int cmd_compare(const std::vector<std::string>& csvs, const std::string& out_dir) {
  std::vector<std::pair<std::string, std::vector<double>>> models;
  for (const auto& path : csvs)
    for (auto& m : read_ll_csv(path)) models.push_back(std::move(m));
  auto rep = slim::compare_models(models);
  std::filesystem::create_directories(out_dir);
  slim::write_text(out_dir + "/comparison.json", to_json(rep).dump(2) + "\n");
  std::printf("selected: %s (log-ratio of best competitor vs %s: %.3f)\n",
              rep.selected.c_str(), rep.labels[0].c_str(), rep.ratio_median);
  return 0;
}

int cmd_metrics(const std::string& summary_path, const std::string& truth_path,
                const std::string& out_path) {
  slim::json summary = slim::json::parse(slim::read_text(summary_path));
  slim::GroundTruthModel truth =
      slim::ground_truth_from_json(slim::json::parse(slim::read_text(truth_path)));
  const auto& em = summary.at("eta_median");
  const auto& aj = summary.at("adjacency");
  const int d = static_cast<int>(em.size());
  Eigen::MatrixXd eta(d, d);
  Eigen::MatrixXi adj(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      eta(i, j) = em[i][j].get<double>();
      adj(i, j) = aj[i][j].get<int>();
    }
  auto m = slim::structure_metrics(eta, adj, truth.R_true);
  std::string text = to_json(m).dump(2) + "\n";
  if (!out_path.empty()) slim::write_text(out_path, text);
  std::printf("%s", text.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse linear identifiable multivariate modeling"};
  app.require_subcommand(1);

  std::string gen_spec, gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("generate", "write a synthetic benchmark dataset");
  gen->add_option("spec", gen_spec,
                  "generator spec, e.g. \"lingam-suite d=5 N=500\"")->required();
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  slim::RunConfig cfg;
  std::string model_name = "dag";
  auto* fit = app.add_subcommand("fit", "run inference and write reports");
  fit->add_option("--model", model_name, "fm | dag | dag-latent | cslim | snim");
  fit->add_option("--data", cfg.data_path, "input CSV (observations as rows)");
  fit->add_option("--generate", cfg.generator, "generator spec instead of --data");
  add_hp_flags(fit, cfg);

  std::vector<std::string> cmp_csvs;
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "compare test log-likelihood columns");
  cmp->add_option("csvs", cmp_csvs, "CSV files, one labeled column per model")
      ->required()
      ->expected(-1);
  cmp->add_option("--out", cmp_out, "output directory")->required();

  std::string met_summary, met_truth, met_out;
  auto* met = app.add_subcommand("metrics", "structure recovery vs ground truth");
  met->add_option("--summary", met_summary, "dag_summary.json from a fit")->required();
  met->add_option("--truth", met_truth, "ground_truth.json")->required();
  met->add_option("--out", met_out, "metrics JSON path (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_spec, gen_seed, gen_out);
    if (fit->parsed()) {
      cfg.model = slim::model_kind_from_string(model_name);
      return cmd_fit(cfg);
    }
    if (cmp->parsed()) return cmd_compare(cmp_csvs, cmp_out);
    if (met->parsed()) return cmd_metrics(met_summary, met_truth, met_out);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return fail("no command");
}
