#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slim/datagen.hpp"
#include "slim/gp.hpp"
#include "slim/io.hpp"
#include "slim/model_comparison.hpp"
#include "slim/summary.hpp"
#include "slim/types.hpp"

namespace slim {

enum class ModelKind { Fm, Dag, DagLatent, Cslim, Snim };

ModelKind model_kind_from_string(const std::string& s);  // throws on unknown
std::string to_string(ModelKind kind);

// One run of the pipeline: exactly one of data_path / generator must be set.
// Generator specs: "lingam-suite d=5 N=500", "latent-suite d=5 m=1 N=500",
// "toy-latent variant=i N=1000", "nonlinear-toy N=100", "fm d=5 N=500";
// the config seed drives the generator.
struct RunConfig {
  ModelKind model = ModelKind::Dag;
  std::string data_path;
  std::string generator;
  std::uint64_t seed = 1;
  double test_fraction = 0.2;
  int m_latent = 0;        // latent count (dag-latent); factor count (fm, cslim)
  int n_pred_draws = 50;   // posterior draws scored against the test set
  bool half_threshold = false;
  Hyperparameters hp;
  std::string out_dir = ".";
};

struct WorkflowResult {
  Dataset train, test;
  std::optional<GroundTruthModel> truth;
  FactorSummary factor_summary;        // fm / dag / dag-latent / cslim
  std::vector<Permutation> candidates; // dag / dag-latent
  std::vector<DagSummary> dag_summaries;
  int best_candidate = -1;
  ComparisonReport comparison;
  bool has_comparison = false;
  std::vector<std::string> files;      // artifacts relative to out_dir
};

// Worker count from SLIM_WORKERS (falls back to hardware concurrency).
int worker_count();

// Runs fn(0..n-1) across the worker pool; per-index work must draw from its
// own substream so results do not depend on scheduling. Exceptions from
// workers are rethrown on the calling thread.
void parallel_for(int n, const std::function<void(int)>& fn);

std::pair<Dataset, std::optional<GroundTruthModel>> load_or_generate(const RunConfig& cfg);

// Executes the pipeline: partition, factor-model inference with order search,
// factor summary, candidate selection, per-candidate DAG inference, DAG
// summaries and test likelihoods; all artifacts land in cfg.out_dir with a
// manifest of content hashes. Deterministic per (config, seed): re-running
// reproduces the report bytes. Non-DAG model kinds run the subset of steps
// that applies to them.
WorkflowResult run_workflow(const RunConfig& cfg);

}  // namespace slim
