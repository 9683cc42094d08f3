#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "slim/dag_sampler.hpp"
#include "slim/datagen.hpp"
#include "slim/metrics.hpp"
#include "slim/model_comparison.hpp"
#include "slim/order_search.hpp"
#include "slim/summary.hpp"
#include "slim/types.hpp"

namespace slim {

using json = nlohmann::ordered_json;

// CSV with observations as rows and a header of variable names; transposed
// into the internal variables-as-rows layout. Empty cells become masked-out
// entries.
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);

json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::MatrixXi& m);
json to_json(const Eigen::VectorXd& v);
json to_json(const Permutation& p);
json to_json(const Quantiles& q);
json to_json(const FactorSummary& s);
json to_json(const DagSummary& s, const std::vector<std::string>& names);
json to_json(const ComparisonReport& r);
json to_json(const PermutationCandidateSet& set);
json to_json(const GroundTruthModel& gt);
json to_json(const StructureMetrics& m);

GroundTruthModel ground_truth_from_json(const json& j);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// 64-bit FNV-1a content hash, as used by the run manifest.
std::uint64_t fnv1a(const std::string& bytes);

// Manifest of produced files: relative path -> content hash (hex), written
// as manifest.json inside the directory.
void write_manifest(const std::string& dir, const std::vector<std::string>& rel_paths);

}  // namespace slim
