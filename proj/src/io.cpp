#include "slim/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slim {
namespace {

std::vector<std::string> split_line(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path);
  std::vector<std::string> names;
  for (const auto& c : split_line(line)) names.push_back(trim(c));
  const int d = static_cast<int>(names.size());
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> seen;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (static_cast<int>(cells.size()) != d)
      throw std::runtime_error("read_csv: row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(d));
    std::vector<double> row(d);
    std::vector<bool> obs(d);
    for (int i = 0; i < d; ++i) {
      std::string c = trim(cells[i]);
      if (c.empty() || c == "NA" || c == "nan") {
        row[i] = 0.0;
        obs[i] = false;
      } else {
        size_t pos = 0;
        row[i] = std::stod(c, &pos);
        if (pos != c.size())
          throw std::runtime_error("read_csv: bad number '" + c + "' at row " +
                                   std::to_string(lineno));
        obs[i] = true;
      }
    }
    rows.push_back(std::move(row));
    seen.push_back(std::move(obs));
  }
  const int N = static_cast<int>(rows.size());
  Dataset data;
  data.names = names;
  data.values.resize(d, N);
  bool any_missing = false;
  Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(d, N);
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < d; ++i) {
      data.values(i, n) = rows[n][i];
      if (!seen[n][i]) {
        mask(i, n) = 0.0;
        any_missing = true;
      }
    }
  if (any_missing) data.mask = mask;
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out.precision(17);
  const auto& names =
      data.names.empty() ? std::vector<std::string>() : data.names;
  for (int i = 0; i < data.dim(); ++i) {
    if (i) out << ',';
    out << (names.empty() ? "x" + std::to_string(i + 1) : names[i]);
  }
  out << '\n';
  for (int n = 0; n < data.n_obs(); ++n) {
    for (int i = 0; i < data.dim(); ++i) {
      if (i) out << ',';
      if (data.observed(i, n)) out << data.values(i, n);
    }
    out << '\n';
  }
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Permutation& p) { return json(p.order); }

json to_json(const Quantiles& q) {
  return json{{"q025", q.q025}, {"median", q.median}, {"q975", q.q975}};
}

json to_json(const FactorSummary& s) {
  json j;
  j["C"] = {{"q025", to_json(s.C.q025)},
            {"median", to_json(s.C.median)},
            {"q975", to_json(s.C.q975)}};
  j["eta"] = {{"q025", to_json(s.eta.q025)},
              {"median", to_json(s.eta.median)},
              {"q975", to_json(s.eta.q975)}};
  j["psi"] = json::array();
  for (const auto& q : s.psi) j["psi"].push_back(to_json(q));
  j["nu"] = json::array();
  for (const auto& q : s.nu) j["nu"].push_back(to_json(q));
  return j;
}

json to_json(const DagSummary& s, const std::vector<std::string>& names) {
  auto name_of = [&](int v) {
    if (v >= 0 && v < static_cast<int>(names.size())) return names[v];
    if (v >= static_cast<int>(names.size()))
      return "z" + std::to_string(v - static_cast<int>(names.size()) + 1);
    return std::string("?");
  };
  json j;
  j["order"] = to_json(s.order);
  j["b_median"] = to_json(s.b_median);
  j["eta_median"] = to_json(s.eta_median);
  j["adjacency"] = to_json(s.adjacency);
  if (s.latent_adjacency.cols() > 0) {
    j["eta_latent_median"] = to_json(s.eta_latent_median);
    j["latent_adjacency"] = to_json(s.latent_adjacency);
  }
  j["edges"] = json::array();
  for (const auto& e : s.edges)
    j["edges"].push_back({{"from", name_of(e.from)},
                          {"to", name_of(e.to)},
                          {"weight_q025", e.weight_q025},
                          {"weight_median", e.weight_median},
                          {"weight_q975", e.weight_q975},
                          {"eta_median", e.eta_median}});
  j["psi"] = json::array();
  for (const auto& q : s.psi) j["psi"].push_back(to_json(q));
  j["median_train_ll"] = s.median_train_ll;
  return j;
}

json to_json(const ComparisonReport& r) {
  json j;
  j["labels"] = r.labels;
  json models = json::array();
  for (size_t i = 0; i < r.labels.size(); ++i)
    models.push_back({{"label", r.labels[i]},
                      {"median", r.medians[i]},
                      {"q025", r.q025[i]},
                      {"q975", r.q975[i]},
                      {"test_log_likelihoods", r.test_lls[i]}});
  j["models"] = std::move(models);
  j["ratio_samples"] = r.ratio_samples;
  j["ratio_median"] = r.ratio_median;
  j["selected"] = r.selected;
  j["selected_index"] = r.selected_index;
  j["tie"] = r.tie;
  return j;
}

json to_json(const PermutationCandidateSet& set) {
  json j = json::array();
  for (const auto& e : set.entries)
    j.push_back({{"order", e.perm.order}, {"count", e.count}});
  return j;
}

json to_json(const GroundTruthModel& gt) {
  json j;
  j["R_true"] = to_json(gt.R_true);
  j["B_true"] = to_json(gt.B_true);
  if (gt.m > 0) {
    j["L_true"] = to_json(gt.L_true);
    j["C_l_true"] = to_json(gt.C_l_true);
  }
  if (gt.is_factor_model) j["C_fm"] = to_json(gt.C_fm);
  j["p_true"] = to_json(gt.p_true);
  json kinds = json::array();
  for (const auto& k : gt.source_kinds) {
    const char* name = k.type == SourceKind::Type::Laplace    ? "laplace"
                       : k.type == SourceKind::Type::Cauchy   ? "cauchy"
                                                              : "generalized_gaussian";
    kinds.push_back({{"type", name}, {"shape", k.shape}});
  }
  j["source_kinds"] = kinds;
  j["m"] = gt.m;
  j["dense"] = gt.dense;
  j["sparsity"] = gt.sparsity;
  j["is_factor_model"] = gt.is_factor_model;
  return j;
}

json to_json(const StructureMetrics& m) {
  return json{{"tpr", m.tpr},
              {"fpr", m.fpr},
              {"reversed", m.reversed},
              {"structural_errors", m.structural_errors},
              {"true_edges", m.true_edges},
              {"auc", m.auc}};
}

namespace {
Eigen::MatrixXi mat_i_from_json(const json& j) {
  Eigen::MatrixXi m(j.size(), j.empty() ? 0 : j[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = j[i][c].get<int>();
  return m;
}
Eigen::MatrixXd mat_d_from_json(const json& j) {
  Eigen::MatrixXd m(j.size(), j.empty() ? 0 : j[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = j[i][c].get<double>();
  return m;
}
}  // namespace

GroundTruthModel ground_truth_from_json(const json& j) {
  GroundTruthModel gt;
  gt.R_true = mat_i_from_json(j.at("R_true"));
  gt.B_true = mat_d_from_json(j.at("B_true"));
  gt.m = j.at("m").get<int>();
  if (gt.m > 0) {
    gt.L_true = mat_i_from_json(j.at("L_true"));
    gt.C_l_true = mat_d_from_json(j.at("C_l_true"));
  }
  gt.is_factor_model = j.at("is_factor_model").get<bool>();
  if (gt.is_factor_model) gt.C_fm = mat_d_from_json(j.at("C_fm"));
  gt.p_true.order = j.at("p_true").get<std::vector<int>>();
  if (j.contains("source_kinds"))
    for (const auto& k : j["source_kinds"]) {
      std::string name = k.at("type").get<std::string>();
      SourceKind sk;
      sk.type = name == "laplace"  ? SourceKind::Type::Laplace
                : name == "cauchy" ? SourceKind::Type::Cauchy
                                   : SourceKind::Type::GeneralizedGaussian;
      sk.shape = k.at("shape").get<double>();
      gt.source_kinds.push_back(sk);
    }
  gt.dense = j.at("dense").get<bool>();
  gt.sparsity = j.at("sparsity").get<double>();
  return gt;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text: cannot open " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_manifest(const std::string& dir, const std::vector<std::string>& rel_paths) {
  json j;
  for (const auto& rel : rel_paths) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(read_text(dir + "/" + rel))));
    j[rel] = std::string(buf);
  }
  write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace slim
