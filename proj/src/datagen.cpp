#include "slim/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slim/distributions.hpp"
#include "slim/rng.hpp"

namespace slim {
namespace {

std::vector<std::string> default_names(int d) {
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

void check_acyclic(const Eigen::MatrixXi& R) {
  const int d = static_cast<int>(R.rows());
  // Kahn peeling on the parent relation
  std::vector<int> indeg(d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (R(i, j)) ++indeg[i];
  std::vector<int> ready;
  for (int i = 0; i < d; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  int seen = 0;
  while (!ready.empty()) {
    int j = ready.back();
    ready.pop_back();
    ++seen;
    for (int i = 0; i < d; ++i)
      if (R(i, j) && --indeg[i] == 0) ready.push_back(i);
  }
  if (seen != d) throw std::invalid_argument("weights_from_structure: cyclic structure");
}

double edge_weight(RngStream& rng) {
  double s = rng.normal() >= 0.0 ? 1.0 : -1.0;
  return s + std::sqrt(0.2) * rng.normal();
}

Eigen::MatrixXd weights_on_support(const Eigen::MatrixXi& R, RngStream& rng) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(R.rows(), R.cols());
  for (int i = 0; i < R.rows(); ++i)
    for (int j = 0; j < R.cols(); ++j)
      if (R(i, j)) B(i, j) = edge_weight(rng);
  return B;
}

// strictly lower-triangular support in generation order, dense with
// probability 1/2 (when allowed), otherwise at a decile sparsity level
Eigen::MatrixXi random_support(int d, RngStream& rng, bool* dense_out, double* sp_out,
                               bool allow_dense = true) {
  bool dense = allow_dense && rng.bernoulli(0.5);
  double sp = dense ? 1.0 : 0.1 * (1 + rng.uniform_int(8));
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) slots.push_back({i, j});
  for (int i = static_cast<int>(slots.size()) - 1; i > 0; --i)
    std::swap(slots[i], slots[rng.uniform_int(i + 1)]);
  int n_edges = dense ? static_cast<int>(slots.size())
                      : static_cast<int>(std::lround(sp * slots.size()));
  Eigen::MatrixXi R = Eigen::MatrixXi::Zero(d, d);
  for (int k = 0; k < n_edges; ++k) R(slots[k].first, slots[k].second) = 1;
  *dense_out = dense;
  *sp_out = sp;
  return R;
}

Permutation random_permutation(int d, RngStream& rng) {
  Permutation p = Permutation::identity(d);
  for (int i = d - 1; i > 0; --i) std::swap(p.order[i], p.order[rng.uniform_int(i + 1)]);
  return p;
}

}  // namespace

Eigen::MatrixXd weights_from_structure(const Eigen::MatrixXi& R, std::uint64_t seed) {
  check_acyclic(R);
  RngStream rng(seed, 0xB0B);
  return weights_on_support(R, rng);
}

std::pair<Dataset, GroundTruthModel> generate_lingam_suite(int d, int N,
                                                           std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("generate_lingam_suite: d must be >= 2");
  RngStream rng(seed, 0xDA7A);
  GroundTruthModel gt;
  Eigen::MatrixXi Rpos = random_support(d, rng, &gt.dense, &gt.sparsity);
  Eigen::MatrixXd Bpos = weights_on_support(Rpos, rng);

  Eigen::MatrixXd Zpos(d, N);
  std::vector<double> shapes(d);
  for (int i = 0; i < d; ++i) {
    shapes[i] = random_gg_shape(rng);
    for (int n = 0; n < N; ++n) Zpos(i, n) = sample_generalized_gaussian(shapes[i], rng);
  }
  Eigen::MatrixXd Xpos(d, N);
  for (int i = 0; i < d; ++i) {
    Xpos.row(i) = Zpos.row(i);
    for (int j = 0; j < i; ++j)
      if (Rpos(i, j)) Xpos.row(i) += Bpos(i, j) * Xpos.row(j);
  }
  Permutation vp = random_permutation(d, rng);

  Dataset data;
  data.values.resize(d, N);
  data.names = default_names(d);
  gt.R_true = Eigen::MatrixXi::Zero(d, d);
  gt.B_true = Eigen::MatrixXd::Zero(d, d);
  gt.Z_true.resize(d, N);
  gt.source_kinds.resize(d);
  for (int r = 0; r < d; ++r) {
    data.values.row(vp.order[r]) = Xpos.row(r);
    gt.Z_true.row(vp.order[r]) = Zpos.row(r);
    gt.source_kinds[vp.order[r]] = {SourceKind::Type::GeneralizedGaussian, shapes[r]};
    for (int c = 0; c < r; ++c)
      if (Rpos(r, c)) {
        gt.R_true(vp.order[r], vp.order[c]) = 1;
        gt.B_true(vp.order[r], vp.order[c]) = Bpos(r, c);
      }
  }
  gt.p_true = vp;
  return {std::move(data), std::move(gt)};
}

std::pair<Dataset, GroundTruthModel> generate_latent_suite(int d, int m, int N,
                                                           std::uint64_t seed) {
  if (d < 2 || m < 1)
    throw std::invalid_argument("generate_latent_suite: need d >= 2 and m >= 1");
  RngStream rng(seed, 0x1A7E);
  GroundTruthModel gt;
  gt.m = m;
  Eigen::MatrixXi Rpos = random_support(d, rng, &gt.dense, &gt.sparsity,
                                        /*allow_dense=*/false);
  Eigen::MatrixXd Bpos = weights_on_support(Rpos, rng);

  // each latent loads on at least two observed variables, so it cannot be
  // confounded with a single driving signal
  Eigen::MatrixXi Lpos = Eigen::MatrixXi::Zero(d, m);
  for (int k = 0; k < m; ++k) {
    int touch = 2 + rng.uniform_int(d - 1);
    std::vector<int> rows(d);
    std::iota(rows.begin(), rows.end(), 0);
    for (int i = d - 1; i > 0; --i) std::swap(rows[i], rows[rng.uniform_int(i + 1)]);
    for (int t = 0; t < touch; ++t) Lpos(rows[t], k) = 1;
  }
  Eigen::MatrixXd Cpos = weights_on_support(Lpos, rng);

  // heavy-tailed generalized-Gaussian sources of random shape for every
  // signal; the Laplace/Cauchy tagging lives in the model, not the data
  Eigen::MatrixXd Zd(d, N), Zl(m, N);
  std::vector<double> shapes(d + m);
  for (auto& s : shapes) s = random_gg_shape(rng);
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < N; ++n) Zd(i, n) = sample_generalized_gaussian(shapes[i], rng);
  for (int k = 0; k < m; ++k)
    for (int n = 0; n < N; ++n) Zl(k, n) = sample_generalized_gaussian(shapes[d + k], rng);

  Eigen::MatrixXd Xpos(d, N);
  for (int i = 0; i < d; ++i) {
    Xpos.row(i) = Zd.row(i);
    for (int k = 0; k < m; ++k)
      if (Lpos(i, k)) Xpos.row(i) += Cpos(i, k) * Zl.row(k);
    for (int j = 0; j < i; ++j)
      if (Rpos(i, j)) Xpos.row(i) += Bpos(i, j) * Xpos.row(j);
  }
  Permutation vp = random_permutation(d, rng);

  Dataset data;
  data.values.resize(d, N);
  data.names = default_names(d);
  gt.R_true = Eigen::MatrixXi::Zero(d, d);
  gt.B_true = Eigen::MatrixXd::Zero(d, d);
  gt.L_true = Eigen::MatrixXi::Zero(d, m);
  gt.C_l_true = Eigen::MatrixXd::Zero(d, m);
  gt.Z_true.resize(d + m, N);
  gt.source_kinds.resize(d + m);
  for (int r = 0; r < d; ++r) {
    data.values.row(vp.order[r]) = Xpos.row(r);
    gt.Z_true.row(vp.order[r]) = Zd.row(r);
    gt.source_kinds[vp.order[r]] = {SourceKind::Type::GeneralizedGaussian, shapes[r]};
    gt.L_true.row(vp.order[r]) = Lpos.row(r);
    gt.C_l_true.row(vp.order[r]) = Cpos.row(r);
    for (int c = 0; c < r; ++c)
      if (Rpos(r, c)) {
        gt.R_true(vp.order[r], vp.order[c]) = 1;
        gt.B_true(vp.order[r], vp.order[c]) = Bpos(r, c);
      }
  }
  for (int k = 0; k < m; ++k) {
    gt.Z_true.row(d + k) = Zl.row(k);
    gt.source_kinds[d + k] = {SourceKind::Type::GeneralizedGaussian, shapes[d + k]};
  }
  gt.p_true = vp;
  return {std::move(data), std::move(gt)};
}

std::pair<Dataset, GroundTruthModel> generate_toy_latent_pair(char variant, int N,
                                                              std::uint64_t seed) {
  if (variant != 'u' && variant != 'i')
    throw std::invalid_argument("generate_toy_latent_pair: variant must be 'u' or 'i'");
  RngStream rng(seed, 0xF16);
  GroundTruthModel gt;
  gt.m = 1;
  gt.R_true = Eigen::MatrixXi::Zero(2, 2);
  gt.R_true(1, 0) = 1;
  gt.B_true = gt.R_true.cast<double>();
  gt.L_true = Eigen::MatrixXi::Ones(2, 1);
  gt.C_l_true.resize(2, 1);
  gt.C_l_true << 1.0, -1.0;
  gt.p_true = Permutation::identity(2);
  SignalKind latent =
      variant == 'i' ? SignalKind::cauchy() : SignalKind::laplace(std::sqrt(2.0));
  gt.source_kinds = {{SourceKind::Type::Laplace, 1.0},
                     {SourceKind::Type::Laplace, 1.0},
                     variant == 'i' ? SourceKind{SourceKind::Type::Cauchy, 1.0}
                                    : SourceKind{SourceKind::Type::Laplace, 1.0}};
  gt.Z_true.resize(3, N);
  Dataset data;
  data.values.resize(2, N);
  data.names = default_names(2);
  for (int n = 0; n < N; ++n) {
    double z1 = sample_heavy_tailed(SignalKind::laplace(std::sqrt(2.0)), rng);
    double z2 = sample_heavy_tailed(SignalKind::laplace(std::sqrt(2.0)), rng);
    double zl = sample_heavy_tailed(latent, rng);
    double x1 = z1 + zl;
    double x2 = x1 + z2 - zl;  // b21 = 1, c2L = -1
    data.values(0, n) = x1;
    data.values(1, n) = x2;
    gt.Z_true(0, n) = z1;
    gt.Z_true(1, n) = z2;
    gt.Z_true(2, n) = zl;
  }
  return {std::move(data), std::move(gt)};
}

std::pair<Dataset, GroundTruthModel> generate_nonlinear_toy(int N, std::uint64_t seed) {
  RngStream rng(seed, 0x70F);
  GroundTruthModel gt;
  gt.R_true = Eigen::MatrixXi::Zero(4, 4);
  gt.R_true(1, 0) = gt.R_true(2, 0) = gt.R_true(3, 1) = gt.R_true(3, 2) = 1;
  gt.B_true = gt.R_true.cast<double>();
  gt.p_true = Permutation::identity(4);
  gt.source_kinds.assign(4, {SourceKind::Type::Laplace, 1.0});
  gt.Z_true.resize(4, N);
  Dataset data;
  data.values.resize(4, N);
  data.names = default_names(4);
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < 4; ++i)
      gt.Z_true(i, n) = sample_heavy_tailed(SignalKind::laplace(std::sqrt(2.0)), rng);
    double x1 = gt.Z_true(0, n);
    double x2 = x1 * x1 + gt.Z_true(1, n);
    double x3 = 4.0 * std::sqrt(std::abs(x1)) + gt.Z_true(2, n);
    double x4 = 2.0 * std::sin(x2) + 2.0 * std::sin(x3) + gt.Z_true(3, n);
    data.values.col(n) << x1, x2, x3, x4;
  }
  return {std::move(data), std::move(gt)};
}

std::pair<Dataset, GroundTruthModel> generate_fm_dataset(int d, int N,
                                                         std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("generate_fm_dataset: d must be >= 2");
  RngStream rng(seed, 0xFAC);
  GroundTruthModel gt;
  gt.is_factor_model = true;
  // dense square mixing: d^2 nonzeros exceed the d(d+1)/2 a triangular
  // pattern allows, so no row/column permutation yields a DAG
  gt.C_fm.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gt.C_fm(i, j) = edge_weight(rng);
  gt.R_true = Eigen::MatrixXi::Zero(d, d);
  gt.B_true = Eigen::MatrixXd::Zero(d, d);
  gt.p_true = Permutation::identity(d);
  gt.Z_true.resize(d, N);
  gt.source_kinds.resize(d);
  for (int i = 0; i < d; ++i) {
    double shape = random_gg_shape(rng);
    gt.source_kinds[i] = {SourceKind::Type::GeneralizedGaussian, shape};
    for (int n = 0; n < N; ++n) gt.Z_true(i, n) = sample_generalized_gaussian(shape, rng);
  }
  Dataset data;
  data.values = gt.C_fm * gt.Z_true;
  data.names = default_names(d);
  return {std::move(data), std::move(gt)};
}

}  // namespace slim
