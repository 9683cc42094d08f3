#include "slim/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "slim/rng.hpp"

namespace slim {

void Dataset::validate() const {
  if (dim() < 2) throw std::invalid_argument("Dataset: need at least 2 variables");
  if (n_obs() < 1) throw std::invalid_argument("Dataset: need at least 1 observation");
  if (!names.empty() && static_cast<int>(names.size()) != dim())
    throw std::invalid_argument("Dataset: name count does not match variable count");
  if (mask && (mask->rows() != values.rows() || mask->cols() != values.cols()))
    throw std::invalid_argument("Dataset: mask shape does not match values");
  for (int i = 0; i < dim(); ++i)
    for (int n = 0; n < n_obs(); ++n)
      if (observed(i, n) && !std::isfinite(values(i, n)))
        throw std::invalid_argument("Dataset: non-finite observed entry");
}

Dataset standardize(const Dataset& data, StandardizeStats* stats) {
  data.validate();
  const int d = data.dim(), N = data.n_obs();
  Dataset out = data;
  Eigen::VectorXd mean(d), sd(d);
  for (int i = 0; i < d; ++i) {
    double sum = 0.0;
    int cnt = 0;
    for (int n = 0; n < N; ++n)
      if (data.observed(i, n)) {
        sum += data.values(i, n);
        ++cnt;
      }
    if (cnt < 2)
      throw std::invalid_argument("standardize: variable '" +
                                  (data.names.empty() ? std::to_string(i) : data.names[i]) +
                                  "' has fewer than 2 observed values");
    mean[i] = sum / cnt;
    double ss = 0.0;
    for (int n = 0; n < N; ++n)
      if (data.observed(i, n)) {
        double r = data.values(i, n) - mean[i];
        ss += r * r;
      }
    sd[i] = std::sqrt(ss / (cnt - 1));
    if (sd[i] <= 0.0)
      throw std::invalid_argument("standardize: variable '" +
                                  (data.names.empty() ? std::to_string(i) : data.names[i]) +
                                  "' is constant");
    for (int n = 0; n < N; ++n)
      out.values(i, n) = (data.values(i, n) - mean[i]) / sd[i];
  }
  if (stats) {
    stats->mean = mean;
    stats->stddev = sd;
  }
  return out;
}

std::pair<Dataset, Dataset> partition(const Dataset& data, double test_fraction,
                                      std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw std::invalid_argument("partition: test_fraction must be in [0, 1)");
  const int N = data.n_obs();
  const int n_test = static_cast<int>(std::lround(test_fraction * N));
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  RngStream rng(seed, 0x5B17);
  for (int i = N - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
  std::vector<int> test_idx(idx.begin(), idx.begin() + n_test);
  std::vector<int> train_idx(idx.begin() + n_test, idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  auto take = [&](const std::vector<int>& cols) {
    Dataset out;
    out.names = data.names;
    out.values.resize(data.dim(), static_cast<int>(cols.size()));
    if (data.mask) out.mask = Eigen::MatrixXd(data.dim(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k) {
      out.values.col(k) = data.values.col(cols[k]);
      if (data.mask) out.mask->col(k) = data.mask->col(cols[k]);
    }
    return out;
  };
  return {take(train_idx), take(test_idx)};
}

Permutation Permutation::identity(int d) {
  Permutation p;
  p.order.resize(d);
  std::iota(p.order.begin(), p.order.end(), 0);
  return p;
}

bool Permutation::valid() const {
  std::vector<bool> seen(order.size(), false);
  for (int v : order) {
    if (v < 0 || v >= static_cast<int>(order.size()) || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.order.resize(order.size());
  for (size_t i = 0; i < order.size(); ++i) inv.order[order[i]] = static_cast<int>(i);
  return inv;
}

Permutation Permutation::compose(const Permutation& other) const {
  if (order.size() != other.order.size())
    throw std::invalid_argument("Permutation::compose: size mismatch");
  Permutation out;
  out.order.resize(order.size());
  for (size_t i = 0; i < order.size(); ++i) out.order[i] = other.order[order[i]];
  return out;
}

Hyperparameters validate_hyperparameters(Hyperparameters raw, SparsityMode mode) {
  if (raw.beta_m < 0.0) {
    switch (mode) {
      case SparsityMode::FactorModel: raw.beta_m = 0.9; break;
      case SparsityMode::SparseDag: raw.beta_m = 0.1; break;
      case SparsityMode::DenseDag: raw.beta_m = 0.99; break;
    }
  }
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("hyperparameters: ") + name +
                                                " must be strictly positive");
  };
  positive(raw.s_s, "s_s");
  positive(raw.s_r, "s_r");
  positive(raw.alpha_p, "alpha_p");
  positive(raw.beta_p, "beta_p");
  positive(raw.t_s, "t_s");
  positive(raw.t_r, "t_r");
  positive(raw.u_s, "u_s");
  positive(raw.k_s, "k_s");
  positive(raw.k_r, "k_r");
  positive(raw.lambda, "lambda");
  positive(raw.theta, "theta");
  if (raw.alpha_m <= 0.0 || raw.alpha_m >= 1.0)
    throw std::invalid_argument("hyperparameters: alpha_m must lie in (0, 1)");
  if (raw.beta_m <= 0.0 || raw.beta_m >= 1.0)
    throw std::invalid_argument("hyperparameters: beta_m must lie in (0, 1)");
  if (raw.beta_m_latent <= 0.0 || raw.beta_m_latent >= 1.0)
    throw std::invalid_argument("hyperparameters: beta_m_latent must lie in (0, 1)");
  if (raw.n_rep < 1) throw std::invalid_argument("hyperparameters: n_rep must be >= 1");
  if (raw.m_top < 1) throw std::invalid_argument("hyperparameters: m_top must be >= 1");
  if (raw.mh_perm_reps < 0)
    throw std::invalid_argument("hyperparameters: mh_perm_reps must be >= 0");
  // n_burnin < total draws means at least one retained sample
  if (raw.n_samples == 0)
    throw std::invalid_argument("hyperparameters: burn-in must be smaller than total draws");
  return raw;
}

}  // namespace slim
