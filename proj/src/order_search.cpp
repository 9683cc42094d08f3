#include "slim/order_search.hpp"

#include <algorithm>
#include <cmath>

namespace slim {

void PermutationCandidateSet::record(const Permutation& p) {
  ++tick_;
  auto it = index_.find(p.order);
  if (it == index_.end()) {
    index_[p.order] = static_cast<int>(entries.size());
    entries.push_back({p, 1, tick_});
  } else {
    ++entries[it->second].count;
  }
}

long PermutationCandidateSet::total() const {
  long t = 0;
  for (const auto& e : entries) t += e.count;
  return t;
}

void merge_into(PermutationCandidateSet& dst, const PermutationCandidateSet& src) {
  for (const auto& e : src.entries)
    for (long k = 0; k < e.count; ++k) dst.record(e.perm);
}

Permutation propose_transposition(const Permutation& p, RngStream& rng) {
  const int d = p.size();
  Permutation q = p;
  if (d < 2) return q;
  int a = rng.uniform_int(d);
  int b = rng.uniform_int(d - 1);
  if (b >= a) ++b;
  std::swap(q.order[a], q.order[b]);
  return q;
}

double masked_log_likelihood(const Dataset& data, const Eigen::MatrixXd& D,
                             const Permutation& p, const Permutation& pf,
                             const Eigen::MatrixXd& Z, const Eigen::VectorXd& psi) {
  const int d = data.dim(), N = data.n_obs();
  const int K = static_cast<int>(D.cols());
  const Permutation inv = p.inverse();
  // rows of A are the masked loadings in original variable order: variable i
  // sits at position inv(i); positions above the diagonal of the first d
  // columns are zeroed.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, K);
  for (int i = 0; i < d; ++i) {
    const int r = inv.order[i];
    for (int c = 0; c < K; ++c)
      if (c >= d || c <= r) A(i, c) = D(i, pf.order[c]);
  }
  Eigen::MatrixXd Zp(K, N);
  for (int c = 0; c < K; ++c) Zp.row(c) = Z.row(pf.order[c]);
  Eigen::MatrixXd E = data.values - A * Zp;
  double ll = 0.0;
  for (int i = 0; i < d; ++i) {
    double ss = 0.0;
    int cnt = 0;
    for (int n = 0; n < N; ++n)
      if (data.observed(i, n)) {
        ss += E(i, n) * E(i, n);
        ++cnt;
      }
    ll += -0.5 * cnt * std::log(2.0 * M_PI * psi[i]) - 0.5 * ss / psi[i];
  }
  return ll;
}

bool mh_update_permutations(FactorState& state, const Dataset& data, RngStream& rng,
                            double* cur_ll) {
  double local = std::numeric_limits<double>::quiet_NaN();
  double* cur = cur_ll ? cur_ll : &local;
  if (!std::isfinite(*cur))
    *cur = masked_log_likelihood(data, state.C, state.p, state.pf, state.Z, state.psi);
  Permutation p_new = propose_transposition(state.p, rng);
  Permutation pf_new = propose_transposition(state.pf, rng);
  double prop = masked_log_likelihood(data, state.C, p_new, pf_new, state.Z, state.psi);
  if (std::log(rng.uniform()) < prop - *cur) {
    state.p = std::move(p_new);
    state.pf = std::move(pf_new);
    *cur = prop;
    return true;
  }
  return false;
}

std::vector<Permutation> top_candidates(const PermutationCandidateSet& set, int m_top) {
  std::vector<int> order(set.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (set.entries[a].count != set.entries[b].count)
      return set.entries[a].count > set.entries[b].count;
    return set.entries[a].first_accept < set.entries[b].first_accept;
  });
  std::vector<Permutation> out;
  for (int i : order) {
    if (static_cast<int>(out.size()) >= m_top) break;
    out.push_back(set.entries[i].perm);
  }
  return out;
}

}  // namespace slim
