#pragma once

#include <map>
#include <vector>

#include "slim/state.hpp"
#include "slim/types.hpp"

namespace slim {

// Orderings accepted by the M-H permutation updates, tallied by acceptance
// count with insertion order recorded for tie breaking.
struct PermutationCandidateSet {
  struct Entry {
    Permutation perm;
    long count = 0;
    long first_accept = 0;
  };
  std::vector<Entry> entries;

  void record(const Permutation& p);
  long total() const;
  bool empty() const { return entries.empty(); }

 private:
  std::map<std::vector<int>, int> index_;
  long tick_ = 0;
};

// Merge tallies from parallel chains by count addition.
void merge_into(PermutationCandidateSet& dst, const PermutationCandidateSet& src);

// Uniform proposal over transpositions: exactly two positions swapped.
Permutation propose_transposition(const Permutation& p, RngStream& rng);

// Gaussian log-likelihood of the data under the permuted, triangularly
// masked mixing matrix: mean P^T (M o P D Pf^T) Pf Z with diagonal noise.
// The mask zeroes entries above the diagonal of the first d columns.
double masked_log_likelihood(const Dataset& data, const Eigen::MatrixXd& D,
                             const Permutation& p, const Permutation& pf,
                             const Eigen::MatrixXd& Z, const Eigen::VectorXd& psi);

// One M-H update of (P, Pf): independent transposition proposals, accepted
// with min(1, exp(delta log-likelihood)). cur_ll caches the current masked
// log-likelihood across repeated updates (pass NaN to force a recompute).
bool mh_update_permutations(FactorState& state, const Dataset& data, RngStream& rng,
                            double* cur_ll = nullptr);

// Candidates sorted by descending count, ties broken by earliest first
// acceptance; returns min(m_top, set size) entries.
std::vector<Permutation> top_candidates(const PermutationCandidateSet& set, int m_top);

}  // namespace slim
