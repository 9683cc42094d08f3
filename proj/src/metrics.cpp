#include "slim/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace slim {

StructureMetrics structure_metrics(const Eigen::MatrixXd& eta,
                                   const Eigen::MatrixXi& decided,
                                   const Eigen::MatrixXi& truth) {
  const int d = static_cast<int>(truth.rows());
  if (truth.cols() != d || decided.rows() != d || decided.cols() != d ||
      eta.rows() != d || eta.cols() != d)
    throw std::invalid_argument("structure_metrics: dimension mismatch");

  StructureMetrics m;
  int tp = 0, fp = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      if (truth(i, j)) {
        ++m.true_edges;
        if (decided(i, j)) ++tp;
      } else if (decided(i, j)) {
        ++fp;
      }
    }
  m.tpr = m.true_edges > 0 ? static_cast<double>(tp) / m.true_edges : 1.0;
  int absent = d * (d - 1) - m.true_edges;
  m.fpr = absent > 0 ? static_cast<double>(fp) / absent : 0.0;

  // per-pair comparison; a pure direction flip counts as one error
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) {
      int t = (truth(i, j) ? 1 : 0) | (truth(j, i) ? 2 : 0);
      int e = (decided(i, j) ? 1 : 0) | (decided(j, i) ? 2 : 0);
      if (t == e) continue;
      bool flip = (t == 1 && e == 2) || (t == 2 && e == 1);
      if (flip) {
        ++m.reversed;
        ++m.structural_errors;
      } else {
        int diff = t ^ e;
        m.structural_errors += (diff & 1) + ((diff >> 1) & 1);
      }
    }

  // ROC by threshold sweep over the distinct eta scores (descending); equal
  // scores enter as one group, so the area matches tie-averaged concordance
  std::map<double, std::pair<int, int>, std::greater<double>> groups;  // score -> (pos, neg)
  int n_pos = 0, n_neg = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      auto& g = groups[eta(i, j)];
      if (truth(i, j)) {
        ++g.first;
        ++n_pos;
      } else {
        ++g.second;
        ++n_neg;
      }
    }
  if (n_pos == 0 || n_neg == 0) {
    m.auc = 1.0;
    return m;
  }
  double auc = 0.0, tpr_prev = 0.0, fpr_prev = 0.0;
  int tp_c = 0, fp_c = 0;
  for (const auto& [score, counts] : groups) {
    tp_c += counts.first;
    fp_c += counts.second;
    double tpr = static_cast<double>(tp_c) / n_pos;
    double fpr = static_cast<double>(fp_c) / n_neg;
    auc += 0.5 * (tpr + tpr_prev) * (fpr - fpr_prev);
    tpr_prev = tpr;
    fpr_prev = fpr;
  }
  m.auc = auc;
  return m;
}

}  // namespace slim
