#pragma once

#include <Eigen/Dense>

namespace slim {

struct StructureMetrics {
  double tpr = 0.0;   // recovered true edges / true edges
  double fpr = 0.0;   // spurious edges / (d(d-1) - true edges)
  int reversed = 0;   // true edges present with flipped direction only
  int structural_errors = 0;  // per-pair mismatches; a reversal counts once
  int true_edges = 0;
  double auc = 0.0;   // ROC area from sweeping the eta threshold
};

// Directed-structure recovery metrics in variable space. `eta` scores each
// ordered pair (row = child, column = parent); `decided` is the thresholded
// adjacency; `truth` the generating adjacency. Diagonals are ignored.
StructureMetrics structure_metrics(const Eigen::MatrixXd& eta,
                                   const Eigen::MatrixXi& decided,
                                   const Eigen::MatrixXi& truth);

}  // namespace slim
