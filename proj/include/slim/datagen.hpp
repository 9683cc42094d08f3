#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "slim/types.hpp"

namespace slim {

struct SourceKind {
  enum class Type { GeneralizedGaussian, Laplace, Cauchy };
  Type type = Type::GeneralizedGaussian;
  double shape = 2.0;  // generalized-Gaussian shape only
};

// Generating model behind a synthetic dataset, in variable space
// (row = child, column = parent).
struct GroundTruthModel {
  Eigen::MatrixXi R_true;   // d x d adjacency
  Eigen::MatrixXd B_true;   // weights, zero exactly off-support
  Eigen::MatrixXi L_true;   // d x m latent adjacency
  Eigen::MatrixXd C_l_true;
  Eigen::MatrixXd C_fm;     // mixing matrix for true-factor-model data
  Permutation p_true;       // generating order: position -> variable
  std::vector<SourceKind> source_kinds;  // per variable, then per latent
  Eigen::MatrixXd Z_true;   // sources, (d+m) x N (variable order, latents last)
  int m = 0;
  bool dense = false;
  double sparsity = 1.0;
  bool is_factor_model = false;
};

// LiNGAM-style random DAG suite: with probability 1/2 fully connected,
// otherwise a sparsity level uniform over {10%, ..., 80%}; sources are
// zero-mean unit-variance generalized Gaussians with random non-Gaussian
// shape; rows permuted randomly to hide the generating order.
std::pair<Dataset, GroundTruthModel> generate_lingam_suite(int d, int N,
                                                           std::uint64_t seed);

// Supported entries drawn as sign(N(0,1)) + N(0, 0.2); errors on cyclic R.
Eigen::MatrixXd weights_from_structure(const Eigen::MatrixXi& R, std::uint64_t seed);

// The DAG suite extended with m latent variables, each loading on at least
// two observed variables; never dense, all sources generalized Gaussian with
// random non-Gaussian shape.
std::pair<Dataset, GroundTruthModel> generate_latent_suite(int d, int m, int N,
                                                           std::uint64_t seed);

// Two observed variables and one latent with weights {b21, c1L, c2L} =
// {1, 1, -1}. Variant 'u': all sources Laplace (non-identifiable pair);
// variant 'i': latent source Cauchy (identifiable).
std::pair<Dataset, GroundTruthModel> generate_toy_latent_pair(char variant, int N,
                                                              std::uint64_t seed);

// Four variables: x2 = x1^2 + z2, x3 = 4 sqrt|x1| + z3,
// x4 = 2 sin x2 + 2 sin x3 + z4, Laplace driving signals. The valid causal
// orderings are exactly (1,2,3,4) and (1,3,2,4).
std::pair<Dataset, GroundTruthModel> generate_nonlinear_toy(int N, std::uint64_t seed);

// True factor model: dense square mixing (not permutable to triangular, so
// the data admits no DAG representation), generalized-Gaussian sources.
std::pair<Dataset, GroundTruthModel> generate_fm_dataset(int d, int N,
                                                         std::uint64_t seed);

}  // namespace slim
