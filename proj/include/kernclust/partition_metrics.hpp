#pragma once

#include <vector>

#include "kernclust/common.hpp"
#include "kernclust/model_gen.hpp"

namespace kernclust {

// beta_{s,t} = k |sigma^{-1}(s) ∩ sigma_star^{-1}(t)| / m.
Matrix overlap_matrix(const Partition& sigma, const Partition& sigma_star);

// ||beta||_F^2, in [1, k] for balanced partitions.
double overlap_similarity(const Partition& sigma, const Partition& sigma_star);

// Optimal assignment on a square weight matrix (Hungarian method).
// Returns perm with perm[row] = column, maximizing sum_r w(r, perm[r]).
std::vector<int> max_weight_assignment(const Matrix& weights);

// 1 - max_pi trace(pi beta) / k, in [0, 1 - 1/k].
double misclassification(const Partition& sigma, const Partition& sigma_star);

// Sum over clusters s of sum_{i,j in sigma^{-1}(s)} K_ij (ordered pairs, diagonal included).
double kernel_objective(const Matrix& K, const Partition& sigma);
// (k/m) times the raw objective.
double kernel_objective_normalized(const Matrix& K, const Partition& sigma);

// X_ij = 1 if sigma(i) == sigma(j), 0 otherwise.
Matrix clustering_matrix(const Partition& sigma);

// A(i, s) = sum_{j in sigma^{-1}(s)} K_ij. OpenMP over rows; the serial
// variant performs the identical per-row accumulation.
Matrix cluster_affinities(const Matrix& K, const Partition& sigma);
Matrix cluster_affinities_serial(const Matrix& K, const Partition& sigma);

}  // namespace kernclust
