#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kernclust/common.hpp"
#include "kernclust/model_gen.hpp"

namespace kernclust {

enum class SolveMethod { exhaustive, lloyd_balanced };

std::string to_string(SolveMethod m);

struct SolveReport {
  Partition best_partition;
  double best_objective = 0.0;  // kernel_objective(K, best_partition)
  // Exhaustive: number of balanced partitions enumerated (modulo label
  // permutation). Lloyd: assignment iterations of the winning restart.
  long long iterations = 0;
  int restarts_used = 0;
  SolveMethod method = SolveMethod::exhaustive;
  // Objective after each accepted step of the winning restart.
  std::vector<double> objective_trace;
};

inline constexpr int kDefaultExhaustiveCap = 14;

// Global maximizer of the kernel k-means objective over balanced partitions.
// Ties resolve to the lexicographically smallest canonical label vector.
SolveReport exhaustive_balanced(const Matrix& K, int k, int max_points = kDefaultExhaustiveCap);

struct LloydOptions {
  int restarts = 20;
  int max_iter = 100;
  int max_swap_passes = 50;
};

// Balanced kernelized Lloyd iterations from random balanced starts, each
// finished with a pass of objective-improving pair swaps. Restart r draws
// from the stream derive_seed(seed, {r}); the best restart wins, ties to the
// lowest restart index.
SolveReport lloyd_balanced(const Matrix& K, int k, std::uint64_t seed, const LloydOptions& opts = {});

// Capacity-constrained assignment maximizing sum_i affinity(i, label_i) with
// m/k slots per cluster: greedy by preference gap, then improving swaps.
Partition balanced_assignment(const Matrix& affinity, int k);

}  // namespace kernclust
