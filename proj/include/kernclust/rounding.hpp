#pragma once

#include <cstdint>
#include <vector>

#include "kernclust/common.hpp"
#include "kernclust/model_gen.hpp"

namespace kernclust {

// Approximation factor assumed for the k-medians step in the certificate.
inline constexpr double kDefaultEta = 7.0;

// Pairwise l1 distances between the rows of X. OpenMP over rows; the serial
// variant evaluates the same per-pair sums.
Matrix l1_distances(const Matrix& X);
Matrix l1_distances_serial(const Matrix& X);

struct KMediansResult {
  std::vector<int> centers;  // row indices used as medians
  double cost = 0.0;         // sum_i min_c D(i, c)
  Partition nearest;         // nearest-median labels (possibly unbalanced)
  Partition balanced;        // after capacity-m/k reassignment
  int swaps = 0;
};

// Single-swap local search over medians chosen among the points, seeded by
// D^1 sampling from `seed`, followed by a balanced reassignment.
KMediansResult kmedians_local_search(const Matrix& D, int k, std::uint64_t seed);

// Sum_i min_{c in centers} D(i, c).
double kmedians_cost(const Matrix& D, const std::vector<int>& centers);

// Minimum cost over all k-subsets of points (small m only).
double kmedians_exact_cost(const Matrix& D, int k, int max_points = 16);

// Balanced partition from the rows of X_hat under l1 distance.
Partition kmedians_rows(const Matrix& X_hat, int k, std::uint64_t seed);

struct RoundingReport {
  Partition partition;
  double eta = kDefaultEta;
  double l1_gap = 0.0;               // ||X_hat - X_star||_1
  double certified_err_bound = 0.0;  // 2 (1 + 2 eta) l1_gap / ||X_star||_1
  double actual_err = -1.0;          // err(partition, truth); -1 when unknown
  bool certified_recovery = false;   // certified bound < 1 - 1/k
};

// Certificate only; `partition` stays empty and actual_err = -1.
RoundingReport error_certificate(const Matrix& X_hat, const Matrix& X_star, double eta = kDefaultEta);

// k-medians rounding plus certificate against the planted partition.
RoundingReport round_and_certify(const Matrix& X_hat, const Partition& truth, std::uint64_t seed,
                                 double eta = kDefaultEta);

}  // namespace kernclust
