#pragma once

#include <cstdint>
#include <vector>

#include "kernclust/common.hpp"
#include "kernclust/rng.hpp"

namespace kernclust {

// Problem instance: k balanced clusters of m = round(alpha * p) points in R^p,
// cluster means sqrt(rho / p) * mu_s.
struct ModelParams {
  int k = 2;
  int p = 100;
  double alpha = 1.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
  double c0 = 1.0;       // constant inside kappa = e^tau * exp(c0 log p / sqrt p)
  double c_gamma = 1.0;  // constant inside gamma_max / gamma_min
  double c_sdp = 1.0;    // constant of the SDP threshold c k (1 v 1/sqrt(alpha))

  int sample_count() const;
  int cluster_size() const { return sample_count() / k; }

  // Throws InvalidParameter when the instance is not well defined.
  void validate() const;
};

// Balanced map [m] -> [k]; labels are 0-based.
struct Partition {
  std::vector<int> labels;
  int k = 0;

  int size() const { return static_cast<int>(labels.size()); }
  bool is_balanced() const;
  std::vector<int> counts() const;
  // Throws InvalidInput unless labels are in range and every label has m/k members.
  void require_balanced() const;

  // First m/k indices to cluster 0, next m/k to cluster 1, ...
  static Partition contiguous(int m, int k);
  static Partition random_balanced(int m, int k, Rng& rng);

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct Dataset {
  RowMatrix points;   // m x p, one point per row
  RowMatrix centers;  // k x p, centered (rows sum to zero)
  Partition truth;
  ModelParams params;

  int m() const { return static_cast<int>(points.rows()); }
  int p() const { return static_cast<int>(points.cols()); }
  int k() const { return truth.k; }
  // Row of `centers` for the true cluster of point i.
  auto center_of(int i) const { return centers.row(truth.labels[i]); }
};

// k centers drawn i.i.d. N(0, k/(k-1) I_p) and then centered by their sample mean.
RowMatrix sample_centers(int k, int p, Rng& rng);

// Deterministic in params.seed.
Dataset sample_dataset(const ModelParams& params);

}  // namespace kernclust
