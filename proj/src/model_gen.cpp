#include "kernclust/model_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kernclust {

int ModelParams::sample_count() const {
  return static_cast<int>(std::lround(alpha * static_cast<double>(p)));
}

void ModelParams::validate() const {
  if (k < 2) throw InvalidParameter("k must be at least 2, got " + std::to_string(k));
  if (p < 1) throw InvalidParameter("p must be at least 1, got " + std::to_string(p));
  if (!std::isfinite(alpha) || alpha <= 0) throw InvalidParameter("alpha must be positive and finite");
  if (!std::isfinite(rho) || rho < 0) throw InvalidParameter("rho must be non-negative and finite");
  if (!std::isfinite(c0) || c0 <= 0) throw InvalidParameter("c0 must be positive and finite");
  if (!std::isfinite(c_gamma) || c_gamma <= 0) throw InvalidParameter("c_gamma must be positive and finite");
  if (!std::isfinite(c_sdp) || c_sdp <= 0) throw InvalidParameter("c_sdp must be positive and finite");
  const int m = sample_count();
  if (m < k) throw InvalidParameter("m = round(alpha p) = " + std::to_string(m) + " is smaller than k");
  if (m % k != 0) {
    throw InvalidParameter("m = round(alpha p) = " + std::to_string(m) + " is not divisible by k = " +
                           std::to_string(k));
  }
}

std::vector<int> Partition::counts() const {
  std::vector<int> c(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int l : labels) {
    if (l >= 0 && l < k) ++c[l];
  }
  return c;
}

bool Partition::is_balanced() const {
  if (k < 1 || labels.empty() || size() % k != 0) return false;
  for (int l : labels) {
    if (l < 0 || l >= k) return false;
  }
  const auto c = counts();
  return std::all_of(c.begin(), c.end(), [&](int v) { return v == size() / k; });
}

void Partition::require_balanced() const {
  if (!is_balanced()) throw InvalidInput("partition is not balanced over " + std::to_string(k) + " labels");
}

Partition Partition::contiguous(int m, int k) {
  if (k < 1 || m % k != 0) throw InvalidParameter("contiguous partition needs k | m");
  Partition out{std::vector<int>(m), k};
  const int n = m / k;
  for (int i = 0; i < m; ++i) out.labels[i] = i / n;
  return out;
}

Partition Partition::random_balanced(int m, int k, Rng& rng) {
  Partition out = contiguous(m, k);
  std::shuffle(out.labels.begin(), out.labels.end(), rng);
  return out;
}

RowMatrix sample_centers(int k, int p, Rng& rng) {
  if (k < 2) throw InvalidParameter("sample_centers needs k >= 2");
  if (p < 1) throw InvalidParameter("sample_centers needs p >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(static_cast<double>(k) / (k - 1)));
  RowMatrix raw(k, p);
  for (int s = 0; s < k; ++s) {
    for (int d = 0; d < p; ++d) raw(s, d) = normal(rng);
  }
  const Eigen::RowVectorXd mean = raw.colwise().mean();
  raw.rowwise() -= mean;
  return raw;
}

Dataset sample_dataset(const ModelParams& params) {
  params.validate();
  Rng rng = make_rng(params.seed);
  const int m = params.sample_count();
  const int p = params.p;

  Dataset ds;
  ds.params = params;
  ds.centers = sample_centers(params.k, p, rng);
  ds.truth = Partition::contiguous(m, params.k);
  ds.points.resize(m, p);

  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(params.rho / p);
  for (int i = 0; i < m; ++i) {
    const int s = ds.truth.labels[i];
    for (int d = 0; d < p; ++d) ds.points(i, d) = scale * ds.centers(s, d) + normal(rng);
  }
  return ds;
}

}  // namespace kernclust
