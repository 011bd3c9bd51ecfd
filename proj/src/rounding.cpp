#include "kernclust/rounding.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kernclust/kmeans_opt.hpp"
#include "kernclust/partition_metrics.hpp"
#include "kernclust/rng.hpp"

namespace kernclust {

Matrix l1_distances(const Matrix& X) {
  // Columns of X^T are the rows of X, stored contiguously.
  const Matrix Xt = X.transpose();
  const Eigen::Index m = X.rows();
  Matrix D(m, m);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < m; ++i) {
    D(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = (Xt.col(i) - Xt.col(j)).cwiseAbs().sum();
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

Matrix l1_distances_serial(const Matrix& X) {
  const Matrix Xt = X.transpose();
  const Eigen::Index m = X.rows();
  Matrix D(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    D(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = (Xt.col(i) - Xt.col(j)).cwiseAbs().sum();
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

double kmedians_cost(const Matrix& D, const std::vector<int>& centers) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c : centers) best = std::min(best, D(i, c));
    total += best;
  }
  return total;
}

double kmedians_exact_cost(const Matrix& D, int k, int max_points) {
  const int m = static_cast<int>(D.rows());
  if (m > max_points) throw Refused("exact k-medians refused: m = " + std::to_string(m));
  if (k < 1 || k > m) throw InvalidParameter("kmedians_exact_cost: need 1 <= k <= m");
  std::vector<int> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, kmedians_cost(D, pick));
    int i = k - 1;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

KMediansResult kmedians_local_search(const Matrix& D, int k, std::uint64_t seed) {
  const int m = static_cast<int>(D.rows());
  if (D.cols() != m) throw InvalidInput("kmedians_local_search: D must be square");
  if (k < 1 || m % k != 0) throw InvalidParameter("kmedians_local_search: k must divide m");

  Rng rng = make_rng(seed);
  KMediansResult res;

  // D^1 seeding: first median uniform, later ones proportional to distance.
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  std::vector<char> is_center(m, 0);
  res.centers.push_back(std::uniform_int_distribution<int>(0, m - 1)(rng));
  is_center[res.centers[0]] = 1;
  while (static_cast<int>(res.centers.size()) < k) {
    const int last = res.centers.back();
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      nearest[i] = std::min(nearest[i], D(i, last));
      if (!is_center[i]) total += nearest[i];
    }
    int next = -1;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (int i = 0; i < m; ++i) {
        if (is_center[i]) continue;
        next = i;
        u -= nearest[i];
        if (u < 0.0) break;
      }
    } else {
      for (int i = 0; i < m && next < 0; ++i) {
        if (!is_center[i]) next = i;
      }
    }
    res.centers.push_back(next);
    is_center[next] = 1;
  }

  res.cost = kmedians_cost(D, res.centers);
  bool improved = true;
  while (improved) {
    improved = false;
    for (int c = 0; c < k && !improved; ++c) {
      for (int o = 0; o < m; ++o) {
        if (is_center[o]) continue;
        std::vector<int> trial = res.centers;
        trial[c] = o;
        const double cost = kmedians_cost(D, trial);
        if (cost < res.cost * (1.0 - 1e-12)) {
          is_center[res.centers[c]] = 0;
          is_center[o] = 1;
          res.centers = std::move(trial);
          res.cost = cost;
          ++res.swaps;
          improved = true;
          break;
        }
      }
    }
  }

  res.nearest = Partition{std::vector<int>(m, 0), k};
  Matrix affinity(m, k);
  for (int i = 0; i < m; ++i) {
    int best = 0;
    for (int c = 0; c < k; ++c) {
      affinity(i, c) = -D(i, res.centers[c]);
      if (D(i, res.centers[c]) < D(i, res.centers[best])) best = c;
    }
    res.nearest.labels[i] = best;
  }
  res.balanced = balanced_assignment(affinity, k);
  return res;
}

Partition kmedians_rows(const Matrix& X_hat, int k, std::uint64_t seed) {
  if (X_hat.rows() != X_hat.cols()) throw InvalidInput("kmedians_rows: X_hat must be square");
  return kmedians_local_search(l1_distances(X_hat), k, seed).balanced;
}

RoundingReport error_certificate(const Matrix& X_hat, const Matrix& X_star, double eta) {
  if (X_hat.rows() != X_star.rows() || X_hat.cols() != X_star.cols()) {
    throw InvalidInput("error_certificate: shape mismatch");
  }
  if (!(eta >= 1.0)) throw InvalidParameter("error_certificate: eta must be at least 1");
  RoundingReport rep;
  rep.eta = eta;
  rep.l1_gap = (X_hat - X_star).cwiseAbs().sum();
  const double star_l1 = X_star.cwiseAbs().sum();
  rep.certified_err_bound = 2.0 * (1.0 + 2.0 * eta) * rep.l1_gap / star_l1;
  const double m = static_cast<double>(X_star.rows());
  const double k = std::round(m * m / star_l1);
  rep.certified_recovery = rep.certified_err_bound < 1.0 - 1.0 / k;
  return rep;
}

RoundingReport round_and_certify(const Matrix& X_hat, const Partition& truth, std::uint64_t seed, double eta) {
  if (X_hat.rows() != truth.size()) throw InvalidInput("round_and_certify: size mismatch");
  RoundingReport rep = error_certificate(X_hat, clustering_matrix(truth), eta);
  rep.partition = kmedians_rows(X_hat, truth.k, seed);
  rep.actual_err = misclassification(rep.partition, truth);
  return rep;
}

}  // namespace kernclust
