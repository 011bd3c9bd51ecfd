#include "kernclust/partition_metrics.hpp"

#include <limits>
#include <string>

namespace kernclust {

namespace {

void require_compatible(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("partition length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.k != b.k) throw InvalidInput("partitions use different k");
  a.require_balanced();
  b.require_balanced();
}

void require_square(const Matrix& K, const Partition& sigma) {
  if (K.rows() != K.cols() || K.rows() != sigma.size()) throw InvalidInput("kernel matrix size does not match partition");
}

}  // namespace

Matrix overlap_matrix(const Partition& sigma, const Partition& sigma_star) {
  require_compatible(sigma, sigma_star);
  const int k = sigma.k;
  const int m = sigma.size();
  Matrix beta = Matrix::Zero(k, k);
  for (int i = 0; i < m; ++i) beta(sigma.labels[i], sigma_star.labels[i]) += 1.0;
  beta *= static_cast<double>(k) / m;
  return beta;
}

double overlap_similarity(const Partition& sigma, const Partition& sigma_star) {
  return overlap_matrix(sigma, sigma_star).squaredNorm();
}

std::vector<int> max_weight_assignment(const Matrix& weights) {
  // Shortest augmenting path on cost = -weights, potentials u/v, 1-based.
  const int n = static_cast<int>(weights.rows());
  if (weights.cols() != n) throw InvalidInput("max_weight_assignment needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(n);
  for (int j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

double misclassification(const Partition& sigma, const Partition& sigma_star) {
  const Matrix beta = overlap_matrix(sigma, sigma_star);
  const auto perm = max_weight_assignment(beta);
  double trace = 0.0;
  for (int s = 0; s < beta.rows(); ++s) trace += beta(s, perm[s]);
  const double err = 1.0 - trace / sigma.k;
  return err < 0.0 ? 0.0 : err;
}

double kernel_objective(const Matrix& K, const Partition& sigma) {
  require_square(K, sigma);
  const int m = sigma.size();
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const int s = sigma.labels[j];
    for (int i = 0; i < m; ++i) {
      if (sigma.labels[i] == s) total += K(i, j);
    }
  }
  return total;
}

double kernel_objective_normalized(const Matrix& K, const Partition& sigma) {
  return static_cast<double>(sigma.k) / sigma.size() * kernel_objective(K, sigma);
}

Matrix clustering_matrix(const Partition& sigma) {
  const int m = sigma.size();
  Matrix x(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) x(i, j) = sigma.labels[i] == sigma.labels[j] ? 1.0 : 0.0;
  }
  return x;
}

Matrix cluster_affinities(const Matrix& K, const Partition& sigma) {
  require_square(K, sigma);
  const int m = sigma.size();
  Matrix a = Matrix::Zero(m, sigma.k);
  // K is symmetric, so column i holds row i contiguously.
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const double* col = K.col(i).data();
    for (int j = 0; j < m; ++j) a(i, sigma.labels[j]) += col[j];
  }
  return a;
}

Matrix cluster_affinities_serial(const Matrix& K, const Partition& sigma) {
  require_square(K, sigma);
  const int m = sigma.size();
  Matrix a = Matrix::Zero(m, sigma.k);
  for (int i = 0; i < m; ++i) {
    const double* col = K.col(i).data();
    for (int j = 0; j < m; ++j) a(i, sigma.labels[j]) += col[j];
  }
  return a;
}

}  // namespace kernclust
