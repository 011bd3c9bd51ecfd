#include "kernclust/kernel_core.hpp"

#include <cmath>

namespace kernclust {

namespace {

inline double row_dot(const RowMatrix& x, Eigen::Index i, Eigen::Index j) {
  return x.row(i).dot(x.row(j));
}

// <mu_s, mu_t> for all pairs of centers.
Matrix center_products(const Dataset& ds) {
  return ds.centers * ds.centers.transpose();
}

}  // namespace

Matrix inner_products(const RowMatrix& points) {
  const Eigen::Index m = points.rows();
  Matrix g(m, m);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = row_dot(points, i, j);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Matrix inner_products_serial(const RowMatrix& points) {
  const Eigen::Index m = points.rows();
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = row_dot(points, i, j);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Matrix exp_kernel(const RowMatrix& points) {
  const Eigen::Index m = points.rows();
  const double inv_p = 1.0 / static_cast<double>(points.cols());
  Matrix k(m, m);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = std::exp(row_dot(points, i, j) * inv_p);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix exp_kernel_serial(const RowMatrix& points) {
  const Eigen::Index m = points.rows();
  const double inv_p = 1.0 / static_cast<double>(points.cols());
  Matrix k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = std::exp(row_dot(points, i, j) * inv_p);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double tau_estimate(const Dataset& ds) {
  const double p = ds.p();
  const double mean_sq = ds.centers.rowwise().squaredNorm().mean();
  return 1.0 + ds.params.rho / (p * p) * mean_sq;
}

double kappa_constant(double tau, int p, double c0) {
  return std::exp(tau) * std::exp(c0 * std::log(static_cast<double>(p)) / std::sqrt(static_cast<double>(p)));
}

double gamma_max(int p, double c) {
  return std::exp(c * std::log(static_cast<double>(p)) / std::sqrt(static_cast<double>(p)));
}

double gamma_min(int p, double c) {
  return std::exp(-c * std::log(static_cast<double>(p)) / std::sqrt(static_cast<double>(p)));
}

KernelMatrix gram_matrix(const Dataset& ds) {
  if (ds.m() == 0) throw InvalidInput("gram_matrix: empty dataset");
  KernelMatrix out;
  out.K = exp_kernel(ds.points);
  out.tau = tau_estimate(ds);
  out.kappa = kappa_constant(out.tau, ds.p(), ds.params.c0);
  out.gamma_max = gamma_max(ds.p(), ds.params.c_gamma);
  out.gamma_min = gamma_min(ds.p(), ds.params.c_gamma);
  return out;
}

Matrix surrogate_matrix(const Dataset& ds) {
  return surrogate_matrix(ds, kappa_constant(tau_estimate(ds), ds.p(), ds.params.c0));
}

Matrix surrogate_matrix(const Dataset& ds, double kappa) {
  // f(t) = exp(t): f(0) = f'(0) = 1.
  const int m = ds.m();
  const double p = ds.p();
  const double p2 = p * p;
  const double p4 = p2 * p2;
  const double rho = ds.params.rho;
  const Matrix mu = center_products(ds);
  const auto& lab = ds.truth.labels;

  Matrix kt(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double ip = mu(lab[i], lab[j]);
      if (i != j) {
        kt(i, j) = 1.0 + rho * ip / p2 + kappa * rho * rho * ip * ip / p4 + kappa / p;
      } else {
        const double q = p2 + rho * ip;
        kt(i, j) = 1.0 + q / p2 + kappa * q * q / p4 + kappa / p;
      }
    }
  }
  return kt;
}

ResidualMatrices residual_matrices(const Dataset& ds) {
  return residual_matrices(ds, inner_products(ds.points));
}

ResidualMatrices residual_matrices(const Dataset& ds, const Matrix& inner) {
  const int m = ds.m();
  if (inner.rows() != m || inner.cols() != m) throw InvalidInput("residual_matrices: inner product size mismatch");
  const double p = ds.p();
  const double p2 = p * p;
  const double p4 = p2 * p2;
  const double rho = ds.params.rho;
  const Matrix mu = center_products(ds);
  const auto& lab = ds.truth.labels;

  ResidualMatrices r{Matrix(m, m), Matrix(m, m)};
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double g = inner(i, j);
      const double ip = mu(lab[i], lab[j]);
      if (i != j) {
        r.R1(i, j) = g / p - rho * ip / p2;
        r.R2(i, j) = g * g / p2 - rho * rho * ip * ip / p4 - 1.0 / p;
      } else {
        const double q = p2 + rho * ip;
        r.R1(i, j) = g / p - q / p2;
        r.R2(i, j) = g * g / p2 - q * q / p4 - 1.0 / p;
      }
    }
  }
  return r;
}

}  // namespace kernclust
