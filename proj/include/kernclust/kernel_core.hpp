#pragma once

#include "kernclust/common.hpp"
#include "kernclust/model_gen.hpp"

namespace kernclust {

// Exponential dot-product Gram matrix K_ij = exp(<x_i, x_j> / p) and the
// scalars used to bracket its second-order expansion.
struct KernelMatrix {
  Matrix K;
  double tau = 1.0;
  double kappa = 0.0;
  double gamma_max = 1.0;
  double gamma_min = 1.0;
};

struct ResidualMatrices {
  Matrix R1;
  Matrix R2;
};

// Pairwise inner products <x_i, x_j> of the rows of `points`. Row blocks are
// distributed with OpenMP; every entry is the same dot product the serial
// reference evaluates, so the two agree bit for bit.
Matrix inner_products(const RowMatrix& points);
Matrix inner_products_serial(const RowMatrix& points);

Matrix exp_kernel(const RowMatrix& points);
Matrix exp_kernel_serial(const RowMatrix& points);

KernelMatrix gram_matrix(const Dataset& ds);

// tau = 1 + (rho / p^2) * mean_s ||mu_s||^2, the cluster-averaged E||x_i||^2 / p.
double tau_estimate(const Dataset& ds);

double kappa_constant(double tau, int p, double c0);
double gamma_max(int p, double c);
double gamma_min(int p, double c);

// Population surrogate Ktilde built from the realized centers.
Matrix surrogate_matrix(const Dataset& ds, double kappa);
Matrix surrogate_matrix(const Dataset& ds);

// First- and second-order residuals of the inner products around their
// population values.
ResidualMatrices residual_matrices(const Dataset& ds);
ResidualMatrices residual_matrices(const Dataset& ds, const Matrix& inner);

}  // namespace kernclust
