#pragma once

#include <cstdint>
#include <vector>

#include "kernclust/common.hpp"

namespace kernclust {

// Grothendieck constant as used in the certificate arithmetic.
inline constexpr double kGrothendieck = 1.783;

struct SdpOptions {
  // Converged when both residuals fall below tol * (1 + ||X||_F) and every
  // entry of X_hat is within feas_tol of the polyhedral iterate.
  double tol = 1e-6;
  double feas_tol = 1e-5;
  int max_iter = 5000;
  double over_relaxation = 1.6;
  double penalty = 3.0;  // initial ADMM penalty on the rescaled objective
  // Penalty is rebalanced every `adapt_every` iterations when the primal and
  // dual residuals drift apart by more than `adapt_ratio`.
  int adapt_every = 10;
  double adapt_ratio = 10.0;
  // Optional starting point for the polyhedral iterate (e.g. a clustering
  // matrix); empty means start from (1/k) J + (1 - 1/k) I.
  Matrix warm_start;
};

struct SdpSolution {
  Matrix X_hat;  // last PSD iterate
  double objective = 0.0;  // trace(K X_hat)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double max_violation = 0.0;  // max |X_hat - Z|, Z the polyhedral iterate
  int iterations = 0;
  bool converged = false;
};

struct SdpFeasibility {
  double diag = 0.0;         // max |X_ii - 1|
  double negativity = 0.0;   // max(0, -min X_ij)
  double row_sum = 0.0;      // max |sum_j X_ij - m/k| / (m/k)
  double asymmetry = 0.0;    // max |X_ij - X_ji|
  double min_eigenvalue = 0.0;

  double worst() const;
};

// max trace(K X) s.t. X PSD, X >= 0, X 1 = (m/k) 1, diag(X) = 1, by ADMM
// splitting between the PSD cone (eigenvalue clipping) and the polyhedral set
// (exact per-column simplex projection). Non-convergence is reported through
// `converged`, never thrown.
SdpSolution solve_sdp(const Matrix& K, int k, const SdpOptions& opts = {});

SdpFeasibility check_feasibility(const Matrix& X, int k);

// Frobenius projection onto the symmetric PSD cone.
Matrix project_psd(const Matrix& W);

// Euclidean projection of `v` onto {y >= 0, sum y = total}.
void project_simplex(Eigen::Ref<Vector> v, double total);

struct NormEstimate {
  double value = 0.0;
  std::vector<int> y;  // entries in {-1, +1}
  std::vector<int> z;
  bool exact = false;
  // Heuristic only: value after every half-step of the winning restart.
  std::vector<double> trace;
};

inline constexpr int kDefaultExactNormCap = 20;

// max_{y,z in {±1}^m} y^T A z by Gray-code enumeration of y with z = sign(A^T y).
NormEstimate inf_to_one_norm_exact(const Matrix& A, int max_rows = kDefaultExactNormCap);

// Alternating sign maximization from random starts; a lower bound on the norm.
NormEstimate inf_to_one_norm_lower(const Matrix& A, int restarts, std::uint64_t seed);

double sign_form(const Matrix& A, const std::vector<int>& y, const std::vector<int>& z);

struct GrothendieckReport {
  double inner = 0.0;       // <K - Ktilde, X_star - X_hat>
  NormEstimate norm;        // of K - Ktilde
  double ratio = 0.0;       // inner / (K_G * norm)
  bool violation = false;   // inner > 2 K_G norm with an exact norm
  double l1_gap = 0.0;      // ||X_star - X_hat||_1
  // 2 <Ktilde, X_star - X_hat> / phi with the leading phi = (rho/p) k/(k-1).
  double l1_bound_leading = 0.0;
  // Magnitudes of the omitted phi corrections: sqrt(log p / p) and kappa rho / p.
  double phi_correction_sqrt = 0.0;
  double phi_correction_kappa = 0.0;
};

struct CertificateContext {
  double rho = 0.0;
  int p = 1;
  int k = 2;
  double kappa = 0.0;
};

GrothendieckReport grothendieck_certificate(const Matrix& K, const Matrix& Ktilde, const Matrix& X_hat,
                                            const Matrix& X_star, const CertificateContext& ctx,
                                            int heuristic_restarts = 50, std::uint64_t seed = 0,
                                            int exact_cap = kDefaultExactNormCap);

}  // namespace kernclust
