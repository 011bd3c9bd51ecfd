#include "kernclust/sdp_relax.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "kernclust/rng.hpp"

#include <lapacke.h>

namespace kernclust {

double SdpFeasibility::worst() const {
  return std::max({diag, negativity, row_sum, asymmetry, std::max(0.0, -min_eigenvalue)});
}

namespace {

// Eigenpairs of the symmetric matrix `work` (overwritten) with eigenvalues in
// (lo, hi]; returns how many were found.
lapack_int eigen_range(Matrix& work, double lo, double hi, Vector& lam, Matrix& V) {
  const lapack_int n = static_cast<lapack_int>(work.rows());
  lam.resize(n);
  V.resize(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n, work.data(), n, lo, hi, 0, 0, 0.0, &found,
                                         lam.data(), V.data(), n, support.data());
  if (info != 0) throw std::runtime_error("project_psd: dsyevr failed with info " + std::to_string(info));
  return found;
}

lapack_int eigen_full(Matrix& work, Vector& lam) {
  const lapack_int n = static_cast<lapack_int>(work.rows());
  lam.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, lam.data());
  if (info != 0) throw std::runtime_error("project_psd: dsyevd failed with info " + std::to_string(info));
  return n;
}

// B B^T, or sym + B B^T when `base` is given.
Matrix low_rank(const Matrix& B, const Matrix* base) {
  const Eigen::Index n = B.rows();
  Matrix out = base ? *base : Matrix::Zero(n, n);
  if (B.cols() > 0) out.selfadjointView<Eigen::Lower>().rankUpdate(B);
  return out.selfadjointView<Eigen::Lower>();
}

// `hint` carries the positive count between calls: a partial spectrum from
// the smaller side when it is small, a full decomposition otherwise.
Matrix project_psd_hinted(const Matrix& W, Eigen::Index& hint) {
  const Eigen::Index n = W.rows();
  if (n == 0) return Matrix();
  const Matrix sym = 0.5 * (W + W.transpose());
  const double bound = sym.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(bound > 0.0)) {
    hint = 0;
    return Matrix::Zero(n, n);
  }
  const double edge = bound * (1.0 + 1e-12) + 1e-300;
  const Eigen::Index small = std::max<Eigen::Index>(8, n / 6);
  Matrix work = sym;
  Vector lam;
  Matrix V;

  if (hint >= 0 && hint <= small) {
    const lapack_int found = eigen_range(work, 0.0, edge, lam, V);
    hint = found;
    Matrix B = V.leftCols(found);
    for (lapack_int c = 0; c < found; ++c) B.col(c) *= std::sqrt(lam(c));
    return low_rank(B, nullptr);
  }
  if (hint >= n - small) {
    const lapack_int found = eigen_range(work, -edge, 0.0, lam, V);
    hint = n - found;
    Matrix B = V.leftCols(found);
    for (lapack_int c = 0; c < found; ++c) B.col(c) *= std::sqrt(-lam(c));
    return low_rank(B, &sym);
  }

  eigen_full(work, lam);
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) positives += lam(i) > 0.0 ? 1 : 0;
  hint = positives;
  // Eigenvalues are ascending; rebuild from whichever side is smaller.
  if (positives <= n / 2) {
    const Eigen::Index first = n - positives;
    Matrix B = work.rightCols(positives);
    for (Eigen::Index c = 0; c < positives; ++c) B.col(c) *= std::sqrt(lam(first + c));
    return low_rank(B, nullptr);
  }
  const Eigen::Index negatives = n - positives;
  Matrix B = work.leftCols(negatives);
  for (Eigen::Index c = 0; c < negatives; ++c) B.col(c) *= std::sqrt(-lam(c));
  return low_rank(B, &sym);
}

}  // namespace

Matrix project_psd(const Matrix& W) {
  Eigen::Index hint = -1;
  return project_psd_hinted(W, hint);
}

void project_simplex(Eigen::Ref<Vector> v, double total) {
  const Eigen::Index n = v.size();
  if (n == 0) return;
  if (total <= 0.0) {
    v.setZero();
    return;
  }
  // Michelot: drop entries below the running threshold until none drop.
  std::vector<double> active(v.data(), v.data() + n);
  double theta = 0.0;
  for (;;) {
    double sum = 0.0;
    for (double x : active) sum += x;
    theta = (sum - total) / static_cast<double>(active.size());
    std::size_t kept = 0;
    for (double x : active) {
      if (x > theta) active[kept++] = x;
    }
    if (kept == active.size()) break;
    active.resize(kept);
  }
  for (Eigen::Index j = 0; j < n; ++j) v(j) = std::max(v(j) - theta, 0.0);
}

namespace {

// Columns of Z: unit diagonal, the rest on the simplex of mass m/k - 1.
void project_polyhedral(Matrix& Z, double block) {
  const Eigen::Index m = Z.rows();
  Vector off(m - 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    auto col = Z.col(j);
    off.head(j) = col.head(j);
    off.tail(m - 1 - j) = col.tail(m - 1 - j);
    project_simplex(off, block - 1.0);
    col.head(j) = off.head(j);
    col.tail(m - 1 - j) = off.tail(m - 1 - j);
    col(j) = 1.0;
  }
}

}  // namespace

SdpSolution solve_sdp(const Matrix& K, int k, const SdpOptions& opts) {
  if (K.rows() != K.cols()) throw InvalidInput("solve_sdp: K must be square");
  const Eigen::Index m = K.rows();
  if (k < 1 || m == 0 || m % k != 0) throw InvalidParameter("solve_sdp: k must divide m");
  const double block = static_cast<double>(m) / k;

  SdpSolution sol;
  if (k == m) {
    // Unit diagonal with unit row sums and X >= 0 leaves only the identity.
    sol.X_hat = Matrix::Identity(m, m);
    sol.objective = K.trace();
    sol.converged = true;
    return sol;
  }

  // On the feasible set the diagonal and the all-ones direction contribute
  // constants, so drop them and rescale before splitting.
  Matrix C = 0.5 * (K + K.transpose());
  C.diagonal().setZero();
  const double off_mean = C.sum() / static_cast<double>(m * (m - 1));
  C.array() -= off_mean;
  C.diagonal().setZero();
  const double c_norm = C.norm();
  if (c_norm > 0.0) C *= (static_cast<double>(m) / std::sqrt(static_cast<double>(k))) / c_norm;

  Matrix Z;
  if (opts.warm_start.size() > 0) {
    if (opts.warm_start.rows() != m || opts.warm_start.cols() != m) throw InvalidInput("solve_sdp: warm start shape");
    Z = opts.warm_start;
  } else {
    Z = Matrix::Constant(m, m, 1.0 / k);
    Z.diagonal().setOnes();
  }
  Matrix U = Matrix::Zero(m, m);
  Matrix X = Z;
  double beta = opts.penalty;
  Eigen::Index positives = -1;
  const double a = opts.over_relaxation;

  for (int it = 1; it <= opts.max_iter; ++it) {
    X = project_psd_hinted(Z - U + C / beta, positives);
    const Matrix relaxed = a * X + (1.0 - a) * Z;
    Matrix Z_next = relaxed + U;
    project_polyhedral(Z_next, block);
    U += relaxed - Z_next;

    const Matrix gap = X - Z_next;
    sol.primal_residual = gap.norm();
    sol.max_violation = gap.cwiseAbs().maxCoeff();
    sol.dual_residual = beta * (Z_next - Z).norm();
    Z = std::move(Z_next);
    sol.iterations = it;

    const double scale = 1.0 + X.norm();
    if (std::max(sol.primal_residual, sol.dual_residual) < opts.tol * scale && sol.max_violation < opts.feas_tol) {
      sol.converged = true;
      break;
    }
    if (opts.adapt_every > 0 && it % opts.adapt_every == 0) {
      if (sol.primal_residual > opts.adapt_ratio * sol.dual_residual) {
        beta *= 2.0;
        U /= 2.0;
      } else if (sol.dual_residual > opts.adapt_ratio * sol.primal_residual) {
        beta /= 2.0;
        U *= 2.0;
      }
    }
  }

  sol.X_hat = std::move(X);
  sol.objective = (K.cwiseProduct(sol.X_hat)).sum();
  return sol;
}

SdpFeasibility check_feasibility(const Matrix& X, int k) {
  if (X.rows() != X.cols()) throw InvalidInput("check_feasibility: X must be square");
  const Eigen::Index m = X.rows();
  const double block = static_cast<double>(m) / k;
  SdpFeasibility f;
  f.diag = (X.diagonal().array() - 1.0).abs().maxCoeff();
  f.negativity = std::max(0.0, -X.minCoeff());
  f.row_sum = ((X.rowwise().sum().array() - block).abs() / block).maxCoeff();
  f.asymmetry = (X - X.transpose()).cwiseAbs().maxCoeff();
  const Matrix sym = 0.5 * (X + X.transpose());
  f.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return f;
}

double sign_form(const Matrix& A, const std::vector<int>& y, const std::vector<int>& z) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) col += y[i] * A(i, j);
    v += col * z[j];
  }
  return v;
}

NormEstimate inf_to_one_norm_exact(const Matrix& A, int max_rows) {
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
  if (rows > max_rows) {
    throw Refused("exact inf->1 norm refused: " + std::to_string(rows) + " rows exceeds cap " + std::to_string(max_rows));
  }
  NormEstimate best;
  best.exact = true;
  if (rows == 0 || cols == 0) {
    best.y.assign(rows, 1);
    best.z.assign(cols, 1);
    return best;
  }

  // (y, z) and (-y, -z) give the same value, so y_0 = +1 throughout.
  std::vector<int> y(rows, 1);
  Vector v = A.colwise().sum().transpose();  // A^T y
  auto evaluate = [&](NormEstimate& out, bool first) {
    const double value = v.cwiseAbs().sum();
    if (first || value > out.value) {
      out.value = value;
      out.y = y;
      out.z.resize(cols);
      for (Eigen::Index j = 0; j < cols; ++j) out.z[j] = v(j) >= 0.0 ? 1 : -1;
    }
  };
  evaluate(best, true);
  const std::uint64_t count = std::uint64_t{1} << (rows - 1);
  for (std::uint64_t g = 1; g < count; ++g) {
    // Flip the bit that changes between Gray codes g-1 and g (offset past y_0).
    const int bit = __builtin_ctzll(g) + 1;
    y[bit] = -y[bit];
    v += (2.0 * y[bit]) * A.row(bit).transpose();
    evaluate(best, false);
  }
  // Recompute from scratch to shed accumulated round-off.
  best.value = sign_form(A, best.y, best.z);
  return best;
}

NormEstimate inf_to_one_norm_lower(const Matrix& A, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw InvalidParameter("inf_to_one_norm_lower needs at least one restart");
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
  NormEstimate best;
  best.exact = false;
  best.value = -std::numeric_limits<double>::infinity();

  auto signs = [](const Vector& v) {
    Vector s(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) s(i) = v(i) >= 0.0 ? 1.0 : -1.0;
    return s;
  };

  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(r)});
    std::bernoulli_distribution coin(0.5);
    Vector y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) y(i) = coin(rng) ? 1.0 : -1.0;

    // Coordinate ascent: each half-step can only raise y^T A z.
    std::vector<double> trace;
    Vector z;
    double value = -std::numeric_limits<double>::infinity();
    for (int step = 0; step < 10000; ++step) {
      const Vector aty = A.transpose() * y;
      const Vector z_next = signs(aty);
      const double vz = aty.cwiseAbs().sum();
      const Vector az = A * z_next;
      const Vector y_next = signs(az);
      const double vy = az.cwiseAbs().sum();
      if (step > 0 && !(vy > value)) break;
      trace.push_back(vz);
      trace.push_back(vy);
      value = vy;
      y = y_next;
      z = z_next;
    }
    if (value > best.value) {
      best.value = value;
      best.y.assign(rows, 1);
      best.z.assign(cols, 1);
      for (Eigen::Index i = 0; i < rows; ++i) best.y[i] = y(i) > 0 ? 1 : -1;
      for (Eigen::Index j = 0; j < cols; ++j) best.z[j] = z(j) > 0 ? 1 : -1;
      best.trace = std::move(trace);
    }
  }
  best.value = sign_form(A, best.y, best.z);
  return best;
}

GrothendieckReport grothendieck_certificate(const Matrix& K, const Matrix& Ktilde, const Matrix& X_hat,
                                            const Matrix& X_star, const CertificateContext& ctx,
                                            int heuristic_restarts, std::uint64_t seed, int exact_cap) {
  const Eigen::Index m = K.rows();
  if (K.cols() != m || Ktilde.rows() != m || Ktilde.cols() != m || X_hat.rows() != m || X_hat.cols() != m ||
      X_star.rows() != m || X_star.cols() != m) {
    throw InvalidInput("grothendieck_certificate: all matrices must be m x m");
  }
  const Matrix diff = K - Ktilde;
  const Matrix gap = X_star - X_hat;

  GrothendieckReport rep;
  rep.inner = diff.cwiseProduct(gap).sum();
  rep.norm = m <= exact_cap ? inf_to_one_norm_exact(diff, exact_cap)
                            : inf_to_one_norm_lower(diff, heuristic_restarts, seed);
  const double denom = kGrothendieck * rep.norm.value;
  rep.ratio = denom > 0.0 ? rep.inner / denom : 0.0;
  rep.violation = rep.norm.exact && rep.inner > 2.0 * denom;
  rep.l1_gap = gap.cwiseAbs().sum();

  const double p = ctx.p;
  const double phi = ctx.rho / p * (static_cast<double>(ctx.k) / (ctx.k - 1));
  const double surrogate_gap = Ktilde.cwiseProduct(gap).sum();
  rep.l1_bound_leading = phi > 0.0 ? 2.0 * surrogate_gap / phi : std::numeric_limits<double>::infinity();
  rep.phi_correction_sqrt = std::sqrt(std::log(p) / p);
  rep.phi_correction_kappa = ctx.kappa * ctx.rho / p;
  return rep;
}

}  // namespace kernclust
