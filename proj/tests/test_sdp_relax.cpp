#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "kernclust/kernel_core.hpp"
#include "kernclust/partition_metrics.hpp"
#include "kernclust/sdp_relax.hpp"

using namespace kernclust;

namespace {

ModelParams params(int k, int p, double alpha, double rho, std::uint64_t seed) {
  ModelParams mp;
  mp.k = k;
  mp.p = p;
  mp.alpha = alpha;
  mp.rho = rho;
  mp.seed = seed;
  return mp;
}

Matrix gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = n(rng);
  return A;
}

// max over all y in {-1,1}^rows, z in {-1,1}^cols of y^T A z.
double norm_brute_force(const Matrix& A) {
  const int r = static_cast<int>(A.rows());
  const int c = static_cast<int>(A.cols());
  double best = -1e300;
  for (int ym = 0; ym < (1 << r); ++ym) {
    for (int zm = 0; zm < (1 << c); ++zm) {
      double v = 0.0;
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) v += ((ym >> i) & 1 ? 1 : -1) * ((zm >> j) & 1 ? 1 : -1) * A(i, j);
      best = std::max(best, v);
    }
  }
  return best;
}

void sort_simplex_oracle(Vector& v, double total) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.rbegin(), u.rend());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - total) / double(j + 1);
    if (u[j] > t) theta = t;
  }
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = std::max(v(j) - theta, 0.0);
}

}  // namespace

TEST(ProjectPsd, MatchesEigenClipping) {
  Rng rng(1);
  for (int n : {1, 5, 40}) {
    for (double shift : {-3.0, 0.0, 3.0}) {
      Matrix A = gaussian(n, n, rng);
      A = 0.5 * (A + A.transpose()).eval();
      A.diagonal().array() += shift;
      Eigen::SelfAdjointEigenSolver<Matrix> es(A);
      const Vector clipped = es.eigenvalues().cwiseMax(0.0);
      const Matrix expected = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
      const Matrix got = project_psd(A);
      EXPECT_LT((got - expected).norm(), 1e-9 * (1.0 + expected.norm()));
      EXPECT_LT((project_psd(got) - got).norm(), 1e-9 * (1.0 + got.norm()));
    }
  }
  EXPECT_TRUE(project_psd(-Matrix::Identity(3, 3)).isZero());
}

TEST(ProjectSimplex, MatchesSortOracle) {
  Rng rng(2);
  for (int r = 0; r < 50; ++r) {
    const int n = 1 + r % 17;
    Vector v = gaussian(n, 1, rng);
    Vector w = v;
    const double total = 0.5 + (r % 4);
    project_simplex(v, total);
    sort_simplex_oracle(w, total);
    EXPECT_LT((v - w).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(v.sum(), total, 1e-10);
    EXPECT_GE(v.minCoeff(), 0.0);
  }
}

TEST(Sdp, IdealKernelIsExact) {
  const Matrix Xs = clustering_matrix(Partition::contiguous(8, 2));
  const SdpSolution sol = solve_sdp(Xs, 2);
  EXPECT_TRUE(sol.converged);
  EXPECT_LT((sol.X_hat - Xs).cwiseAbs().sum() / 32.0, 1e-3);
  EXPECT_NEAR(sol.objective, 32.0, 1e-3);
}

TEST(Sdp, ConvergedSolutionsAreFeasible) {
  int converged = 0;
  for (int t = 0; t < 12; ++t) {
    const int k = 2 + t % 2;
    const Dataset ds = sample_dataset(params(k, 12, 2.0, 1.0 + t, 30 + t));
    const Matrix K = exp_kernel(ds.points);
    const SdpSolution sol = solve_sdp(K, k);
    if (!sol.converged) continue;
    ++converged;
    const SdpFeasibility f = check_feasibility(sol.X_hat, k);
    EXPECT_LT(f.worst(), 1e-5);
    // The relaxation optimum dominates the planted integral point.
    const double planted = (K.cwiseProduct(clustering_matrix(ds.truth))).sum();
    EXPECT_GE(sol.objective, planted - 1e-6 * K.norm());
  }
  EXPECT_GE(converged, 10);
}

TEST(Sdp, IdentityWhenEveryClusterIsAPoint) {
  Rng rng(3);
  const Matrix K = gaussian(5, 5, rng);
  const SdpSolution sol = solve_sdp(K, 5);
  EXPECT_TRUE(sol.X_hat == Matrix::Identity(5, 5));
  EXPECT_TRUE(sol.converged);
}

TEST(Sdp, RejectsBadShapes) {
  EXPECT_THROW(solve_sdp(Matrix::Identity(5, 5), 2), InvalidParameter);
  EXPECT_THROW(solve_sdp(Matrix::Identity(4, 3), 2), InvalidInput);
  SdpOptions o;
  o.warm_start = Matrix::Identity(3, 3);
  EXPECT_THROW(solve_sdp(Matrix::Identity(4, 4), 2, o), InvalidInput);
}

TEST(Sdp, ReportsNonConvergence) {
  const Dataset ds = sample_dataset(params(2, 20, 1.0, 2.0, 5));
  SdpOptions o;
  o.max_iter = 2;
  const SdpSolution sol = solve_sdp(exp_kernel(ds.points), 2, o);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
}

TEST(Feasibility, ClusteringMatrixIsFeasible) {
  const SdpFeasibility f = check_feasibility(clustering_matrix(Partition::contiguous(9, 3)), 3);
  EXPECT_LT(f.worst(), 1e-12);
  Matrix bad = Matrix::Identity(4, 4);
  const SdpFeasibility g = check_feasibility(bad, 2);
  EXPECT_NEAR(g.row_sum, 0.5, 1e-12);
}

TEST(InfToOne, SmallExamples) {
  const NormEstimate a = inf_to_one_norm_exact(Matrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(a.value, 2.0);
  EXPECT_EQ(a.y, (std::vector<int>{1, 1}));
  EXPECT_EQ(a.z, (std::vector<int>{1, 1}));
  Matrix b(2, 2);
  b << 1, -1, -1, 1;
  const NormEstimate nb = inf_to_one_norm_exact(b);
  EXPECT_DOUBLE_EQ(nb.value, 4.0);
  EXPECT_EQ(nb.y, (std::vector<int>{1, -1}));
  EXPECT_EQ(nb.z, (std::vector<int>{1, -1}));
  EXPECT_DOUBLE_EQ(sign_form(b, nb.y, nb.z), 4.0);
}

TEST(InfToOne, MatchesFullSignEnumeration) {
  Rng rng(4);
  for (int r = 0; r < 20; ++r) {
    const int rows = 1 + r % 6;
    const int cols = 1 + (r * 7) % 5;
    const Matrix A = gaussian(rows, cols, rng);
    const NormEstimate e = inf_to_one_norm_exact(A);
    EXPECT_NEAR(e.value, norm_brute_force(A), 1e-12);
    EXPECT_NEAR(e.value, inf_to_one_norm_exact(-A).value, 1e-12);
    EXPECT_NEAR(sign_form(A, e.y, e.z), e.value, 1e-12);
  }
}

TEST(InfToOne, PermutationInvariant) {
  Rng rng(5);
  const Matrix A = gaussian(8, 8, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> P(8);
  P.setIdentity();
  std::shuffle(P.indices().data(), P.indices().data() + 8, rng);
  const Matrix B = P * A * P.transpose();
  EXPECT_NEAR(inf_to_one_norm_exact(A).value, inf_to_one_norm_exact(B).value, 1e-12);
}

TEST(InfToOne, RefusesAboveCap) {
  EXPECT_THROW(inf_to_one_norm_exact(Matrix::Identity(21, 21)), Refused);
  EXPECT_THROW(inf_to_one_norm_exact(Matrix::Identity(6, 6), 5), Refused);
}

TEST(InfToOne, HeuristicIsLowerBoundAndUsuallyExact) {
  Rng rng(6);
  int equal = 0;
  const int n = 40;
  for (int r = 0; r < n; ++r) {
    const int m = 4 + r % 12;
    const Matrix A = gaussian(m, m, rng);
    const double exact = inf_to_one_norm_exact(A).value;
    const NormEstimate h = inf_to_one_norm_lower(A, 50, r);
    EXPECT_FALSE(h.exact);
    EXPECT_LE(h.value, exact + 1e-9);
    if (h.value >= exact - 1e-9) ++equal;
    EXPECT_NEAR(sign_form(A, h.y, h.z), h.value, 1e-9);
  }
  EXPECT_GE(equal, 0.9 * n);
}

TEST(InfToOne, HeuristicTraceNeverDecreases) {
  Rng rng(7);
  const Matrix A = gaussian(15, 15, rng);
  const NormEstimate h = inf_to_one_norm_lower(A, 1, 3);
  ASSERT_GE(h.trace.size(), 2u);
  for (std::size_t i = 1; i < h.trace.size(); ++i) EXPECT_GE(h.trace[i], h.trace[i - 1] - 1e-12);
}

TEST(Grothendieck, ZeroWhenKernelEqualsSurrogate) {
  const Dataset ds = sample_dataset(params(2, 8, 1.0, 2.0, 8));
  const Matrix Kt = surrogate_matrix(ds);
  const Matrix Xs = clustering_matrix(ds.truth);
  Matrix Xh = Matrix::Constant(8, 8, 0.5);
  Xh.diagonal().setOnes();
  const GrothendieckReport rep = grothendieck_certificate(Kt, Kt, Xh, Xs, {2.0, 8, 2, 1.0});
  EXPECT_DOUBLE_EQ(rep.inner, 0.0);
  EXPECT_DOUBLE_EQ(rep.ratio, 0.0);
  EXPECT_FALSE(rep.violation);
  EXPECT_TRUE(rep.norm.exact);
  EXPECT_NEAR(rep.l1_gap, (Xh - Xs).cwiseAbs().sum(), 1e-12);
}

TEST(Grothendieck, InequalityOnFeasiblePoints) {
  Rng rng(9);
  for (int r = 0; r < 20; ++r) {
    const int m = 4 + r % 9;
    Matrix A = gaussian(m, m, rng);
    const double norm = inf_to_one_norm_exact(A).value;
    // Gram matrices of unit vectors are PSD with unit diagonal.
    Matrix V = gaussian(m, m, rng);
    V.rowwise().normalize();
    const Matrix X = V * V.transpose();
    EXPECT_LE(std::abs((A.cwiseProduct(X)).sum()), kGrothendieck * norm + 1e-9);
  }
}

TEST(Grothendieck, LeadingL1BoundOnSeparatedInstances) {
  for (int t = 0; t < 5; ++t) {
    const ModelParams mp = params(2, 40, 1.0, 30.0, 60 + t);
    const Dataset ds = sample_dataset(mp);
    const KernelMatrix km = gram_matrix(ds);
    const Matrix Kt = surrogate_matrix(ds, km.kappa);
    const SdpSolution sol = solve_sdp(km.K, 2);
    const Matrix Xs = clustering_matrix(ds.truth);
    const GrothendieckReport rep =
        grothendieck_certificate(km.K, Kt, sol.X_hat, Xs, {mp.rho, mp.p, mp.k, km.kappa}, 20, t);
    EXPECT_FALSE(rep.norm.exact);
    EXPECT_LE(rep.l1_gap, rep.l1_bound_leading + 1e-6 * Xs.sum());
  }
}
