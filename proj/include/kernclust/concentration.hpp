#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kernclust/common.hpp"
#include "kernclust/model_gen.hpp"
#include "kernclust/rng.hpp"

namespace kernclust {

// Recurring polynomial statistics of the data for a partition sigma.
//   q1 = (k/m) sum_s sum_{i,j in s} <x_i,x_j> / p
//   q2 = (k/m) sum_s sum_{i,j in s} <x_i,x_j>^2 / p^2
//   q3 = k (e^tau - 1) / m * sum_i (||x_i||^2/p - tau)
//   q4 = k (e^tau - 1) / (2m) * sum_i (||x_i||^2/p - tau)^2
//   q5 = sum_i k tau ||x_i||^2 / p
struct QStatistics {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
  double q5 = 0.0;
  Partition sigma_used;
};

// Inner products and tau shared by all Q evaluations on one dataset.
struct QContext {
  Matrix inner;
  double tau = 1.0;
  int p = 1;
};

QContext make_q_context(const Dataset& ds);
QStatistics q_statistics(const QContext& ctx, const Partition& sigma);

struct Chi2Bounds {
  double lower_threshold = 0.0;  // d + mu2 - 2 sqrt((d + 2 mu2) t)
  double upper_threshold = 0.0;  // d + mu2 + 2 sqrt((d + 2 mu2) t) + 2 t
  double prob_bound = 0.0;       // exp(-t)
};

Chi2Bounds chi2_tail_bounds(int d, double mu2, double t);

struct Chi2Frequencies {
  double below_lower = 0.0;
  double above_upper = 0.0;
  long long samples = 0;
};

// Empirical tail frequencies of the non-central chi-squared chi2_d(mu2).
Chi2Frequencies chi2_monte_carlo(int d, double mu2, double t, long long samples, std::uint64_t seed);

struct BenchCell {
  int k = 2;
  int p = 100;
  double alpha = 1.0;
  double rho = 0.0;
};

struct BenchOptions {
  // Partitions sampled when approximating a max over near-uncorrelated sigma.
  int partition_samples = 10000;
  double epsilon = 0.05;
  int norm_restarts = 20;
  double c0 = 1.0;
  double c_gamma = 1.0;
  // Empty means every lemma statistic.
  std::vector<std::string> lemmas;
};

struct BenchRow {
  std::string lemma;
  BenchCell cell;
  int trial = 0;
  double statistic = 0.0;
  double bound_shape_value = 0.0;
  // Least-squares constant over the trials of this (lemma, cell).
  double fitted_constant = 0.0;
  // Per-trial constant (statistic - leading) / shape.
  double trial_constant = 0.0;
};

std::vector<std::string> bench_lemma_names();

// Monte Carlo of the lemma statistics. Trial t of cell c uses the dataset
// seeded by derive_seed(seed, {c, t}); output order is (cell, lemma, trial)
// regardless of thread count.
std::vector<BenchRow> lemma_scaling_report(const std::vector<BenchCell>& grid, int trials, std::uint64_t seed,
                                           const BenchOptions& opts = {});

struct LemmaSummary {
  std::string lemma;
  BenchCell cell;
  int trials = 0;
  double fitted_constant = 0.0;    // least-squares through the origin
  double envelope_constant = 0.0;  // smallest constant covering every trial
};

std::vector<LemmaSummary> summarize_bench(const std::vector<BenchRow>& rows);

// Fraction of rows whose per-trial constant exceeds `constant`.
double envelope_violation_rate(const std::vector<BenchRow>& rows, double constant);

// Approximate max of the quadratic form c * sum_s sum_{i,j in s} W_ij over
// balanced sigma with ||beta(sigma, truth)||_F^2 <= 1 + (k-1) eps: random
// sampling then swap hill-climbing inside the constraint. A lower bound on
// the true max.
double max_over_uncorrelated(const Matrix& W, const Partition& truth, double epsilon, int samples, Rng& rng);

}  // namespace kernclust
