#include "kernclust/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "kernclust/kernel_core.hpp"
#include "kernclust/partition_metrics.hpp"
#include "kernclust/sdp_relax.hpp"

namespace kernclust {

QContext make_q_context(const Dataset& ds) {
  return QContext{inner_products(ds.points), tau_estimate(ds), ds.p()};
}

QStatistics q_statistics(const QContext& ctx, const Partition& sigma) {
  const int m = sigma.size();
  if (ctx.inner.rows() != m) throw InvalidInput("q_statistics: partition does not match the dataset");
  sigma.require_balanced();
  const double k = sigma.k;
  const double p = ctx.p;
  const double tau = ctx.tau;

  double s1 = 0.0;
  double s2 = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (sigma.labels[i] != sigma.labels[j]) continue;
      const double g = ctx.inner(i, j) / p;
      s1 += g;
      s2 += g * g;
    }
  }
  double d1 = 0.0;
  double d2 = 0.0;
  double norms = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dev = ctx.inner(i, i) / p - tau;
    d1 += dev;
    d2 += dev * dev;
    norms += ctx.inner(i, i) / p;
  }
  const double fprime_minus_one = std::exp(tau) - 1.0;
  QStatistics q;
  q.q1 = k / m * s1;
  q.q2 = k / m * s2;
  q.q3 = k * fprime_minus_one / m * d1;
  q.q4 = k * fprime_minus_one / (2.0 * m) * d2;
  q.q5 = k * tau * norms;
  q.sigma_used = sigma;
  return q;
}

Chi2Bounds chi2_tail_bounds(int d, double mu2, double t) {
  if (d < 1) throw InvalidParameter("chi2_tail_bounds: d must be at least 1");
  if (!(mu2 >= 0.0)) throw InvalidParameter("chi2_tail_bounds: mu2 must be non-negative");
  if (!(t > 0.0)) throw InvalidParameter("chi2_tail_bounds: t must be positive");
  const double centre = d + mu2;
  const double spread = 2.0 * std::sqrt((d + 2.0 * mu2) * t);
  return Chi2Bounds{centre - spread, centre + spread + 2.0 * t, std::exp(-t)};
}

Chi2Frequencies chi2_monte_carlo(int d, double mu2, double t, long long samples, std::uint64_t seed) {
  const Chi2Bounds b = chi2_tail_bounds(d, mu2, t);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = std::sqrt(mu2);
  long long below = 0;
  long long above = 0;
  for (long long s = 0; s < samples; ++s) {
    double x = 0.0;
    for (int i = 0; i < d; ++i) {
      const double z = normal(rng) + (i == 0 ? shift : 0.0);
      x += z * z;
    }
    below += x < b.lower_threshold ? 1 : 0;
    above += x > b.upper_threshold ? 1 : 0;
  }
  Chi2Frequencies f;
  f.samples = samples;
  f.below_lower = samples > 0 ? static_cast<double>(below) / samples : 0.0;
  f.above_upper = samples > 0 ? static_cast<double>(above) / samples : 0.0;
  return f;
}

double max_over_uncorrelated(const Matrix& W, const Partition& truth, double epsilon, int samples, Rng& rng) {
  const int m = truth.size();
  const int k = truth.k;
  const double limit = 1.0 + (k - 1) * epsilon;
  const double beta_scale = static_cast<double>(k) / m;

  auto value_of = [&](const Partition& s) { return kernel_objective(W, s); };
  auto similarity = [&](const std::vector<int>& counts) {
    double acc = 0.0;
    for (int c : counts) acc += static_cast<double>(c) * c;
    return acc * beta_scale * beta_scale;
  };
  auto count_table = [&](const Partition& s) {
    std::vector<int> counts(static_cast<std::size_t>(k) * k, 0);
    for (int i = 0; i < m; ++i) ++counts[s.labels[i] * k + truth.labels[i]];
    return counts;
  };

  Partition best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < std::max(samples, 1); ++n) {
    Partition s = Partition::random_balanced(m, k, rng);
    if (similarity(count_table(s)) > limit) continue;
    const double v = value_of(s);
    if (v > best_value) {
      best_value = v;
      best = std::move(s);
    }
  }
  if (best.labels.empty()) return best_value;

  // Swap hill-climbing restricted to the constraint set.
  Matrix a = cluster_affinities_serial(W, best);
  std::vector<int> counts = count_table(best);
  const double threshold = 1e-12 * std::max(1.0, W.cwiseAbs().maxCoeff());
  for (int pass = 0; pass < 20; ++pass) {
    bool improved = false;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const int s = best.labels[i];
        const int t = best.labels[j];
        if (s == t) continue;
        const double gain = 2.0 * ((a(i, t) - W(i, j)) - (a(i, s) - W(i, i)) + (a(j, s) - W(i, j)) - (a(j, t) - W(j, j)));
        if (gain <= threshold) continue;
        std::vector<int> next = counts;
        --next[s * k + truth.labels[i]];
        ++next[t * k + truth.labels[i]];
        --next[t * k + truth.labels[j]];
        ++next[s * k + truth.labels[j]];
        if (similarity(next) > limit) continue;
        counts = std::move(next);
        a.col(s) -= W.col(i);
        a.col(t) += W.col(i);
        a.col(t) -= W.col(j);
        a.col(s) += W.col(j);
        best.labels[i] = t;
        best.labels[j] = s;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return value_of(best);
}

std::vector<std::string> bench_lemma_names() {
  return {"L1_offdiag", "L1_diag",    "L2_Q1_max",  "L3_Q2_max", "L4_Q4",
          "L5_Q1_star", "L5_Q5",      "L6_Q2_star", "L8_R1",     "L9_R2"};
}

namespace {

struct LemmaValue {
  double statistic = 0.0;
  double leading = 0.0;
  double shape = 1.0;
  bool lower = false;  // lower-tail statement: statistic > leading - C shape
};

bool wanted(const BenchOptions& opts, const std::string& name) {
  return opts.lemmas.empty() || std::find(opts.lemmas.begin(), opts.lemmas.end(), name) != opts.lemmas.end();
}

std::vector<std::pair<std::string, LemmaValue>> evaluate_trial(const BenchCell& cell, std::uint64_t trial_seed,
                                                               const BenchOptions& opts) {
  ModelParams params;
  params.k = cell.k;
  params.p = cell.p;
  params.alpha = cell.alpha;
  params.rho = cell.rho;
  params.seed = trial_seed;
  params.c0 = opts.c0;
  params.c_gamma = opts.c_gamma;
  const Dataset ds = sample_dataset(params);
  const QContext ctx = make_q_context(ds);

  const int m = ds.m();
  const double p = ds.p();
  const double k = ds.k();
  const double alpha = cell.alpha;
  const double rho = cell.rho;
  const double eps = opts.epsilon;
  const double tau = ctx.tau;
  const double logp = std::log(p);
  const double gmax = gamma_max(ds.p(), opts.c_gamma);
  Rng rng = make_rng(trial_seed, {0xbe11c4ULL});

  std::vector<std::pair<std::string, LemmaValue>> out;
  auto add = [&](const std::string& name, LemmaValue v) { out.emplace_back(name, v); };

  if (wanted(opts, "L1_offdiag")) {
    double mx = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        if (i != j) mx = std::max(mx, std::abs(ctx.inner(i, j)) / p);
      }
    }
    add("L1_offdiag", {mx, 0.0, logp / std::sqrt(p), false});
  }
  if (wanted(opts, "L1_diag")) {
    double mx = 0.0;
    for (int i = 0; i < m; ++i) mx = std::max(mx, std::abs(ctx.inner(i, i) / p - tau));
    add("L1_diag", {mx, 0.0, logp / std::sqrt(p), false});
  }
  if (wanted(opts, "L2_Q1_max")) {
    const Matrix W = ctx.inner * (k / m / p);
    const double stat = max_over_uncorrelated(W, ds.truth, eps, opts.partition_samples, rng);
    const double lk = std::log(k);
    const double lead = k + alpha * rho * eps + 2.0 * (1.0 + eps) * alpha * lk +
                        2.0 * std::sqrt((1.0 + eps) * (k + 2.0 * alpha * rho * eps) * alpha * lk);
    add("L2_Q1_max", {stat, lead, std::sqrt(logp / p), false});
  }
  if (wanted(opts, "L3_Q2_max")) {
    const Matrix W = ctx.inner.array().square().matrix() * (k / m / (p * p));
    const double stat = max_over_uncorrelated(W, ds.truth, eps, opts.partition_samples, rng);
    const double shape = std::max({std::sqrt(alpha / p), alpha * std::sqrt(alpha / p), std::sqrt(1.0 / (alpha * p))});
    add("L3_Q2_max", {stat, 1.0 + 1.0 / k, shape, false});
  }
  const bool need_star = wanted(opts, "L4_Q4") || wanted(opts, "L5_Q1_star") || wanted(opts, "L5_Q5") ||
                         wanted(opts, "L6_Q2_star");
  if (need_star) {
    const QStatistics q = q_statistics(ctx, ds.truth);
    if (wanted(opts, "L4_Q4")) {
      add("L4_Q4", {q.q4, 0.0, k * gmax * (std::exp(tau) - 1.0) * logp * logp / (2.0 * p), false});
    }
    if (wanted(opts, "L5_Q1_star")) add("L5_Q1_star", {q.q1, k + alpha * rho, std::sqrt(logp / p), true});
    if (wanted(opts, "L5_Q5")) {
      // Q5 is a sum over points; the bound is per point.
      const double mp = m * p;
      const double lead = k * tau * (mp + p * alpha * rho) / mp;
      const double shape = k * tau * 2.0 * std::sqrt((mp + 2.0 * p * alpha * rho) * logp) / mp;
      add("L5_Q5", {q.q5 / m, lead, shape, false});
    }
    if (wanted(opts, "L6_Q2_star")) {
      const double base = std::sqrt(logp / (p * p));
      add("L6_Q2_star", {q.q2, 1.0 + 1.0 / k, std::max(base, alpha * base), true});
    }
  }
  const bool need_residuals = wanted(opts, "L8_R1") || wanted(opts, "L9_R2");
  if (need_residuals) {
    const ResidualMatrices r = residual_matrices(ds, ctx.inner);
    auto norm = [&](const Matrix& A) {
      return m <= kDefaultExactNormCap ? inf_to_one_norm_exact(A).value
                                       : inf_to_one_norm_lower(A, opts.norm_restarts, rng()).value;
    };
    if (wanted(opts, "L8_R1")) {
      add("L8_R1", {norm(r.R1), 0.0, alpha * std::max(std::sqrt(m * p), static_cast<double>(m)), false});
    }
    if (wanted(opts, "L9_R2")) {
      const double kappa = kappa_constant(tau, ds.p(), opts.c0);
      const double sm = std::sqrt(static_cast<double>(m));
      const double inner_max = std::max({m * p * sm, static_cast<double>(m) * m * sm, p * p * sm});
      const double shape = kappa / (p * p) * (rho * m * (m - 1.0) + m + inner_max);
      add("L9_R2", {kappa * norm(r.R2), 0.0, shape, false});
    }
  }
  return out;
}

}  // namespace

std::vector<BenchRow> lemma_scaling_report(const std::vector<BenchCell>& grid, int trials, std::uint64_t seed,
                                           const BenchOptions& opts) {
  if (trials < 1) throw InvalidParameter("lemma_scaling_report: trials must be at least 1");
  const auto names = bench_lemma_names();
  for (const std::string& l : opts.lemmas) {
    if (std::find(names.begin(), names.end(), l) == names.end()) throw InvalidParameter("unknown lemma '" + l + "'");
  }
  std::vector<BenchRow> rows;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const BenchCell& cell = grid[c];
    std::vector<std::vector<std::pair<std::string, LemmaValue>>> per_trial(trials);
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < trials; ++t) {
      per_trial[t] = evaluate_trial(cell, derive_seed(seed, {c, static_cast<std::uint64_t>(t)}), opts);
    }
    // Lemma order is fixed by evaluate_trial; every trial yields the same list.
    const std::size_t lemma_count = per_trial[0].size();
    for (std::size_t l = 0; l < lemma_count; ++l) {
      double num = 0.0;
      double den = 0.0;
      std::vector<BenchRow> block;
      for (int t = 0; t < trials; ++t) {
        const auto& [name, v] = per_trial[t][l];
        const double y = v.lower ? v.leading - v.statistic : v.statistic - v.leading;
        num += y * v.shape;
        den += v.shape * v.shape;
        BenchRow row;
        row.lemma = name;
        row.cell = cell;
        row.trial = t;
        row.statistic = v.statistic;
        row.trial_constant = v.shape != 0.0 ? y / v.shape : 0.0;
        block.push_back(row);
      }
      const double fitted = den > 0.0 ? num / den : 0.0;
      for (int t = 0; t < trials; ++t) {
        const auto& v = per_trial[t][l].second;
        block[t].fitted_constant = fitted;
        block[t].bound_shape_value = v.lower ? v.leading - fitted * v.shape : v.leading + fitted * v.shape;
      }
      rows.insert(rows.end(), block.begin(), block.end());
    }
  }
  return rows;
}

std::vector<LemmaSummary> summarize_bench(const std::vector<BenchRow>& rows) {
  std::vector<LemmaSummary> out;
  for (const BenchRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const LemmaSummary& s) {
      return s.lemma == r.lemma && s.cell.k == r.cell.k && s.cell.p == r.cell.p && s.cell.alpha == r.cell.alpha &&
             s.cell.rho == r.cell.rho;
    });
    if (it == out.end()) {
      out.push_back(LemmaSummary{r.lemma, r.cell, 0, r.fitted_constant, -std::numeric_limits<double>::infinity()});
      it = std::prev(out.end());
    }
    ++it->trials;
    it->envelope_constant = std::max(it->envelope_constant, r.trial_constant);
  }
  return out;
}

double envelope_violation_rate(const std::vector<BenchRow>& rows, double constant) {
  if (rows.empty()) return 0.0;
  long long bad = 0;
  for (const BenchRow& r : rows) bad += r.trial_constant > constant ? 1 : 0;
  return static_cast<double>(bad) / static_cast<double>(rows.size());
}

}  // namespace kernclust
