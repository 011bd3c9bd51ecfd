// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "kernclust/concentration.hpp"
#include "kernclust/experiments.hpp"
#include "kernclust/kernel_core.hpp"
#include "kernclust/kmeans_opt.hpp"
#include "kernclust/partition_metrics.hpp"
#include "kernclust/rounding.hpp"
#include "kernclust/sdp_relax.hpp"
#include "kernclust/thresholds.hpp"

using namespace kernclust;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::uint64_t fnv1a(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (is.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

Matrix gaussian(int r, int c, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix A(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) A(i, j) = n(rng);
  return A;
}

ModelParams params(int k, int p, double alpha, double rho, std::uint64_t seed) {
  ModelParams mp;
  mp.k = k;
  mp.p = p;
  mp.alpha = alpha;
  mp.rho = rho;
  mp.seed = seed;
  return mp;
}

void criterion_oracle() {
  const auto t0 = Clock::now();
  const int n = 50;
  int never_worse = 0;
  int equal = 0;
  for (int t = 0; t < n; ++t) {
    const int m = 4 + 2 * (t % 5);
    const Dataset ds = sample_dataset(params(2, m, 1.0, 1.0 + t % 4, 10000 + t));
    const Matrix K = exp_kernel(ds.points);
    const double best = exhaustive_balanced(K, 2).best_objective;
    const double got = lloyd_balanced(K, 2, t).best_objective;
    const double slack = 1e-9 * std::abs(best);
    if (best >= got - slack) ++never_worse;
    if (std::abs(best - got) <= slack) ++equal;
  }
  const double secs = seconds_since(t0);
  report(1, never_worse == n && equal >= 0.8 * n && secs < 60.0,
         format("exhaustive >= lloyd in %d/%d, equal in %d/%d, %.1f s", never_worse, n, equal, n, secs));
}

struct Curve {
  std::map<double, double> fraction;
  double rho50 = 0.0;
  double residual = 0.0;
};

Curve curve_of(const std::vector<SweepRow>& rows, const std::string& method) {
  std::vector<SweepRow> sel;
  for (const SweepRow& r : rows)
    if (r.method == method) sel.push_back(r);
  const PhaseCurve pc = summarize(sel).front();
  Curve c;
  for (const PhasePoint& pt : pc.points) c.fraction[pt.rho] = pt.fraction;
  c.rho50 = pc.rho50;
  c.residual = pc.isotonic_residual;
  return c;
}

SweepConfig shared_grid(const fs::path& out, double rho_star, double rho_sdp) {
  SweepConfig c;
  c.k = {2};
  c.p = {300};
  c.alpha = {2.0};
  c.rho = {0.0, 1.0, 2.0, 4.0, rho_star, rho_sdp};
  c.trials = 100;
  c.seed = 20240601;
  c.out = out.string();
  return c;
}

SweepConfig full_lloyd;

void criteria_sweeps(const fs::path& dir) {
  const double rho_star = 2.0 * thresholds(2, 2.0).rho_upper_kernel_np;
  const double rho_sdp = thresholds(2, 2.0, 4.0).rho_upper_kernel_p;

  SweepConfig lloyd = shared_grid(dir / "lloyd.csv", rho_star, rho_sdp);
  lloyd.methods = {"kmeans_lloyd"};
  lloyd.workers = 1;
  auto t0 = Clock::now();
  const SweepResult lr = run_sweep(lloyd);
  const double lloyd_secs = seconds_since(t0);
  const Curve lc = curve_of(lr.rows, "kmeans_lloyd");
  const double at_star = lc.fraction.at(rho_star);
  const double at_zero = lc.fraction.at(0.0);
  report(2, at_star >= 0.95 && at_zero <= 0.10 && lc.residual <= 0.15 && lloyd_secs < 1200.0,
         format("recovery %.2f at rho=%.4f, %.2f at rho=0, isotonic residual %.3f, %.0f s", at_star, rho_star,
                at_zero, lc.residual, lloyd_secs));

  SweepConfig sdp = shared_grid(dir / "sdp.csv", rho_star, rho_sdp);
  sdp.methods = {"sdp_rounded"};
  sdp.tol = 1e-3;
  sdp.feas_tol = 0.05;
  sdp.max_iter = 500;
  t0 = Clock::now();
  const SweepResult sr = run_sweep(sdp);
  const double sdp_secs = seconds_since(t0);
  int certified = 0;
  int total = 0;
  double worst = 0.0;
  std::vector<double> bounds;
  for (const SweepRow& r : sr.rows) {
    if (r.rho != rho_sdp) continue;
    ++total;
    bounds.push_back(r.certified_bound);
    if (r.certified_bound < 0.5) ++certified;
    worst = std::max(worst, r.certified_bound);
  }
  std::sort(bounds.begin(), bounds.end());
  const double median = bounds.empty() ? std::nan("") : bounds[bounds.size() / 2];
  const Curve sc = curve_of(sr.rows, "sdp_rounded");
  const bool order = !std::isnan(sc.rho50) && !std::isnan(lc.rho50) && sc.rho50 >= lc.rho50;
  report(3, certified >= 0.9 * total && order,
         format("certified bound < 1-1/k in %d/%d at rho=%g (median %.3f), rho50 sdp %.3f vs lloyd %.3f, "
                "%d unconverged, %.0f s",
                certified, total, rho_sdp, median, sc.rho50, lc.rho50, sr.failures, sdp_secs));

  full_lloyd = lloyd;
}

void criterion_determinism(const fs::path& dir) {
  const SweepConfig& lloyd = full_lloyd;
  SweepConfig again = lloyd;
  again.out = (dir / "lloyd_w3.csv").string();
  again.workers = 3;
  run_sweep(again);
  const std::uint64_t h1 = fnv1a(lloyd.out);
  const std::uint64_t h3 = fnv1a(again.out);

  SweepConfig mixed;
  mixed.rho = {0.0, 2.0, 6.0};
  mixed.trials = 10;
  mixed.methods = {"kmeans_lloyd", "kmeans_exhaustive", "sdp_rounded"};
  mixed.p = {6};
  mixed.seed = 77;
  mixed.out = (dir / "mixed_w1.csv").string();
  mixed.workers = 1;
  run_sweep(mixed);
  SweepConfig mixed3 = mixed;
  mixed3.out = (dir / "mixed_w3.csv").string();
  mixed3.workers = 3;
  run_sweep(mixed3);
  const std::uint64_t m1 = fnv1a(mixed.out);
  const std::uint64_t m3 = fnv1a(mixed3.out);
  report(9, h1 == h3 && m1 == m3,
         format("full lloyd sweep %016llx vs %016llx, mixed sweep %016llx vs %016llx",
                static_cast<unsigned long long>(h1), static_cast<unsigned long long>(h3),
                static_cast<unsigned long long>(m1), static_cast<unsigned long long>(m3)));
}

void criterion_feasibility() {
  int converged = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int k = 2 + t % 2;
    const Dataset ds = sample_dataset(params(k, 6 * (2 + t % 5), 1.0, 2.0 + t, 500 + t));
    const SdpSolution sol = solve_sdp(exp_kernel(ds.points), k);
    if (!sol.converged) continue;
    ++converged;
    worst = std::max(worst, check_feasibility(sol.X_hat, k).worst());
  }
  const Partition star = Partition::contiguous(8, 2);
  const Matrix Xs = clustering_matrix(star);
  const SdpSolution ideal = solve_sdp(Xs, 2);
  const double rel = (ideal.X_hat - Xs).cwiseAbs().sum() / Xs.cwiseAbs().sum();
  const double obj_gap = std::abs(ideal.objective - 32.0);
  report(4, converged > 0 && worst <= 1e-5 && rel < 1e-3 && obj_gap < 1e-3,
         format("%d/20 converged, worst violation %.2e; ideal kernel l1 rel %.2e, objective gap %.2e", converged,
                worst, rel, obj_gap));
}

void criterion_grothendieck() {
  Rng rng(123);
  int checks = 0;
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 4 + t % 13;
    Matrix A;
    if (t % 2 == 0) {
      A = gaussian(m, m, rng);
    } else {
      const int mm = m - m % 2;
      const Dataset ds = sample_dataset(params(2, mm, 1.0, 1.0 + t % 7, 700 + t));
      A = exp_kernel(ds.points) - surrogate_matrix(ds);
    }
    const double norm = inf_to_one_norm_exact(A).value;
    for (int s = 0; s < 20; ++s) {
      Matrix V = gaussian(static_cast<int>(A.rows()), static_cast<int>(A.rows()), rng);
      V.rowwise().normalize();
      if (s % 4 == 3) V.row(0) *= 0.5;  // diagonal strictly below one
      const Matrix X = V * V.transpose();
      const double inner = std::abs(A.cwiseProduct(X).sum());
      ++checks;
      if (inner > kGrothendieck * norm * (1.0 + 1e-12)) ++violations;
      worst = std::max(worst, inner / norm);
    }
  }
  report(5, violations == 0,
         format("%d violations over %d sampled X, max |<A,X>|/||A|| = %.4f", violations, checks, worst));
}

void criterion_norm_oracle() {
  Rng rng(321);
  const int n = 100;
  int below = 0;
  int equal = 0;
  for (int t = 0; t < n; ++t) {
    const int m = 2 + t % 19;
    const Matrix A = gaussian(m, m, rng);
    const double exact = inf_to_one_norm_exact(A).value;
    const double heur = inf_to_one_norm_lower(A, 50, t).value;
    const double slack = 1e-9 * std::abs(exact);
    if (heur <= exact + slack) ++below;
    if (std::abs(heur - exact) <= slack) ++equal;
  }
  report(6, below == n && equal >= 0.9 * n,
         format("heuristic <= exact in %d/%d, equal in %d/%d", below, n, equal, n));
}

void criterion_thresholds() {
  const double a = thresholds(2, 1.0).rho_upper_kernel_np;
  const double b = thresholds(2, 4.0).rho_lower_np;
  const double c = thresholds(3, 4.0).rho_lower_p;
  const bool ok = std::abs(a - 3.7411) < 5e-5 && std::abs(b - 0.5) < 5e-5 && std::abs(c - 1.0) < 5e-5;
  report(7, ok, format("%.4f, %.4f, %.4f", a, b, c));
}

void criterion_concentration() {
  const long long samples = 100000;
  int cells = 0;
  int violated = 0;
  double worst_excess = -1.0;
  for (int d : {1, 5, 50}) {
    for (double mu2 : {0.0, 10.0}) {
      for (double t : {0.5, 1.0, 2.0, 4.0}) {
        const Chi2Frequencies f = chi2_monte_carlo(d, mu2, t, samples, 1000 + cells);
        const double pb = std::exp(-t);
        const double margin = pb + 3.0 * std::sqrt(pb * (1.0 - pb) / samples);
        for (double freq : {f.below_lower, f.above_upper}) {
          if (freq > margin) ++violated;
          worst_excess = std::max(worst_excess, freq - margin);
        }
        ++cells;
      }
    }
  }

  BenchOptions opts;
  opts.lemmas = {"L1_offdiag", "L4_Q4"};
  std::vector<BenchCell> grid;
  for (int p : {100, 400, 1600}) grid.push_back({2, p, 0.5, 1.0});
  const auto summary = summarize_bench(lemma_scaling_report(grid, 50, 4242, opts));
  std::map<std::string, std::vector<double>> fitted;
  for (const LemmaSummary& s : summary) fitted[s.lemma].push_back(s.fitted_constant);
  std::string detail = format("chi2: %d/%d tail checks above exp(-t)+3sd (worst excess %.4f)", violated, 2 * cells,
                              worst_excess);
  bool stable = true;
  for (const auto& [name, values] : fitted) {
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    stable = stable && ratio <= 2.0;
    detail += format("; %s constants %.4g/%.4g/%.4g ratio %.3f", name.c_str(), values[0], values[1], values[2], ratio);
  }
  report(8, violated == 0 && stable && fitted.size() == 2, detail);
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = fs::temp_directory_path() / "kernclust_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--workdir") dir = argv[i + 1];
  }
  fs::create_directories(dir);
  const auto t0 = Clock::now();
  criterion_oracle();
  criteria_sweeps(dir);
  criterion_feasibility();
  criterion_grothendieck();
  criterion_norm_oracle();
  criterion_thresholds();
  criterion_concentration();
  criterion_determinism(dir);
  std::printf("%d failing criteria, %.0f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
