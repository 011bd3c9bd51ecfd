#include "kernclust/kmeans_opt.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "kernclust/partition_metrics.hpp"
#include "kernclust/rng.hpp"

namespace kernclust {

std::string to_string(SolveMethod m) {
  return m == SolveMethod::exhaustive ? "exhaustive" : "lloyd_balanced";
}

namespace {

void check_problem(const Matrix& K, int k) {
  if (K.rows() != K.cols()) throw InvalidInput("kernel matrix must be square");
  if (k < 1) throw InvalidParameter("k must be positive");
  if (K.rows() % k != 0) throw InvalidParameter("k must divide m");
}

struct Enumerator {
  const Matrix& K;
  int m;
  int k;
  int n;
  std::vector<int> labels;
  std::vector<int> counts;
  std::vector<int> best;
  double best_value = -std::numeric_limits<double>::infinity();
  long long visited = 0;

  void run(int i, int used, double value) {
    if (i == m) {
      ++visited;
      if (value > best_value) {
        best_value = value;
        best = labels;
      }
      return;
    }
    // Remaining points must be able to fill the remaining clusters.
    const int top = std::min(used, k - 1);
    for (int s = 0; s <= top; ++s) {
      if (counts[s] == n) continue;
      if (s == used && (k - used) * n > m - i) continue;
      double gain = K(i, i);
      for (int j = 0; j < i; ++j) {
        if (labels[j] == s) gain += 2.0 * K(i, j);
      }
      labels[i] = s;
      ++counts[s];
      run(i + 1, s == used ? used + 1 : used, value + gain);
      --counts[s];
    }
  }
};

// Gain of swapping i (cluster s) with j (cluster t) on the objective.
inline double swap_gain(const Matrix& K, const Matrix& a, int i, int s, int j, int t) {
  return 2.0 * ((a(i, t) - K(i, j)) - (a(i, s) - K(i, i)) + (a(j, s) - K(i, j)) - (a(j, t) - K(j, j)));
}

void move_point(const Matrix& K, Matrix& a, int i, int from, int to) {
  a.col(from) -= K.col(i);
  a.col(to) += K.col(i);
}

// First-improvement pair swaps on the exact objective. Returns the number of
// accepted swaps.
int improve_by_swaps(const Matrix& K, Partition& sigma, int max_passes) {
  const int m = sigma.size();
  Matrix a = cluster_affinities_serial(K, sigma);
  const double threshold = 1e-10 * std::max(1.0, K.cwiseAbs().maxCoeff());
  int accepted = 0;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const int s = sigma.labels[i];
        const int t = sigma.labels[j];
        if (s == t) continue;
        if (swap_gain(K, a, i, s, j, t) > threshold) {
          move_point(K, a, i, s, t);
          move_point(K, a, j, t, s);
          sigma.labels[i] = t;
          sigma.labels[j] = s;
          improved = true;
          ++accepted;
        }
      }
    }
    if (!improved) break;
  }
  return accepted;
}

double assignment_value(const Matrix& affinity, const Partition& sigma) {
  double v = 0.0;
  for (int i = 0; i < sigma.size(); ++i) v += affinity(i, sigma.labels[i]);
  return v;
}

struct RestartResult {
  Partition sigma;
  double objective = 0.0;
  long long iterations = 0;
  std::vector<double> trace;
};

RestartResult run_restart(const Matrix& K, int k, std::uint64_t seed, int r, const LloydOptions& opts) {
  const int m = static_cast<int>(K.rows());
  Rng rng = make_rng(seed, {static_cast<std::uint64_t>(r)});
  RestartResult res;
  res.sigma = Partition::random_balanced(m, k, rng);
  res.objective = kernel_objective(K, res.sigma);
  res.trace.push_back(res.objective);

  for (int it = 0; it < opts.max_iter; ++it) {
    const Matrix a = cluster_affinities_serial(K, res.sigma);
    Partition next = balanced_assignment(a, k);
    if (assignment_value(a, next) < assignment_value(a, res.sigma)) break;
    const double value = kernel_objective(K, next);
    ++res.iterations;
    if (!(value > res.objective)) break;
    res.sigma = std::move(next);
    res.objective = value;
    res.trace.push_back(value);
  }

  Partition polished = res.sigma;
  if (improve_by_swaps(K, polished, opts.max_swap_passes) > 0) {
    const double value = kernel_objective(K, polished);
    if (value > res.objective) {
      res.sigma = std::move(polished);
      res.objective = value;
      res.trace.push_back(value);
    }
  }
  return res;
}

}  // namespace

SolveReport exhaustive_balanced(const Matrix& K, int k, int max_points) {
  check_problem(K, k);
  const int m = static_cast<int>(K.rows());
  if (m > max_points) {
    throw Refused("exhaustive search refused: m = " + std::to_string(m) + " exceeds cap " + std::to_string(max_points));
  }
  Enumerator e{K, m, k, m / k, std::vector<int>(m, 0), std::vector<int>(k, 0), {}};
  e.run(0, 0, 0.0);

  SolveReport rep;
  rep.method = SolveMethod::exhaustive;
  rep.best_partition = Partition{e.best, k};
  rep.best_objective = kernel_objective(K, rep.best_partition);
  rep.iterations = e.visited;
  rep.restarts_used = 0;
  rep.objective_trace = {rep.best_objective};
  return rep;
}

Partition balanced_assignment(const Matrix& affinity, int k) {
  const int m = static_cast<int>(affinity.rows());
  if (affinity.cols() != k || m % k != 0) throw InvalidInput("balanced_assignment: shape mismatch");
  const int cap = m / k;

  std::vector<std::vector<int>> pref(m, std::vector<int>(k));
  std::vector<double> gap(m, 0.0);
  for (int i = 0; i < m; ++i) {
    auto& order = pref[i];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int s, int t) { return affinity(i, s) > affinity(i, t); });
    gap[i] = k > 1 ? affinity(i, order[0]) - affinity(i, order[1]) : 0.0;
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return gap[i] > gap[j]; });

  Partition out{std::vector<int>(m, -1), k};
  std::vector<int> load(k, 0);
  for (int i : order) {
    for (int s : pref[i]) {
      if (load[s] < cap) {
        out.labels[i] = s;
        ++load[s];
        break;
      }
    }
  }

  // Pair swaps that raise the assignment value.
  const double threshold = 1e-12 * std::max(1.0, affinity.cwiseAbs().maxCoeff());
  for (int pass = 0; pass < 50; ++pass) {
    bool improved = false;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const int s = out.labels[i];
        const int t = out.labels[j];
        if (s == t) continue;
        if (affinity(i, t) + affinity(j, s) - affinity(i, s) - affinity(j, t) > threshold) {
          out.labels[i] = t;
          out.labels[j] = s;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return out;
}

SolveReport lloyd_balanced(const Matrix& K, int k, std::uint64_t seed, const LloydOptions& opts) {
  check_problem(K, k);
  if (opts.restarts < 1) throw InvalidParameter("lloyd_balanced needs at least one restart");

  std::vector<RestartResult> results(opts.restarts);
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < opts.restarts; ++r) results[r] = run_restart(K, k, seed, r, opts);

  int best = 0;
  for (int r = 1; r < opts.restarts; ++r) {
    if (results[r].objective > results[best].objective) best = r;
  }
  SolveReport rep;
  rep.method = SolveMethod::lloyd_balanced;
  rep.best_partition = results[best].sigma;
  rep.best_objective = results[best].objective;
  rep.iterations = results[best].iterations;
  rep.restarts_used = opts.restarts;
  rep.objective_trace = std::move(results[best].trace);
  return rep;
}

}  // namespace kernclust
