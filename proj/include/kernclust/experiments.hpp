#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kernclust/thresholds.hpp"

namespace kernclust {

inline const std::vector<std::string> kSweepMethods = {"kmeans_lloyd", "kmeans_exhaustive", "sdp_rounded"};

struct SweepConfig {
  std::vector<int> k = {2};
  std::vector<int> p = {200};
  std::vector<double> alpha = {2.0};
  std::vector<double> rho = {0.0, 1.0, 2.0, 4.0, 8.0};
  int trials = 20;
  std::vector<std::string> methods = {"kmeans_lloyd"};
  std::uint64_t seed = 1;

  // Solver options.
  double tol = 1e-4;
  double feas_tol = 1e-2;
  int max_iter = 500;
  int restarts = 20;
  int exhaustive_cap = 14;
  bool sdp_warm_start = false;

  // Recovery is declared when ||beta||_F^2 > 1 + (k - 1) epsilon.
  double epsilon = 0.05;
  double eta = 7.0;
  double c0 = 1.0;
  double c_gamma = 1.0;
  double c_sdp = 1.0;

  std::string out;   // CSV path; empty keeps results in memory only
  int workers = 0;   // 0 leaves the OpenMP default (or KERNCLUST_WORKERS)

  // Throws InvalidParameter on unknown methods, empty grids, trials < 1 or k not dividing m.
  void validate() const;
};

nlohmann::json config_to_json(const SweepConfig& c);
SweepConfig config_from_json(const nlohmann::json& j);

struct SweepRow {
  int k = 2;
  int p = 0;
  double alpha = 0.0;
  double rho = 0.0;
  int trial = 0;
  std::string method;
  double err = 0.0;
  double beta_frob = 0.0;
  double objective = 0.0;
  bool recovered = false;
  bool converged = true;
  double certified_bound = -1.0;  // sdp_rounded only
  long long iterations = 0;
  double runtime_ms = 0.0;        // not part of the CSV
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int failures = 0;  // rows with converged == false
};

// Cells are the cartesian product k x p x alpha x rho (in that nesting order);
// trial t of cell c draws its dataset from derive_seed(seed, {c, t}). Rows are
// appended to config.out one cell at a time in (trial, method) order, so the
// file does not depend on the worker count. Wall-clock timings go to
// config.out + ".timing.csv".
SweepResult run_sweep(const SweepConfig& config);

// Recovery criterion on ||beta||_F^2.
bool is_recovered(double beta_frob, int k, double epsilon);

void write_sweep_header(std::ostream& os);
void write_sweep_row(std::ostream& os, const SweepRow& r);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// 95% Wilson score interval for `successes` out of `n`.
WilsonInterval wilson_interval(int successes, int n, double z = 1.959963984540054);

// Weighted pool-adjacent-violators fit, non-decreasing in the input order.
std::vector<double> isotonic_fit(const std::vector<double>& values, const std::vector<double>& weights);

struct PhasePoint {
  double rho = 0.0;
  int trials = 0;
  int recovered = 0;
  double fraction = 0.0;
  WilsonInterval wilson;
  double isotonic = 0.0;
};

struct PhaseCurve {
  int k = 2;
  int p = 0;
  double alpha = 0.0;
  std::string method;
  std::vector<PhasePoint> points;  // ascending rho
  double rho50 = 0.0;              // isotonic fit crossing 0.5, linearly interpolated
  bool below_grid = false;         // fit already >= 0.5 at the smallest rho
  bool above_grid = false;         // fit never reaches 0.5 (rho50 = NaN)
  double isotonic_residual = 0.0;  // max |fraction - isotonic|
  ThresholdSet thresholds;
};

// Throws InvalidInput on an empty row set.
std::vector<PhaseCurve> summarize(const std::vector<SweepRow>& rows, double c_sdp = 1.0);

nlohmann::json phase_to_json(const std::vector<PhaseCurve>& curves);
void write_phase_csv(const std::string& path, const std::vector<PhaseCurve>& curves);
// Gnuplot script plotting recovery fraction with Wilson error bars from the phase CSV.
void write_gnuplot_script(const std::string& path, const std::string& phase_csv, const std::vector<PhaseCurve>& curves);

}  // namespace kernclust
