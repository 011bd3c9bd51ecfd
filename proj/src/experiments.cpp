#include "kernclust/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "kernclust/common.hpp"
#include "kernclust/kernel_core.hpp"
#include "kernclust/kmeans_opt.hpp"
#include "kernclust/model_gen.hpp"
#include "kernclust/partition_metrics.hpp"
#include "kernclust/rng.hpp"
#include "kernclust/rounding.hpp"
#include "kernclust/sdp_relax.hpp"

namespace kernclust {

void SweepConfig::validate() const {
  if (k.empty() || p.empty() || alpha.empty() || rho.empty()) throw InvalidParameter("sweep grid has an empty axis");
  if (trials < 1) throw InvalidParameter("trials must be at least 1");
  if (methods.empty()) throw InvalidParameter("no methods selected");
  for (const auto& m : methods) {
    if (std::find(kSweepMethods.begin(), kSweepMethods.end(), m) == kSweepMethods.end()) {
      throw InvalidParameter("unknown method '" + m + "'");
    }
  }
  if (restarts < 1) throw InvalidParameter("restarts must be at least 1");
  if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");
  if (!(feas_tol > 0.0)) throw InvalidParameter("feas_tol must be positive");
  if (max_iter < 1) throw InvalidParameter("max_iter must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
  if (!(eta >= 1.0)) throw InvalidParameter("eta must be at least 1");
  for (int kk : k) {
    for (int pp : p) {
      for (double a : alpha) {
        for (double r : rho) {
          ModelParams mp;
          mp.k = kk;
          mp.p = pp;
          mp.alpha = a;
          mp.rho = r;
          mp.c0 = c0;
          mp.c_gamma = c_gamma;
          mp.c_sdp = c_sdp;
          mp.validate();
        }
      }
    }
  }
}

nlohmann::json config_to_json(const SweepConfig& c) {
  return {
      {"grid", {{"k", c.k}, {"p", c.p}, {"alpha", c.alpha}, {"rho", c.rho}}},
      {"trials", c.trials},
      {"methods", c.methods},
      {"seed", c.seed},
      {"solver",
       {{"tol", c.tol},
        {"feas_tol", c.feas_tol},
        {"max_iter", c.max_iter},
        {"restarts", c.restarts},
        {"exhaustive_cap", c.exhaustive_cap},
        {"sdp_warm_start", c.sdp_warm_start}}},
      {"epsilon", c.epsilon},
      {"eta", c.eta},
      {"c0", c.c0},
      {"c_gamma", c.c_gamma},
      {"c_sdp", c.c_sdp},
      {"out", c.out},
      {"workers", c.workers},
  };
}

SweepConfig config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.k = g.value("k", c.k);
      c.p = g.value("p", c.p);
      c.alpha = g.value("alpha", c.alpha);
      c.rho = g.value("rho", c.rho);
    }
    c.trials = j.value("trials", c.trials);
    c.methods = j.value("methods", c.methods);
    c.seed = j.value("seed", c.seed);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      c.tol = s.value("tol", c.tol);
      c.feas_tol = s.value("feas_tol", c.feas_tol);
      c.max_iter = s.value("max_iter", c.max_iter);
      c.restarts = s.value("restarts", c.restarts);
      c.exhaustive_cap = s.value("exhaustive_cap", c.exhaustive_cap);
      c.sdp_warm_start = s.value("sdp_warm_start", c.sdp_warm_start);
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    c.eta = j.value("eta", c.eta);
    c.c0 = j.value("c0", c.c0);
    c.c_gamma = j.value("c_gamma", c.c_gamma);
    c.c_sdp = j.value("c_sdp", c.c_sdp);
    c.out = j.value("out", c.out);
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("bad sweep config: ") + e.what());
  }
  return c;
}

bool is_recovered(double beta_frob, int k, double epsilon) {
  return beta_frob > 1.0 + (k - 1) * epsilon;
}

namespace {

struct Cell {
  int k;
  int p;
  double alpha;
  double rho;
};

std::vector<Cell> expand_grid(const SweepConfig& c) {
  std::vector<Cell> cells;
  for (int k : c.k) {
    for (int p : c.p) {
      for (double a : c.alpha) {
        for (double r : c.rho) cells.push_back({k, p, a, r});
      }
    }
  }
  return cells;
}

void score(SweepRow& row, const Partition& sigma, const Partition& truth, double epsilon) {
  row.err = misclassification(sigma, truth);
  row.beta_frob = overlap_similarity(sigma, truth);
  row.recovered = is_recovered(row.beta_frob, truth.k, epsilon);
}

std::vector<SweepRow> run_trial(const SweepConfig& cfg, const Cell& cell, std::size_t cell_index, int trial) {
  ModelParams params;
  params.k = cell.k;
  params.p = cell.p;
  params.alpha = cell.alpha;
  params.rho = cell.rho;
  params.c0 = cfg.c0;
  params.c_gamma = cfg.c_gamma;
  params.c_sdp = cfg.c_sdp;
  params.seed = derive_seed(cfg.seed, {cell_index, static_cast<std::uint64_t>(trial)});
  const Dataset ds = sample_dataset(params);
  const Matrix K = exp_kernel(ds.points);

  std::vector<SweepRow> rows;
  Partition lloyd_partition;
  for (std::size_t mi = 0; mi < kSweepMethods.size(); ++mi) {
    const std::string& method = kSweepMethods[mi];
    if (std::find(cfg.methods.begin(), cfg.methods.end(), method) == cfg.methods.end()) continue;
    const std::uint64_t method_seed = derive_seed(params.seed, {mi + 1});
    SweepRow row;
    row.k = cell.k;
    row.p = cell.p;
    row.alpha = cell.alpha;
    row.rho = cell.rho;
    row.trial = trial;
    row.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (method == "kmeans_lloyd") {
        LloydOptions lo;
        lo.restarts = cfg.restarts;
        const SolveReport rep = lloyd_balanced(K, cell.k, method_seed, lo);
        row.objective = rep.best_objective;
        row.iterations = rep.iterations;
        score(row, rep.best_partition, ds.truth, cfg.epsilon);
        lloyd_partition = rep.best_partition;
      } else if (method == "kmeans_exhaustive") {
        const SolveReport rep = exhaustive_balanced(K, cell.k, cfg.exhaustive_cap);
        row.objective = rep.best_objective;
        row.iterations = rep.iterations;
        score(row, rep.best_partition, ds.truth, cfg.epsilon);
      } else {
        SdpOptions so;
        so.tol = cfg.tol;
        so.feas_tol = cfg.feas_tol;
        so.max_iter = cfg.max_iter;
        if (cfg.sdp_warm_start && !lloyd_partition.labels.empty()) so.warm_start = clustering_matrix(lloyd_partition);
        const SdpSolution sol = solve_sdp(K, cell.k, so);
        const RoundingReport rr = round_and_certify(sol.X_hat, ds.truth, method_seed, cfg.eta);
        row.objective = sol.objective;
        row.iterations = sol.iterations;
        row.converged = sol.converged;
        row.certified_bound = rr.certified_err_bound;
        score(row, rr.partition, ds.truth, cfg.epsilon);
      }
    } catch (const std::exception&) {
      row.converged = false;
      row.err = std::numeric_limits<double>::quiet_NaN();
      row.beta_frob = std::numeric_limits<double>::quiet_NaN();
      row.objective = std::numeric_limits<double>::quiet_NaN();
      row.recovered = false;
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_sweep_header(std::ostream& os) {
  os << "k,p,alpha,rho,trial,method,err,beta_frob,objective,recovered,converged,certified_bound,iterations\n";
}

void write_sweep_row(std::ostream& os, const SweepRow& r) {
  os << r.k << ',' << r.p << ',' << fmt(r.alpha) << ',' << fmt(r.rho) << ',' << r.trial << ',' << r.method << ','
     << fmt(r.err) << ',' << fmt(r.beta_frob) << ',' << fmt(r.objective) << ',' << (r.recovered ? 1 : 0) << ','
     << (r.converged ? 1 : 0) << ',' << fmt(r.certified_bound) << ',' << r.iterations << '\n';
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  if (config.workers > 0) omp_set_num_threads(config.workers);

  std::ofstream csv;
  std::ofstream timing;
  if (!config.out.empty()) {
    csv.open(config.out);
    if (!csv) throw InvalidInput("cannot open sweep output " + config.out);
    write_sweep_header(csv);
    timing.open(config.out + ".timing.csv");
    timing << "k,p,alpha,rho,trial,method,runtime_ms\n";
  }

  SweepResult result;
  const auto cells = expand_grid(config);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<std::vector<SweepRow>> per_trial(config.trials);
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < config.trials; ++t) per_trial[t] = run_trial(config, cells[c], c, t);

    for (const auto& trial_rows : per_trial) {
      for (const SweepRow& r : trial_rows) {
        if (!r.converged) ++result.failures;
        if (csv) {
          write_sweep_row(csv, r);
          timing << r.k << ',' << r.p << ',' << fmt(r.alpha) << ',' << fmt(r.rho) << ',' << r.trial << ',' << r.method
                 << ',' << fmt(r.runtime_ms) << '\n';
        }
        result.rows.push_back(r);
      }
    }
    if (csv) {
      csv.flush();
      timing.flush();
    }
  }
  return result;
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open sweep CSV " + path);
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("empty sweep CSV " + path);
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 13) throw InvalidInput("malformed sweep row: " + line);
    SweepRow r;
    try {
      r.k = std::stoi(f[0]);
      r.p = std::stoi(f[1]);
      r.alpha = std::stod(f[2]);
      r.rho = std::stod(f[3]);
      r.trial = std::stoi(f[4]);
      r.method = f[5];
      r.err = std::stod(f[6]);
      r.beta_frob = std::stod(f[7]);
      r.objective = std::stod(f[8]);
      r.recovered = f[9] == "1";
      r.converged = f[10] == "1";
      r.certified_bound = std::stod(f[11]);
      r.iterations = std::stoll(f[12]);
    } catch (const std::exception&) {
      throw InvalidInput("malformed sweep row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

WilsonInterval wilson_interval(int successes, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double ph = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (ph + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

std::vector<double> isotonic_fit(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != weights.size()) throw InvalidInput("isotonic_fit: size mismatch");
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = w > 0.0 ? (a.mean * a.weight + b.mean * b.weight) / w : 0.5 * (a.mean + b.mean);
      a.weight = w;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

std::vector<PhaseCurve> summarize(const std::vector<SweepRow>& rows, double c_sdp) {
  if (rows.empty()) throw InvalidInput("summarize: no sweep rows");
  using Key = std::tuple<int, int, double, std::string>;
  std::map<Key, std::map<double, std::pair<int, int>>> groups;
  for (const SweepRow& r : rows) {
    auto& cell = groups[Key{r.k, r.p, r.alpha, r.method}][r.rho];
    ++cell.first;
    cell.second += r.recovered ? 1 : 0;
  }

  std::vector<PhaseCurve> curves;
  for (const auto& [key, by_rho] : groups) {
    PhaseCurve curve;
    std::tie(curve.k, curve.p, curve.alpha, curve.method) = key;
    curve.thresholds = thresholds(curve.k, curve.alpha, c_sdp);
    std::vector<double> frac;
    std::vector<double> weight;
    for (const auto& [rho, counts] : by_rho) {
      PhasePoint pt;
      pt.rho = rho;
      pt.trials = counts.first;
      pt.recovered = counts.second;
      pt.fraction = static_cast<double>(pt.recovered) / pt.trials;
      pt.wilson = wilson_interval(pt.recovered, pt.trials);
      curve.points.push_back(pt);
      frac.push_back(pt.fraction);
      weight.push_back(pt.trials);
    }
    const auto fit = isotonic_fit(frac, weight);
    for (std::size_t i = 0; i < fit.size(); ++i) {
      curve.points[i].isotonic = fit[i];
      curve.isotonic_residual = std::max(curve.isotonic_residual, std::abs(frac[i] - fit[i]));
    }
    const auto cross = std::find_if(fit.begin(), fit.end(), [](double v) { return v >= 0.5; });
    if (cross == fit.end()) {
      curve.above_grid = true;
      curve.rho50 = std::numeric_limits<double>::quiet_NaN();
    } else if (cross == fit.begin()) {
      curve.below_grid = true;
      curve.rho50 = curve.points.front().rho;
    } else {
      const std::size_t i = static_cast<std::size_t>(cross - fit.begin());
      const double r0 = curve.points[i - 1].rho;
      const double r1 = curve.points[i].rho;
      const double f0 = fit[i - 1];
      const double f1 = fit[i];
      curve.rho50 = r0 + (0.5 - f0) / (f1 - f0) * (r1 - r0);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

nlohmann::json phase_to_json(const std::vector<PhaseCurve>& curves) {
  nlohmann::json out = nlohmann::json::array();
  for (const PhaseCurve& c : curves) {
    const auto& t = c.thresholds;
    auto ratio = [&](double th) -> nlohmann::json {
      if (std::isnan(c.rho50) || th <= 0.0) return nullptr;
      return c.rho50 / th;
    };
    nlohmann::json j = {
        {"k", c.k},
        {"p", c.p},
        {"alpha", c.alpha},
        {"method", c.method},
        {"rho50", std::isnan(c.rho50) ? nlohmann::json(nullptr) : nlohmann::json(c.rho50)},
        {"below_grid", c.below_grid},
        {"above_grid", c.above_grid},
        {"isotonic_residual", c.isotonic_residual},
        {"thresholds",
         {{"rho_upper_kernel_np", t.rho_upper_kernel_np},
          {"rho_lower_np", t.rho_lower_np},
          {"rho_lower_p", t.rho_lower_p},
          {"rho_upper_kernel_p", t.rho_upper_kernel_p}}},
        {"rho50_over_threshold",
         {{"rho_upper_kernel_np", ratio(t.rho_upper_kernel_np)},
          {"rho_lower_np", ratio(t.rho_lower_np)},
          {"rho_lower_p", ratio(t.rho_lower_p)},
          {"rho_upper_kernel_p", ratio(t.rho_upper_kernel_p)}}},
    };
    out.push_back(j);
  }
  return out;
}

void write_phase_csv(const std::string& path, const std::vector<PhaseCurve>& curves) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path);
  os << "k,p,alpha,method,rho,trials,recovered,recovery_fraction,wilson_ci_lo,wilson_ci_hi,isotonic_fit\n";
  for (const PhaseCurve& c : curves) {
    for (const PhasePoint& pt : c.points) {
      os << c.k << ',' << c.p << ',' << fmt(c.alpha) << ',' << c.method << ',' << fmt(pt.rho) << ',' << pt.trials << ','
         << pt.recovered << ',' << fmt(pt.fraction) << ',' << fmt(pt.wilson.lo) << ',' << fmt(pt.wilson.hi) << ','
         << fmt(pt.isotonic) << '\n';
    }
  }
}

void write_gnuplot_script(const std::string& path, const std::string& phase_csv, const std::vector<PhaseCurve>& curves) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path);
  os << "set datafile separator ','\n"
     << "set xlabel 'rho'\nset ylabel 'recovery fraction'\nset yrange [0:1.05]\nset key left top\n";
  os << "plot ";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const PhaseCurve& c = curves[i];
    if (i > 0) os << ", \\\n     ";
    os << "'" << phase_csv << "' using ($1==" << c.k << " && $2==" << c.p << " && $3==" << fmt(c.alpha)
       << " && strcol(4) eq '" << c.method << "' ? $5 : 1/0):8:9:10 with yerrorlines title '" << c.method
       << " k=" << c.k << " p=" << c.p << " alpha=" << fmt(c.alpha) << "'";
  }
  os << '\n';
}

}  // namespace kernclust
