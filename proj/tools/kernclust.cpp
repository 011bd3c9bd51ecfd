// kernclust: command-line front end for the clustering simulator.

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kernclust/concentration.hpp"
#include "kernclust/experiments.hpp"
#include "kernclust/kernel_core.hpp"
#include "kernclust/kmeans_opt.hpp"
#include "kernclust/matrix_io.hpp"
#include "kernclust/model_gen.hpp"
#include "kernclust/partition_metrics.hpp"
#include "kernclust/rounding.hpp"
#include "kernclust/sdp_relax.hpp"
#include "kernclust/thresholds.hpp"

namespace {

using nlohmann::json;
using namespace kernclust;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitPartial = 3;

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// Number of worker threads from KERNCLUST_WORKERS, if set.
void apply_worker_env() {
  const char* env = std::getenv("KERNCLUST_WORKERS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) throw InvalidParameter("KERNCLUST_WORKERS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

std::vector<BenchCell> bench_grid(const json& j) {
  std::vector<BenchCell> grid;
  if (j.is_array()) {
    for (const auto& c : j) {
      BenchCell cell;
      cell.k = c.value("k", cell.k);
      cell.p = c.value("p", cell.p);
      cell.alpha = c.value("alpha", cell.alpha);
      cell.rho = c.value("rho", cell.rho);
      grid.push_back(cell);
    }
    return grid;
  }
  const json& g = j.contains("grid") ? j.at("grid") : j;
  auto axis = [&](const char* name, auto fallback) {
    using T = decltype(fallback);
    if (!g.contains(name)) return std::vector<T>{fallback};
    if (g.at(name).is_array()) return g.at(name).template get<std::vector<T>>();
    return std::vector<T>{g.at(name).template get<T>()};
  };
  for (int k : axis("k", 2))
    for (int p : axis("p", 100))
      for (double alpha : axis("alpha", 1.0))
        for (double rho : axis("rho", 0.0)) grid.push_back({k, p, alpha, rho});
  return grid;
}

json report_json(const SolveReport& rep, const Dataset& ds) {
  return {{"method", to_string(rep.method)},
          {"objective", rep.best_objective},
          {"objective_normalized", rep.best_objective * ds.k() / static_cast<double>(ds.m())},
          {"err_vs_truth", misclassification(rep.best_partition, ds.truth)},
          {"beta_frob", overlap_similarity(rep.best_partition, ds.truth)},
          {"iterations", rep.iterations},
          {"restarts", rep.restarts_used},
          {"labels", rep.best_partition.labels}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel clustering of high-dimensional Gaussian mixtures (natural logarithms throughout)"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a planted Gaussian mixture");
  ModelParams gp;
  std::string gen_out;
  gen->add_option("--k", gp.k, "Number of clusters")->required();
  gen->add_option("--p", gp.p, "Dimension")->required();
  gen->add_option("--alpha", gp.alpha, "Sample ratio m/p")->required();
  gen->add_option("--rho", gp.rho, "Signal-to-noise ratio")->required();
  gen->add_option("--seed", gp.seed, "Root seed");
  gen->add_option("--out", gen_out, "Points file (.csv or binary); a .json sidecar is written next to it")->required();

  // kernel
  auto* kern = app.add_subcommand("kernel", "Exponential kernel matrix of a dataset");
  std::string kern_in;
  std::string kern_out;
  bool kern_surrogate = false;
  kern->add_option("--in", kern_in, "Dataset written by gen")->required();
  kern->add_option("--out", kern_out, "Matrix file (.csv or binary: uint64 m, then row-major float64)")->required();
  kern->add_flag("--surrogate", kern_surrogate, "Write the second-order surrogate instead");

  // kmeans
  auto* km = app.add_subcommand("kmeans", "Balanced kernel k-means");
  std::string km_in;
  std::string km_method = "lloyd";
  LloydOptions km_opts;
  std::uint64_t km_seed = 0;
  int km_cap = kDefaultExhaustiveCap;
  km->add_option("--in", km_in, "Dataset written by gen")->required();
  km->add_option("--method", km_method, "exhaustive or lloyd")->check(CLI::IsMember({"exhaustive", "lloyd"}));
  km->add_option("--restarts", km_opts.restarts, "Lloyd restarts");
  km->add_option("--seed", km_seed, "Lloyd seed");
  km->add_option("--max-points", km_cap, "Refuse exhaustive search above this many points");

  // sdp
  auto* sdp = app.add_subcommand("sdp", "SDP relaxation, optionally rounded by k-medians");
  std::string sdp_in;
  std::string sdp_out;
  SdpOptions sdp_opts;
  bool sdp_round = false;
  double sdp_eta = kDefaultEta;
  std::uint64_t sdp_seed = 0;
  sdp->add_option("--in", sdp_in, "Dataset written by gen")->required();
  sdp->add_option("--tol", sdp_opts.tol, "Residual tolerance");
  sdp->add_option("--feas-tol", sdp_opts.feas_tol, "Entrywise feasibility tolerance");
  sdp->add_option("--max-iter", sdp_opts.max_iter, "Iteration cap");
  sdp->add_option("--out", sdp_out, "Solution matrix file; convergence record goes to <out>.json");
  sdp->add_flag("--round", sdp_round, "Round with k-medians and report the error certificate");
  sdp->add_option("--eta", sdp_eta, "k-medians approximation factor used in the certificate");
  sdp->add_option("--seed", sdp_seed, "Rounding seed");

  // norm
  auto* nrm = app.add_subcommand("norm", "infinity-to-one norm of a matrix");
  std::string nrm_in;
  bool nrm_exact = false;
  bool nrm_heur = false;
  int nrm_restarts = 50;
  std::uint64_t nrm_seed = 0;
  int nrm_cap = kDefaultExactNormCap;
  nrm->add_option("--in", nrm_in, "Matrix file")->required();
  auto* ex_flag = nrm->add_flag("--exact", nrm_exact, "Enumerate sign vectors");
  nrm->add_flag("--heuristic", nrm_heur, "Alternating sign ascent (lower bound)")->excludes(ex_flag);
  nrm->add_option("--restarts", nrm_restarts, "Heuristic restarts");
  nrm->add_option("--seed", nrm_seed, "Heuristic seed");
  nrm->add_option("--max-rows", nrm_cap, "Refuse exact enumeration above this many rows");

  // thresholds
  auto* thr = app.add_subcommand("thresholds", "Closed-form recovery thresholds on rho");
  int thr_k = 2;
  double thr_alpha = 1.0;
  double thr_c = 1.0;
  thr->add_option("--k", thr_k)->required();
  thr->add_option("--alpha", thr_alpha)->required();
  thr->add_option("--c", thr_c, "Constant of the polynomial-time kernel bound");

  // bench
  auto* bench = app.add_subcommand("bench", "Monte Carlo of the concentration statistics");
  std::string bench_grid_path;
  int bench_trials = 20;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  BenchOptions bench_opts;
  bench->add_option("--grid", bench_grid_path, "JSON grid: {k,p,alpha,rho} axes or a list of cells")->required();
  bench->add_option("--trials", bench_trials);
  bench->add_option("--seed", bench_seed);
  bench->add_option("--out", bench_out, "CSV output")->required();
  bench->add_option("--samples", bench_opts.partition_samples, "Partitions sampled for maxima over sigma");
  bench->add_option("--epsilon", bench_opts.epsilon);
  bench->add_option("--lemma", bench_opts.lemmas, "Restrict to these statistics");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Recovery sweep over a (k, p, alpha, rho) grid");
  std::string sweep_cfg;
  std::string sweep_out;
  sweep->add_option("--config", sweep_cfg, "JSON config (see config --dump-defaults)")->required();
  sweep->add_option("--out", sweep_out, "Override the CSV path");

  // summarize
  auto* summ = app.add_subcommand("summarize", "Phase table from a sweep CSV");
  std::string summ_in;
  std::string summ_csv;
  std::string summ_plot;
  double summ_c = 1.0;
  summ->add_option("--in", summ_in, "Sweep CSV")->required();
  summ->add_option("--csv", summ_csv, "Plot-ready CSV (rho, recovery_fraction, wilson_ci_lo, wilson_ci_hi)");
  summ->add_option("--gnuplot", summ_plot, "Gnuplot script reading the --csv output");
  summ->add_option("--c", summ_c, "Constant of the polynomial-time kernel bound");

  // config
  auto* cfg = app.add_subcommand("config", "Sweep configuration helpers");
  bool dump_defaults = false;
  cfg->add_flag("--dump-defaults", dump_defaults, "Print the default sweep config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    apply_worker_env();

    if (*gen) {
      const Dataset ds = sample_dataset(gp);
      save_dataset(gen_out, ds);
      print({{"out", gen_out}, {"m", ds.m()}, {"p", ds.p()}, {"k", ds.k()}, {"params", params_to_json(gp)}});
    } else if (*kern) {
      const Dataset ds = load_dataset(kern_in);
      const KernelMatrix km_ = gram_matrix(ds);
      write_matrix(kern_out, kern_surrogate ? surrogate_matrix(ds, km_.kappa) : km_.K);
      print({{"out", kern_out},
             {"m", ds.m()},
             {"tau", km_.tau},
             {"kappa", km_.kappa},
             {"gamma_max", km_.gamma_max},
             {"gamma_min", km_.gamma_min},
             {"surrogate", kern_surrogate}});
    } else if (*km) {
      const Dataset ds = load_dataset(km_in);
      const Matrix K = exp_kernel(ds.points);
      const SolveReport rep =
          km_method == "exhaustive" ? exhaustive_balanced(K, ds.k(), km_cap) : lloyd_balanced(K, ds.k(), km_seed, km_opts);
      print(report_json(rep, ds));
    } else if (*sdp) {
      const Dataset ds = load_dataset(sdp_in);
      const Matrix K = exp_kernel(ds.points);
      const SdpSolution sol = solve_sdp(K, ds.k(), sdp_opts);
      const SdpFeasibility f = check_feasibility(sol.X_hat, ds.k());
      json rec = {{"objective", sol.objective},
                  {"primal_residual", sol.primal_residual},
                  {"dual_residual", sol.dual_residual},
                  {"max_violation", sol.max_violation},
                  {"iterations", sol.iterations},
                  {"converged", sol.converged},
                  {"feasibility",
                   {{"diag", f.diag},
                    {"negativity", f.negativity},
                    {"row_sum", f.row_sum},
                    {"asymmetry", f.asymmetry},
                    {"min_eigenvalue", f.min_eigenvalue}}}};
      if (sdp_round) {
        const RoundingReport rr = round_and_certify(sol.X_hat, ds.truth, sdp_seed, sdp_eta);
        rec["rounding"] = {{"eta", rr.eta},
                           {"l1_gap", rr.l1_gap},
                           {"certified_err_bound", rr.certified_err_bound},
                           {"certified_recovery", rr.certified_recovery},
                           {"err_vs_truth", rr.actual_err},
                           {"labels", rr.partition.labels}};
      }
      if (!sdp_out.empty()) {
        write_matrix(sdp_out, sol.X_hat);
        std::ofstream(sdp_out + ".json") << rec.dump(2) << '\n';
      }
      print(rec);
      if (!sol.converged) return kExitPartial;
    } else if (*nrm) {
      const Matrix A = read_matrix(nrm_in);
      const NormEstimate est =
          nrm_heur ? inf_to_one_norm_lower(A, nrm_restarts, nrm_seed) : inf_to_one_norm_exact(A, nrm_cap);
      print({{"value", est.value}, {"exact", est.exact}, {"y", est.y}, {"z", est.z}});
    } else if (*thr) {
      const ThresholdSet t = thresholds(thr_k, thr_alpha, thr_c);
      print({{"k", thr_k},
             {"alpha", thr_alpha},
             {"c", thr_c},
             {"rho_upper_kernel_np", t.rho_upper_kernel_np},
             {"rho_lower_np", t.rho_lower_np},
             {"rho_lower_p", t.rho_lower_p},
             {"rho_upper_kernel_p", t.rho_upper_kernel_p}});
    } else if (*bench) {
      const std::vector<BenchCell> grid = bench_grid(read_json_file(bench_grid_path));
      if (grid.empty()) throw InvalidParameter("bench: empty grid");
      if (bench_trials < 1) throw InvalidParameter("bench: trials must be >= 1");
      const std::vector<BenchRow> rows = lemma_scaling_report(grid, bench_trials, bench_seed, bench_opts);
      std::ofstream os(bench_out);
      if (!os) throw InvalidInput("cannot open " + bench_out);
      os << "lemma,k,p,alpha,rho,trial,statistic,bound_shape_value,fitted_constant\n";
      os.precision(12);
      for (const BenchRow& r : rows) {
        os << r.lemma << ',' << r.cell.k << ',' << r.cell.p << ',' << r.cell.alpha << ',' << r.cell.rho << ','
           << r.trial << ',' << r.statistic << ',' << r.bound_shape_value << ',' << r.fitted_constant << '\n';
      }
      json summary = json::array();
      for (const LemmaSummary& s : summarize_bench(rows)) {
        summary.push_back({{"lemma", s.lemma},
                           {"k", s.cell.k},
                           {"p", s.cell.p},
                           {"alpha", s.cell.alpha},
                           {"rho", s.cell.rho},
                           {"trials", s.trials},
                           {"fitted_constant", s.fitted_constant},
                           {"envelope_constant", s.envelope_constant}});
      }
      print({{"out", bench_out}, {"rows", rows.size()}, {"summary", summary}});
    } else if (*sweep) {
      SweepConfig c = config_from_json(read_json_file(sweep_cfg));
      if (!sweep_out.empty()) c.out = sweep_out;
      const SweepResult res = run_sweep(c);
      print({{"out", c.out}, {"rows", res.rows.size()}, {"failures", res.failures}});
      if (res.failures > 0) return kExitPartial;
    } else if (*summ) {
      const std::vector<PhaseCurve> curves = summarize(read_sweep_csv(summ_in), summ_c);
      if (!summ_csv.empty()) write_phase_csv(summ_csv, curves);
      if (!summ_plot.empty()) write_gnuplot_script(summ_plot, summ_csv.empty() ? "phase.csv" : summ_csv, curves);
      print(phase_to_json(curves));
    } else if (*cfg) {
      print(config_to_json(SweepConfig{}));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "kernclust: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Refused& e) {
    std::cerr << "kernclust: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const json::exception& e) {
    std::cerr << "kernclust: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "kernclust: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
