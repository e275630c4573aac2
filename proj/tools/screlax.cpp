// screlax: solve non-negative Elastic-Net problems with screening and
// relaxing tests, run benchmark campaigns and build performance profiles.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "screlax/bench.hpp"
#include "screlax/format.hpp"
#include "screlax/problem_io.hpp"
#include "screlax/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitIo = 4;

int cmd_solve(const std::string& problem_path, const std::string& variant, double budget, double tol,
              const std::string& trace_path, int digits) {
  screlax::ProblemData data;
  try {
    data = screlax::read_problem_file(problem_path);
  } catch (const screlax::ParseError& e) {
    std::cerr << "screlax: " << problem_path << ": " << e.what() << '\n';
    return kExitParse;
  }

  screlax::SolverConfig cfg;
  try {
    cfg.variant = screlax::parse_variant(variant);
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be >= 0");
    if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
    cfg.flop_budget = budget >= 9.2e18 ? std::numeric_limits<std::int64_t>::max()
                                       : static_cast<std::int64_t>(budget);
    cfg.gap_tolerance = tol;
  } catch (const std::invalid_argument& e) {
    std::cerr << "screlax: " << e.what() << '\n';
    return kExitInvalid;
  }

  std::optional<screlax::Problem> problem;
  try {
    problem.emplace(std::move(data.A), std::move(data.y), std::move(data.lambda), data.epsilon);
  } catch (const std::invalid_argument& e) {
    std::cerr << "screlax: invalid problem: " << e.what() << '\n';
    return kExitInvalid;
  }

  const screlax::SolveResult res = screlax::solve(*problem, cfg);

  for (screlax::Index l = 0; l < res.x.size(); ++l) {
    if (l) std::cout << ',';
    std::cout << screlax::format_fixed(res.x(l), digits);
  }
  std::cout << '\n' << "gap," << screlax::format_real(res.gap) << '\n';
  std::cerr << "variant=" << screlax::variant_name(cfg.variant) << " stop=" << screlax::stop_reason_name(res.reason)
            << " iterations=" << res.iterations << " flops=" << res.flops << '\n';

  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) {
      std::cerr << "screlax: cannot write '" << trace_path << "'\n";
      return kExitIo;
    }
    screlax::write_trace_csv(out, res.trace);
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path) {
  screlax::ExperimentConfig cfg;
  try {
    cfg = screlax::read_experiment_config(config_path);
  } catch (const screlax::ConfigError& e) {
    std::cerr << "screlax: " << config_path << ": " << e.what() << '\n';
    return kExitParse;
  }
  const auto rows = screlax::run_experiment(cfg);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "screlax: cannot write '" << out_path << "'\n";
    return kExitIo;
  }
  screlax::write_results_csv(out, rows);

  for (const auto v : cfg.variants) {
    std::vector<double> gaps;
    for (const auto& r : rows) {
      if (r.variant == v) gaps.push_back(r.final_gap);
    }
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    const double median = gaps.size() % 2 ? gaps[mid] : 0.5 * (gaps[mid - 1] + gaps[mid]);
    std::cout << screlax::variant_name(v) << ": instances=" << gaps.size()
              << " median_gap=" << screlax::format_real(median) << '\n';
  }
  return kExitOk;
}

int cmd_profile(const std::string& results_path, double tau_min, double tau_max, int tau_points,
                const std::string& out_path) {
  std::vector<screlax::ResultRow> rows;
  try {
    std::ifstream in(results_path);
    if (!in) throw screlax::ParseError(0, "cannot open '" + results_path + "'");
    rows = screlax::parse_results_csv(in);
  } catch (const screlax::ParseError& e) {
    std::cerr << "screlax: " << results_path << ": " << e.what() << '\n';
    return kExitParse;
  }
  std::vector<double> grid;
  try {
    grid = screlax::log_tau_grid(tau_min, tau_max, tau_points);
  } catch (const std::invalid_argument& e) {
    std::cerr << "screlax: " << e.what() << '\n';
    return kExitInvalid;
  }
  const auto curves = screlax::dolan_more(rows, grid);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "screlax: cannot write '" << out_path << "'\n";
    return kExitIo;
  }
  screlax::write_profile_csv(out, curves);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screen & Relax solver for the non-negative Elastic-Net"};
  app.require_subcommand(1);

  std::string problem_path, variant = "sr", trace_path;
  double budget = 2e6, tol = 1e-12;
  int digits = 6;
  auto* solve = app.add_subcommand("solve", "Solve one problem file");
  solve->add_option("problem", problem_path, "Problem file")->required();
  solve->add_option("--variant", variant, "apg, apgs, apgr or sr")->capture_default_str();
  solve->add_option("--budget", budget, "FLOP budget")->capture_default_str();
  solve->add_option("--tol", tol, "Duality-gap tolerance")->capture_default_str();
  solve->add_option("--trace", trace_path, "Write the per-iteration trace CSV here");
  solve->add_option("--digits", digits, "Decimals printed for the solution")->check(CLI::Range(0, 30))->capture_default_str();

  std::string config_path, bench_out = "results.csv";
  auto* bench = app.add_subcommand("bench", "Run a benchmark campaign");
  bench->add_option("config", config_path, "Experiment config file")->required();
  bench->add_option("-o,--output", bench_out, "Results CSV")->capture_default_str();

  std::string results_path, profile_out = "profile.csv";
  double tau_min = 1e-16, tau_max = 1.0;
  int tau_points = 33;
  auto* profile = app.add_subcommand("profile", "Dolan-More profiles from a results CSV");
  profile->add_option("results", results_path, "Results CSV")->required();
  profile->add_option("--tau-min", tau_min, "Smallest gap threshold")->capture_default_str();
  profile->add_option("--tau-max", tau_max, "Largest gap threshold")->capture_default_str();
  profile->add_option("--tau-points", tau_points, "Number of log-spaced thresholds")->capture_default_str();
  profile->add_option("-o,--output", profile_out, "Profile CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*solve) return cmd_solve(problem_path, variant, budget, tol, trace_path, digits);
  if (*bench) return cmd_bench(config_path, bench_out);
  return cmd_profile(results_path, tau_min, tau_max, tau_points, profile_out);
}
