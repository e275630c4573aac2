#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "screlax/core.hpp"
#include "screlax/solver.hpp"

namespace screlax {

/// Dictionary families: i.i.d. N(0,1), i.i.d. U[0,1], row-sampled DCT-II, Gaussian-pulse Toeplitz.
enum class Setup { kGaussian, kUniform, kDct, kToeplitz };

std::string_view setup_name(Setup s);
Setup parse_setup(std::string_view name);

/// Default Toeplitz pulse standard deviation, as a fraction of m.
inline constexpr double kToeplitzWidth = 1.0 / 20.0;

/**
 * m x n dictionary with unit-norm columns, deterministic in `seed`
 * (std::mt19937_64 seeded directly).
 *
 * dct: m distinct rows of the orthonormal n x n DCT-II, drawn without
 * replacement (requires m <= n). toeplitz: column l is the pulse
 * exp(-(i - c_l)^2 / (2 sigma^2)), sigma = toeplitz_width * m, with centers
 * c_l = l (m-1)/(n-1) spread over the window; when m == n consecutive
 * columns are one-sample shifts.
 */
Matrix gen_dictionary(Setup setup, Index m, Index n, std::uint64_t seed,
                      double toeplitz_width = kToeplitzWidth);

/// Unit-norm observation; uniform and toeplitz setups fold it into the positive orthant.
Vector gen_observation(Setup setup, Index m, std::uint64_t seed);

/// Instance with lambda = lambda_frac * lambda_max * 1 and epsilon = epsilon_frac * lambda_max.
Problem make_instance(Setup setup, Index m, Index n, double lambda_frac, double epsilon_frac,
                      std::uint64_t seed, double toeplitz_width = kToeplitzWidth);

struct ExperimentConfig {
  Setup setup = Setup::kGaussian;
  Index m = 100;
  Index n = 300;
  double lambda_frac = 0.2;
  double epsilon_frac = 0.5;
  int n_instances = 100;
  std::int64_t flop_budget = 2'000'000;
  std::uint64_t seed = 0;  // instance i uses seed + i
  double toeplitz_width = kToeplitzWidth;
  std::vector<double> tau_grid;
  std::vector<Variant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
  /// Solver settings shared by all runs; variant, budget and tolerance are overridden per run.
  SolverConfig solver;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Malformed configuration text; `line()` is 1-based.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/**
 * `key = value` lines, '#' starts a comment. Keys: setup, m, n, lambda_frac,
 * epsilon_frac, n_instances, flop_budget, seed, toeplitz_width, variants
 * (comma separated), tau_min, tau_max, tau_points. The result is validated.
 */
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config(const std::string& path);

struct ResultRow {
  Setup setup = Setup::kGaussian;
  std::uint64_t seed = 0;
  Variant variant = Variant::kSR;
  std::int64_t flops_budget = 0;
  double final_gap = 0.0;

  bool operator==(const ResultRow&) const = default;
};

/// Number of bench workers: SCRELAX_THREADS if set, else the hardware concurrency.
unsigned bench_threads();

/// One row per (instance, variant), instance-major in variant order; independent of `threads`.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

/// Header `setup,seed,variant,flops_budget,final_gap`.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Throws ParseError (problem_io.hpp) on malformed or empty input.
std::vector<ResultRow> parse_results_csv(std::istream& in);

struct ProfilePoint {
  double tau = 0.0;
  double rho = 0.0;
};

struct ProfileCurve {
  Variant variant = Variant::kSR;
  std::vector<ProfilePoint> points;
};

/// rho(tau) = fraction of a variant's instances whose final gap is <= tau.
std::vector<ProfileCurve> dolan_more(const std::vector<ResultRow>& results, const std::vector<double>& tau_grid);

/// `points` log-spaced values from tau_min to tau_max inclusive.
std::vector<double> log_tau_grid(double tau_min, double tau_max, int points);

/// Header `variant,tau,rho`.
void write_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves);

}  // namespace screlax
