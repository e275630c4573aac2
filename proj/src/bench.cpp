#include "screlax/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "screlax/format.hpp"
#include "screlax/problem_io.hpp"

namespace screlax {
namespace {

constexpr std::uint64_t kObservationStream = 0x9E3779B97F4A7C15ULL;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

// Integers may be written in scientific notation (2e6) as long as they are exact.
bool parse_integer(std::string_view text, std::int64_t& out) {
  if (parse_number(text, out)) return true;
  double d = 0.0;
  if (!parse_number(text, d) || !std::isfinite(d) || d != std::floor(d) || std::abs(d) > 9.0e18) return false;
  out = static_cast<std::int64_t>(d);
  return true;
}

void normalize_columns(Matrix& A) {
  for (Index l = 0; l < A.cols(); ++l) A.col(l) /= A.col(l).norm();
}

Matrix dct_rows(Index m, Index n, std::mt19937_64& rng) {
  if (m > n) throw std::invalid_argument("dct setup needs m <= n (rows are sampled without replacement)");
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates: the first m entries are a uniform draw without replacement.
  for (Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(pick(rng))]);
  }
  Matrix A(m, n);
  const double dn = static_cast<double>(n);
  for (Index r = 0; r < m; ++r) {
    const auto k = static_cast<double>(rows[static_cast<std::size_t>(r)]);
    const double scale = k == 0.0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    for (Index i = 0; i < n; ++i) {
      A(r, i) = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) * k / (2.0 * dn));
    }
  }
  return A;
}

Matrix toeplitz_pulses(Index m, Index n, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("toeplitz width must be > 0");
  const double sigma = width * static_cast<double>(m);
  const double spacing = n > 1 ? static_cast<double>(m - 1) / static_cast<double>(n - 1) : 0.0;
  Matrix A(m, n);
  for (Index l = 0; l < n; ++l) {
    const double center = spacing * static_cast<double>(l);
    for (Index i = 0; i < m; ++i) {
      const double d = (static_cast<double>(i) - center) / sigma;
      A(i, l) = std::exp(-0.5 * d * d);
    }
  }
  return A;
}

}  // namespace

std::string_view setup_name(Setup s) {
  switch (s) {
    case Setup::kGaussian:
      return "gaussian";
    case Setup::kUniform:
      return "uniform";
    case Setup::kDct:
      return "dct";
    case Setup::kToeplitz:
      return "toeplitz";
  }
  return "?";
}

Setup parse_setup(std::string_view name) {
  const std::string lower = lowercase(name);
  if (lower == "gaussian") return Setup::kGaussian;
  if (lower == "uniform") return Setup::kUniform;
  if (lower == "dct") return Setup::kDct;
  if (lower == "toeplitz") return Setup::kToeplitz;
  throw std::invalid_argument("unknown setup '" + std::string(name) + "'");
}

Matrix gen_dictionary(Setup setup, Index m, Index n, std::uint64_t seed, double toeplitz_width) {
  if (m < 1 || n < 1) throw std::invalid_argument("dictionary dimensions must be >= 1");
  std::mt19937_64 rng(seed);
  Matrix A(m, n);
  switch (setup) {
    case Setup::kGaussian:
    case Setup::kUniform: {
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (Index l = 0; l < n; ++l) {
        // Redraw degenerate (zero) columns so that normalization is defined.
        do {
          for (Index i = 0; i < m; ++i) A(i, l) = setup == Setup::kGaussian ? normal(rng) : uniform(rng);
        } while (!(A.col(l).norm() > 0.0));
      }
      break;
    }
    case Setup::kDct:
      A = dct_rows(m, n, rng);
      break;
    case Setup::kToeplitz:
      A = toeplitz_pulses(m, n, toeplitz_width);
      break;
  }
  for (Index l = 0; l < n; ++l) {
    if (!(A.col(l).norm() > 0.0)) throw std::runtime_error("dictionary column " + std::to_string(l) + " is zero");
  }
  normalize_columns(A);
  return A;
}

Vector gen_observation(Setup setup, Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("observation length must be >= 1");
  std::mt19937_64 rng(seed ^ kObservationStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(m);
  do {
    for (Index i = 0; i < m; ++i) y(i) = normal(rng);
  } while (!(y.norm() > 0.0));
  if (setup == Setup::kUniform || setup == Setup::kToeplitz) y = y.cwiseAbs();
  return y / y.norm();
}

Problem make_instance(Setup setup, Index m, Index n, double lambda_frac, double epsilon_frac, std::uint64_t seed,
                      double toeplitz_width) {
  Matrix A = gen_dictionary(setup, m, n, seed, toeplitz_width);
  Vector y = gen_observation(setup, m, seed);
  const double lmax = lambda_max(A, y);
  Vector lambda = Vector::Constant(n, lambda_frac * lmax);
  return Problem(std::move(A), std::move(y), std::move(lambda), epsilon_frac * lmax);
}

void ExperimentConfig::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("m and n must be >= 1");
  if (n_instances < 1) throw std::invalid_argument("n_instances must be >= 1");
  if (!(lambda_frac > 0.0) || !std::isfinite(lambda_frac)) throw std::invalid_argument("lambda_frac must be > 0");
  if (!(epsilon_frac > 0.0) || !std::isfinite(epsilon_frac)) throw std::invalid_argument("epsilon_frac must be > 0");
  if (flop_budget < 0) throw std::invalid_argument("flop_budget must be >= 0");
  if (!(toeplitz_width > 0.0)) throw std::invalid_argument("toeplitz_width must be > 0");
  if (setup == Setup::kDct && m > n) throw std::invalid_argument("dct setup needs m <= n");
  if (variants.empty()) throw std::invalid_argument("at least one variant is required");
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  double tau_min = 1e-16, tau_max = 1.0;
  std::int64_t tau_points = 33;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(std::string_view(raw).substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = lowercase(trim(std::string_view(content).substr(0, eq)));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");

    auto real = [&]() {
      double d = 0.0;
      if (!parse_number(value, d)) throw ConfigError(line, "'" + key + "' expects a number");
      return d;
    };
    auto integer = [&]() {
      std::int64_t i = 0;
      if (!parse_integer(value, i)) throw ConfigError(line, "'" + key + "' expects an integer");
      return i;
    };

    try {
      if (key == "setup") {
        cfg.setup = parse_setup(value);
      } else if (key == "m") {
        cfg.m = integer();
      } else if (key == "n") {
        cfg.n = integer();
      } else if (key == "lambda_frac") {
        cfg.lambda_frac = real();
      } else if (key == "epsilon_frac") {
        cfg.epsilon_frac = real();
      } else if (key == "n_instances") {
        const auto v = integer();
        if (v < 0 || v > 1'000'000'000) throw ConfigError(line, "n_instances out of range");
        cfg.n_instances = static_cast<int>(v);
      } else if (key == "flop_budget") {
        cfg.flop_budget = integer();
      } else if (key == "seed") {
        const auto v = integer();
        if (v < 0) throw ConfigError(line, "seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(v);
      } else if (key == "toeplitz_width") {
        cfg.toeplitz_width = real();
      } else if (key == "variants") {
        cfg.variants.clear();
        std::size_t start = 0;
        while (start <= value.size()) {
          const auto comma = value.find(',', start);
          const std::string item = trim(std::string_view(value).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
          cfg.variants.push_back(parse_variant(item));
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      } else if (key == "tau_min") {
        tau_min = real();
      } else if (key == "tau_max") {
        tau_max = real();
      } else if (key == "tau_points") {
        tau_points = integer();
      } else {
        throw ConfigError(line, "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, e.what());
    }
  }
  if (tau_points < 1 || tau_points > 100000) throw ConfigError(line, "tau_points out of range");
  try {
    cfg.tau_grid = log_tau_grid(tau_min, tau_max, static_cast<int>(tau_points));
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, e.what());
  }
  return cfg;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  return parse_experiment_config(in);
}

unsigned bench_threads() {
  if (const char* env = std::getenv("SCRELAX_THREADS")) {
    std::int64_t v = 0;
    if (parse_number(std::string_view(env), v) && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  if (threads == 0) threads = bench_threads();
  const auto n_inst = static_cast<std::size_t>(cfg.n_instances);
  const std::size_t n_var = cfg.variants.size();
  std::vector<ResultRow> rows(n_inst * n_var);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n_inst; i = next++) {
      const std::uint64_t seed = cfg.seed + i;
      const Problem p = make_instance(cfg.setup, cfg.m, cfg.n, cfg.lambda_frac, cfg.epsilon_frac, seed, cfg.toeplitz_width);
      for (std::size_t v = 0; v < n_var; ++v) {
        SolverConfig sc = cfg.solver;
        sc.variant = cfg.variants[v];
        sc.flop_budget = cfg.flop_budget;
        sc.gap_tolerance = 0.0;
        const SolveResult res = solve(p, sc);
        ResultRow& row = rows[i * n_var + v];
        row.setup = cfg.setup;
        row.seed = seed;
        row.variant = cfg.variants[v];
        row.flops_budget = cfg.flop_budget;
        row.final_gap = res.gap;
      }
    }
  };
  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, n_inst));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "setup,seed,variant,flops_budget,final_gap\n";
  for (const auto& r : rows) {
    out << setup_name(r.setup) << ',' << r.seed << ',' << variant_name(r.variant) << ',' << r.flops_budget << ','
        << format_real(r.final_gap) << '\n';
  }
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  std::vector<ResultRow> rows;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw);
    if (content.empty()) continue;
    if (!header_seen) {
      if (content != "setup,seed,variant,flops_budget,final_gap") {
        throw ParseError(line, "expected header 'setup,seed,variant,flops_budget,final_gap'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = content.find(',', start);
      fields.push_back(trim(std::string_view(content).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) throw ParseError(line, "expected 5 fields, found " + std::to_string(fields.size()));
    ResultRow row;
    try {
      row.setup = parse_setup(fields[0]);
      row.variant = parse_variant(fields[2]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
    std::int64_t seed = 0;
    if (!parse_integer(fields[1], seed) || seed < 0) throw ParseError(line, "bad seed '" + fields[1] + "'");
    row.seed = static_cast<std::uint64_t>(seed);
    if (!parse_integer(fields[3], row.flops_budget)) throw ParseError(line, "bad budget '" + fields[3] + "'");
    if (!parse_number(std::string_view(fields[4]), row.final_gap) || std::isnan(row.final_gap)) {
      throw ParseError(line, "bad gap '" + fields[4] + "'");
    }
    rows.push_back(row);
  }
  if (!header_seen) throw ParseError(line + 1, "empty results file");
  if (rows.empty()) throw ParseError(line + 1, "results file has no data rows");
  return rows;
}

std::vector<ProfileCurve> dolan_more(const std::vector<ResultRow>& results, const std::vector<double>& tau_grid) {
  if (results.empty()) throw std::invalid_argument("dolan_more needs at least one result");
  std::vector<double> taus = tau_grid;
  std::sort(taus.begin(), taus.end());
  std::vector<ProfileCurve> curves;
  for (const Variant v : kAllVariants) {
    std::vector<double> gaps;
    for (const auto& r : results) {
      if (r.variant == v) gaps.push_back(r.final_gap);
    }
    if (gaps.empty()) continue;
    std::sort(gaps.begin(), gaps.end());
    ProfileCurve curve;
    curve.variant = v;
    for (const double tau : taus) {
      const auto count = std::upper_bound(gaps.begin(), gaps.end(), tau) - gaps.begin();
      curve.points.push_back({tau, static_cast<double>(count) / static_cast<double>(gaps.size())});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<double> log_tau_grid(double tau_min, double tau_max, int points) {
  if (!(tau_min > 0.0) || !(tau_max >= tau_min) || !std::isfinite(tau_max)) {
    throw std::invalid_argument("tau grid needs 0 < tau_min <= tau_max");
  }
  if (points < 1) throw std::invalid_argument("tau grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = tau_min;
    return grid;
  }
  const double lo = std::log10(tau_min), hi = std::log10(tau_max);
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / (points - 1));
  }
  grid.front() = tau_min;
  grid.back() = tau_max;
  return grid;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves) {
  out << "variant,tau,rho\n";
  for (const auto& c : curves) {
    for (const auto& pt : c.points) {
      out << variant_name(c.variant) << ',' << format_real(pt.tau) << ',' << format_real(pt.rho) << '\n';
    }
  }
}

}  // namespace screlax
