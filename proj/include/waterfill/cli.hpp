#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waterfill/io.hpp"

// Command-line driver: waterfill {solve|verify|bench}. Exit codes are part
// of the contract: 0 success, 1 verification failure, 2 usage or input error.

namespace waterfill {

enum class Command { solve, verify, bench };

enum class OracleSelection { all, bisection, gradient, grid };

struct CliConfig {
  Command command = Command::solve;
  std::vector<double> inline_coefficients;  // from -a; empty when --input is used
  std::string input_path;                   // from --input
  OutputFormat format = OutputFormat::table;
  OracleSelection oracle = OracleSelection::all;
  double tolerance = 1e-5;
  double grid_resolution = 1e-3;
  std::size_t bench_n = 0;
  std::size_t bench_reps = 0;
  std::uint64_t bench_seed = 0;
};

// Thrown for a malformed command line; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the command line asks for help; maps to exit code 0.
struct HelpRequested {
  std::string text;
};

namespace detail {

inline OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "table") return OutputFormat::table;
  if (name == "csv") return OutputFormat::csv;
  throw UsageError("unknown format '" + name + "'");
}

inline OracleSelection parse_oracle(const std::string& name) {
  if (name == "all") return OracleSelection::all;
  if (name == "bisection") return OracleSelection::bisection;
  if (name == "gradient") return OracleSelection::gradient;
  if (name == "grid") return OracleSelection::grid;
  throw UsageError("unknown oracle '" + name + "'");
}

}  // namespace detail

inline CliConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"closed-form solver for the concave water-allocation problem"};
  app.name("waterfill");
  app.require_subcommand(1);

  std::string solve_coeffs, solve_input, solve_format = "table";
  std::string verify_coeffs, verify_input, verify_format = "table";
  std::string verify_oracle = "all";
  double verify_tol = 1e-5;
  double verify_resolution = 1e-3;
  std::string bench_format = "json";
  std::size_t bench_n = 0;
  std::size_t bench_reps = 0;
  std::uint64_t bench_seed = 0;

  const auto add_input_options = [](CLI::App* sub, std::string& coeffs, std::string& input) {
    auto* inline_opt =
        sub->add_option("-a,--coefficients", coeffs, "inline comma-separated coefficients");
    auto* file_opt = sub->add_option("--input", input, "path to a coefficient file");
    inline_opt->excludes(file_opt);
    file_opt->excludes(inline_opt);
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance in closed form");
  add_input_options(solve_cmd, solve_coeffs, solve_input);
  solve_cmd->add_option("--format", solve_format, "output format")
      ->check(CLI::IsMember({"json", "table", "csv"}));

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "cross-check the closed form against oracles");
  add_input_options(verify_cmd, verify_coeffs, verify_input);
  verify_cmd->add_option("--format", verify_format, "output format")
      ->check(CLI::IsMember({"json", "table", "csv"}));
  verify_cmd->add_option("--oracle", verify_oracle, "oracle selection")
      ->check(CLI::IsMember({"all", "bisection", "gradient", "grid"}));
  verify_cmd->add_option("--tol", verify_tol, "objective agreement tolerance");
  verify_cmd->add_option("--resolution", verify_resolution, "grid search resolution");

  CLI::App* bench_cmd = app.add_subcommand("bench", "time the solver phases");
  bench_cmd->add_option("--n", bench_n, "instance size")->required();
  bench_cmd->add_option("--reps", bench_reps, "repetitions")->required();
  bench_cmd->add_option("--seed", bench_seed, "base seed (rep r uses seed + r)")->required();
  bench_cmd->add_option("--format", bench_format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    throw HelpRequested{parsed.empty() ? app.help() : parsed.front()->help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + " (run 'waterfill --help' for usage)");
  }

  CliConfig cfg;
  const auto take_input = [&](const std::string& coeffs, const std::string& input) {
    if (coeffs.empty() == input.empty()) {
      throw UsageError("provide exactly one input: -a <list> or --input <path>");
    }
    if (!coeffs.empty()) {
      try {
        cfg.inline_coefficients = parse_number_list(coeffs);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    } else {
      cfg.input_path = input;
    }
  };

  if (app.got_subcommand(solve_cmd)) {
    cfg.command = Command::solve;
    take_input(solve_coeffs, solve_input);
    cfg.format = detail::parse_format(solve_format);
  } else if (app.got_subcommand(verify_cmd)) {
    cfg.command = Command::verify;
    take_input(verify_coeffs, verify_input);
    cfg.format = detail::parse_format(verify_format);
    cfg.oracle = detail::parse_oracle(verify_oracle);
    cfg.tolerance = verify_tol;
    cfg.grid_resolution = verify_resolution;
  } else {
    cfg.command = Command::bench;
    cfg.format = detail::parse_format(bench_format);
    cfg.bench_n = bench_n;
    cfg.bench_reps = bench_reps;
    cfg.bench_seed = bench_seed;
  }
  return cfg;
}

inline ProblemInstance load_instance(const CliConfig& cfg) {
  if (!cfg.inline_coefficients.empty()) {
    return ProblemInstance(cfg.inline_coefficients);
  }
  return read_instance_csv(cfg.input_path);
}

inline int run_solve(const CliConfig& cfg, std::ostream& out) {
  const ProblemInstance p = load_instance(cfg);
  const SolveResult result = solve(p);
  const KktReport kkt = kkt_check(p, result.allocation, 1e-9, 1e-12);
  out << emit_solution(p, result, kkt, cfg.format);
  return kkt.passed ? 0 : 1;
}

inline int run_verify(const CliConfig& cfg, std::ostream& out) {
  const ProblemInstance p = load_instance(cfg);

  std::vector<OracleMethod> methods;
  switch (cfg.oracle) {
    case OracleSelection::bisection:
      methods = {OracleMethod::lambda_bisection};
      break;
    case OracleSelection::gradient:
      methods = {OracleMethod::projected_gradient};
      break;
    case OracleSelection::grid:
      methods = {OracleMethod::grid_search};
      break;
    case OracleSelection::all:
      methods = {OracleMethod::lambda_bisection, OracleMethod::projected_gradient};
      // grid search joins only where it is supported
      if (p.n() <= 4) methods.push_back(OracleMethod::grid_search);
      break;
  }

  CrossValidateOptions options;
  options.grid_resolution = cfg.grid_resolution;
  const CrossValidationReport report = cross_validate(p, methods, cfg.tolerance, options);
  out << emit_verify_report(p, report, cfg.format);
  return report.passed ? 0 : 1;
}

inline int run_bench_command(const CliConfig& cfg, std::ostream& out) {
  const BenchReport report = run_bench(cfg.bench_n, cfg.bench_reps, cfg.bench_seed);
  out << emit_bench_report(report, cfg.format);
  return 0;
}

// Full driver: parses, dispatches, and maps errors to the exit contract.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CliConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& help) {
    out << help.text;
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    switch (cfg.command) {
      case Command::solve: return run_solve(cfg, out);
      case Command::verify: return run_verify(cfg, out);
      case Command::bench: return run_bench_command(cfg, out);
    }
    return 2;
  } catch (const BenchVerificationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace waterfill
