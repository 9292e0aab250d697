#pragma once

#include <charconv>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "waterfill/bench.hpp"
#include "waterfill/core.hpp"
#include "waterfill/oracles.hpp"
#include "waterfill/solver.hpp"

// Text input and report emission. All numeric text handling goes through
// std::from_chars / std::to_chars, so output bytes never depend on the
// process locale: identical data yields identical reports.

namespace waterfill {

enum class OutputFormat { json, table, csv };

inline const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::table: return "table";
    case OutputFormat::csv: return "csv";
  }
  return "unknown";
}

// 12 significant digits, printf %.12g style.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::string format_integer(std::uint64_t value) { return std::to_string(value); }

inline std::string format_hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

inline std::string json_number_array(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  out += "]";
  return out;
}

// Right-aligned cell padded to `width` (left-aligned when width < 0).
inline std::string cell(std::string text, int width) {
  const std::size_t w = static_cast<std::size_t>(width < 0 ? -width : width);
  if (text.size() >= w) return text;
  const std::string pad(w - text.size(), ' ');
  return width < 0 ? text + pad : pad + text;
}

}  // namespace detail

// Strict full-token parse of one floating-point number.
inline double parse_strict_double(std::string_view token) {
  const std::string_view t = detail::trim(token);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

// Comma-separated numbers, e.g. "0.8, 0.25".
inline std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view token = text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    values.push_back(parse_strict_double(token));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

// Coefficient file: one value per line or comma-separated, blank lines and
// lines starting with '#' ignored. Every value must be positive and finite;
// violations report the line number.
inline ProblemInstance read_instance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      const std::string_view token = body.substr(
          start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      double value = 0.0;
      try {
        value = parse_strict_double(token);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (!std::isfinite(value) || !(value > 0.0)) {
        throw std::domain_error(path + ":" + std::to_string(line_no) +
                                ": coefficient must be positive and finite, got '" +
                                std::string(detail::trim(token)) + "'");
      }
      values.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (values.empty()) {
    throw std::domain_error("no coefficients found in " + path);
  }
  return ProblemInstance(std::move(values));
}

inline std::string emit_solution(const ProblemInstance& p, const SolveResult& result,
                                 const KktReport& kkt, OutputFormat format) {
  const auto& a = p.coefficients();
  const auto& x = result.allocation.values();
  const std::vector<double> marginals = marginal_utilities(p, result.allocation);

  std::string out;
  switch (format) {
    case OutputFormat::json: {
      out += "{\n";
      out += "  \"input\": " + detail::json_number_array(a) + ",\n";
      out += "  \"allocation\": " + detail::json_number_array(x) + ",\n";
      out += "  \"active_count\": " + std::to_string(result.active_count) + ",\n";
      out += "  \"objective\": " + format_number(result.objective) + ",\n";
      out += "  \"lambda\": " + format_number(result.lambda) + ",\n";
      out += "  \"kkt\": {\n";
      out += "    \"max_active_deviation\": " + format_number(kkt.max_active_deviation) + ",\n";
      out += "    \"max_inactive_violation\": " + format_number(kkt.max_inactive_violation) + ",\n";
      out += std::string("    \"passed\": ") + (kkt.passed ? "true" : "false") + "\n";
      out += "  }\n";
      out += "}\n";
      break;
    }
    case OutputFormat::table: {
      out += detail::cell("index", 6) + detail::cell("a", 18) + detail::cell("x", 18) +
             detail::cell("marginal", 18) + "\n";
      for (std::size_t i = 0; i < a.size(); ++i) {
        out += detail::cell(std::to_string(i + 1), 6) +
               detail::cell(format_number(a[i]), 18) +
               detail::cell(format_number(x[i]), 18) +
               detail::cell(format_number(marginals[i]), 18) + "\n";
      }
      out += "\n";
      out += "active_count             " + std::to_string(result.active_count) + "\n";
      out += "objective                " + format_number(result.objective) + "\n";
      out += "lambda                   " + format_number(result.lambda) + "\n";
      out += "kkt_max_active_deviation " + format_number(kkt.max_active_deviation) + "\n";
      out += "kkt_max_inactive_violation " + format_number(kkt.max_inactive_violation) + "\n";
      out += std::string("kkt_passed               ") + (kkt.passed ? "yes" : "no") + "\n";
      break;
    }
    case OutputFormat::csv: {
      out += "# active_count=" + std::to_string(result.active_count) +
             ",objective=" + format_number(result.objective) +
             ",lambda=" + format_number(result.lambda) +
             ",kkt_passed=" + (kkt.passed ? std::string("1") : std::string("0")) + "\n";
      out += "index,a,x,marginal\n";
      for (std::size_t i = 0; i < a.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_number(a[i]) + "," +
               format_number(x[i]) + "," + format_number(marginals[i]) + "\n";
      }
      break;
    }
  }
  return out;
}

inline std::string emit_verify_report(const ProblemInstance& p,
                                      const CrossValidationReport& report,
                                      OutputFormat format) {
  std::string out;
  switch (format) {
    case OutputFormat::json: {
      out += "{\n";
      out += "  \"input\": " + detail::json_number_array(p.coefficients()) + ",\n";
      out += "  \"tolerance\": " + format_number(report.tolerance) + ",\n";
      out += "  \"max_objective_gap\": " + format_number(report.max_objective_gap) + ",\n";
      out += "  \"max_allocation_distance\": " + format_number(report.max_allocation_distance) + ",\n";
      out += std::string("  \"passed\": ") + (report.passed ? "true" : "false") + ",\n";
      out += "  \"methods\": [\n";
      for (std::size_t i = 0; i < report.methods.size(); ++i) {
        const MethodReport& m = report.methods[i];
        out += "    {\n";
        out += "      \"method\": \"" + m.method + "\",\n";
        out += "      \"objective\": " + format_number(m.objective) + ",\n";
        out += std::string("      \"converged\": ") + (m.converged ? "true" : "false") + ",\n";
        out += "      \"objective_gap_vs_closed\": " + format_number(m.objective_gap_vs_closed) + ",\n";
        out += "      \"allocation_distance_vs_closed\": " +
               format_number(m.allocation_distance_vs_closed) + ",\n";
        out += "      \"allocation\": " + detail::json_number_array(m.allocation.values()) + "\n";
        out += (i + 1 < report.methods.size()) ? "    },\n" : "    }\n";
      }
      out += "  ]\n";
      out += "}\n";
      break;
    }
    case OutputFormat::table: {
      out += detail::cell("method", -20) + detail::cell("objective", 18) +
             detail::cell("gap_vs_closed", 16) + detail::cell("dist_vs_closed", 16) +
             detail::cell("converged", 11) + "\n";
      for (const MethodReport& m : report.methods) {
        out += detail::cell(m.method, -20) + detail::cell(format_number(m.objective), 18) +
               detail::cell(format_number(m.objective_gap_vs_closed), 16) +
               detail::cell(format_number(m.allocation_distance_vs_closed), 16) +
               detail::cell(m.converged ? "yes" : "no", 11) + "\n";
      }
      out += "\n";
      out += "max_objective_gap       " + format_number(report.max_objective_gap) + "\n";
      out += "max_allocation_distance " + format_number(report.max_allocation_distance) + "\n";
      out += "tolerance               " + format_number(report.tolerance) + "\n";
      out += std::string("agreement               ") + (report.passed ? "PASS" : "FAIL") + "\n";
      break;
    }
    case OutputFormat::csv: {
      out += "# passed=" + std::string(report.passed ? "1" : "0") +
             ",tolerance=" + format_number(report.tolerance) +
             ",max_objective_gap=" + format_number(report.max_objective_gap) +
             ",max_allocation_distance=" + format_number(report.max_allocation_distance) + "\n";
      out += "method,objective,objective_gap_vs_closed,allocation_distance_vs_closed,converged\n";
      for (const MethodReport& m : report.methods) {
        out += m.method + "," + format_number(m.objective) + "," +
               format_number(m.objective_gap_vs_closed) + "," +
               format_number(m.allocation_distance_vs_closed) + "," +
               (m.converged ? "1" : "0") + "\n";
      }
      break;
    }
  }
  return out;
}

// Bench reports are machine-oriented: json or csv only.
inline std::string emit_bench_report(const BenchReport& report, OutputFormat format) {
  std::string out;
  switch (format) {
    case OutputFormat::json: {
      out += "{\n";
      out += "  \"n\": " + std::to_string(report.n) + ",\n";
      out += "  \"reps\": " + std::to_string(report.reps) + ",\n";
      out += "  \"seed\": " + detail::format_integer(report.seed) + ",\n";
      out += "  \"phases_ns\": [\n";
      for (std::size_t rep = 0; rep < report.per_rep.size(); ++rep) {
        const PhaseTimings& t = report.per_rep[rep];
        out += "    {\"rep\": " + std::to_string(rep) +
               ", \"sort\": " + detail::format_integer(t.sort_ns) +
               ", \"ratios\": " + detail::format_integer(t.ratios_ns) +
               ", \"kstar\": " + detail::format_integer(t.kstar_ns) +
               ", \"allocation\": " + detail::format_integer(t.allocation_ns) +
               ", \"total\": " + detail::format_integer(t.total_ns()) + "}";
        out += (rep + 1 < report.per_rep.size()) ? ",\n" : "\n";
      }
      out += "  ],\n";
      out += "  \"total_ns\": {\"min\": " + detail::format_integer(report.total_min_ns) +
             ", \"median\": " + detail::format_integer(report.total_median_ns) +
             ", \"max\": " + detail::format_integer(report.total_max_ns) + "},\n";
      out += "  \"objective_checksum\": \"" + detail::format_hex64(report.objective_checksum) +
             "\"\n";
      out += "}\n";
      break;
    }
    case OutputFormat::csv: {
      out += "# n=" + std::to_string(report.n) + ",reps=" + std::to_string(report.reps) +
             ",seed=" + detail::format_integer(report.seed) + "\n";
      out += "# total_min_ns=" + detail::format_integer(report.total_min_ns) +
             ",total_median_ns=" + detail::format_integer(report.total_median_ns) +
             ",total_max_ns=" + detail::format_integer(report.total_max_ns) + "\n";
      out += "# objective_checksum=" + detail::format_hex64(report.objective_checksum) + "\n";
      out += "n,rep,phase,nanoseconds\n";
      for (std::size_t rep = 0; rep < report.per_rep.size(); ++rep) {
        const PhaseTimings& t = report.per_rep[rep];
        const std::string prefix = std::to_string(report.n) + "," + std::to_string(rep) + ",";
        out += prefix + "sort," + detail::format_integer(t.sort_ns) + "\n";
        out += prefix + "ratios," + detail::format_integer(t.ratios_ns) + "\n";
        out += prefix + "kstar," + detail::format_integer(t.kstar_ns) + "\n";
        out += prefix + "allocation," + detail::format_integer(t.allocation_ns) + "\n";
        out += prefix + "total," + detail::format_integer(t.total_ns()) + "\n";
      }
      break;
    }
    case OutputFormat::table:
      throw std::invalid_argument("emit_bench_report: bench reports support json or csv");
  }
  return out;
}

}  // namespace waterfill
