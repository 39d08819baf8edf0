// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file cli.hpp
//! Config file format, output files and subcommand dispatch.
//!
//! Config: UTF-8 text, one `key = value` per line, `#` starts a comment. Lists are
//! comma separated. Unknown keys, malformed values and constraint violations raise
//! ParseError with the key and line.
//!
//! Trace CSV (`<name>_trace.csv`, `<name>_<part>_trace.csv`): header row, then one
//! row per DiagnosticsRecord in long format (all replicas, `replica` column):
//!   t, rho, px, py, pz, energy, theta, m_half, m_32, m_2, m_3, de_est, de_se,
//!   rel_entropy, l1_dist, collisions, replica
//! px, py, pz are the first three momentum components (zero-padded when N = 2).
//! Reals use 17 significant digits in C-locale scientific notation.
//!
//! Report (`<name>_report.txt`): flat `key = value` lines. Header keys name, claim,
//! status, replicas, wall_clock_seconds; measured values under `result.`; the
//! resolved config under `config.` (also written alone as `<name>_config.txt`).
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "experiments.hpp"
#include "format.hpp"
#include "run_config.hpp"

namespace gk {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr const char* kCsvHeader =
    "t,rho,px,py,pz,energy,theta,m_half,m_32,m_2,m_3,de_est,de_se,rel_entropy,l1_dist,collisions,replica";

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

//! Thrown by value parsers; rewrapped as ParseError with key and line.
struct BadValue {
  std::string message;
};

inline double to_double(const std::string& v) {
  double x = 0.0;
  if (!parse_double(v, x) || !std::isfinite(x)) throw BadValue{"expected a finite real number, got '" + v + "'"};
  return x;
}

template <class Int>
Int to_integer(const std::string& v) {
  Int x{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw BadValue{"expected a non-negative integer, got '" + v + "'"};
  return x;
}

inline bool to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw BadValue{"expected true or false, got '" + v + "'"};
}

inline std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(to_double(trim(std::string_view(v).substr(start, comma - start))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string from_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_shortest(xs[i]);
  return s;
}

template <class Enum>
Enum to_enum(const std::string& v, std::initializer_list<std::pair<const char*, Enum>> names) {
  std::string options;
  for (const auto& [name, value] : names) {
    if (v == name) return value;
    options += options.empty() ? name : std::string("|") + name;
  }
  throw BadValue{"expected one of " + options + ", got '" + v + "'"};
}

template <class Enum>
std::string from_enum(Enum e, std::initializer_list<std::pair<const char*, Enum>> names) {
  for (const auto& [name, value] : names)
    if (e == value) return name;
  return "?";
}

inline constexpr std::initializer_list<std::pair<const char*, CrossSectionKind>> kCrossSections{
    {"hard_sphere", CrossSectionKind::kHardSphere}, {"tabulated", CrossSectionKind::kTabulated}};
inline constexpr std::initializer_list<std::pair<const char*, Mode>> kModes{{"original", Mode::kOriginal},
                                                                           {"rescaled", Mode::kRescaled}};
inline constexpr std::initializer_list<std::pair<const char*, ScheduleKind>> kSchedules{
    {"linear", ScheduleKind::kLinear}, {"geometric", ScheduleKind::kGeometric}};
inline constexpr std::initializer_list<std::pair<const char*, InitialShape>> kShapes{
    {"maxwellian", InitialShape::kMaxwellian}, {"bimodal", InitialShape::kBimodal}};

struct KeySpec {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define GK_KEY(key, parse, print)                                                    \
  KeySpec {                                                                          \
    #key, [](RunConfig& c, const std::string& v) { c.key = parse; },                 \
        [](const RunConfig& c) -> std::string { return print; }                      \
  }

inline const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys{
      GK_KEY(experiment, v, c.experiment),
      GK_KEY(dimension, to_integer<int>(v), std::to_string(c.dimension)),
      GK_KEY(alpha, to_double(v), format_shortest(c.alpha)),
      GK_KEY(rho, to_double(v), format_shortest(c.rho)),
      GK_KEY(cross_section, to_enum(v, kCrossSections), from_enum(c.cross_section, kCrossSections)),
      GK_KEY(b0_prime, to_double(v), format_shortest(c.b0_prime)),
      GK_KEY(b_table, to_list(v), from_list(c.b_table)),
      GK_KEY(particles, to_integer<std::uint64_t>(v), std::to_string(c.particles)),
      GK_KEY(replicas, to_integer<std::uint64_t>(v), std::to_string(c.replicas)),
      GK_KEY(seed, to_integer<std::uint64_t>(v), std::to_string(c.seed)),
      GK_KEY(dt, to_double(v), format_shortest(c.dt)),
      GK_KEY(collision_fraction, to_double(v), format_shortest(c.collision_fraction)),
      GK_KEY(adaptive_dt, to_bool(v), c.adaptive_dt ? "true" : "false"),
      GK_KEY(majorant_relvel, to_double(v), format_shortest(c.majorant_relvel)),
      GK_KEY(majorant_refresh_interval, to_integer<int>(v), std::to_string(c.majorant_refresh_interval)),
      GK_KEY(mode, to_enum(v, kModes), from_enum(c.mode, kModes)),
      GK_KEY(recenter_momentum, to_bool(v), c.recenter_momentum ? "true" : "false"),
      GK_KEY(threads, to_integer<unsigned>(v), std::to_string(c.threads)),
      GK_KEY(t_end, to_double(v), format_shortest(c.t_end)),
      GK_KEY(schedule, to_enum(v, kSchedules), from_enum(c.schedule, kSchedules)),
      GK_KEY(outputs, to_integer<int>(v), std::to_string(c.outputs)),
      GK_KEY(initial_theta, to_double(v), format_shortest(c.initial_theta)),
      GK_KEY(initial_shape, to_enum(v, kShapes), from_enum(c.initial_shape, kShapes)),
      GK_KEY(bins, to_integer<int>(v), std::to_string(c.bins)),
      GK_KEY(pair_samples, to_integer<std::uint64_t>(v), std::to_string(c.pair_samples)),
      GK_KEY(bootstrap_resamples, to_integer<std::uint64_t>(v), std::to_string(c.bootstrap_resamples)),
      GK_KEY(alphas, to_list(v), from_list(c.alphas)),
      GK_KEY(rhos, to_list(v), from_list(c.rhos)),
      GK_KEY(attractor_thetas, to_list(v), from_list(c.attractor_thetas)),
      GK_KEY(output_dir, v, c.output_dir),
  };
  return keys;
}

#undef GK_KEY

inline const KeySpec* find_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (name == k.name) return &k;
  return nullptr;
}

}  // namespace detail

//! Applies one setting; `line` is only used in error messages.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const auto* spec = detail::find_key(key);
  if (!spec) throw ParseError(key, line, "unknown key");
  try {
    spec->set(cfg, value);
  } catch (const detail::BadValue& e) {
    throw ParseError(key, line, e.message);
  }
}

//! Validates `cfg`; a constraint violation becomes a ParseError at the line that set the key
//! (0 when the key kept its default).
inline void validate_with_lines(const RunConfig& cfg, const std::map<std::string, int>& lines) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    const std::string key = what.substr(0, colon);
    const auto it = lines.find(key);
    throw ParseError(key, it == lines.end() ? 0 : it->second, detail::trim(what.substr(colon + 1)));
  }
}

struct ParsedSettings {
  RunConfig config;
  std::map<std::string, int> lines;
};

//! Parses settings on top of `base` without validating.
inline ParsedSettings parse_settings(std::string_view text, RunConfig base = {}) {
  ParsedSettings out{std::move(base), {}};
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) throw ParseError(trimmed, line_no, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = detail::trim(std::string_view(trimmed).substr(eq + 1));
    if (key.empty()) throw ParseError(key, line_no, "empty key");
    apply_setting(out.config, key, value, line_no);
    out.lines[key] = line_no;
    if (end == text.size()) break;
  }
  return out;
}

//! Fully resolved and validated config.
inline RunConfig parse_config(std::string_view text) {
  auto parsed = parse_settings(text);
  validate_with_lines(parsed.config, parsed.lines);
  return parsed.config;
}

//! Every key with its value; parse_config(emit_config(c)) == c.
inline std::string emit_config(const RunConfig& cfg, const std::string& prefix = "") {
  std::string out;
  for (const auto& k : detail::config_keys()) out += prefix + k.name + " = " + k.get(cfg) + "\n";
  return out;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string s;
  auto add = [&s](const std::string& x) {
    if (!s.empty()) s += ',';
    s += x;
  };
  add(format_sig17(r.t));
  add(format_sig17(r.rho));
  for (std::size_t k = 0; k < 3; ++k) add(format_sig17(k < r.momentum.size() ? r.momentum[k] : 0.0));
  for (double x : {r.energy, r.theta, r.m_half, r.m_32, r.m_2, r.m_3, r.de_est, r.de_se, r.rel_entropy, r.l1_dist})
    add(format_sig17(x));
  add(std::to_string(r.collisions));
  add(std::to_string(r.replica));
  return s;
}

inline std::string csv_text(const std::vector<DiagnosticsRecord>& records) {
  std::string s = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) s += csv_row(r) + "\n";
  return s;
}

inline std::string report_text(const ExperimentReport& report) {
  std::string s = "# granular-kinetics experiment report\n";
  s += "name = " + report.name + "\n";
  s += "claim = " + report.claim + "\n";
  s += "status = " + std::string(to_string(report.status)) + "\n";
  s += "replicas = " + std::to_string(report.replicas) + "\n";
  s += "wall_clock_seconds = " + format_shortest(report.wall_clock_seconds) + "\n";
  for (const auto& e : report.entries) s += "result." + e.key + " = " + e.value + "\n";
  s += emit_config(report.config, "config.");
  return s;
}

//! Writes through `<path>.tmp` and renames; the final name never holds a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string trace_file_name(const std::string& name, const std::string& suffix) {
  return suffix.empty() ? name + "_trace.csv" : name + "_" + suffix + "_trace.csv";
}

//! Writes traces, report and config echo into cfg.output_dir; returns the paths written.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentReport& report) {
  const std::filesystem::path dir(report.config.output_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& trace : report.traces) {
    written.push_back(dir / trace_file_name(report.name, trace.suffix));
    write_file_atomic(written.back(), csv_text(trace.records));
  }
  written.push_back(dir / (report.name + "_report.txt"));
  write_file_atomic(written.back(), report_text(report));
  written.push_back(dir / (report.name + "_config.txt"));
  write_file_atomic(written.back(), emit_config(report.config));
  return written;
}

inline std::string usage_text() {
  std::string s = "usage: granular-kinetics <subcommand> [--config PATH] [--set key=value ...] [--out DIR]\n";
  s += "subcommands:";
  for (const auto& n : experiment_names()) s += " " + n;
  s += "\nenvironment: GK_THREADS overrides the threads key\n";
  return s;
}

//! Runs cfg.experiment, writes its outputs and prints a summary. Exit code per the
//! kExit* constants; selftest prints its identity table.
inline int dispatch(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto experiment = find_experiment(cfg.experiment);
  if (!experiment) {
    err << "unknown subcommand '" << cfg.experiment << "'\n" << usage_text();
    return kExitUsage;
  }
  ExperimentReport report;
  try {
    report = experiment(cfg);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  try {
    write_outputs(report);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitRuntime;
  }
  out << report.name << ": " << to_string(report.status) << "\n";
  if (report.name == "selftest") {
    out << "dimension  rho  relative_residual  pass  identity\n";
    for (int i = 0;; ++i) {
      const std::string k = "check_" + std::to_string(i);
      const auto name = report.get(k + "_name");
      if (!name) break;
      out << *report.get(k + "_dimension") << "  " << *report.get(k + "_rho") << "  "
          << *report.get(k + "_relative_residual") << "  " << *report.get(k + "_pass") << "  " << *name << "\n";
    }
  } else {
    for (const auto& e : report.entries) out << "  " << e.key << " = " << e.value << "\n";
  }
  return report.status == Status::kPass ? kExitPass : kExitFail;
}

//! Command line: subcommand, optional config file text, --set overrides in order,
//! optional output directory and the GK_THREADS value (empty when unset).
struct CommandLine {
  std::string subcommand;
  std::string config_text;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string threads_env;
};

//! Resolves the final config. Overrides are reported as lines "--set 1", "--set 2", ...
//! in error messages by using negative line numbers.
inline RunConfig resolve_config(const CommandLine& cl) {
  auto parsed = parse_settings(cl.config_text);
  for (std::size_t i = 0; i < cl.overrides.size(); ++i) {
    const auto& o = cl.overrides[i];
    const auto eq = o.find('=');
    const int line = -static_cast<int>(i + 1);
    if (eq == std::string::npos) throw ParseError(o, line, "expected --set key=value");
    const std::string key = detail::trim(std::string_view(o).substr(0, eq));
    apply_setting(parsed.config, key, detail::trim(std::string_view(o).substr(eq + 1)), line);
    parsed.lines[key] = line;
  }
  if (!cl.threads_env.empty()) {
    apply_setting(parsed.config, "threads", cl.threads_env, 0);
    parsed.lines["threads"] = 0;
  }
  if (!cl.out_dir.empty()) parsed.config.output_dir = cl.out_dir;
  parsed.config.experiment = cl.subcommand;
  validate_with_lines(parsed.config, parsed.lines);
  return parsed.config;
}

}  // namespace gk
