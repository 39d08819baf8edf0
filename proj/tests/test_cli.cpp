// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
#include "granular_kinetics/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace gk {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gk_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(ParseConfig, EmptyTextGivesDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_EQ(c.dimension, 3);
  EXPECT_EQ(c.alpha, 0.99);
  EXPECT_EQ(c.rho, 1.0);
  EXPECT_EQ(c.b0_prime, 1.0);
  EXPECT_EQ(c.particles, 100000u);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(parse_config("# only a comment\n\n   \n"), RunConfig{});
}

TEST(ParseConfig, AlphaOutOfRangeNamesKeyAndLine) {
  try {
    parse_config("seed = 4\nalpha = 1.5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "alpha");
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("[0, 1]"), std::string::npos);
  }
}

TEST(ParseConfig, UnknownKeyAndTypeMismatch) {
  try {
    parse_config("alpah = 0.9");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "alpah");
    EXPECT_EQ(e.line(), 1);
  }
  try {
    parse_config("\nparticles = many");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "particles");
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_config("particles = -5"), ParseError);
  EXPECT_THROW(parse_config("adaptive_dt = yes"), ParseError);
  EXPECT_THROW(parse_config("mode = sideways"), ParseError);
  EXPECT_THROW(parse_config("alpha"), ParseError);
  EXPECT_THROW(parse_config("alphas = 0.9, x"), ParseError);
}

TEST(ParseConfig, ValuesCommentsAndLists) {
  const auto c = parse_config(
      "alpha = 0.95   # inline comment\n"
      "mode = original\n"
      "cross_section = tabulated\n"
      "b_table = 1, 2.5, 3\n"
      "dimension = 2\n"
      "alphas = 0.8,0.9\n"
      "schedule = geometric\n"
      "initial_shape = bimodal\n"
      "adaptive_dt = false\n"
      "output_dir = /tmp/some dir\n");
  EXPECT_EQ(c.alpha, 0.95);
  EXPECT_EQ(c.mode, Mode::kOriginal);
  EXPECT_EQ(c.cross_section, CrossSectionKind::kTabulated);
  EXPECT_EQ(c.b_table, (std::vector<double>{1, 2.5, 3}));
  EXPECT_EQ(c.alphas, (std::vector<double>{0.8, 0.9}));
  EXPECT_EQ(c.schedule, ScheduleKind::kGeometric);
  EXPECT_EQ(c.initial_shape, InitialShape::kBimodal);
  EXPECT_FALSE(c.adaptive_dt);
  EXPECT_EQ(c.output_dir, "/tmp/some dir");
}

TEST(ParseConfig, CrossFieldConstraint) {
  try {
    parse_config("dimension = 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "cross_section");
  }
}

TEST(EmitConfig, RoundTripIsAFixpoint) {
  EXPECT_EQ(parse_config(emit_config(RunConfig{})), RunConfig{});
  RunConfig c;
  c.alpha = 0.1 + 0.2;
  c.rho = 1.0 / 3.0;
  c.mode = Mode::kOriginal;
  c.dimension = 2;
  c.cross_section = CrossSectionKind::kTabulated;
  c.b_table = {0.25, 1.0 / 7.0 + 1.0};
  c.alphas = {0.9};
  c.rhos = {};
  c.initial_shape = InitialShape::kBimodal;
  c.seed = 18446744073709551615ull;
  c.output_dir = "out/run 1";
  const auto text = emit_config(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(emit_config(parse_config(text)), text);
}

TEST(Csv, HeaderAndSeventeenDigitRows) {
  DiagnosticsRecord r;
  r.t = 0.1;
  r.rho = 1.0;
  r.momentum = {1.0 / 3.0, 0.0};
  r.energy = 2.0 / 3.0;
  r.collisions = 12;
  r.replica = 3;
  const auto text = csv_text({r});
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "t,rho,px,py,pz,energy,theta,m_half,m_32,m_2,m_3,de_est,de_se,rel_entropy,l1_dist,collisions,replica");
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  ASSERT_EQ(cells.size(), 17u);
  EXPECT_EQ(cells[0], "1.0000000000000001e-01");
  EXPECT_EQ(cells[2], "3.3333333333333331e-01");
  EXPECT_EQ(cells[4], "0.0000000000000000e+00");
  EXPECT_EQ(cells[15], "12");
  EXPECT_EQ(cells[16], "3");
  double back = 0.0;
  ASSERT_TRUE(parse_double(cells[5], back));
  EXPECT_EQ(back, 2.0 / 3.0);
}

TEST(Outputs, AtomicWriteLeavesNoTemporary) {
  const auto dir = scratch_dir("atomic");
  write_file_atomic(dir / "a.csv", "x\n");
  write_file_atomic(dir / "a.csv", "y\n");
  EXPECT_EQ(read_file(dir / "a.csv"), "y\n");
  EXPECT_FALSE(fs::exists(dir / "a.csv.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "a.csv", "z"), std::runtime_error);
}

TEST(Outputs, ReportEmbedsClaimStatusAndConfig) {
  ExperimentReport r;
  r.name = "demo";
  r.claim = "something holds";
  r.status = Status::kFail;
  r.config.alpha = 0.5;
  r.set("exponent", 2.25);
  const auto text = report_text(r);
  EXPECT_NE(text.find("name = demo\n"), std::string::npos);
  EXPECT_NE(text.find("claim = something holds\n"), std::string::npos);
  EXPECT_NE(text.find("status = fail\n"), std::string::npos);
  EXPECT_NE(text.find("result.exponent = 2.25\n"), std::string::npos);
  EXPECT_NE(text.find("config.alpha = 0.5\n"), std::string::npos);
  EXPECT_EQ(r.number("exponent"), 2.25);
  EXPECT_TRUE(std::isnan(r.number("absent")));
}

TEST(ResolveConfig, OverridesEnvironmentAndOutputDirectory) {
  CommandLine cl;
  cl.subcommand = "haff";
  cl.config_text = "alpha = 0.9\nthreads = 3\n";
  cl.overrides = {"alpha=0.95", "replicas = 4"};
  cl.threads_env = "1";
  cl.out_dir = "/tmp/x";
  const auto c = resolve_config(cl);
  EXPECT_EQ(c.experiment, "haff");
  EXPECT_EQ(c.alpha, 0.95);
  EXPECT_EQ(c.replicas, 4u);
  EXPECT_EQ(c.threads, 1u);
  EXPECT_EQ(c.output_dir, "/tmp/x");
  cl.overrides = {"alpha=2"};
  try {
    resolve_config(cl);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "alpha");
    EXPECT_EQ(e.line(), -1);
  }
}

TEST(Dispatch, UnknownSubcommandIsUsageError) {
  RunConfig c;
  c.experiment = "nonsense";
  std::ostringstream out, err;
  EXPECT_EQ(dispatch(c, out, err), kExitUsage);
  EXPECT_NE(err.str().find("usage:"), std::string::npos);
}

TEST(Dispatch, SelftestPrintsTableAndWritesReport) {
  RunConfig c;
  c.experiment = "selftest";
  c.output_dir = scratch_dir("selftest").string();
  std::ostringstream out, err;
  EXPECT_EQ(dispatch(c, out, err), kExitPass);
  EXPECT_NE(out.str().find("MMu3"), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "selftest_report.txt"));
  const auto echoed = read_file(fs::path(c.output_dir) / "selftest_config.txt");
  EXPECT_EQ(parse_config(echoed), c);
}

TEST(Dispatch, ExperimentConfigErrorIsUsageError) {
  RunConfig c;
  c.experiment = "profile";
  c.alpha = 0.9;
  c.replicas = 1;
  c.output_dir = scratch_dir("usage").string();
  std::ostringstream out, err;
  EXPECT_EQ(dispatch(c, out, err), kExitUsage);
}

TEST(Dispatch, SimulateWritesLongFormatTrace) {
  RunConfig c;
  c.experiment = "simulate";
  c.particles = 300;
  c.replicas = 2;
  c.outputs = 3;
  c.t_end = 0.5;
  c.pair_samples = 200;
  c.bins = 8;
  c.output_dir = scratch_dir("simulate").string();
  std::ostringstream out, err;
  EXPECT_EQ(dispatch(c, out, err), kExitPass);
  const auto csv = read_file(fs::path(c.output_dir) / "simulate_trace.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
}

#ifdef GK_CLI_PATH
int run_cli(const std::string& args) {
  const int status = std::system((std::string(GK_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Executable, ExitCodes) {
  const auto dir = scratch_dir("exe");
  EXPECT_EQ(run_cli("frobnicate"), kExitUsage);
  EXPECT_EQ(run_cli(""), kExitUsage);
  EXPECT_EQ(run_cli("selftest --out " + dir.string()), kExitPass);
  EXPECT_EQ(run_cli("simulate --set alpha=1.5 --out " + dir.string()), kExitUsage);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "absent.conf").string()), kExitUsage);
  std::ofstream(dir / "bad.conf") << "alpha = 0.9\nunknown_key = 1\n";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.conf").string()), kExitUsage);
  std::ofstream(dir / "good.conf") << "particles = 200\nreplicas = 1\noutputs = 2\nt_end = 0.2\npair_samples = 100\n";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "good.conf").string() + " --out " + dir.string()), kExitPass);
  EXPECT_TRUE(fs::exists(dir / "simulate_trace.csv"));
}
#endif

}  // namespace
}  // namespace gk
