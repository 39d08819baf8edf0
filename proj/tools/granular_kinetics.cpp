// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
// granular-kinetics <subcommand> [--config PATH] [--set key=value ...] [--out DIR]

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "granular_kinetics/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"DSMC solver and verification harness for the homogeneous inelastic Boltzmann equation"};
  gk::CommandLine cl;
  std::string config_path;
  app.add_option("subcommand", cl.subcommand, "experiment to run")->required();
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--set", cl.overrides, "override one key, key=value (repeatable)");
  app.add_option("--out", cl.out_dir, "output directory");
  app.footer(gk::usage_text());
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gk::kExitUsage;
  }
  if (!gk::find_experiment(cl.subcommand)) {
    std::cerr << "unknown subcommand '" << cl.subcommand << "'\n" << gk::usage_text();
    return gk::kExitUsage;
  }
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "cannot read config file " << config_path << "\n";
      return gk::kExitUsage;
    }
    std::ostringstream text;
    text << in.rdbuf();
    cl.config_text = text.str();
  }
  if (const char* env = std::getenv("GK_THREADS")) cl.threads_env = env;
  gk::RunConfig cfg;
  try {
    cfg = gk::resolve_config(cl);
  } catch (const gk::ParseError& e) {
    const std::string what = e.what();
    if (e.line() < 0)
      std::cerr << "--set argument " << -e.line() << what.substr(what.find(':')) << "\n";
    else
      std::cerr << (config_path.empty() ? std::string("config") : config_path) << ": " << what << "\n";
    return gk::kExitUsage;
  }
  return gk::dispatch(cfg);
}
