// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion A1-A10. A budget of 0 means
// the criterion states no runtime limit.
// usage: acceptance [--out DIR] [A1 A2 ...]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "granular_kinetics/cli.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gk;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  double budget_seconds;
  std::function<Outcome(const fs::path&)> run;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(5);
  s << x;
  return s.str();
}

RunConfig base(const fs::path& out) {
  RunConfig c;
  c.output_dir = out.string();
  return c;
}

ExperimentReport run_and_write(const RunConfig& cfg) {
  auto report = find_experiment(cfg.experiment)(cfg);
  write_outputs(report);
  return report;
}

Outcome from_report(const ExperimentReport& r, std::string detail) {
  return {r.status == Status::kPass, "status=" + std::string(to_string(r.status)) + " " + detail};
}

Outcome a1(const fs::path&) {
  const std::vector<int> dims{2, 3};
  const std::vector<double> masses{0.5, 1.0, 2.0};
  const auto checks = gaussian_identity_checks(dims, masses, 1e-8);
  double worst = 0.0;
  bool ok = !checks.empty();
  for (const auto& c : checks) {
    worst = std::max(worst, c.relative_residual);
    ok = ok && c.pass();
  }
  return {ok, std::to_string(checks.size()) + " identities, worst relative residual " + num(worst)};
}

Outcome a2(const fs::path&) {
  RandomStream rng(2026, 2);
  std::vector<double> v(3), vs(3), sigma(3);
  double worst_momentum_ulps = 0.0, worst_energy = 0.0;
  for (int trial = 0; trial < 1'000'000; ++trial) {
    const double scale = std::exp(4.0 * (rng.uniform() - 0.5));
    for (int k = 0; k < 3; ++k) {
      v[k] = scale * rng.normal();
      vs[k] = scale * rng.normal();
    }
    uniform_on_sphere<std::dynamic_extent>(sigma, rng);
    const double alpha = rng.uniform();
    const auto [vp, vsp] = post_collision(v, vs, sigma, alpha);
    double before = 0.0, after = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double mag = std::max({std::abs(v[k]), std::abs(vs[k]), std::abs(vp[k]), std::abs(vsp[k])});
      const double ulp = std::numeric_limits<double>::epsilon() * mag;
      if (ulp > 0.0) worst_momentum_ulps = std::max(worst_momentum_ulps, std::abs((vp[k] + vsp[k]) - (v[k] + vs[k])) / ulp);
      before += v[k] * v[k] + vs[k] * vs[k];
      after += vp[k] * vp[k] + vsp[k] * vsp[k];
    }
    const double expected = collision_energy_delta(v, vs, sigma, alpha);
    worst_energy = std::max(worst_energy, std::abs((after - before) - expected) / before);
  }
  return {worst_momentum_ulps <= 4.0 && worst_energy <= 1e-12,
          "10^6 collisions, worst momentum error " + num(worst_momentum_ulps) + " ulp, worst energy error " +
              num(worst_energy) + " relative"};
}

Outcome a3(const fs::path& out) {
  auto c = base(out);
  c.experiment = "dissipation";
  c.alpha = 0.9;
  c.particles = 100000;
  c.replicas = 100;
  c.pair_samples = 2000;
  const auto r = run_and_write(c);
  const double literal = -(1.0 - 0.81) * (std::numbers::pi / 2.0) * 18.054;
  const bool oracle_ok = std::abs(r.number("oracle_rate") / literal - 1.0) <= 1e-4;
  auto o = from_report(r, "rate " + num(r.number("measured_rate")) + " +- " + num(r.number("measured_rate_se")) +
                              " vs " + num(r.number("oracle_rate")) + ", z=" + num(r.number("z_score")));
  o.pass = o.pass && oracle_ok;
  return o;
}

Outcome a4(const fs::path& out) {
  auto c = base(out);
  c.experiment = "profile";
  c.alpha = 0.999;
  c.particles = 10000;
  c.replicas = 4;
  c.outputs = 100;
  c.pair_samples = 2000;
  const auto r = run_and_write(c);
  return from_report(r, "theta_inf/theta_bar_1=" + num(r.number("theta_inf_over_theta_bar_1")) +
                            ", closest constant " + r.get("closest_candidate").value_or("?") +
                            ", plateau_reached=" + r.get("plateau_reached").value_or("?"));
}

Outcome a5(const fs::path& out) {
  auto c = base(out);
  c.experiment = "haff";
  c.alpha = 0.95;
  c.particles = 100000;
  c.replicas = 50;
  c.outputs = 100;
  c.pair_samples = 1000;
  const auto r = run_and_write(c);
  return from_report(r, "p=" + num(r.number("exponent_p")) + " +- " + num(r.number("exponent_p_se")) +
                            ", A/theta_plateau=" + num(r.number("prefactor_over_plateau")));
}

Outcome a6(const fs::path& out) {
  auto c = base(out);
  c.experiment = "eigen";
  c.alpha = 0.99;
  c.rhos = {1.0, 2.0};
  c.particles = 5000;
  c.replicas = 200;
  c.outputs = 100;
  c.pair_samples = 500;
  const auto r = run_and_write(c);
  return from_report(r, "mu(rho=1)=" + num(r.number("rho_0_mu_hat")) + " +- " + num(r.number("rho_0_mu_hat_se")) +
                            ", mu(2)/mu(1)=" + num(r.number("rho_1_scaling_ratio")) + " +- " +
                            num(r.number("rho_1_scaling_ratio_se")));
}

Outcome a7(const fs::path& out) {
  auto c = base(out);
  c.experiment = "sweep";
  c.alphas = {0.9, 0.95, 0.99};
  c.particles = 10000;
  c.replicas = 4;
  c.outputs = 100;
  c.pair_samples = 500;
  const auto r = run_and_write(c);
  return from_report(r, "d=" + num(r.number("alpha_0_l1_2_corrected")) + "," + num(r.number("alpha_1_l1_2_corrected")) +
                            "," + num(r.number("alpha_2_l1_2_corrected")) + ", s=" + num(r.number("exponent_s")) +
                            " +- " + num(r.number("exponent_s_se")));
}

Outcome a8(const fs::path& out) {
  auto c = base(out);
  c.experiment = "balance";
  c.alpha = 0.99;
  c.particles = 10000;
  c.replicas = 8;
  c.outputs = 100;
  c.pair_samples = 2000;
  c.collision_fraction = 0.02;
  const auto r = run_and_write(c);
  return from_report(r, "balance z=" + num(r.number("balance_z")) + ", E_inf=" + num(r.number("E_inf")) +
                            ", upper " + num(r.number("upper_bound")) + " ok=" + r.get("upper_ok").value_or("?") +
                            ", lower " + num(r.number("lower_bound")) + " ok=" + r.get("lower_ok").value_or("?"));
}

Outcome a9(const fs::path& out) {
  auto c = base(out);
  c.experiment = "attractor";
  c.alpha = 0.99;
  c.attractor_thetas = {1.0, 9.0};
  c.particles = 10000;
  c.replicas = 4;
  c.outputs = 100;
  c.pair_samples = 500;
  const auto r = run_and_write(c);
  return from_report(r, "theta gap " + num(r.number("theta_gap")) + " +- " + num(r.number("theta_gap_se")) +
                            ", L1_2 " + num(r.number("l1_2_between_runs")) + " vs floor " +
                            num(r.number("l1_2_two_sample_noise_floor")) +
                            ", H1 ok=" + r.get("lyapunov_ok").value_or("?"));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome a10(const fs::path& out) {
  const std::string common =
      " --set threads=1 --set particles=2000 --set replicas=3 --set alpha=0.9 --set t_end=5"
      " --set outputs=20 --set pair_samples=500 --set seed=77";
  std::size_t files = 0;
  bool same = true;
  for (const std::string mode : {"rescaled", "original"}) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      dirs.push_back(out / ("determinism_" + mode + "_" + std::to_string(run)));
      fs::remove_all(dirs.back());
      const std::string cmd = std::string(GK_CLI_PATH) + " simulate" + common + " --set mode=" + mode + " --out " +
                              dirs.back().string() + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != kExitPass) return {false, "CLI run failed: " + cmd};
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      same = same && slurp(entry.path()) == slurp(dirs[1] / entry.path().filename());
    }
  }
  return {same && files == 2, std::to_string(files) + " CSV files compared byte for byte, identical=" +
                                  (same ? "true" : "false")};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc)
      out = argv[++i];
    else
      only.insert(a);
  }
  fs::create_directories(out);
  const std::vector<Criterion> criteria{
      {"A1", 5, a1},        {"A2", 10, a2},       {"A3", 300, a3},  {"A4", 900, a4},  {"A5", 900, a5},
      {"A6", 1800, a6},     {"A7", 1800, a7},     {"A8", 0, a8},    {"A9", 0, a9},    {"A10", 0, a10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(out);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = c.budget_seconds == 0 || seconds < c.budget_seconds;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    std::cout << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << num(seconds) << " s";
    if (c.budget_seconds > 0) std::cout << ", budget " << num(c.budget_seconds) << " s" << (in_budget ? "" : ", OVER BUDGET");
    std::cout << "]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
