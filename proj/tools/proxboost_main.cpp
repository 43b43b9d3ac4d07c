// proxboost -- benchmark CLI: deterministic verification suites, oracle
// calibration, seeded trial runs, and parameter sweeps.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "proxboost/checks.hpp"
#include "proxboost/harness.hpp"

namespace {

int cmd_verify() {
  const auto results = proxboost::checks::run_all_deterministic();
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %-36s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all &= r.passed;
  }
  return all ? 0 : 1;
}

int cmd_calibrate(const std::string& oracle, long long reps, int jobs) {
  std::vector<std::string> oracles;
  if (oracle == "all")
    oracles = proxboost::checks::calibration_oracles();
  else
    oracles.push_back(oracle);
  bool all = true;
  for (const std::string& name : oracles) {
    const auto results = proxboost::checks::calibrate_oracle(name, reps, jobs);
    for (const auto& r : results) {
      std::printf("[%s] %-44s failures %lld/%lld rate %.4f upper99 %.4f\n",
                  r.passed ? "PASS" : "FAIL", r.setting.c_str(),
                  static_cast<long long>(r.failures),
                  static_cast<long long>(r.replications), r.failure_rate,
                  r.upper99);
      all &= r.passed;
    }
  }
  return all ? 0 : 1;
}

int run_config(proxboost::RunConfig cfg) {
  const auto records = proxboost::run_trials(cfg);
  const double eps = records.empty() ? 0.0 : records.front().epsilon_target;
  const auto report = proxboost::empirical_failure(records, eps);
  const auto paths = proxboost::emit(records, report, cfg.out_dir);
  std::printf("%s: %lld trials, %lld failures (rate %.4f, upper95 %.4f), "
              "mean samples %.0f\n",
              report.method.c_str(), report.replications, report.failures,
              report.failure_rate, report.upper95, report.mean_samples);
  for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxboost: high-probability guarantees for stochastic convex "
               "optimization"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the deterministic property suites");

  std::string oracle = "all";
  long long reps = 1000;
  int cal_jobs = 0;
  auto* calibrate =
      app.add_subcommand("calibrate", "Monte-Carlo check of the oracle 2/3 contract");
  calibrate->add_option("--oracle", oracle, "sgd | acc_sgd | prox_sgd | all");
  calibrate->add_option("--reps", reps, "replications per setting");
  calibrate->add_option("--jobs", cal_jobs, "worker threads");

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run seeded macro-replications");
  run->add_option("--config", config_path, "run configuration file")->required();
  run->add_option("--seed", seed, "base seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads");

  std::string sweep_config;
  std::string vary;
  std::string sweep_out;
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_given = false;
  int sweep_jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "run a config over a list of values");
  sweep->add_option("--config", sweep_config, "run configuration file")->required();
  sweep->add_option("--vary", vary, "key=v1,v2,... override list")->required();
  sweep->add_option("--seed", sweep_seed, "base seed")->each([&](const std::string&) {
    sweep_seed_given = true;
  });
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--jobs", sweep_jobs, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify();
    if (calibrate->parsed()) return cmd_calibrate(oracle, reps, cal_jobs);
    if (run->parsed()) {
      proxboost::RunConfig cfg = proxboost::RunConfig::load(config_path);
      if (seed_given) cfg.base_seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (jobs > 0) cfg.jobs = jobs;
      return run_config(cfg);
    }
    if (sweep->parsed()) {
      const auto eq = vary.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "sweep: --vary expects key=v1,v2,...\n");
        return 2;
      }
      const std::string key = vary.substr(0, eq);
      std::string values = vary.substr(eq + 1);
      int rc = 0;
      std::size_t pos = 0;
      while (pos <= values.size()) {
        const auto comma = values.find(',', pos);
        const std::string value = values.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        proxboost::RunConfig cfg = proxboost::RunConfig::load(sweep_config);
        cfg.set_key(key, value);
        cfg.validate();
        if (sweep_seed_given) cfg.base_seed = sweep_seed;
        if (sweep_jobs > 0) cfg.jobs = sweep_jobs;
        const std::string base = sweep_out.empty() ? cfg.out_dir : sweep_out;
        cfg.out_dir = base + "/" + key + "=" + value;
        std::printf("-- %s = %s --\n", key.c_str(), value.c_str());
        rc |= run_config(cfg);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return rc;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
