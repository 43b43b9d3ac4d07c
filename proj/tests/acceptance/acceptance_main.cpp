// Acceptance suite: runs the release criteria end to end and prints one
// pass/fail line per criterion. Criterion numbers may be passed as arguments
// to run a subset.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "proxboost/checks.hpp"
#include "proxboost/harness.hpp"
#include "proxboost/robust.hpp"

using namespace proxboost;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::function<bool(std::string&)> run;
};

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

bool check_backed(const checks::CheckResult& result, double seconds,
                  double budget, std::string& detail) {
  std::ostringstream out;
  out << result.detail << " in " << seconds << "s";
  detail = out.str();
  return result.passed && seconds < budget;
}

// 1. Deterministic robust-selection soundness on planted-majority instances.
bool criterion_robust_selection(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = checks::robust_selection_soundness(10000, 2024);
  return check_backed(result, elapsed_seconds(start), 30.0, detail);
}

// 2. Inexact proximal point inequalities on random quadratics.
bool criterion_decomposition(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = checks::decomposition_inequalities(1000, 7);
  return check_backed(result, elapsed_seconds(start), 60.0, detail);
}

// 3. Geometric schedule arithmetic across twenty octaves of conditioning.
bool criterion_schedule(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = checks::schedule_arithmetic();
  return check_backed(result, elapsed_seconds(start), 10.0, detail);
}

// 4. Oracle calibration: the 2/3 contract with binomial slack.
bool criterion_calibration(std::string& detail) {
  bool all = true;
  std::ostringstream out;
  for (const std::string& oracle : checks::calibration_oracles()) {
    for (const auto& r : checks::calibrate_oracle(oracle, 1000, 0)) {
      all &= r.passed;
      out << r.setting << " upper99 " << r.upper99 << "; ";
      if (!r.passed) out << "FAILED; ";
    }
  }
  detail = out.str();
  return all;
}

// 5. End-to-end streaming tail bound on the heavy-tailed quadratic.
bool criterion_boost_alg_tail(std::string& detail) {
  RunConfig cfg;
  cfg.problem = "quadratic";
  cfg.dim = 20;
  cfg.mu = 1.0;
  cfg.lip_grad = 100.0;
  cfg.sigma2 = 4.0;
  cfg.tail = "student_t";
  cfg.dof = 2.5;
  cfg.problem_seed = 7;
  cfg.method = "boost-alg";
  cfg.oracle = "sgd";
  cfg.eps_rel = 0.01;
  cfg.p = 0.1;
  cfg.init_distance = 6.0;
  cfg.replications = 300;
  cfg.base_seed = 42;
  const auto records = run_trials(cfg);
  const auto report = empirical_failure(records, records.front().epsilon_target);
  std::ostringstream out;
  out << report.failures << "/" << report.replications << " failures, upper95 "
      << report.upper95 << ", mean samples " << report.mean_samples;
  detail = out.str();
  return report.upper95 <= 0.15 && report.errors == 0;
}

// 6. Robust gradient tail bound at m = 37.
bool criterion_robust_gradient(std::string& detail) {
  const QuadraticProblem q =
      make_quadratic(10, 1.0, 10.0, 2.0, NoiseTail::student_t, 2.5, 99);
  RngStream dir_rng = RngStream::root(17);
  Vec x(10);
  for (int i = 0; i < 10; ++i) x[i] = dir_rng.next_gaussian();
  const Vec exact = q.instance.grad(x);
  const double eps = 0.5;
  const int reps = 2000;
  std::atomic<long long> failures{0};
  std::atomic<long long> next{0};
  const int workers = resolve_jobs(0);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long long i = next.fetch_add(1);
        if (i >= reps) return;
        const RobustGradient rg = robust_gradient(
            q.instance, x, eps, 37,
            derive_rng(4242, {static_cast<std::uint64_t>(i)}));
        if ((rg.gradient - exact).norm() > 3.0 * eps) failures.fetch_add(1);
      }
    });
  }
  for (auto& t : pool) t.join();
  const double upper95 = clopper_pearson_upper(failures.load(), reps, 0.95);
  const double budget = std::exp(-37.0 / 18.0) + 0.03;
  std::ostringstream out;
  out << failures.load() << "/" << reps << " outside 3 eps, upper95 " << upper95
      << " vs " << budget;
  detail = out.str();
  return upper95 <= budget;
}

// 7. Robust gap fixtures with planted majorities and controlled gradient error.
bool criterion_robust_gap(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = checks::robust_gap_fixtures(1000, 11);
  return check_backed(result, elapsed_seconds(start), 60.0, detail);
}

// 8. End-to-end composite tail bound on the ball-constrained quadratic.
bool criterion_boost_algc_tail(std::string& detail) {
  RunConfig cfg;
  cfg.problem = "composite";
  cfg.dim = 10;
  cfg.mu = 1.0;
  cfg.lip_grad = 50.0;
  cfg.sigma2 = 4.0;
  cfg.tail = "student_t";
  cfg.dof = 2.5;
  cfg.problem_seed = 11;
  cfg.constraint = "ball";
  cfg.radius = 1.0;
  cfg.method = "boost-algc";
  cfg.oracle = "prox_sgd";
  cfg.eps_rel = 0.01;
  cfg.p = 0.1;
  cfg.init_distance = 4.0;
  cfg.replications = 200;
  cfg.base_seed = 42;
  const auto records = run_trials(cfg);
  const auto report = empirical_failure(records, records.front().epsilon_target);
  std::ostringstream out;
  out << report.failures << "/" << report.replications << " failures, upper95 "
      << report.upper95 << ", mean samples " << report.mean_samples;
  detail = out.str();
  return report.upper95 <= 0.15 && report.errors == 0;
}

// 9. Relative-error guarantee of the ERM continuation, plus sample accounting.
bool criterion_boost_erm(std::string& detail) {
  RunConfig cfg;
  cfg.problem = "erm";
  cfg.dim = 10;
  cfg.mu = 1.0;
  cfg.lip_hat = 200.0;
  cfg.kappa_pop = 50.0;
  cfg.n_pop = 400;
  cfg.problem_seed = 5;
  cfg.method = "boost-erm";
  cfg.gamma_prime = 0.5;
  cfg.p = 0.1;
  cfg.replications = 200;
  cfg.base_seed = 42;
  const auto records = run_trials(cfg);
  const auto report = empirical_failure(records, records.front().epsilon_target);

  const ErmProblem problem =
      make_nonneg_erm(cfg.dim, cfg.n_pop, cfg.mu, cfg.lip_hat, cfg.problem_seed,
                      cfg.kappa_pop);
  const ErmParams params = erm_geometric_params(
      problem.lip_grad / problem.mu, cfg.gamma_prime, cfg.p);
  const double predicted = static_cast<double>(boost_erm_predicted_samples(
      problem, params.gamma, params.stages, params.trials));
  const double ratio = report.mean_samples / predicted;

  std::ostringstream out;
  out << report.failures << "/" << report.replications << " failures, upper95 "
      << report.upper95 << ", samples/predicted " << ratio;
  detail = out.str();
  return report.upper95 <= 0.15 && ratio <= 10.0 && ratio >= 0.1 &&
         report.errors == 0;
}

// 10. Moreau sandwich and derivative agreement.
bool criterion_moreau(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = checks::moreau_grid();
  return check_backed(result, elapsed_seconds(start), 10.0, detail);
}

// 11. Byte-level reproducibility of the CLI across runs and thread counts.
bool criterion_reproducibility(std::string& detail) {
#ifndef PROXBOOST_CLI_PATH
  detail = "CLI path not configured";
  return false;
#else
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "proxboost-repro";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg_path = base / "run.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "problem = quadratic\ndim = 4\nmu = 1\nlip_grad = 8\nsigma2 = 1\n"
        << "tail = student_t\ndof = 2.5\nproblem_seed = 13\nmethod = boost-alg\n"
        << "oracle = sgd\neps_rel = 0.05\np = 0.2\ninit_distance = 2\nR = 8\n";
  }
  auto run_once = [&](const std::string& out_dir, int jobs) {
    std::ostringstream cmd;
    cmd << PROXBOOST_CLI_PATH << " run --config " << cfg_path.string()
        << " --seed 4242 --out " << (base / out_dir).string() << " --jobs "
        << jobs << " > /dev/null";
    return std::system(cmd.str().c_str()) == 0;
  };
  if (!run_once("a", 1) || !run_once("b", 2) || !run_once("c", 1)) {
    detail = "CLI invocation failed";
    return false;
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  auto mask_wall = [](const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      std::size_t pos = 0;
      for (int commas = 0; commas < 9 && pos != std::string::npos; ++commas)
        pos = line.find(',', pos) + 1;
      const std::size_t end = line.find(',', pos);
      out << line.substr(0, pos) << "*" << line.substr(end) << "\n";
    }
    return out.str();
  };
  const std::string csv_a = mask_wall(slurp(base / "a" / "records.csv"));
  const std::string csv_b = mask_wall(slurp(base / "b" / "records.csv"));
  const std::string csv_c = mask_wall(slurp(base / "c" / "records.csv"));
  const std::string json_a = slurp(base / "a" / "summary.json");
  const std::string json_b = slurp(base / "b" / "summary.json");
  const bool same = !csv_a.empty() && csv_a == csv_b && csv_a == csv_c &&
                    json_a == json_b;
  detail = same ? "identical records.csv (wall masked) and summary.json"
                : "outputs differ across runs";
  return same;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "robust selection soundness", criterion_robust_selection},
      {2, "proximal decomposition inequalities", criterion_decomposition},
      {3, "schedule arithmetic", criterion_schedule},
      {4, "oracle calibration (2/3 contract)", criterion_calibration},
      {5, "streaming tail bound, heavy-tailed quadratic", criterion_boost_alg_tail},
      {6, "robust gradient tail bound", criterion_robust_gradient},
      {7, "robust gap fixture constants", criterion_robust_gap},
      {8, "composite tail bound, ball constraint", criterion_boost_algc_tail},
      {9, "ERM relative-error bound and accounting", criterion_boost_erm},
      {10, "Moreau sandwich and derivative", criterion_moreau},
      {11, "byte-level reproducibility", criterion_reproducibility},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.number) == selected.end())
      continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d [%s] %s: %s\n", c.number, ok ? "PASS" : "FAIL",
                c.title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
