// harness.hpp -- configuration, macro-trial runner, empirical tail
// statistics, and CSV/JSON emission.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proxboost/composite.hpp"
#include "proxboost/erm.hpp"
#include "proxboost/types.hpp"

namespace proxboost {

/** Flat key-value run configuration; see README for the schema. */
struct RunConfig {
  // problem
  std::string problem = "quadratic";  // quadratic | erm | composite
  int dim = 10;
  double mu = 1.0;
  double lip_grad = 10.0;
  double sigma2 = 1.0;
  std::string tail = "gaussian";  // gaussian | student_t
  double dof = 2.5;
  std::uint64_t problem_seed = 1;
  // composite extras
  std::string constraint = "ball";  // ball | box | l1
  double radius = 1.0;
  double lo = -1.0;
  double hi = 1.0;
  double weight = 1.0;
  // erm extras
  long long n_pop = 400;
  double lip_hat = 40.0;
  double kappa_pop = 0.0;  // 0 = generator default

  // method
  std::string method = "boost-alg";
  std::string oracle = "";  // sgd | acc_sgd | prox_sgd; empty = by problem
  double eps = 0.0;         // absolute accuracy target; 0 = use eps_rel
  double eps_rel = 0.01;    // target relative to the measured initial gap
  double p = 0.1;
  double gamma_prime = 0.5;  // boost-erm relative accuracy
  int stages_override = 0;   // T; <= 0 = derive from kappa
  int trials_override = 0;   // m; <= 0 = derive from p
  double init_distance = 2.0;

  // run
  long long replications = 1;
  std::uint64_t base_seed = 42;
  int jobs = 0;  // 0 = PROXBOOST_JOBS env, else hardware
  std::string out_dir = "out";

  static RunConfig from_string(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_string() const;
  void set_key(const std::string& key, const std::string& value);
  void validate() const;
};

struct SummaryReport {
  std::string method;
  std::string bound;  // description of the theorem bound under test
  double epsilon = 0.0;
  double nominal_p = 0.0;
  long long replications = 0;
  long long failures = 0;
  long long errors = 0;
  double failure_rate = 0.0;
  double upper95 = 1.0;
  double upper99 = 1.0;
  double mean_samples = 0.0;
  double median_samples = 0.0;
};

// Exact one-sided binomial upper confidence bound for the failure rate.
double clopper_pearson_upper(long long failures, long long n, double confidence);

// Regularized incomplete beta I_x(a, b); exposed for its own tests.
double incomplete_beta(double a, double b, double x);

/**
 * Runs R independent macro-replications of the configured method; trial i is
 * seeded by derive_rng(base_seed, [i]). Parallel execution over trials gives
 * records identical to a sequential run.
 */
std::vector<TrialRecord> run_trials(const RunConfig& config);

SummaryReport empirical_failure(const std::vector<TrialRecord>& records,
                                double eps_target);

enum class EmitFormat { csv, json };

// records.csv with columns
// trial_id,method,epsilon,p,T,m,samples_used,final_gap,success,wall_ms,seed
// and summary.json mirroring SummaryReport. Returns the paths written.
std::vector<std::filesystem::path> emit(const std::vector<TrialRecord>& records,
                                        const SummaryReport& report,
                                        const std::filesystem::path& out_dir);

std::string records_to_csv(const std::vector<TrialRecord>& records);
std::string summary_to_json(const SummaryReport& report);

// Shortest round-trip decimal representation.
std::string format_double(double v);

int resolve_jobs(int requested);

}  // namespace proxboost
