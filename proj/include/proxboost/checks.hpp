// checks.hpp -- deterministic property suites and the oracle calibration
// runner, shared by the CLI and the acceptance tests.
#pragma once

#include <string>
#include <vector>

#include "proxboost/types.hpp"

namespace proxboost::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Planted-majority soundness of robust_select/extract under all three
// pseudometrics, with the brute-force weak_radius oracle equivalence.
CheckResult robust_selection_soundness(int instances = 10000,
                                       std::uint64_t seed = 2024);

// Inexact proximal point inequalities on random quadratics with closed-form
// proximal minimizers.
CheckResult decomposition_inequalities(int instances = 1000,
                                       std::uint64_t seed = 7);

// Geometric-schedule arithmetic for kappa in {2^0..2^20}: bound factor,
// final conditioning, the initialization-error cap, and exact call counts.
CheckResult schedule_arithmetic();

// Deterministic robust-gap fixtures with planted majorities and controlled
// gradient error on 1-D/2-D composite problems.
CheckResult robust_gap_fixtures(int instances = 1000, std::uint64_t seed = 11);

// Moreau envelope sandwich and derivative-vs-central-difference agreement.
CheckResult moreau_grid();

// Pseudometric axioms on random triples.
CheckResult pseudometric_properties(std::uint64_t seed = 5);

// Stream determinism and cross-path decorrelation.
CheckResult rng_streams();

// Clopper-Pearson upper bounds: beta route against a direct binomial-sum
// bisection, plus frozen reference values.
CheckResult binomial_bound_routes();

// Two-sided bounds (smooth and composite) on generated problems with probes.
CheckResult two_sided_bounds(std::uint64_t seed = 3);

std::vector<CheckResult> run_all_deterministic();

struct CalibrationResult {
  std::string oracle;
  std::string setting;
  long long replications = 0;
  long long failures = 0;
  double failure_rate = 0.0;
  double upper99 = 1.0;
  bool passed = false;  // upper99 <= 0.40
};

// Monte-Carlo check of the 2/3 contract: P(gap > delta) <= 1/3 with
// slack, at three (delta, lambda) settings per matching problem family.
std::vector<CalibrationResult> calibrate_oracle(const std::string& oracle_name,
                                                long long replications = 1000,
                                                int jobs = 0);

std::vector<std::string> calibration_oracles();

}  // namespace proxboost::checks
