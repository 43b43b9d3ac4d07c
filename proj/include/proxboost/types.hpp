// types.hpp -- shared domain types for the proxBoost library.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxboost/rng.hpp"

namespace proxboost {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct GroundTruth {
  Vec minimizer;
  double min_value = 0.0;
};

/**
 * A smooth strongly convex objective with exact and stochastic gradient
 * access. mu and lip_grad are the strong convexity and gradient Lipschitz
 * constants; sigma2 bounds the stochastic gradient variance E||G - grad||^2.
 */
struct ProblemInstance {
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Vec(const Vec&, RngStream&)> stoch_grad;
  double mu = 0.0;
  double lip_grad = 0.0;
  double sigma2 = 0.0;
  std::optional<GroundTruth> ground_truth;
};

// kappa = L/mu. Throws if the constants are inconsistent.
inline double condition_number(const ProblemInstance& problem) {
  if (!(problem.mu > 0.0) || problem.lip_grad < problem.mu)
    throw std::invalid_argument("condition_number: need lip_grad >= mu > 0");
  return problem.lip_grad / problem.mu;
}

struct CompositeGroundTruth {
  Vec minimizer;
  double min_value = 0.0;
  Vec grad_at_min;  // gradient of the smooth part at the minimizer
};

/**
 * A composite objective f = g + h: smooth part g plus a closed convex h
 * accessed through its value and proximal map. combined_mu is the strong
 * convexity constant of the sum.
 */
struct CompositeProblem {
  ProblemInstance smooth;
  std::function<double(const Vec&)> nonsmooth_value;       // may return +inf
  std::function<Vec(const Vec&, double)> prox;             // prox_{t h}(x)
  double combined_mu = 0.0;
  std::optional<CompositeGroundTruth> ground_truth;

  double value(const Vec& x) const {
    return smooth.value(x) + nonsmooth_value(x);
  }
};

// Bregman gap D_h(x, xbar) = h(x) - h(xbar) + <grad g(xbar), x - xbar>.
// Nonnegative for every x in dom h when xbar minimizes g + h.
inline double bregman_gap(const CompositeProblem& problem, const Vec& x) {
  if (!problem.ground_truth)
    throw std::invalid_argument("bregman_gap: ground truth required");
  const auto& gt = *problem.ground_truth;
  return problem.nonsmooth_value(x) - problem.nonsmooth_value(gt.minimizer) +
         gt.grad_at_min.dot(x - gt.minimizer);
}

/**
 * The proximal continuation plan: amplitudes lambda_0..lambda_T (with the
 * implicit lambda_{-1} = 0), trial count m, per-stage accuracy delta and
 * failure probability p. Radii come out as eps_j = sqrt(2 delta/(mu+lambda_j)).
 */
struct Schedule {
  std::vector<double> lambdas;  // lambda_0 .. lambda_T, strictly increasing
  int num_stages = 0;           // T
  int trials = 1;               // m
  double delta = 0.0;
  double p = 0.0;
  double mu = 0.0;

  double lambda_at(int j) const {  // lambda_j with lambda_{-1} = 0
    if (j < 0) return 0.0;
    return lambdas.at(static_cast<std::size_t>(j));
  }

  // 1 + sum_{i=0}^{T} lambda_i / (mu + lambda_{i-1})
  double bound_factor() const {
    double s = 1.0;
    for (int i = 0; i <= num_stages; ++i) s += lambda_at(i) / (mu + lambda_at(i - 1));
    return s;
  }

  void validate() const {
    if (!(mu > 0.0) || !(delta > 0.0) || trials < 1 || num_stages < 0)
      throw std::invalid_argument("Schedule: invalid parameters");
    if (lambdas.size() != static_cast<std::size_t>(num_stages) + 1)
      throw std::invalid_argument("Schedule: need T+1 amplitudes");
    double prev = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > prev) && !(i == 0 && lambdas[i] >= 0.0))
        throw std::invalid_argument("Schedule: amplitudes must increase");
      prev = lambdas[i];
    }
  }
};

/**
 * Per-stage audit trail of one continuation run: centers x_0..x_{T+1},
 * the radius/amplitude targets they were produced under, per-stage sample
 * counts, and (streaming variants) the initialization bounds Delta_j.
 */
struct StageTrace {
  std::vector<Vec> centers;              // length T+2
  std::vector<double> radii;             // eps_{-1} .. eps_T
  std::vector<double> amplitudes;        // lambda_{-1} .. lambda_T
  std::vector<double> init_bounds;       // Delta_{-1} .. Delta_T (streaming only)
  std::vector<long long> samples;        // per stage
  std::vector<Vec> exact_prox_minimizers;  // optional, verification only

  long long total_samples() const {
    long long t = 0;
    for (long long s : samples) t += s;
    return t;
  }
};

enum class Method {
  naive_markov,
  best_of_m,
  robust_distance,
  proxboost,
  boost_erm,
  boost_ermc,
  boost_alg,
  boost_algc,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/** One macro-replication's outcome for empirical tail-probability estimation. */
struct TrialRecord {
  long long trial_id = 0;
  Method method = Method::proxboost;
  double epsilon_target = 0.0;
  double p = 0.0;
  int stages = 0;  // T
  int trials_m = 0;
  double final_gap = 0.0;
  bool success = false;  // final_gap <= epsilon_target
  long long samples_used = 0;
  long long wall_ms = 0;
  std::uint64_t seed = 0;
  std::string error;  // nonempty when the trial failed to run
};

}  // namespace proxboost
