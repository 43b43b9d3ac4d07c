// engine.hpp -- the generic confidence-boosting continuation driver and its
// streaming instantiations.
#pragma once

#include <functional>
#include <optional>

#include "proxboost/oracles.hpp"
#include "proxboost/problems.hpp"
#include "proxboost/types.hpp"

namespace proxboost {

// eps_j = sqrt(2 delta / (mu + lambda_j)); lambda_j = 0 gives the
// initialization radius eps_{-1}.
double epsilon_schedule(double delta, double mu, double lambda_j);

enum class ScheduleVariant { streaming, composite };

/**
 * Geometric-decay plan for a target accuracy eps and failure probability p:
 * T = ceil(log2 kappa), lambda_i = mu 2^i, delta = eps/(2+2T), and
 * m = ceil(18 ln((2+T)/p)) (streaming) or ceil(18 ln((4+2T)/p)) (composite).
 * The final subproblem has condition number (L+lambda_T)/(mu+lambda_T) <= 2.
 */
Schedule geometric_schedule(double mu, double lip_grad, double eps_target,
                            double p, ScheduleVariant variant = ScheduleVariant::streaming);

/**
 * One stage of the continuation: produce a point near the minimizer of
 * f + lambda_prev/2 ||. - center||^2. Stages 0..T target the radius; the
 * cleanup stage T+1 targets the functional gap cleanup_gap on the final
 * subproblem.
 */
struct StageRequest {
  int stage = 0;  // 0 .. T+1
  double lambda_prev = 0.0;
  Vec center;
  double radius_target = 0.0;
  bool cleanup = false;
  double cleanup_gap = 0.0;
};

struct StagePoint {
  Vec point;
  long long samples = 0;
  std::optional<double> init_bound;  // streaming bookkeeping, recorded in the trace
};

using StageEstimator = std::function<StagePoint(const StageRequest&, RngStream)>;

struct BoostResult {
  Vec point;
  StageTrace trace;
};

/**
 * The continuation driver: runs stages 0..T+1 of the schedule, passing each
 * stage's output as the next center, and records the full trace. When every
 * stage meets its target, the final gap is at most delta * bound_factor()
 * with probability at least 1 - (T+2) p.
 */
BoostResult prox_boost(const StageEstimator& estimator, const Schedule& schedule,
                       RngStream rng);

/** Per-stage inequality slacks of the inexact proximal point decomposition. */
struct DecompositionReport {
  // For each stage j: the three inequalities rearranged as slack >= 0.
  std::vector<double> prox_value_slack;   // sum_i lambda_i/2 d_i^2 - (f^j(xbar_{j+1}) - f*)
  std::vector<double> progress_slack;     // decomposition bound - (f(x_{j+1}) - f*)
  std::vector<double> smooth_slack;       // smooth bound - (f(x_j) - f*)
  double min_slack = 0.0;
  bool all_hold(double tol = 1e-9) const { return min_slack >= -tol; }
};

/**
 * Verifies the error decomposition of the inexact proximal point method on a
 * quadratic problem with closed-form proximal minimizers, for the centers
 * and amplitudes recorded in the trace.
 */
DecompositionReport verify_error_decomposition(const StageTrace& trace,
                                               const QuadraticProblem& problem);

/**
 * Robust distance estimation wrapped around a minimization oracle: queries
 * the oracle m times on independent rng children and returns the point whose
 * majority ball is smallest. Within 3 sqrt(2 delta/(mu+lambda)) of the
 * proximal minimizer with probability >= 1 - exp(-m/18).
 */
OracleResult alg_r(const MinimizationOracle& alg, double delta, double lambda,
                   double delta_init, const Vec& center, int m, RngStream rng);

/**
 * Streaming continuation: stage j calls alg_r at accuracy delta/9 around the
 * previous center, tracking the initialization bounds
 * Delta_j = delta ((L+lambda_{j-1})/(mu+lambda_{j-1}) + sum_{i<j} lambda_i/(mu+lambda_{i-1})).
 * The cleanup stage runs at accuracy (mu+lambda_T)/(L+lambda_T) * delta/9.
 * Requires delta_in >= f(x_in) - min f.
 */
BoostResult boost_alg(const MinimizationOracle& alg, double delta,
                      double delta_in, const Vec& x_in, const Schedule& schedule,
                      double lip_grad, RngStream rng);

}  // namespace proxboost
