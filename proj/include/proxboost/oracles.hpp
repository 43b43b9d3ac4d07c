// oracles.hpp -- minimization oracles with the 2/3-confidence contract:
// restarted (accelerated) stochastic gradient methods, their proximal
// variants, and the deterministic inner solver.
#pragma once

#include <functional>

#include "proxboost/types.hpp"

namespace proxboost {

struct OracleResult {
  Vec point;
  long long samples = 0;
};

/**
 * Black-box minimization oracle for the proximal subproblem
 * phi_x(y) = f(y) + lambda/2 ||y - x||^2. Given delta_init >=
 * phi_x(x) - min phi_x, returns a point with
 * P(phi_x(point) - min phi_x <= delta) >= 2/3.
 */
using MinimizationOracle = std::function<OracleResult(
    double delta, double lambda, double delta_init, const Vec& center,
    RngStream rng)>;

/**
 * Restarted SGD on phi = f + lambda/2 ||. - center||^2, targeting expected
 * gap delta/3 (Markov then gives the 2/3 contract at delta). Epochs halve a
 * running gap target delta_k over ceil(log2(3 delta_init/delta)) rounds;
 * epoch k runs N_k = ceil(4 / (eta_k mu_eff)) constant-step iterations with
 * eta_k = min(1/(2 L_eff), delta_k/sigma^2) and returns the average of the
 * last half. The constants are validated by the calibration suite.
 */
OracleResult sgd_oracle(const ProblemInstance& problem, double delta,
                        double lambda, double delta_init, const Vec& center,
                        RngStream rng);

/**
 * As sgd_oracle, with Nesterov-accelerated inner loops of length
 * O(sqrt(kappa_eff)) while the gap target stays above the noise floor.
 */
OracleResult acc_sgd_oracle(const ProblemInstance& problem, double delta,
                            double lambda, double delta_init, const Vec& center,
                            RngStream rng);

/** Proximal variant: every step is followed by the prox of the nonsmooth part. */
OracleResult prox_sgd_oracle(const CompositeProblem& problem, double delta,
                             double lambda, double delta_init, const Vec& center,
                             RngStream rng);

// As sgd_oracle, recording each epoch's output point (for diagnostics).
OracleResult sgd_oracle_traced(const ProblemInstance& problem, double delta,
                               double lambda, double delta_init, const Vec& center,
                               RngStream rng, std::vector<Vec>& epoch_points);

MinimizationOracle make_sgd_oracle(const ProblemInstance& problem);
MinimizationOracle make_acc_sgd_oracle(const ProblemInstance& problem);
MinimizationOracle make_prox_sgd_oracle(const CompositeProblem& problem);

/** Deterministic solve of a strongly convex composite objective. */
struct SolveSpec {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Vec(const Vec&, double)> prox;  // null means identity
  double mu = 0.0;                              // strong convexity
  double lip_hint = 1.0;                        // initial smoothness estimate
  int max_iter = 100000;
};

// Accelerated proximal gradient with backtracking; stops when the gradient
// mapping norm falls to tol. Throws on non-convergence at max_iter.
Vec deterministic_solve(const SolveSpec& spec, Vec x0, double tol);

}  // namespace proxboost
