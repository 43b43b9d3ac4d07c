// composite.hpp -- the convex-composite extension: robust function-gap
// estimation through a two-pass extract with a linearized Bregman
// pseudometric, composite continuation drivers, and Moreau smoothing
// utilities.
#pragma once

#include "proxboost/engine.hpp"
#include "proxboost/problems.hpp"
#include "proxboost/robust.hpp"

namespace proxboost {

enum class ScalarFn { abs, hinge };

// Closed-form Moreau envelope of |t| or max(0, t): value and derivative.
// The derivative is (1/nu)-Lipschitz and 0 <= fn(t) - envelope(t) <= nu * lip(fn)^2.
struct MoreauPoint {
  double value = 0.0;
  double derivative = 0.0;
};
MoreauPoint moreau_envelope_scalar(ScalarFn fn, double nu, double t);

/** A scalar convex function together with its Moreau smoothing. */
struct SmoothedLoss {
  std::function<double(double)> original;
  double nu = 0.0;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double lip = 0.0;       // Lipschitz constant of the original (and envelope)
  double lip_grad = 0.0;  // 1/nu
};
SmoothedLoss make_smoothed_loss(ScalarFn fn, double nu);

// The pseudometric rho_2(x, x') = |h(x) - h(x') + <grad_estimate, x - x'>|.
Pseudometric bregman_pseudometric(const CompositeProblem& problem,
                                  Vec grad_estimate);

using GapOracle = std::function<OracleResult(double eps, RngStream)>;

struct RobustGapResult {
  Vec point;
  long long oracle_samples = 0;
  long long gradient_samples = 0;
  int m_used = 0;  // rounded up to odd
};

/**
 * Boosts a 2/3-confidence function-gap oracle to high confidence on a
 * composite problem: extract under the euclidean metric, estimate the smooth
 * gradient at the lowest-index survivor to accuracy kappa sqrt(mu eps),
 * extract again under the Bregman pseudometric, and return the lowest-index
 * member of the intersection. With probability >= 1 - 2 exp(-m/18) the output
 * satisfies ||x - xbar|| <= 3 sqrt(2 eps/mu), D_h <= 65 kappa eps and
 * f - fstar <= 74 kappa eps.
 */
RobustGapResult robust_gap(const GapOracle& oracle, int m, double eps,
                           const CompositeProblem& problem, RngStream rng);

/** Deterministic selection core of robust_gap, also used by fixtures. */
struct RobustGapSelection {
  std::size_t chosen = 0;
  std::size_t hat_index = 0;
  std::vector<std::size_t> first_pass;
  std::vector<std::size_t> second_pass;
};
RobustGapSelection robust_gap_select(
    const std::vector<Vec>& points,
    const std::function<Vec(const Vec&)>& gradient_estimator,
    const std::function<double(const Vec&)>& h_value);

// Lambda-regularized view of a composite problem (no ground truth attached).
CompositeProblem shift_composite(const CompositeProblem& problem, double lambda,
                                 const Vec& center);

/**
 * Regularized ERM over a finite population of per-sample quadratics plus a
 * proximable h; carries the Lipschitz moment lbar over a neighborhood of
 * dom h and the derived gradient variance bound 4 lbar^2.
 */
struct CompositeErmProblem {
  int dim = 0;
  double combined_mu = 0.0;
  double lip_grad = 0.0;  // L of the population smooth part
  double lbar = 0.0;
  std::shared_ptr<const LeastSquaresPopulation> population;
  std::function<double(const Vec&)> h;
  std::function<Vec(const Vec&, double)> prox;
  CompositeGroundTruth ground_truth;

  // Stochastic gradient of the population smooth part (one drawn sample).
  Vec stoch_grad(const Vec& x, RngStream& rng) const;
  double value(const Vec& x) const;
  // Composite view of the smooth population objective (for robust_gap).
  CompositeProblem as_composite() const;
};

// Ball-constrained least-squares ERM population; radius <= 0 picks half the
// distance to the unconstrained minimizer.
CompositeErmProblem make_composite_erm(int dim, long long n_pop, double mu,
                                       double lip_hat, double radius,
                                       std::uint64_t seed);

// Empirical composite solve: n samples, h, plus lambda/2 ||y - center||^2.
Vec composite_erm(const CompositeErmProblem& problem, long long n, double lambda,
                  const Vec& center, RngStream rng);

/**
 * Composite relative continuation: stages run robust-selected regularized ERM
 * with n = ceil(54 lbar^2 / ((mu+lambda_{j-1}) delta)); the cleanup stage
 * boosts ERM with n = ceil(6 lbar^2 / ((mu+lambda_T) delta)) through
 * robust_gap at accuracy delta (mu+lambda_T) / (222 (L+lambda_T)). Success
 * probability 1 - (T+3) exp(-m/18) for gap <= (1+sum) delta.
 */
BoostResult boost_ermc(const CompositeErmProblem& problem, double delta, int t,
                       int m, RngStream rng);

struct ErmcParams {
  int stages = 0;
  int trials = 0;
  double delta = 0.0;
};
// T = ceil(log2 kappa), m = ceil(18 ln((T+3)/p)), delta = eps/(4+2T).
ErmcParams ermc_geometric_params(double kappa, double eps, double p);

// Final-stage oracle accuracies of the two composite continuations.
inline double ermc_cleanup_accuracy(double delta, double mu, double lip,
                                    double lambda_t) {
  return delta * (mu + lambda_t) / (222.0 * (lip + lambda_t));
}
inline double algc_cleanup_accuracy(double delta, double mu, double lip,
                                    double lambda_t) {
  return delta * (mu + lambda_t) / (74.0 * (lip + lambda_t));
}

/**
 * Compositional-smoothing demo: absolute-deviation regression over a finite
 * population, with the scalar loss replaced by its Moreau envelope so the
 * smooth machinery applies:
 *
 *   g_nu(x) = avg_z env_nu(<a_z, x> - b_z) + mu/2 ||x||^2,
 *
 * which stays within nu of the original objective everywhere.
 */
struct SmoothedRegression {
  ProblemInstance instance;  // the smoothed objective, with ground truth
  SmoothedLoss loss;
  Mat rows;
  Vec offsets;
  double mu = 0.0;
  double nu = 0.0;

  double original_value(const Vec& x) const;  // nonsmooth objective
};

SmoothedRegression make_smoothed_regression(int dim, long long n_pop, double mu,
                                            double nu, std::uint64_t seed);

/**
 * Composite streaming continuation: every stage (and the cleanup) converts
 * the 2/3-confidence oracle into a high-confidence point through robust_gap;
 * initialization bounds follow
 * Delta_j = delta (9 (L+lambda_{j-1})/(mu+lambda_{j-1}) + sum_{i<j} lambda_i/(mu+lambda_{i-1})).
 * The cleanup accuracy is delta (mu+lambda_T) / (74 (L+lambda_T)). Success
 * probability 1 - 2(T+2) exp(-m/18) for gap <= delta (1+sum).
 */
BoostResult boost_algc(const CompositeProblem& problem,
                       const MinimizationOracle& alg, double delta,
                       double delta_in, const Vec& x_in, const Schedule& schedule,
                       RngStream rng);

}  // namespace proxboost
