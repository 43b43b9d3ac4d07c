// problems.hpp -- synthetic problem generators with exact ground truth:
// smooth quadratics with heavy-tailed gradient noise, nonnegative
// least-squares ERM populations, and constrained/regularized composites.
#pragma once

#include <memory>
#include <optional>

#include "proxboost/types.hpp"

namespace proxboost {

enum class NoiseTail { gaussian, student_t };

/** Additive per-coordinate gradient noise with total variance sigma^2. */
struct NoiseModel {
  NoiseTail tail = NoiseTail::gaussian;
  double dof = 2.5;          // student_t only, must be > 2
  double coord_scale = 0.0;  // per-coordinate scale so that E||xi||^2 = sigma^2

  static NoiseModel make(NoiseTail tail, double dof, double sigma2, int dim);
  void fill(Vec& out, RngStream& rng) const;
};

/**
 * f(x) = 1/2 (x - xbar)' A (x - xbar) + fstar, with spectrum(A) log-spaced
 * in [mu, L] under a random rotation. Stochastic gradients add noise from
 * the chosen tail. Keeps the eigendecomposition so proximal subproblems
 * solve in closed form.
 */
struct QuadraticProblem {
  ProblemInstance instance;
  Mat matrix;
  Mat eigvecs;   // matrix = eigvecs * diag(eigvals) * eigvecs'
  Vec eigvals;
  Vec minimizer;
  double min_value = 0.0;

  // argmin of f + lambda/2 ||. - center||^2, via the eigenbasis.
  Vec prox_minimizer(double lambda, const Vec& center) const;
  double prox_min_value(double lambda, const Vec& center) const;

  // ProblemInstance view of f + lambda/2 ||. - center||^2 (same noise).
  ProblemInstance shifted_instance(double lambda, const Vec& center) const;
};

QuadraticProblem make_quadratic(int dim, double mu, double lip_grad, double sigma,
                                NoiseTail tail, double dof, std::uint64_t seed);

/**
 * Finite synthetic population for nonnegative least-squares ERM. Per-sample
 * loss: f(x, z) = 1/2 (<a_z, x> - b_z)^2 + ridge/2 ||x||^2. The (a, b) data
 * are inconsistent so that fstar > 0.
 */
struct LeastSquaresPopulation {
  Mat rows;     // one a_z per row
  Vec offsets;  // b_z
  double ridge = 0.0;

  // population moments
  Mat hessian;   // (1/n) sum a a'
  Vec cross;     // (1/n) sum b a
  double mean_b2 = 0.0;

  long long size() const { return rows.rows(); }
  double population_value(const Vec& x) const;
  Vec population_grad(const Vec& x) const;

  // Minimizer of the count-weighted empirical risk plus lambda/2 ||x - c||^2.
  Vec empirical_minimizer(const std::vector<long long>& counts, long long n,
                          double lambda, const Vec& center) const;
};

struct ErmProblem {
  int dim = 0;
  double mu = 0.0;        // per-sample strong convexity (the ridge)
  double lip_grad = 0.0;  // L, population smoothness
  double lip_hat = 0.0;   // Lhat = max_z ||a_z||^2 + ridge
  long long n_min = 1;    // N, minimum sample size assumption
  GroundTruth ground_truth;  // population minimizer, fstar > 0
  std::shared_ptr<const LeastSquaresPopulation> population;

  double sample_loss(const Vec& x, long long z) const;
  Vec sample_loss_grad(const Vec& x, long long z) const;
  long long draw(RngStream& rng) const;
  double population_value(const Vec& x) const {
    return population->population_value(x);
  }
};

/**
 * Builds the ERM population: rows aligned with a seeded random orthonormal
 * frame carry a log-spaced spectrum with lambda_max(H) = (kappa-1)*mu, one
 * row is pinned at norm^2 = lip_hat - mu, and offsets are made inconsistent
 * and rescaled so that fstar lands at target_fstar when reachable.
 */
ErmProblem make_nonneg_erm(int dim, long long n_pop, double mu, double lip_hat,
                           std::uint64_t seed, double kappa = 0.0,
                           double inconsistency = 1.0, double target_fstar = 1.0);

enum class ConstraintKind { ball, box, l1 };

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::ball;
  double radius = 1.0;  // ball
  double lo = -1.0;     // box
  double hi = 1.0;
  double weight = 1.0;  // l1
};

/**
 * Composite problem g + h with quadratic g whose unconstrained minimizer is
 * placed outside the feasible region, so the gradient at the solution is
 * active and the Bregman term is nontrivial.
 */
struct CompositeQuadratic {
  CompositeProblem problem;
  ConstraintSpec constraint;
  Mat matrix;
  Mat eigvecs;
  Vec eigvals;
  Vec smooth_minimizer;  // unconstrained argmin of g

  // Exact solve of min g + lambda/2 ||. - center||^2 + h.
  Vec exact_minimizer(double lambda, const Vec& center) const;
  double exact_min_value(double lambda, const Vec& center) const;

  // CompositeProblem view of the lambda-regularized subproblem.
  CompositeProblem shifted_problem(double lambda, const Vec& center) const;
};

CompositeQuadratic make_composite(int dim, ConstraintSpec constraint, double mu,
                                  double lip_grad, double sigma, NoiseTail tail,
                                  double dof, std::uint64_t seed);

// f(x) - fstar, exact; +inf for infeasible composite points. Throws when the
// problem has no ground truth or the gap falls below the -1e-12 numerical floor.
double true_gap(const ProblemInstance& problem, const Vec& x);
double true_gap(const CompositeProblem& problem, const Vec& x);
double true_gap(const ErmProblem& problem, const Vec& x);

}  // namespace proxboost
