// erm.hpp -- empirical risk minimization as a weak distance oracle, its
// robust wrapper, and the continuation driver for relative-error guarantees.
#pragma once

#include <span>

#include "proxboost/engine.hpp"
#include "proxboost/problems.hpp"

namespace proxboost {

enum class ErmSolver { automatic, closed_form, iterative };

/**
 * Draws n i.i.d. samples and minimizes the empirical risk plus
 * lambda/2 ||y - center||^2, by normal equations for the quadratic losses or
 * by the deterministic inner solver (gradient tolerance
 * 1e-10 (mu+lambda)(1+||y||)).
 */
Vec erm(const ErmProblem& problem, long long n, double lambda, const Vec& center,
        RngStream rng, ErmSolver solver = ErmSolver::automatic);

// m independent erm replicas combined by robust selection.
OracleResult erm_r(const ErmProblem& problem, long long n, int m, double lambda,
                   const Vec& center, RngStream rng);

/**
 * Stage sample size n_j = 432 ceil((Lhat+lambda_j)/(mu+lambda_j)
 * (1/gamma + sum_{i<=j} lambda_i/(mu+lambda_{i-1}))) v N; for j = -1 it is
 * ceil(432 Lhat / (gamma mu)).
 */
long long sample_count(double gamma, int j, double mu, double lip_hat,
                       std::span<const double> lambdas, long long n_min);

/**
 * Relative-error continuation: with probability 1-(T+2)exp(-m/18) the output
 * satisfies f(x) <= (1 + (1+sum) gamma) fstar, using geometric amplitudes
 * lambda_i = mu 2^i. Requires fstar > 0.
 */
BoostResult boost_erm(const ErmProblem& problem, double gamma, int d_stages,
                      int m, RngStream rng);

struct ErmParams {
  int stages = 0;      // T
  int trials = 0;      // m
  double gamma = 0.0;  // per-stage relative accuracy
};

// Geometric-decay parameters for a target relative accuracy gamma_prime at
// failure probability p: T = ceil(log2 kappa), m = ceil(18 ln((T+2)/p)),
// gamma = gamma_prime / (2+2T).
ErmParams erm_geometric_params(double kappa, double gamma_prime, double p);

// Predicted total sample usage of boost_erm, sum_j m n_{j-1} plus the final
// stage's m ceil((L+lambda_T)/(mu+lambda_T) n_T).
long long boost_erm_predicted_samples(const ErmProblem& problem, double gamma,
                                      int d_stages, int m);

}  // namespace proxboost
