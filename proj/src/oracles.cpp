#include "proxboost/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace proxboost {

namespace {

struct InnerView {
  std::function<Vec(const Vec&, RngStream&)> stoch_grad;  // smooth part of phi
  std::function<Vec(const Vec&, double)> prox;            // null = identity
  double mu_eff = 0.0;
  double lip_eff = 0.0;
  double sigma2 = 0.0;
};

Vec apply_prox(const InnerView& view, const Vec& x, double step) {
  return view.prox ? view.prox(x, step) : x;
}

// One constant-step epoch with tail averaging over the last half.
Vec sgd_epoch(const InnerView& view, Vec x, double eta, long long n,
              RngStream& rng) {
  const long long tail_start = n - (n + 1) / 2;
  Vec sum = Vec::Zero(x.size());
  long long tail_count = 0;
  for (long long t = 0; t < n; ++t) {
    const Vec g = view.stoch_grad(x, rng);
    x = apply_prox(view, x - eta * g, eta);
    if (t >= tail_start) {
      sum += x;
      ++tail_count;
    }
  }
  return sum / static_cast<double>(tail_count);
}

// Nesterov constant-momentum epoch; used only while the gap target sits
// safely above the noise floor.
Vec momentum_epoch(const InnerView& view, Vec x, double eta, long long n,
                   RngStream& rng) {
  const double q = std::sqrt(eta * view.mu_eff);
  const double beta = (1.0 - q) / (1.0 + q);
  Vec y = x;
  for (long long t = 0; t < n; ++t) {
    const Vec g = view.stoch_grad(y, rng);
    Vec x_next = apply_prox(view, y - eta * g, eta);
    y = x_next + beta * (x_next - x);
    x = std::move(x_next);
  }
  return x;
}

/**
 * Restarted scheme targeting expected gap delta/3 on phi. Epoch k halves a
 * running target delta_k from delta_init over K = ceil(log2(3 delta_init /
 * delta)) epochs; the stepsize is eta-consistent with the epoch length
 * N_k = ceil(4 / (eta_k mu_eff)). A tracked bias bound decides whether extra
 * epochs at the final target are needed to absorb the distance-to-gap
 * crossing, which costs a factor of the condition number once.
 */
OracleResult restarted(const InnerView& view, double delta, double delta_init,
                       Vec x0, RngStream rng, bool accelerated,
                       std::vector<Vec>* epoch_trace) {
  if (!(delta > 0.0)) throw std::invalid_argument("oracle: delta must be positive");
  if (!(delta_init > 0.0))
    throw std::invalid_argument("oracle: delta_init must be positive");
  delta_init = std::max(delta_init, delta);
  const double kappa_eff = view.lip_eff / view.mu_eff;

  const int halvings = std::max(
      1, static_cast<int>(std::ceil(std::log2(3.0 * delta_init / delta))));
  double bias_gap = kappa_eff * delta_init;  // gap bound carried by the bias

  Vec x = std::move(x0);
  long long samples = 0;
  int k = 0;
  for (;;) {
    ++k;
    if (k > halvings && (bias_gap <= delta / 24.0 || k > halvings + 4)) break;
    const double delta_k = delta_init * std::ldexp(1.0, -std::min(k, halvings));
    const double eta_bias = 1.0 / (2.0 * view.lip_eff);
    const double eta = view.sigma2 > 0.0
                           ? std::min(eta_bias, delta_k / view.sigma2)
                           : eta_bias;
    const bool noise_safe =
        view.sigma2 == 0.0 ||
        delta_k >= 4.0 * std::sqrt(kappa_eff) * view.sigma2 / view.lip_eff;
    if (accelerated && noise_safe) {
      const long long n = static_cast<long long>(
          std::ceil(4.0 / std::sqrt(eta_bias * view.mu_eff)));
      x = momentum_epoch(view, std::move(x), eta_bias, n, rng);
      samples += n;
      bias_gap *= std::exp(-4.0);
    } else {
      const long long n =
          static_cast<long long>(std::ceil(4.0 / (eta * view.mu_eff)));
      x = sgd_epoch(view, std::move(x), eta, n, rng);
      samples += n;
      bias_gap *= std::exp(-8.0);
    }
    if (epoch_trace) epoch_trace->push_back(x);
  }
  return {std::move(x), samples};
}

InnerView shifted_view(const ProblemInstance& problem, double lambda,
                       const Vec& center) {
  InnerView v;
  v.mu_eff = problem.mu + lambda;
  v.lip_eff = problem.lip_grad + lambda;
  v.sigma2 = problem.sigma2;
  if (lambda == 0.0) {
    v.stoch_grad = problem.stoch_grad;
  } else {
    v.stoch_grad = [sg = problem.stoch_grad, lambda, center](const Vec& x,
                                                             RngStream& rng) {
      return Vec(sg(x, rng) + lambda * (x - center));
    };
  }
  return v;
}

}  // namespace

OracleResult sgd_oracle(const ProblemInstance& problem, double delta,
                        double lambda, double delta_init, const Vec& center,
                        RngStream rng) {
  return restarted(shifted_view(problem, lambda, center), delta, delta_init,
                   center, std::move(rng), /*accelerated=*/false, nullptr);
}

OracleResult sgd_oracle_traced(const ProblemInstance& problem, double delta,
                               double lambda, double delta_init, const Vec& center,
                               RngStream rng, std::vector<Vec>& epoch_points) {
  return restarted(shifted_view(problem, lambda, center), delta, delta_init,
                   center, std::move(rng), /*accelerated=*/false, &epoch_points);
}

OracleResult acc_sgd_oracle(const ProblemInstance& problem, double delta,
                            double lambda, double delta_init, const Vec& center,
                            RngStream rng) {
  return restarted(shifted_view(problem, lambda, center), delta, delta_init,
                   center, std::move(rng), /*accelerated=*/true, nullptr);
}

OracleResult prox_sgd_oracle(const CompositeProblem& problem, double delta,
                             double lambda, double delta_init, const Vec& center,
                             RngStream rng) {
  InnerView v = shifted_view(problem.smooth, lambda, center);
  v.mu_eff = problem.combined_mu + lambda;
  v.prox = problem.prox;
  Vec x0 = problem.prox(center, 1.0 / v.lip_eff);
  return restarted(v, delta, delta_init, std::move(x0), std::move(rng),
                   /*accelerated=*/false, nullptr);
}

MinimizationOracle make_sgd_oracle(const ProblemInstance& problem) {
  return [problem](double delta, double lambda, double delta_init,
                   const Vec& center, RngStream rng) {
    return sgd_oracle(problem, delta, lambda, delta_init, center, std::move(rng));
  };
}

MinimizationOracle make_acc_sgd_oracle(const ProblemInstance& problem) {
  return [problem](double delta, double lambda, double delta_init,
                   const Vec& center, RngStream rng) {
    return acc_sgd_oracle(problem, delta, lambda, delta_init, center,
                          std::move(rng));
  };
}

MinimizationOracle make_prox_sgd_oracle(const CompositeProblem& problem) {
  return [problem](double delta, double lambda, double delta_init,
                   const Vec& center, RngStream rng) {
    return prox_sgd_oracle(problem, delta, lambda, delta_init, center,
                           std::move(rng));
  };
}

Vec deterministic_solve(const SolveSpec& spec, Vec x0, double tol) {
  if (!(spec.mu > 0.0))
    throw std::invalid_argument("deterministic_solve: mu must be positive");
  if (!spec.grad) throw std::invalid_argument("deterministic_solve: grad required");
  double lip = std::max(spec.lip_hint, spec.mu);
  auto prox = [&](const Vec& v, double t) {
    return spec.prox ? spec.prox(v, t) : v;
  };

  Vec x = prox(x0, 1.0 / lip);
  Vec x_prev = x;
  for (int iter = 0; iter < spec.max_iter; ++iter) {
    const double q = std::sqrt(spec.mu / lip);
    const double beta = (1.0 - q) / (1.0 + q);
    Vec y = x + beta * (x - x_prev);
    Vec gy = spec.grad(y);
    Vec x_next;
    for (;;) {
      const double step = 1.0 / lip;
      x_next = prox(y - step * gy, step);
      if (!spec.value) break;  // trust lip_hint when no value is available
      const double lhs = spec.value(x_next);
      const double rhs = spec.value(y) + gy.dot(x_next - y) +
                         0.5 * lip * (x_next - y).squaredNorm();
      if (lhs <= rhs + 1e-14 * (std::abs(rhs) + 1.0)) break;
      lip *= 2.0;
      if (lip > 1e18) throw std::runtime_error("deterministic_solve: step collapse");
    }
    // Gradient-based momentum restart.
    if ((y - x_next).dot(x_next - x) > 0.0) {
      x_prev = x_next;
    } else {
      x_prev = x;
    }
    x = std::move(x_next);

    const double step = 1.0 / lip;
    const Vec mapped = prox(x - step * spec.grad(x), step);
    if ((x - mapped).norm() * lip <= tol) return x;
  }
  throw std::runtime_error("deterministic_solve: no convergence within max_iter");
}

}  // namespace proxboost
