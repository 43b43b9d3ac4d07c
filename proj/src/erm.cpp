#include "proxboost/erm.hpp"

#include <cmath>
#include <stdexcept>

#include "proxboost/oracles.hpp"
#include "proxboost/robust.hpp"

namespace proxboost {

namespace {

std::vector<long long> draw_counts(const ErmProblem& problem, long long n,
                                   RngStream& rng) {
  std::vector<long long> counts(
      static_cast<std::size_t>(problem.population->size()), 0);
  for (long long k = 0; k < n; ++k)
    ++counts[static_cast<std::size_t>(problem.draw(rng))];
  return counts;
}

Vec solve_iterative(const ErmProblem& problem,
                    const std::vector<long long>& counts, long long n,
                    double lambda, const Vec& center) {
  const auto& pop = *problem.population;
  const int d = problem.dim;
  Mat h = Mat::Zero(d, d);
  Vec c = Vec::Zero(d);
  for (long long z = 0; z < pop.size(); ++z) {
    const long long cnt = counts[static_cast<std::size_t>(z)];
    if (cnt == 0) continue;
    const double w = static_cast<double>(cnt) / static_cast<double>(n);
    h.selfadjointView<Eigen::Lower>().rankUpdate(pop.rows.row(z).transpose(), w);
    c += (w * pop.offsets[z]) * pop.rows.row(z).transpose();
  }
  h = h.selfadjointView<Eigen::Lower>();

  SolveSpec spec;
  const double reg = pop.ridge + lambda;
  spec.value = [&h, &c, reg, lambda, &center](const Vec& x) {
    return 0.5 * x.dot(h * x) - c.dot(x) + 0.5 * reg * x.squaredNorm() -
           lambda * center.dot(x);
  };
  spec.grad = [&h, &c, reg, lambda, &center](const Vec& x) {
    return Vec(h * x - c + reg * x - lambda * center);
  };
  spec.mu = reg;
  spec.lip_hint = problem.lip_hat + lambda;
  const double tol = 1e-10 * (pop.ridge + lambda) * (1.0 + center.norm());
  return deterministic_solve(spec, center, tol);
}

}  // namespace

Vec erm(const ErmProblem& problem, long long n, double lambda, const Vec& center,
        RngStream rng, ErmSolver solver) {
  if (n < 1) throw std::invalid_argument("erm: n must be >= 1");
  const std::vector<long long> counts = draw_counts(problem, n, rng);
  if (solver == ErmSolver::iterative)
    return solve_iterative(problem, counts, n, lambda, center);
  return problem.population->empirical_minimizer(counts, n, lambda, center);
}

OracleResult erm_r(const ErmProblem& problem, long long n, int m, double lambda,
                   const Vec& center, RngStream rng) {
  if (m < 1) throw std::invalid_argument("erm_r: m must be >= 1");
  std::vector<Vec> replicas;
  replicas.reserve(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q)
    replicas.push_back(
        erm(problem, n, lambda, center, rng.child(static_cast<std::uint64_t>(q))));
  RobustSelection sel = robust_select(replicas, Pseudometric::euclidean());
  return {std::move(sel.point), static_cast<long long>(m) * n};
}

long long sample_count(double gamma, int j, double mu, double lip_hat,
                       std::span<const double> lambdas, long long n_min) {
  if (!(gamma > 0.0)) throw std::invalid_argument("sample_count: gamma must be positive");
  if (j < 0)
    return static_cast<long long>(std::ceil(432.0 * lip_hat / (gamma * mu)));
  auto lam = [&](int i) {
    return i < 0 ? 0.0 : lambdas[static_cast<std::size_t>(i)];
  };
  double sum = 1.0 / gamma;
  for (int i = 0; i <= j; ++i) sum += lam(i) / (mu + lam(i - 1));
  const double ratio = (lip_hat + lam(j)) / (mu + lam(j));
  const long long n = 432 * static_cast<long long>(std::ceil(ratio * sum));
  return std::max(n, n_min);
}

ErmParams erm_geometric_params(double kappa, double gamma_prime, double p) {
  if (!(gamma_prime > 0.0) || !(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("erm_geometric_params: invalid parameters");
  ErmParams out;
  out.stages = std::max(0, static_cast<int>(std::ceil(std::log2(kappa))));
  out.trials =
      static_cast<int>(std::ceil(18.0 * std::log((out.stages + 2.0) / p)));
  out.gamma = gamma_prime / (2.0 + 2.0 * out.stages);
  return out;
}

namespace {

struct ErmPlan {
  std::vector<double> lambdas;       // lambda_0 .. lambda_T
  std::vector<long long> counts;     // n_{-1} .. n_T
  long long final_count = 0;         // ceil((L+lambda_T)/(mu+lambda_T) n_T)
};

ErmPlan erm_plan(const ErmProblem& problem, double gamma, int t) {
  ErmPlan plan;
  plan.lambdas.resize(static_cast<std::size_t>(t) + 1);
  for (int i = 0; i <= t; ++i)
    plan.lambdas[static_cast<std::size_t>(i)] = problem.mu * std::ldexp(1.0, i);
  plan.counts.resize(static_cast<std::size_t>(t) + 2);
  for (int j = -1; j <= t; ++j)
    plan.counts[static_cast<std::size_t>(j + 1)] =
        sample_count(gamma, j, problem.mu, problem.lip_hat, plan.lambdas,
                     problem.n_min);
  const double lambda_t = plan.lambdas.back();
  plan.final_count = static_cast<long long>(
      std::ceil((problem.lip_grad + lambda_t) / (problem.mu + lambda_t) *
                static_cast<double>(plan.counts.back())));
  return plan;
}

}  // namespace

BoostResult boost_erm(const ErmProblem& problem, double gamma, int t, int m,
                      RngStream rng) {
  if (!(gamma > 0.0)) throw std::invalid_argument("boost_erm: gamma must be positive");
  if (!(problem.ground_truth.min_value > 0.0))
    throw std::invalid_argument("boost_erm: fstar must be positive");
  if (t < 0 || m < 1) throw std::invalid_argument("boost_erm: invalid T or m");

  const ErmPlan plan = erm_plan(problem, gamma, t);
  Schedule schedule;
  schedule.lambdas = plan.lambdas;
  schedule.num_stages = t;
  schedule.trials = m;
  schedule.mu = problem.mu;
  schedule.p = std::exp(-m / 18.0);
  schedule.delta = gamma * problem.ground_truth.min_value;  // trace radii only

  const Vec origin = Vec::Zero(problem.dim);
  StageEstimator estimator = [&](const StageRequest& req, RngStream stage_rng) {
    const Vec& center = req.stage == 0 ? origin : req.center;
    const long long n = req.cleanup
                            ? plan.final_count
                            : plan.counts[static_cast<std::size_t>(req.stage)];
    OracleResult r =
        erm_r(problem, n, m, req.lambda_prev, center, std::move(stage_rng));
    return StagePoint{std::move(r.point), r.samples, std::nullopt};
  };
  return prox_boost(estimator, schedule, std::move(rng));
}

long long boost_erm_predicted_samples(const ErmProblem& problem, double gamma,
                                      int t, int m) {
  const ErmPlan plan = erm_plan(problem, gamma, t);
  long long total = 0;
  // Stages 0..T consume n_{-1}..n_{T-1}; n_T enters only through the final
  // rescaled call.
  for (std::size_t j = 0; j + 1 < plan.counts.size(); ++j)
    total += m * plan.counts[j];
  total += m * plan.final_count;
  return total;
}

}  // namespace proxboost
