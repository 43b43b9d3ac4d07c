#include "proxboost/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "proxboost/robust.hpp"

namespace proxboost {

double epsilon_schedule(double delta, double mu, double lambda_j) {
  if (!(delta >= 0.0) || !(mu > 0.0) || lambda_j < 0.0)
    throw std::invalid_argument("epsilon_schedule: invalid parameters");
  return std::sqrt(2.0 * delta / (mu + lambda_j));
}

Schedule geometric_schedule(double mu, double lip_grad, double eps_target,
                            double p, ScheduleVariant variant) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("geometric_schedule: p must lie in (0,1)");
  if (!(mu > 0.0) || lip_grad < mu)
    throw std::invalid_argument("geometric_schedule: need lip_grad >= mu > 0");
  if (!(eps_target > 0.0))
    throw std::invalid_argument("geometric_schedule: eps_target must be positive");
  const double kappa = lip_grad / mu;
  const int t = std::max(0, static_cast<int>(std::ceil(std::log2(kappa))));
  Schedule s;
  s.num_stages = t;
  s.mu = mu;
  s.p = p;
  s.delta = eps_target / (2.0 + 2.0 * t);
  const double count =
      variant == ScheduleVariant::streaming ? 2.0 + t : 4.0 + 2.0 * t;
  s.trials = static_cast<int>(std::ceil(18.0 * std::log(count / p)));
  s.lambdas.resize(static_cast<std::size_t>(t) + 1);
  for (int i = 0; i <= t; ++i)
    s.lambdas[static_cast<std::size_t>(i)] = mu * std::ldexp(1.0, i);
  s.validate();
  return s;
}

BoostResult prox_boost(const StageEstimator& estimator, const Schedule& schedule,
                       RngStream rng) {
  schedule.validate();
  const int t = schedule.num_stages;
  StageTrace trace;
  trace.centers.reserve(static_cast<std::size_t>(t) + 2);
  Vec current;

  for (int j = 0; j <= t + 1; ++j) {
    StageRequest req;
    req.stage = j;
    req.cleanup = (j == t + 1);
    // Stage j works on f + lambda/2 ||. - center||^2: lambda_{j-1} for the
    // proximal stages, lambda_T for the cleanup pass on the final subproblem.
    const double lambda = req.cleanup ? schedule.lambda_at(t) : schedule.lambda_at(j - 1);
    req.lambda_prev = lambda;
    req.center = current;  // empty for stage 0
    req.radius_target = epsilon_schedule(schedule.delta, schedule.mu, lambda);
    if (req.cleanup) req.cleanup_gap = schedule.delta;

    StagePoint stage;
    try {
      stage = estimator(req, rng.child(static_cast<std::uint64_t>(j)));
    } catch (const std::exception& e) {
      throw std::runtime_error("prox_boost stage " + std::to_string(j) + ": " +
                               e.what());
    }
    current = stage.point;
    trace.centers.push_back(current);
    trace.samples.push_back(stage.samples);
    trace.radii.push_back(req.radius_target);
    trace.amplitudes.push_back(lambda);
    if (stage.init_bound) trace.init_bounds.push_back(*stage.init_bound);
  }
  return {current, std::move(trace)};
}

DecompositionReport verify_error_decomposition(const StageTrace& trace,
                                               const QuadraticProblem& problem) {
  const int total = static_cast<int>(trace.centers.size());
  if (total < 2 || trace.amplitudes.size() != trace.centers.size())
    throw std::invalid_argument("verify_error_decomposition: malformed trace");
  if (!problem.instance.ground_truth)
    throw std::invalid_argument("verify_error_decomposition: ground truth required");
  const double fstar = problem.min_value;
  const double lip = problem.instance.lip_grad;
  const int t = total - 2;

  // amplitudes[k] is the lambda used by stage k, i.e. lambda_{k-1};
  // the cleanup entry repeats lambda_T.
  auto lambda_of = [&](int j) {  // lambda_j for j in [-1, T]
    return j < 0 ? 0.0 : trace.amplitudes[static_cast<std::size_t>(j) + 1];
  };
  auto center = [&](int j) -> const Vec& {
    return trace.centers[static_cast<std::size_t>(j)];
  };

  // xbar_0 = argmin f, xbar_{j+1} = argmin f^j.
  std::vector<Vec> prox_min(static_cast<std::size_t>(total));
  prox_min[0] = problem.minimizer;
  for (int j = 0; j <= t; ++j)
    prox_min[static_cast<std::size_t>(j) + 1] =
        problem.prox_minimizer(lambda_of(j), center(j));

  std::vector<double> dist2(static_cast<std::size_t>(total));
  for (int j = 0; j < total; ++j)
    dist2[static_cast<std::size_t>(j)] =
        (prox_min[static_cast<std::size_t>(j)] - center(j)).squaredNorm();

  auto f_reg = [&](int j, const Vec& x) {  // f^j(x)
    return problem.instance.value(x) +
           0.5 * lambda_of(j) * (x - center(j)).squaredNorm();
  };

  DecompositionReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  auto note = [&](std::vector<double>& dst, double slack) {
    dst.push_back(slack);
    report.min_slack = std::min(report.min_slack, slack);
  };

  double drift = 0.0;  // sum_{i<=j} lambda_i/2 ||xbar_i - x_i||^2
  for (int j = 0; j <= t; ++j) {
    // Smooth estimate for x_j uses the drift strictly before stage j.
    note(report.smooth_slack,
         0.5 * (lip + lambda_of(j - 1)) * dist2[static_cast<std::size_t>(j)] +
             drift - (problem.instance.value(center(j)) - fstar));
    drift += 0.5 * lambda_of(j) * dist2[static_cast<std::size_t>(j)];

    const Vec& xbar_next = prox_min[static_cast<std::size_t>(j) + 1];
    const Vec& x_next = center(j + 1);
    note(report.prox_value_slack, drift - (f_reg(j, xbar_next) - fstar));
    note(report.progress_slack,
         (f_reg(j, x_next) - f_reg(j, xbar_next)) + drift -
             (problem.instance.value(x_next) - fstar));
  }
  // Final smooth estimate for x_{T+1}, with the full accumulated drift.
  note(report.smooth_slack,
       0.5 * (lip + lambda_of(t)) * dist2[static_cast<std::size_t>(t) + 1] +
           drift - (problem.instance.value(center(t + 1)) - fstar));
  return report;
}

OracleResult alg_r(const MinimizationOracle& alg, double delta, double lambda,
                   double delta_init, const Vec& center, int m, RngStream rng) {
  if (m < 1) throw std::invalid_argument("alg_r: m must be >= 1");
  std::vector<Vec> responses;
  responses.reserve(static_cast<std::size_t>(m));
  long long samples = 0;
  for (int q = 0; q < m; ++q) {
    OracleResult r =
        alg(delta, lambda, delta_init, center, rng.child(static_cast<std::uint64_t>(q)));
    samples += r.samples;
    responses.push_back(std::move(r.point));
  }
  RobustSelection sel = robust_select(responses, Pseudometric::euclidean());
  return {std::move(sel.point), samples};
}

BoostResult boost_alg(const MinimizationOracle& alg, double delta,
                      double delta_in, const Vec& x_in, const Schedule& schedule,
                      double lip_grad, RngStream rng) {
  if (!(delta_in > 0.0))
    throw std::invalid_argument("boost_alg: delta_in must be positive");
  schedule.validate();
  const double mu = schedule.mu;
  const int m = schedule.trials;

  // Delta_j = delta ((L+lambda_{j-1})/(mu+lambda_{j-1}) + sum_{i<j} lambda_i/(mu+lambda_{i-1}))
  auto delta_bound = [&](int j) {
    double sum = 0.0;
    for (int i = 0; i < j; ++i)
      sum += schedule.lambda_at(i) / (mu + schedule.lambda_at(i - 1));
    return delta *
           ((lip_grad + schedule.lambda_at(j - 1)) / (mu + schedule.lambda_at(j - 1)) +
            sum);
  };

  StageEstimator estimator = [&, x_in, delta_in](const StageRequest& req,
                                                 RngStream stage_rng) {
    const Vec& center = req.stage == 0 ? x_in : req.center;
    // Stage j consumes Delta_{j-1}; the cleanup stage consumes Delta_T.
    const double init_bound =
        req.stage == 0 ? delta_in : delta_bound(req.stage - 1);
    double accuracy = delta / 9.0;
    if (req.cleanup) {
      const double lambda_t = schedule.lambda_at(schedule.num_stages);
      accuracy *= (mu + lambda_t) / (lip_grad + lambda_t);
    }
    OracleResult r = alg_r(alg, accuracy, req.lambda_prev, init_bound, center, m,
                           std::move(stage_rng));
    StagePoint out;
    out.point = std::move(r.point);
    out.samples = r.samples;
    out.init_bound = init_bound;
    return out;
  };
  return prox_boost(estimator, schedule, std::move(rng));
}

}  // namespace proxboost
