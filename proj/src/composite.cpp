#include "proxboost/composite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "proxboost/oracles.hpp"

namespace proxboost {

MoreauPoint moreau_envelope_scalar(ScalarFn fn, double nu, double t) {
  if (!(nu > 0.0))
    throw std::invalid_argument("moreau_envelope_scalar: nu must be positive");
  switch (fn) {
    case ScalarFn::abs:
      if (std::abs(t) <= nu) return {t * t / (2.0 * nu), t / nu};
      return {std::abs(t) - nu / 2.0, t > 0.0 ? 1.0 : -1.0};
    case ScalarFn::hinge:  // max(0, t)
      if (t <= 0.0) return {0.0, 0.0};
      if (t <= nu) return {t * t / (2.0 * nu), t / nu};
      return {t - nu / 2.0, 1.0};
  }
  throw std::invalid_argument("moreau_envelope_scalar: unsupported function");
}

SmoothedLoss make_smoothed_loss(ScalarFn fn, double nu) {
  SmoothedLoss s;
  s.nu = nu;
  s.lip = 1.0;  // both |t| and max(0,t) are 1-Lipschitz
  s.lip_grad = 1.0 / nu;
  s.original = fn == ScalarFn::abs
                   ? std::function<double(double)>([](double t) { return std::abs(t); })
                   : std::function<double(double)>([](double t) { return std::max(0.0, t); });
  s.value = [fn, nu](double t) { return moreau_envelope_scalar(fn, nu, t).value; };
  s.derivative = [fn, nu](double t) {
    return moreau_envelope_scalar(fn, nu, t).derivative;
  };
  return s;
}

Pseudometric bregman_pseudometric(const CompositeProblem& problem,
                                  Vec grad_estimate) {
  return Pseudometric::linearized_bregman(problem.nonsmooth_value,
                                          std::move(grad_estimate));
}

RobustGapSelection robust_gap_select(
    const std::vector<Vec>& points,
    const std::function<Vec(const Vec&)>& gradient_estimator,
    const std::function<double(const Vec&)>& h_value) {
  RobustGapSelection sel;
  sel.first_pass = extract(points, Pseudometric::euclidean());
  sel.hat_index = *std::min_element(sel.first_pass.begin(), sel.first_pass.end());
  const Vec grad_estimate = gradient_estimator(points[sel.hat_index]);
  sel.second_pass = extract(
      points, Pseudometric::linearized_bregman(h_value, grad_estimate));

  std::vector<std::size_t> both;
  std::set_intersection(sel.first_pass.begin(), sel.first_pass.end(),
                        sel.second_pass.begin(), sel.second_pass.end(),
                        std::back_inserter(both));
  if (both.empty())
    throw std::logic_error("robust_gap: empty intersection (m must be odd)");
  sel.chosen = both.front();
  return sel;
}

RobustGapResult robust_gap(const GapOracle& oracle, int m, double eps,
                           const CompositeProblem& problem, RngStream rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("robust_gap: eps must be positive");
  if (m < 1) throw std::invalid_argument("robust_gap: m must be >= 1");
  if (m % 2 == 0) ++m;  // odd trial counts make the two extracts intersect

  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(m));
  long long oracle_samples = 0;
  for (int q = 0; q < m; ++q) {
    OracleResult r = oracle(eps, rng.child(static_cast<std::uint64_t>(q)));
    oracle_samples += r.samples;
    points.push_back(std::move(r.point));
  }

  const double mu = problem.combined_mu;
  const double kappa = problem.smooth.lip_grad / mu;
  const double grad_accuracy = kappa * std::sqrt(mu * eps);
  long long gradient_samples = 0;
  RngStream grad_rng = rng.child(static_cast<std::uint64_t>(m));
  auto estimator = [&](const Vec& x_hat) {
    RobustGradient g = robust_gradient(problem.smooth, x_hat, grad_accuracy, m,
                                       std::move(grad_rng));
    gradient_samples = g.samples;
    return g.gradient;
  };
  RobustGapSelection sel =
      robust_gap_select(points, estimator, problem.nonsmooth_value);
  return {points[sel.chosen], oracle_samples, gradient_samples, m};
}

CompositeProblem shift_composite(const CompositeProblem& problem, double lambda,
                                 const Vec& center) {
  CompositeProblem shifted;
  const ProblemInstance base = problem.smooth;
  shifted.smooth.dim = base.dim;
  shifted.smooth.mu = base.mu + lambda;
  shifted.smooth.lip_grad = base.lip_grad + lambda;
  shifted.smooth.sigma2 = base.sigma2;
  shifted.smooth.value = [base, lambda, center](const Vec& x) {
    return base.value(x) + 0.5 * lambda * (x - center).squaredNorm();
  };
  shifted.smooth.grad = [base, lambda, center](const Vec& x) {
    return Vec(base.grad(x) + lambda * (x - center));
  };
  shifted.smooth.stoch_grad = [base, lambda, center](const Vec& x, RngStream& rng) {
    return Vec(base.stoch_grad(x, rng) + lambda * (x - center));
  };
  shifted.nonsmooth_value = problem.nonsmooth_value;
  shifted.prox = problem.prox;
  shifted.combined_mu = problem.combined_mu + lambda;
  return shifted;
}

Vec CompositeErmProblem::stoch_grad(const Vec& x, RngStream& rng) const {
  const long long z = static_cast<long long>(
      rng.next_below(static_cast<std::uint64_t>(population->size())));
  const double r = population->rows.row(z).dot(x) - population->offsets[z];
  return r * population->rows.row(z).transpose() + population->ridge * x;
}

double CompositeErmProblem::value(const Vec& x) const {
  return population->population_value(x) + h(x);
}

CompositeProblem CompositeErmProblem::as_composite() const {
  CompositeProblem c;
  c.smooth.dim = dim;
  c.smooth.mu = combined_mu;
  c.smooth.lip_grad = lip_grad;
  c.smooth.sigma2 = 4.0 * lbar * lbar;
  auto pop = population;
  c.smooth.value = [pop](const Vec& x) { return pop->population_value(x); };
  c.smooth.grad = [pop](const Vec& x) { return pop->population_grad(x); };
  c.smooth.stoch_grad = [pop](const Vec& x, RngStream& rng) {
    const long long z = static_cast<long long>(
        rng.next_below(static_cast<std::uint64_t>(pop->size())));
    const double r = pop->rows.row(z).dot(x) - pop->offsets[z];
    return Vec(r * pop->rows.row(z).transpose() + pop->ridge * x);
  };
  c.nonsmooth_value = h;
  c.prox = prox;
  c.combined_mu = combined_mu;
  c.ground_truth = ground_truth;
  return c;
}

CompositeErmProblem make_composite_erm(int dim, long long n_pop, double mu,
                                       double lip_hat, double radius,
                                       std::uint64_t seed) {
  ErmProblem base = make_nonneg_erm(dim, n_pop, mu, lip_hat, seed);
  CompositeErmProblem out;
  out.dim = dim;
  out.combined_mu = mu;
  out.lip_grad = base.lip_grad;
  out.population = base.population;

  const Vec& unconstrained = base.ground_truth.minimizer;
  if (!(radius > 0.0)) radius = 0.5 * unconstrained.norm();
  if (!(unconstrained.norm() > radius))
    throw std::invalid_argument("make_composite_erm: constraint is inactive");
  out.h = [radius](const Vec& x) {
    return x.norm() <= radius * (1.0 + 1e-9)
               ? 0.0
               : std::numeric_limits<double>::infinity();
  };
  out.prox = [radius](const Vec& x, double) {
    const double n = x.norm();
    return n <= radius ? x : Vec(x * (radius / n));
  };

  // Lipschitz moment of the per-sample losses over a neighborhood of dom h.
  const double reach = 1.05 * radius;
  double moment = 0.0;
  for (long long z = 0; z < base.population->size(); ++z) {
    const double an = base.population->rows.row(z).norm();
    const double lz =
        an * (an * reach + std::abs(base.population->offsets[z])) + mu * reach;
    moment += lz * lz;
  }
  out.lbar = std::sqrt(moment / static_cast<double>(base.population->size()));

  // Exact constrained ground truth through the population eigenbasis.
  Mat reg = base.population->hessian;
  reg.diagonal().array() += mu;
  Eigen::SelfAdjointEigenSolver<Mat> es(reg);
  const Vec xbar = [&] {
    const Mat vecs = es.eigenvectors();
    const Vec bt = vecs.transpose() * base.population->cross;
    Vec interior = bt.array() / es.eigenvalues().array();
    if ((vecs * interior).norm() <= radius) return Vec(vecs * interior);
    double lo = 0.0, hi = bt.norm() / radius;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double nrm =
          std::sqrt((bt.array() / (es.eigenvalues().array() + mid)).square().sum());
      (nrm > radius ? lo : hi) = mid;
    }
    const double nu = 0.5 * (lo + hi);
    Vec x = vecs * Vec(bt.array() / (es.eigenvalues().array() + nu));
    return Vec(x * (radius / x.norm()));
  }();
  out.ground_truth.minimizer = xbar;
  out.ground_truth.min_value = base.population->population_value(xbar);
  out.ground_truth.grad_at_min = base.population->population_grad(xbar);
  return out;
}

Vec composite_erm(const CompositeErmProblem& problem, long long n, double lambda,
                  const Vec& center, RngStream rng) {
  if (n < 1) throw std::invalid_argument("composite_erm: n must be >= 1");
  std::vector<long long> counts(
      static_cast<std::size_t>(problem.population->size()), 0);
  for (long long k = 0; k < n; ++k)
    ++counts[rng.next_below(static_cast<std::uint64_t>(problem.population->size()))];

  const auto& pop = *problem.population;
  const int d = problem.dim;
  Mat hmat = Mat::Zero(d, d);
  Vec c = Vec::Zero(d);
  for (long long z = 0; z < pop.size(); ++z) {
    const long long cnt = counts[static_cast<std::size_t>(z)];
    if (cnt == 0) continue;
    const double w = static_cast<double>(cnt) / static_cast<double>(n);
    hmat.selfadjointView<Eigen::Lower>().rankUpdate(pop.rows.row(z).transpose(), w);
    c += (w * pop.offsets[z]) * pop.rows.row(z).transpose();
  }
  hmat = hmat.selfadjointView<Eigen::Lower>();

  SolveSpec spec;
  const double reg = pop.ridge + lambda;
  spec.value = [&hmat, &c, reg, lambda, &center](const Vec& x) {
    return 0.5 * x.dot(hmat * x) - c.dot(x) + 0.5 * reg * x.squaredNorm() -
           lambda * center.dot(x);
  };
  spec.grad = [&hmat, &c, reg, lambda, &center](const Vec& x) {
    return Vec(hmat * x - c + reg * x - lambda * center);
  };
  spec.prox = problem.prox;
  spec.mu = reg;
  spec.lip_hint = hmat.diagonal().sum() + reg;  // trace bounds the top eigenvalue
  const double tol = 1e-10 * reg * (1.0 + center.norm());
  return deterministic_solve(spec, problem.prox(center, 1.0), tol);
}

BoostResult boost_ermc(const CompositeErmProblem& problem, double delta, int t,
                       int m, RngStream rng) {
  if (!(problem.lbar > 0.0))
    throw std::invalid_argument("boost_ermc: Lipschitz moment lbar required");
  if (!(delta > 0.0)) throw std::invalid_argument("boost_ermc: delta must be positive");
  if (m % 2 == 0) ++m;
  const double mu = problem.combined_mu;
  const double lip = problem.lip_grad;
  const double l2 = problem.lbar * problem.lbar;

  Schedule schedule;
  schedule.num_stages = t;
  schedule.trials = m;
  schedule.mu = mu;
  schedule.p = std::exp(-m / 18.0);
  schedule.delta = delta;
  schedule.lambdas.resize(static_cast<std::size_t>(t) + 1);
  for (int i = 0; i <= t; ++i)
    schedule.lambdas[static_cast<std::size_t>(i)] = mu * std::ldexp(1.0, i);

  const Vec origin = Vec::Zero(problem.dim);
  StageEstimator estimator = [&](const StageRequest& req, RngStream stage_rng) {
    const Vec& center = req.stage == 0 ? origin : req.center;
    const double mu_eff = mu + req.lambda_prev;
    StagePoint out;
    if (!req.cleanup) {
      const long long n =
          static_cast<long long>(std::ceil(54.0 * l2 / (mu_eff * delta)));
      std::vector<Vec> replicas;
      replicas.reserve(static_cast<std::size_t>(m));
      for (int q = 0; q < m; ++q)
        replicas.push_back(composite_erm(problem, n, req.lambda_prev, center,
                                         stage_rng.child(static_cast<std::uint64_t>(q))));
      RobustSelection sel = robust_select(replicas, Pseudometric::euclidean());
      out.point = std::move(sel.point);
      out.samples = static_cast<long long>(m) * n;
      return out;
    }
    // Cleanup: fixed-size regularized ERM as the gap oracle, boosted by
    // robust_gap on the final subproblem.
    const double eps = ermc_cleanup_accuracy(delta, mu, lip, req.lambda_prev);
    const long long n_cl =
        static_cast<long long>(std::ceil(6.0 * l2 / (mu_eff * delta)));
    GapOracle oracle = [&](double, RngStream orng) {
      return OracleResult{
          composite_erm(problem, n_cl, req.lambda_prev, center, std::move(orng)),
          n_cl};
    };
    CompositeProblem sub = shift_composite(problem.as_composite(), req.lambda_prev,
                                           center);
    RobustGapResult r = robust_gap(oracle, m, eps, sub, std::move(stage_rng));
    out.point = std::move(r.point);
    out.samples = r.oracle_samples + r.gradient_samples;
    return out;
  };
  return prox_boost(estimator, schedule, std::move(rng));
}

ErmcParams ermc_geometric_params(double kappa, double eps, double p) {
  if (!(eps > 0.0) || !(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("ermc_geometric_params: invalid parameters");
  ErmcParams out;
  out.stages = std::max(0, static_cast<int>(std::ceil(std::log2(kappa))));
  out.trials =
      static_cast<int>(std::ceil(18.0 * std::log((out.stages + 3.0) / p)));
  out.delta = eps / (4.0 + 2.0 * out.stages);
  return out;
}

double SmoothedRegression::original_value(const Vec& x) const {
  double total = 0.0;
  for (long long z = 0; z < rows.rows(); ++z)
    total += std::abs(rows.row(z).dot(x) - offsets[z]);
  return total / static_cast<double>(rows.rows()) + 0.5 * mu * x.squaredNorm();
}

SmoothedRegression make_smoothed_regression(int dim, long long n_pop, double mu,
                                            double nu, std::uint64_t seed) {
  if (dim < 1 || n_pop < dim)
    throw std::invalid_argument("make_smoothed_regression: population too small");
  if (!(mu > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("make_smoothed_regression: need mu, nu > 0");
  RngStream rng = derive_rng(seed, {0x74ull});
  SmoothedRegression out;
  out.mu = mu;
  out.nu = nu;
  out.loss = make_smoothed_loss(ScalarFn::abs, nu);
  out.rows.resize(n_pop, dim);
  out.offsets.resize(n_pop);
  Vec plant(dim);
  for (int i = 0; i < dim; ++i) plant[i] = rng.next_gaussian();
  for (long long z = 0; z < n_pop; ++z) {
    for (int i = 0; i < dim; ++i) out.rows(z, i) = rng.next_gaussian();
    out.offsets[z] = out.rows.row(z).dot(plant) + 0.5 * rng.next_student_t(3.0);
  }

  const auto rows = std::make_shared<Mat>(out.rows);
  const auto offsets = std::make_shared<Vec>(out.offsets);
  const SmoothedLoss loss = out.loss;
  auto value = [rows, offsets, loss, mu](const Vec& x) {
    double total = 0.0;
    for (long long z = 0; z < rows->rows(); ++z)
      total += loss.value(rows->row(z).dot(x) - (*offsets)[z]);
    return total / static_cast<double>(rows->rows()) + 0.5 * mu * x.squaredNorm();
  };
  auto grad = [rows, offsets, loss, mu](const Vec& x) {
    Vec g = mu * x;
    for (long long z = 0; z < rows->rows(); ++z)
      g += (loss.derivative(rows->row(z).dot(x) - (*offsets)[z]) /
            static_cast<double>(rows->rows())) *
           rows->row(z).transpose();
    return g;
  };

  ProblemInstance& inst = out.instance;
  inst.dim = dim;
  inst.mu = mu;
  // Upper bounds: the envelope curvature is at most 1/nu per sample.
  const Mat second_moment = out.rows.transpose() * out.rows /
                            static_cast<double>(n_pop);
  Eigen::SelfAdjointEigenSolver<Mat> es(second_moment);
  inst.lip_grad = es.eigenvalues().maxCoeff() / nu + mu;
  const double max_norm = std::sqrt(out.rows.rowwise().squaredNorm().maxCoeff());
  const double mean_norm = out.rows.rowwise().norm().mean();
  inst.sigma2 = (max_norm + mean_norm) * (max_norm + mean_norm);
  inst.value = value;
  inst.grad = grad;
  inst.stoch_grad = [rows, offsets, loss, mu](const Vec& x, RngStream& r) {
    const long long z = static_cast<long long>(
        r.next_below(static_cast<std::uint64_t>(rows->rows())));
    return Vec(loss.derivative(rows->row(z).dot(x) - (*offsets)[z]) *
                   rows->row(z).transpose() +
               mu * x);
  };

  SolveSpec spec;
  spec.value = value;
  spec.grad = grad;
  spec.mu = mu;
  spec.lip_hint = inst.lip_grad;
  spec.max_iter = 200000;
  const Vec xbar = deterministic_solve(spec, plant, 1e-12 * mu * (1.0 + plant.norm()));
  inst.ground_truth = GroundTruth{xbar, value(xbar)};
  return out;
}

BoostResult boost_algc(const CompositeProblem& problem,
                       const MinimizationOracle& alg, double delta,
                       double delta_in, const Vec& x_in, const Schedule& schedule_in,
                       RngStream rng) {
  if (!(delta_in > 0.0))
    throw std::invalid_argument("boost_algc: delta_in must be positive");
  Schedule schedule = schedule_in;
  if (schedule.trials % 2 == 0) ++schedule.trials;
  schedule.validate();
  const double mu = problem.combined_mu;
  const double lip = problem.smooth.lip_grad;
  const int m = schedule.trials;

  // Delta_j = delta (9 (L+lambda_{j-1})/(mu+lambda_{j-1}) + sum_{i<j} ...)
  auto delta_bound = [&](int j) {
    double sum = 0.0;
    for (int i = 0; i < j; ++i)
      sum += schedule.lambda_at(i) / (mu + schedule.lambda_at(i - 1));
    return delta * (9.0 * (lip + schedule.lambda_at(j - 1)) /
                        (mu + schedule.lambda_at(j - 1)) +
                    sum);
  };

  StageEstimator estimator = [&, x_in, delta_in](const StageRequest& req,
                                                 RngStream stage_rng) {
    const Vec& center = req.stage == 0 ? x_in : req.center;
    const double init_bound =
        req.stage == 0 ? delta_in : delta_bound(req.stage - 1);
    double accuracy = delta / 9.0;
    if (req.cleanup)
      accuracy = algc_cleanup_accuracy(delta, mu, lip,
                                       schedule.lambda_at(schedule.num_stages));
    GapOracle oracle = [&](double eps, RngStream orng) {
      return alg(eps, req.lambda_prev, init_bound, center, std::move(orng));
    };
    CompositeProblem sub = shift_composite(problem, req.lambda_prev, center);
    RobustGapResult r =
        robust_gap(oracle, m, accuracy, sub, std::move(stage_rng));
    StagePoint out;
    out.point = std::move(r.point);
    out.samples = r.oracle_samples + r.gradient_samples;
    out.init_bound = init_bound;
    return out;
  };
  return prox_boost(estimator, schedule, std::move(rng));
}

}  // namespace proxboost
