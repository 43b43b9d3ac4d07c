#include "proxboost/checks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "proxboost/composite.hpp"
#include "proxboost/engine.hpp"
#include "proxboost/harness.hpp"
#include "proxboost/oracles.hpp"
#include "proxboost/problems.hpp"
#include "proxboost/robust.hpp"

namespace proxboost::checks {

namespace {

std::string fail_detail(const std::string& what, double got, double bound) {
  std::ostringstream out;
  out << what << ": " << got << " vs bound " << bound;
  return out.str();
}

Vec random_unit(int dim, RngStream& rng) {
  Vec u(dim);
  for (int i = 0; i < dim; ++i) u[i] = rng.next_gaussian();
  const double n = u.norm();
  return n > 0.0 ? Vec(u / n) : Vec(Vec::Unit(dim, 0));
}

struct MetricFixture {
  Pseudometric rho;
  std::function<Vec(const Vec&, double, RngStream&)> plant;  // point with rho <= r
};

MetricFixture make_metric_fixture(int kind, int dim, RngStream& rng) {
  MetricFixture fx;
  if (kind == 0) {
    fx.rho = Pseudometric::euclidean();
    fx.plant = [](const Vec& center, double r, RngStream& prng) {
      Vec u = random_unit(static_cast<int>(center.size()), prng);
      return Vec(center + (r * prng.next_double()) * u);
    };
  } else if (kind == 1) {
    const double scale = 0.25 + 4.0 * rng.next_double();
    fx.rho = Pseudometric::scaled_euclidean(scale);
    fx.plant = [scale](const Vec& center, double r, RngStream& prng) {
      Vec u = random_unit(static_cast<int>(center.size()), prng);
      return Vec(center + (r / scale * prng.next_double()) * u);
    };
  } else {
    Vec weights(dim);
    for (int i = 0; i < dim; ++i) weights[i] = 0.2 + 2.0 * rng.next_double();
    Vec grad_est(dim);
    for (int i = 0; i < dim; ++i) grad_est[i] = rng.next_gaussian();
    auto h = [weights](const Vec& x) {
      return (weights.array() * x.array().abs()).sum();
    };
    fx.rho = Pseudometric::linearized_bregman(h, grad_est);
    auto rho = fx.rho;
    fx.plant = [rho](const Vec& center, double r, RngStream& prng) {
      Vec u = random_unit(static_cast<int>(center.size()), prng);
      double t = 1.0;
      Vec candidate = center + t * u;
      while (rho(candidate, center) > r * (1.0 - 1e-9)) {
        t *= 0.5;
        candidate = center + t * u;
        if (t < 1e-300) return center;
      }
      return candidate;
    };
  }
  return fx;
}

}  // namespace

CheckResult robust_selection_soundness(int instances, std::uint64_t seed) {
  CheckResult result{"robust-selection-soundness", true, ""};
  RngStream rng = RngStream::root(seed);
  const int m_choices[] = {3, 5, 7, 9};
  for (int inst = 0; inst < instances && result.passed; ++inst) {
    RngStream irng = rng.child(static_cast<std::uint64_t>(inst));
    const int dim = 1 + static_cast<int>(irng.next_below(3));
    const int m = m_choices[irng.next_below(4)];
    const double eps = std::pow(10.0, -2.0 + 3.0 * irng.next_double());
    for (int kind = 0; kind < 3 && result.passed; ++kind) {
      MetricFixture fx = make_metric_fixture(kind, dim, irng);
      Vec center(dim);
      for (int i = 0; i < dim; ++i) center[i] = 2.0 * irng.next_gaussian();

      const int majority = m / 2 + 1;
      const int planted = majority + static_cast<int>(irng.next_below(
                                         static_cast<std::uint64_t>(m - majority + 1)));
      std::vector<Vec> points;
      for (int k = 0; k < planted; ++k)
        points.push_back(fx.plant(center, eps, irng));
      while (static_cast<int>(points.size()) < m) {
        Vec far = center + (100.0 * eps * (1.0 + irng.next_double())) *
                               random_unit(dim, irng);
        points.push_back(far);
      }
      // Shuffle deterministically.
      for (std::size_t i = points.size(); i > 1; --i)
        std::swap(points[i - 1], points[irng.next_below(i)]);

      const RobustSelection sel = robust_select(points, fx.rho);
      const double tol = 3.0 * eps * (1.0 + 1e-9) + 1e-12;
      if (fx.rho(sel.point, center) > tol) {
        result.passed = false;
        result.detail = fail_detail("robust_select distance",
                                    fx.rho(sel.point, center), 3.0 * eps);
        break;
      }
      const std::vector<std::size_t> kept = extract(points, fx.rho);
      if (kept.size() < static_cast<std::size_t>((m + 1) / 2)) {
        result.passed = false;
        result.detail = "extract returned fewer than ceil(m/2) indices";
        break;
      }
      for (std::size_t idx : kept) {
        if (fx.rho(points[idx], center) > tol) {
          result.passed = false;
          result.detail = fail_detail("extract distance",
                                      fx.rho(points[idx], center), 3.0 * eps);
          break;
        }
      }
      // Brute-force oracle for the weak radius: smallest pairwise distance
      // achieving a strict majority.
      const std::size_t probe = irng.next_below(static_cast<std::uint64_t>(m));
      std::vector<double> row(points.size());
      for (std::size_t j = 0; j < points.size(); ++j)
        row[j] = fx.rho(points[probe], points[j]);
      double best = std::numeric_limits<double>::infinity();
      for (double candidate : row) {
        int covered = 0;
        for (double d : row)
          if (d <= candidate) ++covered;
        if (2 * covered > m) best = std::min(best, candidate);
      }
      const double wr = weak_radius(points, probe, fx.rho);
      if (std::abs(wr - best) > 1e-12 * (1.0 + best)) {
        result.passed = false;
        result.detail = fail_detail("weak_radius oracle mismatch", wr, best);
      }
    }
  }
  if (result.passed) result.detail = std::to_string(instances) + " instances";
  return result;
}

CheckResult decomposition_inequalities(int instances, std::uint64_t seed) {
  CheckResult result{"proximal-decomposition-inequalities", true, ""};
  RngStream rng = RngStream::root(seed);
  double min_slack = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < instances && result.passed; ++inst) {
    RngStream irng = rng.child(static_cast<std::uint64_t>(inst));
    const int dim = 1 + static_cast<int>(irng.next_below(10));
    const double mu = 0.5 + irng.next_double();
    const double kappa =
        dim == 1 ? 1.0 : std::pow(10.0, 3.0 * irng.next_double());
    const QuadraticProblem quad =
        make_quadratic(dim, mu, mu * kappa, 0.0, NoiseTail::gaussian, 2.5,
                       irng.next_u64());
    const int t = static_cast<int>(irng.next_below(7));

    StageTrace trace;
    trace.amplitudes.push_back(0.0);
    double lambda = mu * (0.5 + irng.next_double());
    for (int j = 0; j <= t; ++j) {
      trace.amplitudes.push_back(lambda);
      lambda *= 1.5 + irng.next_double();
    }
    for (int j = 0; j <= t + 1; ++j) {
      Vec x = quad.minimizer + (0.1 + 1.9 * irng.next_double()) *
                                   random_unit(dim, irng);
      trace.centers.push_back(std::move(x));
    }
    const DecompositionReport report = verify_error_decomposition(trace, quad);
    min_slack = std::min(min_slack, report.min_slack);
    if (!report.all_hold(1e-9)) {
      result.passed = false;
      result.detail = fail_detail("decomposition slack", report.min_slack, -1e-9);
    }
  }
  if (result.passed) {
    std::ostringstream out;
    out << instances << " instances, min slack " << min_slack;
    result.detail = out.str();
  }
  return result;
}

CheckResult schedule_arithmetic() {
  CheckResult result{"schedule-arithmetic", true, ""};
  const double mu = 1.0;
  const double eps = 1.0;
  const double p = 0.01;
  for (int k = 0; k <= 20 && result.passed; ++k) {
    const double kappa = std::ldexp(1.0, k);
    const Schedule s = geometric_schedule(mu, mu * kappa, eps, p);
    const int t = s.num_stages;
    if (t != k && !(k == 0 && t == 0)) {
      result.passed = false;
      result.detail = "unexpected stage count";
      break;
    }
    if (s.bound_factor() > 2.0 + 2.0 * t + 1e-12) {
      result.passed = false;
      result.detail = fail_detail("bound factor", s.bound_factor(), 2.0 + 2.0 * t);
      break;
    }
    const double lambda_t = s.lambda_at(t);
    const double final_cond = (mu * kappa + lambda_t) / (mu + lambda_t);
    if (final_cond > 2.0 + 1e-12) {
      result.passed = false;
      result.detail = fail_detail("final conditioning", final_cond, 2.0);
      break;
    }
    // Initialization-error cap under geometric decay.
    double max_delta = 0.0;
    for (int j = 0; j <= t; ++j) {
      double sum = 0.0;
      for (int i = 0; i < j; ++i)
        sum += s.lambda_at(i) / (mu + s.lambda_at(i - 1));
      const double delta_j =
          s.delta * ((mu * kappa + s.lambda_at(j - 1)) / (mu + s.lambda_at(j - 1)) +
                     sum);
      max_delta = std::max(max_delta, delta_j);
    }
    const double cap = (kappa + 1.0 + 2.0 * std::ceil(std::log2(kappa))) /
                       (2.0 + 2.0 * std::ceil(std::log2(kappa))) * eps;
    const double cap_k0 = k == 0 ? (kappa + 1.0) / 2.0 * eps : cap;
    if (max_delta > cap_k0 * (1.0 + 1e-12)) {
      result.passed = false;
      result.detail = fail_detail("initialization cap", max_delta, cap_k0);
      break;
    }
    // Exact oracle call count: m (T+2) with m = ceil(18 ln((T+2)/p)).
    const long long calls = static_cast<long long>(s.trials) * (t + 2);
    const long long expected =
        static_cast<long long>(std::ceil(18.0 * std::log((t + 2.0) / p))) *
        static_cast<long long>(t + 2);
    if (calls != expected) {
      result.passed = false;
      result.detail = "call count mismatch";
      break;
    }
  }
  if (result.passed) result.detail = "kappa in {2^0..2^20}";
  return result;
}

CheckResult robust_gap_fixtures(int instances, std::uint64_t seed) {
  CheckResult result{"robust-gap-fixtures", true, ""};
  RngStream rng = RngStream::root(seed);
  const int m_choices[] = {3, 5, 7, 9};
  for (int inst = 0; inst < instances && result.passed; ++inst) {
    RngStream irng = rng.child(static_cast<std::uint64_t>(inst));
    const int dim = 1 + static_cast<int>(irng.next_below(2));
    const double mu = 0.5 + irng.next_double();
    const double kappa = dim == 1 ? 1.0 : 1.0 + 19.0 * irng.next_double();
    ConstraintSpec spec;
    const int kind_pick = static_cast<int>(irng.next_below(3));
    spec.kind = kind_pick == 0   ? ConstraintKind::ball
                : kind_pick == 1 ? ConstraintKind::box
                                 : ConstraintKind::l1;
    spec.radius = 0.5 + irng.next_double();
    spec.lo = -0.5 - irng.next_double();
    spec.hi = 0.5 + irng.next_double();
    spec.weight = 0.5 + irng.next_double();
    const CompositeQuadratic comp =
        make_composite(dim, spec, mu, mu * kappa, 0.0, NoiseTail::gaussian, 2.5,
                       irng.next_u64());
    const auto& gt = *comp.problem.ground_truth;
    const double eps = std::pow(10.0, -3.0 + 2.0 * irng.next_double());
    const int m = m_choices[irng.next_below(4)];

    const int majority = m / 2 + 1;
    const int planted = majority + static_cast<int>(irng.next_below(
                                       static_cast<std::uint64_t>(m - majority + 1)));
    std::vector<Vec> points;
    for (int k = 0; k < planted; ++k) {
      double t = 1.0;
      Vec candidate = comp.problem.prox(gt.minimizer + t * random_unit(dim, irng), 1.0);
      while (true_gap(comp.problem, candidate) > eps * (1.0 - 1e-9)) {
        t *= 0.5;
        candidate = comp.problem.prox(gt.minimizer + t * random_unit(dim, irng), 1.0);
        if (t < 1e-300) {
          candidate = gt.minimizer;
          break;
        }
      }
      points.push_back(std::move(candidate));
    }
    while (static_cast<int>(points.size()) < m)
      points.push_back(comp.problem.prox(
          gt.minimizer + (5.0 + 20.0 * irng.next_double()) * random_unit(dim, irng),
          1.0));
    for (std::size_t i = points.size(); i > 1; --i)
      std::swap(points[i - 1], points[irng.next_below(i)]);

    // Controlled gradient error within the 3 kappa sqrt(mu eps) budget.
    const double grad_err = 3.0 * kappa * std::sqrt(mu * eps) * irng.next_double();
    Vec err_dir = random_unit(dim, irng);
    auto estimator = [&](const Vec& x_hat) {
      return Vec(comp.problem.smooth.grad(x_hat) + grad_err * err_dir);
    };
    const RobustGapSelection sel =
        robust_gap_select(points, estimator, comp.problem.nonsmooth_value);
    const Vec& chosen = points[sel.chosen];

    const double dist = (chosen - gt.minimizer).norm();
    const double dist_cap = 3.0 * std::sqrt(2.0 * eps / mu);
    const double breg = bregman_gap(comp.problem, chosen);
    const double breg_cap = 65.0 * kappa * eps;
    const double gap = true_gap(comp.problem, chosen);
    const double gap_cap = 74.0 * kappa * eps;
    const double slack = 1.0 + 1e-9;
    if (dist > dist_cap * slack) {
      result.passed = false;
      result.detail = fail_detail("distance", dist, dist_cap);
    } else if (breg > breg_cap * slack) {
      result.passed = false;
      result.detail = fail_detail("bregman gap", breg, breg_cap);
    } else if (gap > gap_cap * slack) {
      result.passed = false;
      result.detail = fail_detail("function gap", gap, gap_cap);
    }
  }
  if (result.passed) result.detail = std::to_string(instances) + " fixtures";
  return result;
}

CheckResult moreau_grid() {
  CheckResult result{"moreau-sandwich-derivative", true, ""};
  const double nus[] = {0.01, 0.1, 1.0};
  const double step = 1e-4;
  const int grid = 10000;
  for (const ScalarFn fn : {ScalarFn::abs, ScalarFn::hinge}) {
    for (const double nu : nus) {
      const SmoothedLoss loss = make_smoothed_loss(fn, nu);
      const double kinks[] = {0.0, nu, -nu};
      double max_violation = 0.0;
      double max_fd_err = 0.0;
      for (int k = 0; k < grid; ++k) {
        double t = -3.0 + 6.0 * (k + 0.5) / grid;
        // Sandwich on the raw grid point.
        const double gap_val = loss.original(t) - loss.value(t);
        max_violation = std::max(
            max_violation,
            std::max(-gap_val, gap_val - nu * loss.lip * loss.lip));
        // Central differences sample the smooth branches: nudge points that
        // straddle a kink of the piecewise form.
        for (double kink : kinks)
          if (std::abs(t - kink) < 5.0 * step) t = kink + 10.0 * step;
        const double fd = (loss.value(t + step) - loss.value(t - step)) /
                          (2.0 * step);
        max_fd_err = std::max(max_fd_err, std::abs(fd - loss.derivative(t)));
      }
      if (max_violation > 1e-12) {
        result.passed = false;
        result.detail = fail_detail("sandwich violation", max_violation, 0.0);
        return result;
      }
      if (max_fd_err > 1e-6) {
        result.passed = false;
        result.detail = fail_detail("derivative mismatch", max_fd_err, 1e-6);
        return result;
      }
    }
  }
  result.detail = "abs/hinge, nu in {0.01, 0.1, 1}";
  return result;
}

CheckResult pseudometric_properties(std::uint64_t seed) {
  CheckResult result{"pseudometric-axioms", true, ""};
  RngStream rng = RngStream::root(seed);
  for (int inst = 0; inst < 2000 && result.passed; ++inst) {
    RngStream irng = rng.child(static_cast<std::uint64_t>(inst));
    const int dim = 1 + static_cast<int>(irng.next_below(5));
    MetricFixture fx = make_metric_fixture(static_cast<int>(inst % 3), dim, irng);
    Vec x(dim), y(dim), z(dim);
    for (int i = 0; i < dim; ++i) {
      x[i] = 3.0 * irng.next_gaussian();
      y[i] = 3.0 * irng.next_gaussian();
      z[i] = 3.0 * irng.next_gaussian();
    }
    const double xy = fx.rho(x, y);
    if (fx.rho(x, x) != 0.0 || xy < 0.0 ||
        std::abs(xy - fx.rho(y, x)) > 1e-12 * (1.0 + xy) ||
        xy > fx.rho(x, z) + fx.rho(z, y) + 1e-12 * (1.0 + xy)) {
      result.passed = false;
      result.detail = "axiom violated";
    }
  }
  if (result.passed) result.detail = "2000 random triples";
  return result;
}

CheckResult rng_streams() {
  CheckResult result{"rng-streams", true, ""};
  const int n = 10000;
  RngStream a = derive_rng(42, {0});
  RngStream b = derive_rng(42, {1});
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double u = a.next_double();
    const double v = b.next_double();
    sa += u;
    sb += v;
    saa += u * u;
    sbb += v * v;
    sab += u * v;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double var_a = saa / n - (sa / n) * (sa / n);
  const double var_b = sbb / n - (sb / n) * (sb / n);
  const double corr = cov / std::sqrt(var_a * var_b);
  if (std::abs(corr) >= 0.05) {
    result.passed = false;
    result.detail = fail_detail("cross-path correlation", corr, 0.05);
    return result;
  }
  RngStream c1 = derive_rng(42, {3, 1});
  RngStream c2 = derive_rng(42, {3, 1});
  for (int i = 0; i < 1000; ++i) {
    if (c1.next_u64() != c2.next_u64()) {
      result.passed = false;
      result.detail = "replayed stream diverged";
      return result;
    }
  }
  RngStream d1 = derive_rng(42, {0});
  RngStream d2 = derive_rng(43, {0});
  bool differ = false;
  for (int i = 0; i < 16; ++i) differ |= d1.next_u64() != d2.next_u64();
  if (!differ) {
    result.passed = false;
    result.detail = "distinct seeds produced equal draws";
    return result;
  }
  result.detail = "determinism and decorrelation";
  return result;
}

CheckResult binomial_bound_routes() {
  CheckResult result{"clopper-pearson-routes", true, ""};
  // Direct route: bisection on the binomial tail sum.
  auto direct = [](long long k, long long n, double confidence) {
    if (k >= n) return 1.0;
    auto tail = [&](double p) {
      // P(X <= k) via stable incremental pmf.
      double logp = static_cast<double>(n) * std::log1p(-p);  // P(X = 0)
      double total = std::exp(logp);
      for (long long i = 1; i <= k; ++i) {
        logp += std::log(static_cast<double>(n - i + 1) / static_cast<double>(i)) +
                std::log(p) - std::log1p(-p);
        total += std::exp(logp);
      }
      return total;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail(mid) > 1.0 - confidence ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const struct {
    long long k, n;
    double conf;
  } cases[] = {{0, 100, 0.95}, {10, 100, 0.95}, {3, 37, 0.99},
               {25, 300, 0.95}, {0, 1, 0.99},   {999, 1000, 0.95}};
  for (const auto& c : cases) {
    const double via_beta = clopper_pearson_upper(c.k, c.n, c.conf);
    const double via_sum = direct(c.k, c.n, c.conf);
    if (std::abs(via_beta - via_sum) > 1e-9) {
      result.passed = false;
      result.detail = fail_detail("route mismatch", via_beta, via_sum);
      return result;
    }
  }
  // Frozen references: closed form for zero failures, and the binomial-sum
  // root P(Bin(100, p) <= 10) = 0.05 for ten failures.
  if (std::abs(clopper_pearson_upper(0, 100, 0.95) -
               (1.0 - std::pow(0.05, 1.0 / 100.0))) > 1e-12 ||
      std::abs(clopper_pearson_upper(10, 100, 0.95) - 0.1637176) > 5e-6) {
    result.passed = false;
    result.detail = "frozen reference mismatch";
    return result;
  }
  result.detail = "beta and binomial-sum routes agree";
  return result;
}

CheckResult two_sided_bounds(std::uint64_t seed) {
  CheckResult result{"two-sided-bounds", true, ""};
  RngStream rng = RngStream::root(seed);
  for (int inst = 0; inst < 50 && result.passed; ++inst) {
    RngStream irng = rng.child(static_cast<std::uint64_t>(inst));
    const int dim = 2 + static_cast<int>(irng.next_below(8));
    const double mu = 0.5 + irng.next_double();
    const double lip = mu * (1.0 + 50.0 * irng.next_double());
    const QuadraticProblem quad =
        make_quadratic(dim, mu, lip, 0.0, NoiseTail::gaussian, 2.5, irng.next_u64());
    for (int probe = 0; probe < 20; ++probe) {
      const Vec x = quad.minimizer + (0.01 + 3.0 * irng.next_double()) *
                                         random_unit(dim, irng);
      const double gap = true_gap(quad.instance, x);
      const double d2 = (x - quad.minimizer).squaredNorm();
      const double scale = std::max(1.0, gap);
      if (gap < 0.5 * mu * d2 - 1e-9 * scale ||
          gap > 0.5 * lip * d2 + 1e-9 * scale) {
        result.passed = false;
        result.detail = "smooth two-sided bound violated";
        break;
      }
    }
    ConstraintSpec spec;
    spec.kind = inst % 2 == 0 ? ConstraintKind::ball : ConstraintKind::l1;
    spec.radius = 1.0;
    spec.weight = 0.7;
    const CompositeQuadratic comp = make_composite(
        std::min(dim, 5), spec, mu, lip, 0.0, NoiseTail::gaussian, 2.5,
        irng.next_u64());
    for (int probe = 0; probe < 20 && result.passed; ++probe) {
      const Vec x = comp.problem.prox(
          comp.problem.ground_truth->minimizer +
              (0.01 + 2.0 * irng.next_double()) *
                  random_unit(std::min(dim, 5), irng),
          1.0);
      const double gap = true_gap(comp.problem, x);
      const double breg = bregman_gap(comp.problem, x);
      const double d2 =
          (x - comp.problem.ground_truth->minimizer).squaredNorm();
      const double scale = std::max(1.0, gap);
      if (breg < -1e-10 || gap < breg + 0.5 * mu * d2 - 1e-9 * scale ||
          gap > breg + 0.5 * lip * d2 + 1e-9 * scale) {
        result.passed = false;
        result.detail = "composite two-sided bound violated";
      }
    }
  }
  if (result.passed) result.detail = "smooth and composite probes";
  return result;
}

std::vector<CheckResult> run_all_deterministic() {
  return {
      rng_streams(),
      pseudometric_properties(),
      robust_selection_soundness(),
      decomposition_inequalities(),
      schedule_arithmetic(),
      robust_gap_fixtures(),
      moreau_grid(),
      binomial_bound_routes(),
      two_sided_bounds(3),
  };
}

// ---------------------------------------------------------------------------
// Calibration

namespace {

struct CalibrationCase {
  std::string name;
  std::function<double(RngStream)> gap_of_run;  // phi gap of one oracle call
};

std::vector<CalibrationCase> calibration_cases(const std::string& oracle_name) {
  std::vector<CalibrationCase> cases;
  const double settings[][2] = {{0.1, 0.0}, {0.02, 4.0}, {0.005, 32.0}};

  if (oracle_name == "sgd" || oracle_name == "acc_sgd") {
    const bool accelerated = oracle_name == "acc_sgd";
    for (const NoiseTail tail : {NoiseTail::gaussian, NoiseTail::student_t}) {
      auto quad = std::make_shared<QuadraticProblem>(make_quadratic(
          5, 1.0, 20.0, 1.0, tail, 2.5,
          tail == NoiseTail::gaussian ? 901 : 902));
      RngStream crng = RngStream::root(77);
      Vec dir(5);
      for (int i = 0; i < 5; ++i) dir[i] = crng.next_gaussian();
      dir.normalize();
      const Vec center = quad->minimizer + 1.5 * dir;
      for (const auto& s : settings) {
        const double delta = s[0];
        const double lambda = s[1];
        const double min_value = quad->prox_min_value(lambda, center);
        const double delta_init = quad->instance.value(center) - min_value;
        std::ostringstream label;
        label << oracle_name << " "
              << (tail == NoiseTail::gaussian ? "gaussian" : "student_t")
              << " delta=" << delta << " lambda=" << lambda;
        cases.push_back({label.str(), [=](RngStream rng) {
                           OracleResult r =
                               accelerated
                                   ? acc_sgd_oracle(quad->instance, delta, lambda,
                                                    delta_init, center, std::move(rng))
                                   : sgd_oracle(quad->instance, delta, lambda,
                                                delta_init, center, std::move(rng));
                           const double phi =
                               quad->instance.value(r.point) +
                               0.5 * lambda * (r.point - center).squaredNorm();
                           return (phi - min_value) / delta;
                         }});
      }
    }
  } else if (oracle_name == "prox_sgd") {
    ConstraintSpec spec;
    spec.kind = ConstraintKind::ball;
    spec.radius = 1.0;
    auto comp = std::make_shared<CompositeQuadratic>(make_composite(
        5, spec, 1.0, 20.0, 1.0, NoiseTail::student_t, 2.5, 903));
    RngStream crng = RngStream::root(78);
    Vec dir(5);
    for (int i = 0; i < 5; ++i) dir[i] = crng.next_gaussian();
    dir.normalize();
    const Vec center = comp->problem.prox(
        comp->problem.ground_truth->minimizer + 1.5 * dir, 1.0);
    for (const auto& s : settings) {
      const double delta = s[0];
      const double lambda = s[1];
      const double min_value = comp->exact_min_value(lambda, center);
      const double delta_init = comp->problem.smooth.value(center) +
                                comp->problem.nonsmooth_value(center) - min_value;
      std::ostringstream label;
      label << "prox_sgd ball delta=" << delta << " lambda=" << lambda;
      cases.push_back({label.str(), [=](RngStream rng) {
                         OracleResult r =
                             prox_sgd_oracle(comp->problem, delta, lambda,
                                             delta_init, center, std::move(rng));
                         const double phi =
                             comp->problem.smooth.value(r.point) +
                             comp->problem.nonsmooth_value(r.point) +
                             0.5 * lambda * (r.point - center).squaredNorm();
                         return (phi - min_value) / delta;
                       }});
    }
  } else {
    throw std::invalid_argument("calibrate: unknown oracle " + oracle_name);
  }
  return cases;
}

}  // namespace

std::vector<std::string> calibration_oracles() {
  return {"sgd", "acc_sgd", "prox_sgd"};
}

std::vector<CalibrationResult> calibrate_oracle(const std::string& oracle_name,
                                                long long replications,
                                                int jobs) {
  const std::vector<CalibrationCase> cases = calibration_cases(oracle_name);
  std::vector<CalibrationResult> results;
  const int workers = std::max(1, resolve_jobs(jobs));
  std::uint64_t case_id = 0;
  for (const CalibrationCase& c : cases) {
    std::atomic<long long> failures{0};
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const long long i = next.fetch_add(1);
          if (i >= replications) return;
          const double normalized_gap = c.gap_of_run(
              derive_rng(0xCA11B, {case_id, static_cast<std::uint64_t>(i)}));
          if (normalized_gap > 1.0) failures.fetch_add(1);
        }
      });
    }
    for (auto& t : pool) t.join();
    CalibrationResult r;
    r.oracle = oracle_name;
    r.setting = c.name;
    r.replications = replications;
    r.failures = failures.load();
    r.failure_rate = static_cast<double>(r.failures) / replications;
    r.upper99 = clopper_pearson_upper(r.failures, replications, 0.99);
    r.passed = r.upper99 <= 0.40;
    results.push_back(r);
    ++case_id;
  }
  return results;
}

}  // namespace proxboost::checks
