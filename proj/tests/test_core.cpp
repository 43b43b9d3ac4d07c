#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "proxboost/engine.hpp"
#include "proxboost/problems.hpp"
#include "proxboost/types.hpp"

using namespace proxboost;

TEST_CASE("condition number") {
  QuadraticProblem q = make_quadratic(3, 1.0, 1.0, 0.0, NoiseTail::gaussian, 2.5, 1);
  CHECK(condition_number(q.instance) == doctest::Approx(1.0));
  QuadraticProblem r = make_quadratic(3, 0.5, 50.0, 0.0, NoiseTail::gaussian, 2.5, 2);
  CHECK(condition_number(r.instance) == doctest::Approx(100.0));
  ProblemInstance bad = q.instance;
  bad.mu = 2.0;
  bad.lip_grad = 1.0;
  CHECK_THROWS_AS(condition_number(bad), std::invalid_argument);
}

TEST_CASE("two-sided bound holds on random probes") {
  RngStream rng = RngStream::root(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.next_below(8));
    QuadraticProblem q = make_quadratic(d, 0.7, 35.0, 0.0, NoiseTail::gaussian,
                                        2.5, rng.next_u64());
    for (int probe = 0; probe < 50; ++probe) {
      Vec x(d);
      for (int i = 0; i < d; ++i) x[i] = 3.0 * rng.next_gaussian();
      const double gap = q.instance.value(x) - q.min_value;
      const double d2 = (x - q.minimizer).squaredNorm();
      const double scale = std::max(1.0, gap);
      CHECK(gap >= 0.5 * 0.7 * d2 - 1e-9 * scale);
      CHECK(gap <= 0.5 * 35.0 * d2 + 1e-9 * scale);
    }
  }
}

TEST_CASE("stochastic gradient is unbiased with bounded variance") {
  QuadraticProblem q =
      make_quadratic(5, 1.0, 10.0, 2.0, NoiseTail::student_t, 2.5, 77);
  RngStream rng = RngStream::root(99);
  Vec x(5);
  for (int i = 0; i < 5; ++i) x[i] = rng.next_gaussian();
  const Vec exact = q.instance.grad(x);
  const int n = 100000;
  Vec mean = Vec::Zero(5);
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec g = q.instance.stoch_grad(x, rng);
    mean += g;
    var += (g - exact).squaredNorm();
  }
  mean /= n;
  var /= n;
  // Componentwise within five standard errors; coordinate variance is
  // sigma^2/d, so the standard error of each mean component is sigma/sqrt(nd).
  const double se = std::sqrt(q.instance.sigma2 / 5.0 / n);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(mean[i] - exact[i]) < 5.0 * se);
  CHECK(var < q.instance.sigma2 * 1.25);
  CHECK(q.instance.grad(q.minimizer).norm() <=
        1e-8 * q.instance.lip_grad * (1.0 + q.minimizer.norm()));
  CHECK(q.instance.value(q.minimizer) == doctest::Approx(q.min_value));
}

TEST_CASE("schedule validation and radii") {
  Schedule s = geometric_schedule(1.0, 16.0, 1.0, 0.01);
  s.validate();
  double prev = std::numeric_limits<double>::infinity();
  for (int j = -1; j <= s.num_stages; ++j) {
    const double eps_j = epsilon_schedule(s.delta, s.mu, s.lambda_at(j));
    CHECK(eps_j < prev);
    prev = eps_j;
  }
  Schedule bad = s;
  bad.lambdas[1] = bad.lambdas[0];  // not strictly increasing
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("geometric bound factor stays under 2 + 2T up to T = 60") {
  for (int t = 0; t <= 60; ++t) {
    Schedule s;
    s.mu = 1.0;
    s.num_stages = t;
    s.trials = 1;
    s.delta = 1.0;
    s.p = 0.5;
    s.lambdas.resize(static_cast<std::size_t>(t) + 1);
    for (int i = 0; i <= t; ++i)
      s.lambdas[static_cast<std::size_t>(i)] = std::ldexp(1.0, i);
    CHECK(s.bound_factor() <= 2.0 + 2.0 * t + 1e-12);
  }
}

TEST_CASE("stage trace shapes and cumulative samples") {
  QuadraticProblem q = make_quadratic(4, 1.0, 8.0, 0.0, NoiseTail::gaussian, 2.5, 3);
  Schedule s = geometric_schedule(1.0, 8.0, 0.1, 0.1);
  StageEstimator exact = [&](const StageRequest& req, RngStream) {
    const Vec center = req.stage == 0 ? Vec(Vec::Zero(4)) : req.center;
    return StagePoint{q.prox_minimizer(req.lambda_prev, center), 7, std::nullopt};
  };
  const BoostResult r = prox_boost(exact, s, RngStream::root(1));
  const std::size_t expect = static_cast<std::size_t>(s.num_stages) + 2;
  CHECK(r.trace.centers.size() == expect);
  CHECK(r.trace.radii.size() == expect);
  CHECK(r.trace.amplitudes.size() == expect);
  CHECK(r.trace.samples.size() == expect);
  long long running = 0;
  for (long long v : r.trace.samples) {
    CHECK(v >= 0);
    running += v;
  }
  CHECK(running == r.trace.total_samples());
}
