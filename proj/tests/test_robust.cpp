#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "proxboost/problems.hpp"
#include "proxboost/robust.hpp"

using namespace proxboost;

namespace {

std::vector<Vec> scalar_points(std::initializer_list<double> values) {
  std::vector<Vec> pts;
  for (double v : values) pts.push_back(Vec::Constant(1, v));
  return pts;
}

}  // namespace

TEST_CASE("weak radius on the five-point line") {
  const auto pts = scalar_points({0.0, 0.05, -0.05, 4.0, 9.0});
  const Pseudometric euc = Pseudometric::euclidean();
  // Distances from 0.0 sort to {0, .05, .05, 4, 9}; majority needs 3 points.
  CHECK(weak_radius(pts, 0, euc) == doctest::Approx(0.05));
  // Distances from 4.0 sort to {0, 3.95, 4.0, 4.05, 5.0}.
  CHECK(weak_radius(pts, 3, euc) == doctest::Approx(4.0));
  CHECK(weak_radius(scalar_points({2.5}), 0, euc) == doctest::Approx(0.0));
  CHECK_THROWS_AS(weak_radius({}, 0, euc), std::invalid_argument);
}

TEST_CASE("robust selection on the five-point line") {
  const auto pts = scalar_points({0.0, 0.05, -0.05, 4.0, 9.0});
  const RobustSelection sel = robust_select(pts, Pseudometric::euclidean());
  CHECK(sel.index == 0);
  CHECK(sel.point[0] == doctest::Approx(0.0));
  CHECK(sel.radius == doctest::Approx(0.05));
}

TEST_CASE("identical points select themselves with radius zero") {
  const auto pts = scalar_points({1.5, 1.5, 1.5});
  const RobustSelection sel = robust_select(pts, Pseudometric::euclidean());
  CHECK(sel.index == 0);
  CHECK(sel.radius == doctest::Approx(0.0));
}

TEST_CASE("majority cluster beats adversarial outliers") {
  const auto pts = scalar_points({-1.0, 0.0, 1.0, 100.0, 200.0});
  const RobustSelection sel = robust_select(pts, Pseudometric::euclidean());
  CHECK(sel.index <= 2);
  CHECK(std::abs(sel.point[0]) <= 3.0);
  const auto kept = extract(pts, Pseudometric::euclidean());
  CHECK(kept.size() >= 3);
  for (std::size_t idx : kept) CHECK(std::abs(pts[idx][0]) <= 3.0);
}

TEST_CASE("extract follows the median-rank membership rule") {
  CHECK(extract(scalar_points({3.0}), Pseudometric::euclidean()) ==
        std::vector<std::size_t>{0});
  RngStream rng = RngStream::root(31);
  const Pseudometric euc = Pseudometric::euclidean();
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(9));
    std::vector<Vec> pts;
    for (int i = 0; i < m; ++i) {
      Vec x(2);
      x[0] = rng.next_gaussian();
      x[1] = rng.next_gaussian();
      pts.push_back(x);
    }
    std::vector<double> radii;
    for (int i = 0; i < m; ++i)
      radii.push_back(weak_radius(pts, static_cast<std::size_t>(i), euc));
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[static_cast<std::size_t>((m + 1) / 2) - 1];
    const auto kept = extract(pts, euc);
    CHECK(kept.size() >= static_cast<std::size_t>((m + 1) / 2));
    std::vector<std::size_t> expected;
    for (int i = 0; i < m; ++i)
      if (radii[static_cast<std::size_t>(i)] <= median)
        expected.push_back(static_cast<std::size_t>(i));
    CHECK(kept == expected);
  }
}

TEST_CASE("selection is invariant under uniform metric rescaling") {
  RngStream rng = RngStream::root(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(rng.next_below(7));
    std::vector<Vec> pts;
    for (int i = 0; i < m; ++i) {
      Vec x(3);
      for (int k = 0; k < 3; ++k) x[k] = rng.next_gaussian();
      pts.push_back(x);
    }
    const double scale = 0.01 + 10.0 * rng.next_double();
    const auto base = robust_select(pts, Pseudometric::euclidean());
    const auto scaled = robust_select(pts, Pseudometric::scaled_euclidean(scale));
    CHECK(base.index == scaled.index);
    CHECK(scaled.radius == doctest::Approx(scale * base.radius));
  }
}

TEST_CASE("linearized bregman pseudometric evaluates the absolute linearization") {
  Vec g(2);
  g << 0.5, -1.0;
  auto h = [](const Vec& x) { return x.lpNorm<1>(); };
  const Pseudometric rho = Pseudometric::linearized_bregman(h, g);
  Vec x(2), y(2);
  x << 1.0, 2.0;
  y << -0.5, 0.25;
  const double expected = std::abs(h(x) - h(y) + g.dot(x - y));
  CHECK(rho(x, y) == doctest::Approx(expected));
  CHECK(rho(x, x) == doctest::Approx(0.0));
}

TEST_CASE("robust gradient sample counts and noiseless exactness") {
  QuadraticProblem noisy =
      make_quadratic(4, 1.0, 6.0, 2.0, NoiseTail::gaussian, 2.5, 9);
  Vec x = Vec::Ones(4);
  // s = ceil(3 sigma^2 / eps^2) = ceil(12/1) = 12 per weak query.
  const RobustGradient rg =
      robust_gradient(noisy.instance, x, 1.0, 5, RngStream::root(4));
  CHECK(rg.samples == 5 * 12);

  QuadraticProblem clean =
      make_quadratic(4, 1.0, 6.0, 0.0, NoiseTail::gaussian, 2.5, 9);
  const RobustGradient exact =
      robust_gradient(clean.instance, x, 0.5, 3, RngStream::root(4));
  CHECK((exact.gradient - clean.instance.grad(x)).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(robust_gradient(clean.instance, x, 0.0, 3, RngStream::root(1)),
                  std::invalid_argument);
}

TEST_CASE("robust gradient usually lands within three epsilon") {
  QuadraticProblem q =
      make_quadratic(5, 1.0, 10.0, 2.0, NoiseTail::student_t, 2.5, 21);
  Vec x = Vec::Ones(5);
  const double eps = 0.5;
  int hits = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const RobustGradient rg = robust_gradient(
        q.instance, x, eps, 9, RngStream::root(100 + rep));
    if ((rg.gradient - q.instance.grad(x)).norm() <= 3.0 * eps) ++hits;
  }
  CHECK(hits >= 45);
}
