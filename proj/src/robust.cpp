#include "proxboost/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace proxboost {

Pseudometric Pseudometric::euclidean() {
  return {[](const Vec& x, const Vec& y) { return (x - y).norm(); }};
}

Pseudometric Pseudometric::scaled_euclidean(double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("scaled_euclidean: scale must be positive");
  return {[scale](const Vec& x, const Vec& y) { return scale * (x - y).norm(); }};
}

Pseudometric Pseudometric::linearized_bregman(
    std::function<double(const Vec&)> h_value, Vec grad_estimate) {
  return {[h = std::move(h_value), g = std::move(grad_estimate)](const Vec& x,
                                                                 const Vec& y) {
    const double hx = h(x);
    const double hy = h(y);
    if (!std::isfinite(hx) || !std::isfinite(hy))
      return std::numeric_limits<double>::infinity();
    return std::abs(hx - hy + g.dot(x - y));
  }};
}

namespace {

// Distances from points[i] to every point, self included.
std::vector<double> distance_row(const std::vector<Vec>& points, std::size_t i,
                                 const Pseudometric& rho) {
  std::vector<double> d(points.size());
  for (std::size_t j = 0; j < points.size(); ++j)
    d[j] = (j == i) ? 0.0 : rho(points[i], points[j]);
  return d;
}

double radius_from_row(std::vector<double> d) {
  const std::size_t m = d.size();
  const std::size_t majority = m / 2;  // index of the (floor(m/2)+1)-th smallest
  std::nth_element(d.begin(), d.begin() + majority, d.end());
  return d[majority];
}

std::vector<double> all_radii(const std::vector<Vec>& points,
                              const Pseudometric& rho) {
  if (points.empty()) throw std::invalid_argument("empty point list");
  std::vector<double> radii(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    radii[i] = radius_from_row(distance_row(points, i, rho));
  return radii;
}

}  // namespace

double weak_radius(const std::vector<Vec>& points, std::size_t i,
                   const Pseudometric& rho) {
  if (points.empty()) throw std::invalid_argument("weak_radius: empty point list");
  if (i >= points.size()) throw std::invalid_argument("weak_radius: index out of range");
  return radius_from_row(distance_row(points, i, rho));
}

RobustSelection robust_select(const std::vector<Vec>& points,
                              const Pseudometric& rho) {
  const std::vector<double> radii = all_radii(points, rho);
  std::size_t best = 0;
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] < radii[best]) best = i;  // ties keep the lowest index
  return {best, points[best], radii[best]};
}

std::vector<std::size_t> extract(const std::vector<Vec>& points,
                                 const Pseudometric& rho) {
  const std::vector<double> radii = all_radii(points, rho);
  const std::size_t m = radii.size();
  std::vector<double> sorted = radii;
  const std::size_t med_rank = (m + 1) / 2 - 1;  // ceil(m/2)-th smallest
  std::nth_element(sorted.begin(), sorted.begin() + med_rank, sorted.end());
  const double median = sorted[med_rank];
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m; ++i)
    if (radii[i] <= median) kept.push_back(i);
  return kept;
}

RobustGradient robust_gradient(const ProblemInstance& problem, const Vec& x_hat,
                               double eps, int m, RngStream rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("robust_gradient: eps must be positive");
  if (m < 1) throw std::invalid_argument("robust_gradient: m must be >= 1");
  const long long s =
      std::max<long long>(1, static_cast<long long>(std::ceil(3.0 * problem.sigma2 / (eps * eps))));
  std::vector<Vec> estimates;
  estimates.reserve(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) {
    RngStream qrng = rng.child(static_cast<std::uint64_t>(q));
    Vec acc = Vec::Zero(problem.dim);
    for (long long k = 0; k < s; ++k) acc += problem.stoch_grad(x_hat, qrng);
    estimates.push_back(acc / static_cast<double>(s));
  }
  RobustSelection sel = robust_select(estimates, Pseudometric::euclidean());
  return {std::move(sel.point), static_cast<long long>(m) * s};
}

}  // namespace proxboost
