// robust.hpp -- robust distance estimation under a pseudometric, and the
// robust gradient estimator built from a weak averaged-gradient oracle.
#pragma once

#include <functional>
#include <vector>

#include "proxboost/types.hpp"

namespace proxboost {

/**
 * A pseudometric: nonnegative, symmetric, rho(x,x)=0, triangle inequality.
 * The linearized Bregman variant measures |h(x) - h(x') + <g, x - x'>| and
 * is the surrogate for the Bregman gap built from an estimated gradient g.
 */
struct Pseudometric {
  std::function<double(const Vec&, const Vec&)> eval;

  static Pseudometric euclidean();
  static Pseudometric scaled_euclidean(double scale);
  static Pseudometric linearized_bregman(std::function<double(const Vec&)> h_value,
                                         Vec grad_estimate);

  double operator()(const Vec& x, const Vec& y) const { return eval(x, y); }
};

/**
 * Smallest r >= 0 such that the rho-ball of radius r around points[i]
 * contains a strict majority of the points. Equals the (floor(m/2)+1)-th
 * smallest of the distances from points[i] to all m points (self included).
 */
double weak_radius(const std::vector<Vec>& points, std::size_t i,
                   const Pseudometric& rho);

struct RobustSelection {
  std::size_t index = 0;
  Vec point;
  double radius = 0.0;
};

/**
 * The point whose majority-covering ball has minimal radius; ties break to
 * the lowest index. If some center has strictly more than m/2 points within
 * rho-distance eps, the selected point is within 3*eps of that center.
 */
RobustSelection robust_select(const std::vector<Vec>& points,
                              const Pseudometric& rho);

/**
 * Indices i with r_i <= median(r_1..r_m), the median being the ceil(m/2)-th
 * order statistic. Always returns at least ceil(m/2) indices; under the
 * majority-cover condition every returned point is within 3*eps of the center.
 */
std::vector<std::size_t> extract(const std::vector<Vec>& points,
                                 const Pseudometric& rho);

struct RobustGradient {
  Vec gradient;
  long long samples = 0;  // total stochastic gradient draws, m * ceil(3 sigma^2 / eps^2)
};

/**
 * Robust estimate of grad g(x_hat) to accuracy 3*eps with probability
 * >= 1 - exp(-m/18). Each of the m weak queries averages
 * s = ceil(3 sigma^2 / eps^2) stochastic gradients on an independent
 * rng child; the queries are combined by robust_select.
 */
RobustGradient robust_gradient(const ProblemInstance& problem, const Vec& x_hat,
                               double eps, int m, RngStream rng);

}  // namespace proxboost
