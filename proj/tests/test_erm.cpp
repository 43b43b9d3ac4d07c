#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "proxboost/erm.hpp"

using namespace proxboost;

namespace {

ErmProblem small_problem() {
  return make_nonneg_erm(5, 100, 1.0, 40.0, 31);
}

}  // namespace

TEST_CASE("generator constants and ground truth") {
  const ErmProblem erm_problem = small_problem();
  const auto& pop = *erm_problem.population;

  // fstar against an independent normal-equations solve built from the rows.
  const int d = erm_problem.dim;
  Mat h = Mat::Zero(d, d);
  Vec c = Vec::Zero(d);
  double b2 = 0.0;
  for (long long z = 0; z < pop.size(); ++z) {
    h += pop.rows.row(z).transpose() * pop.rows.row(z);
    c += pop.offsets[z] * pop.rows.row(z).transpose();
    b2 += pop.offsets[z] * pop.offsets[z];
  }
  h /= static_cast<double>(pop.size());
  c /= static_cast<double>(pop.size());
  b2 /= static_cast<double>(pop.size());
  Mat reg = h;
  reg.diagonal().array() += 1.0;
  const Vec xbar = reg.ldlt().solve(c);
  const double fstar = 0.5 * xbar.dot(h * xbar) - c.dot(xbar) + 0.5 * b2 +
                       0.5 * xbar.squaredNorm();
  CHECK(std::abs(fstar - erm_problem.ground_truth.min_value) < 1e-10);
  CHECK((xbar - erm_problem.ground_truth.minimizer).norm() < 1e-10);

  CHECK(erm_problem.ground_truth.min_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(erm_problem.lip_hat >= erm_problem.lip_grad);  // kappa_hat >= kappa
  CHECK(erm_problem.lip_hat ==
        doctest::Approx(pop.rows.rowwise().squaredNorm().maxCoeff() + 1.0));

  // Nonnegative per-sample losses.
  RngStream rng = RngStream::root(3);
  for (int probe = 0; probe < 200; ++probe) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = 3.0 * rng.next_gaussian();
    CHECK(erm_problem.sample_loss(x, static_cast<long long>(rng.next_below(
                                         static_cast<std::uint64_t>(pop.size())))) >=
          0.0);
  }
}

TEST_CASE("a consistent population is rejected") {
  CHECK_THROWS_AS(make_nonneg_erm(5, 100, 1.0, 40.0, 31, 0.0, /*inconsistency=*/0.0),
                  std::invalid_argument);
}

TEST_CASE("empirical minimizer matches the population on a full census") {
  const ErmProblem erm_problem = small_problem();
  const auto& pop = *erm_problem.population;
  std::vector<long long> counts(static_cast<std::size_t>(pop.size()), 1);
  const Vec census = pop.empirical_minimizer(counts, pop.size(), 0.0,
                                             Vec::Zero(erm_problem.dim));
  CHECK((census - erm_problem.ground_truth.minimizer).norm() < 1e-10);
}

TEST_CASE("closed-form and iterative solvers agree") {
  const ErmProblem erm_problem = small_problem();
  const Vec center = 0.3 * Vec::Ones(erm_problem.dim);
  const Vec direct =
      erm(erm_problem, 500, 2.0, center, RngStream::root(8), ErmSolver::closed_form);
  const Vec iterative =
      erm(erm_problem, 500, 2.0, center, RngStream::root(8), ErmSolver::iterative);
  CHECK((direct - iterative).norm() < 1e-8);
}

TEST_CASE("erm_r with one replica is a single erm call") {
  const ErmProblem erm_problem = small_problem();
  const Vec center = Vec::Zero(erm_problem.dim);
  const OracleResult r = erm_r(erm_problem, 300, 1, 1.0, center, RngStream::root(21));
  const Vec single = erm(erm_problem, 300, 1.0, center, RngStream::root(21).child(0));
  CHECK((r.point - single).norm() == doctest::Approx(0.0));
  CHECK(r.samples == 300);
}

TEST_CASE("the empirical minimizer is a weak distance oracle at the stated radius") {
  const ErmProblem erm_problem = small_problem();
  // Radius from the generalization bound at n: eps = sqrt(96 Lhat fstar / (n mu^2)).
  const double eps = 0.35;
  const long long n = static_cast<long long>(
      std::ceil(96.0 * erm_problem.lip_hat * erm_problem.ground_truth.min_value /
                (eps * eps)));
  int failures = 0;
  const int reps = 300;
  for (int rep = 0; rep < reps; ++rep) {
    const Vec y = erm(erm_problem, n, 0.0, Vec::Zero(erm_problem.dim),
                      RngStream::root(1000).child(static_cast<std::uint64_t>(rep)));
    if ((y - erm_problem.ground_truth.minimizer).norm() > eps) ++failures;
  }
  // 2/3 contract with binomial slack.
  CHECK(failures <= reps / 3 + 25);
}

TEST_CASE("stage sample counts") {
  const std::vector<double> lambdas = {1.0};
  CHECK(sample_count(0.1, 0, 1.0, 10.0, lambdas, 1) == 26352);
  CHECK(sample_count(0.1, 0, 1.0, 10.0, lambdas, 1000000) == 1000000);
  CHECK(sample_count(1.0, -1, 1.0, 1.0, lambdas, 1) == 432);
  CHECK_THROWS_AS(sample_count(0.0, 0, 1.0, 10.0, lambdas, 1),
                  std::invalid_argument);
}

TEST_CASE("geometric-decay parameters for relative accuracy") {
  const ErmParams params = erm_geometric_params(8.0, 0.5, 0.05);
  CHECK(params.stages == 3);
  CHECK(params.trials == 83);  // ceil(18 ln(5/0.05)) = ceil(82.89)
  CHECK(params.gamma == doctest::Approx(0.5 / 8.0));
}

TEST_CASE("trace accounting reconciles with the prediction exactly") {
  const ErmProblem erm_problem = small_problem();
  const double gamma = 0.2;
  const int t = 2;
  const int m = 3;
  const BoostResult r = boost_erm(erm_problem, gamma, t, m, RngStream::root(5));
  CHECK(r.trace.total_samples() ==
        boost_erm_predicted_samples(erm_problem, gamma, t, m));
  CHECK(r.trace.centers.size() == static_cast<std::size_t>(t) + 2);
  CHECK_THROWS_AS(boost_erm(erm_problem, -1.0, t, m, RngStream::root(1)),
                  std::invalid_argument);
}

TEST_CASE("stage sample ratios become gamma-dominated as conditioning improves") {
  // (Lhat + lambda_j) / (mu + lambda_j) is nonincreasing in j.
  for (double kappa_hat : {10.0, 100.0, 1000.0, 10000.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 20; ++j) {
      const double lambda = std::ldexp(1.0, j);
      const double ratio = (kappa_hat + lambda) / (1.0 + lambda);
      CHECK(ratio <= prev + 1e-12);
      prev = ratio;
    }
  }
}

TEST_CASE("relative-error chain along in-radius trajectories") {
  const ErmProblem erm_problem = small_problem();
  const auto& pop = *erm_problem.population;
  const int d = erm_problem.dim;
  const double mu = erm_problem.mu;
  const double fstar = erm_problem.ground_truth.min_value;
  const double gamma = 0.05;
  const double delta = gamma * fstar;
  const int t = 4;

  Mat reg = pop.hessian;
  reg.diagonal().array() += mu;
  auto prox_min = [&](double lambda, const Vec& center) {
    Mat shifted = reg;
    shifted.diagonal().array() += lambda;
    return Vec(shifted.ldlt().solve(pop.cross + lambda * center));
  };
  auto pop_value = [&](const Vec& x) { return pop.population_value(x); };

  RngStream rng = RngStream::root(40);
  std::vector<double> lambdas(static_cast<std::size_t>(t) + 1);
  for (int i = 0; i <= t; ++i)
    lambdas[static_cast<std::size_t>(i)] = mu * std::ldexp(1.0, i);
  auto lambda_at = [&](int j) {
    return j < 0 ? 0.0 : lambdas[static_cast<std::size_t>(j)];
  };

  std::vector<Vec> centers;
  Vec x = erm_problem.ground_truth.minimizer;
  Vec dir(d);
  for (int i = 0; i < d; ++i) dir[i] = rng.next_gaussian();
  dir.normalize();
  x += 0.9 * std::sqrt(2.0 * delta / mu) * dir;
  centers.push_back(x);
  for (int j = 0; j <= t; ++j) {
    Vec target = prox_min(lambda_at(j), centers.back());
    for (int i = 0; i < d; ++i) dir[i] = rng.next_gaussian();
    dir.normalize();
    target += 0.9 * std::sqrt(2.0 * delta / (mu + lambda_at(j))) * dir;
    centers.push_back(target);
  }
  // Chain: f^{j-1}(xbar_j) <= (1 + gamma sum_{i<j}) fstar.
  for (int j = 1; j <= t + 1; ++j) {
    const Vec xbar_j = prox_min(lambda_at(j - 1), centers[static_cast<std::size_t>(j) - 1]);
    const double reg_value =
        pop_value(xbar_j) + 0.5 * lambda_at(j - 1) *
                                (xbar_j - centers[static_cast<std::size_t>(j) - 1])
                                    .squaredNorm();
    double sum = 0.0;
    for (int i = 0; i < j; ++i) sum += lambda_at(i) / (mu + lambda_at(i - 1));
    CHECK(reg_value <= (1.0 + gamma * sum) * fstar * (1.0 + 1e-9));
  }
}
