#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "proxboost/problems.hpp"

using namespace proxboost;

TEST_CASE("one-dimensional perfectly conditioned quadratic") {
  const QuadraticProblem q =
      make_quadratic(1, 1.0, 1.0, 0.0, NoiseTail::gaussian, 2.5, 1);
  const Vec probe = q.minimizer + Vec::Ones(1);
  CHECK(true_gap(q.instance, probe) == doctest::Approx(0.5));
  CHECK(true_gap(q.instance, q.minimizer) == doctest::Approx(0.0));
}

TEST_CASE("spectrum endpoints are exact under the rotation") {
  const QuadraticProblem q =
      make_quadratic(20, 0.5, 50.0, 0.0, NoiseTail::gaussian, 2.5, 33);
  Eigen::SelfAdjointEigenSolver<Mat> es(q.matrix);
  CHECK(std::abs(es.eigenvalues().minCoeff() - 0.5) < 1e-9);
  CHECK(std::abs(es.eigenvalues().maxCoeff() - 50.0) < 1e-9);
  // Gap at minimizer plus a coordinate step: half the diagonal entry.
  Vec probe = q.minimizer;
  probe[0] += 1.0;
  CHECK(true_gap(q.instance, probe) == doctest::Approx(0.5 * q.matrix(0, 0)));
}

TEST_CASE("generation is bit-identical for equal seeds") {
  const QuadraticProblem a =
      make_quadratic(8, 1.0, 30.0, 2.0, NoiseTail::student_t, 2.5, 555);
  const QuadraticProblem b =
      make_quadratic(8, 1.0, 30.0, 2.0, NoiseTail::student_t, 2.5, 555);
  CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.minimizer - b.minimizer).cwiseAbs().maxCoeff() == 0.0);
  const ErmProblem ea = make_nonneg_erm(5, 100, 1.0, 40.0, 556);
  const ErmProblem eb = make_nonneg_erm(5, 100, 1.0, 40.0, 556);
  CHECK((ea.population->rows - eb.population->rows).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ea.population->offsets - eb.population->offsets).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("invalid constants are rejected") {
  CHECK_THROWS_AS(make_quadratic(3, 2.0, 1.0, 0.0, NoiseTail::gaussian, 2.5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_quadratic(3, 1.0, 4.0, 1.0, NoiseTail::student_t, 1.5, 1),
                  std::invalid_argument);
}

TEST_CASE("half-line constrained parabola solved by the exact machinery") {
  // g = (x+1)^2/2 over x >= 0: minimizer 0, gradient 1, value 1/2.
  CompositeQuadratic comp;
  comp.constraint.kind = ConstraintKind::box;
  comp.constraint.lo = 0.0;
  comp.constraint.hi = 1e8;
  comp.matrix = Mat::Constant(1, 1, 1.0);
  comp.eigvecs = Mat::Constant(1, 1, 1.0);
  comp.eigvals = Vec::Constant(1, 1.0);
  comp.smooth_minimizer = Vec::Constant(1, -1.0);
  const Vec xbar = comp.exact_minimizer(0.0, Vec::Zero(1));
  CHECK(std::abs(xbar[0]) < 1e-10);
  const double grad_at_min = comp.matrix(0, 0) * (xbar[0] + 1.0);
  CHECK(grad_at_min == doctest::Approx(1.0));
}

TEST_CASE("soft-threshold shrinkage solved by the exact machinery") {
  // g = (x-2)^2/2 with weight-1 l1: minimizer 1, value 1/2 + 1 = 3/2.
  CompositeQuadratic comp;
  comp.constraint.kind = ConstraintKind::l1;
  comp.constraint.weight = 1.0;
  comp.matrix = Mat::Constant(1, 1, 1.0);
  comp.eigvecs = Mat::Constant(1, 1, 1.0);
  comp.eigvals = Vec::Constant(1, 1.0);
  comp.smooth_minimizer = Vec::Constant(1, 2.0);
  const Vec xbar = comp.exact_minimizer(0.0, Vec::Zero(1));
  CHECK(xbar[0] == doctest::Approx(1.0).epsilon(1e-9));
  const double value = 0.5 * (xbar[0] - 2.0) * (xbar[0] - 2.0) + std::abs(xbar[0]);
  CHECK(value == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("ball-constrained ground truth satisfies the KKT conditions") {
  ConstraintSpec spec;
  spec.kind = ConstraintKind::ball;
  spec.radius = 1.0;
  const CompositeQuadratic comp =
      make_composite(5, spec, 1.0, 20.0, 0.0, NoiseTail::gaussian, 2.5, 61);
  const auto& gt = *comp.problem.ground_truth;
  // Fixed point of the projected gradient step.
  const double step = 1.0 / comp.problem.smooth.lip_grad;
  const Vec mapped = comp.problem.prox(
      gt.minimizer - step * comp.problem.smooth.grad(gt.minimizer), step);
  CHECK((gt.minimizer - mapped).norm() <= 1e-10);
  // The unconstrained minimizer was planted outside, so the constraint binds.
  CHECK(gt.minimizer.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(gt.grad_at_min.norm() > 1e-6);
}

TEST_CASE("composite gaps and infeasible probes") {
  ConstraintSpec spec;
  spec.kind = ConstraintKind::ball;
  spec.radius = 1.0;
  const CompositeQuadratic comp =
      make_composite(4, spec, 1.0, 10.0, 0.0, NoiseTail::gaussian, 2.5, 62);
  CHECK(true_gap(comp.problem, comp.problem.ground_truth->minimizer) <= 1e-10);
  CHECK(std::isinf(true_gap(comp.problem, Vec::Constant(4, 10.0))));
}

TEST_CASE("shifted subproblems carry exact ground truth") {
  ConstraintSpec spec;
  spec.kind = ConstraintKind::box;
  spec.lo = -1.0;
  spec.hi = 1.0;
  const CompositeQuadratic comp =
      make_composite(3, spec, 1.0, 6.0, 0.0, NoiseTail::gaussian, 2.5, 63);
  const Vec center = Vec::Constant(3, 0.2);
  const double lambda = 3.0;
  const CompositeProblem shifted = comp.shifted_problem(lambda, center);
  const auto& gt = *shifted.ground_truth;
  // Projected-gradient fixed point of the shifted smooth part.
  const double step = 1.0 / shifted.smooth.lip_grad;
  const Vec mapped = shifted.prox(gt.minimizer - step * shifted.smooth.grad(gt.minimizer),
                                  step);
  CHECK((gt.minimizer - mapped).norm() <= 1e-9);
  CHECK(shifted.smooth.value(gt.minimizer) == doctest::Approx(gt.min_value));
  CHECK(shifted.combined_mu == doctest::Approx(1.0 + lambda));
}

TEST_CASE("quadratic proximal minimizers against a dense solve") {
  const QuadraticProblem q =
      make_quadratic(7, 1.0, 15.0, 0.0, NoiseTail::gaussian, 2.5, 64);
  RngStream rng = RngStream::root(65);
  for (int rep = 0; rep < 20; ++rep) {
    Vec center(7);
    for (int i = 0; i < 7; ++i) center[i] = rng.next_gaussian();
    const double lambda = 0.5 + 10.0 * rng.next_double();
    Mat reg = q.matrix;
    reg.diagonal().array() += lambda;
    const Vec expected = reg.ldlt().solve(lambda * center + q.matrix * q.minimizer);
    CHECK((q.prox_minimizer(lambda, center) - expected).norm() < 1e-10);
  }
}
