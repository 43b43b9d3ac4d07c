#include "proxboost/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "proxboost/oracles.hpp"

namespace proxboost {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

thread_local Eigen::ArrayXd scratch_u;
thread_local Eigen::ArrayXd scratch_v;
thread_local Eigen::ArrayXd scratch_r;

// Seeded random orthogonal matrix: QR of a gaussian matrix with the sign
// ambiguity fixed by the R diagonal.
Mat random_rotation(int dim, RngStream& rng) {
  Mat g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Vec log_spaced(int dim, double lo, double hi) {
  if (dim == 1) {
    if (std::abs(hi - lo) > 1e-12 * std::max(lo, hi))
      throw std::invalid_argument("log_spaced: dim 1 requires lo == hi");
    return Vec::Constant(1, lo);
  }
  Vec s(dim);
  const double loglo = std::log(lo);
  const double loghi = std::log(hi);
  for (int i = 0; i < dim; ++i)
    s[i] = std::exp(loglo + (loghi - loglo) * i / (dim - 1));
  s[0] = lo;
  s[dim - 1] = hi;
  return s;
}

Vec unit_direction(int dim, RngStream& rng) {
  Vec u(dim);
  for (int i = 0; i < dim; ++i) u[i] = rng.next_gaussian();
  const double n = u.norm();
  return n > 0.0 ? Vec(u / n) : Vec(Vec::Unit(dim, 0));
}

struct QuadCore {
  Mat matrix;
  Mat eigvecs;
  Vec eigvals;
  Vec minimizer;
  double min_value = 0.0;
  NoiseModel noise;

  Vec grad(const Vec& x) const { return matrix * (x - minimizer); }
  double value(const Vec& x) const {
    const Vec d = x - minimizer;
    return 0.5 * d.dot(matrix * d) + min_value;
  }
  Vec prox_min(double lambda, const Vec& center) const {
    // (A + lambda I)^{-1} (lambda center + A minimizer), in the eigenbasis
    const Vec rhs = lambda * center + matrix * minimizer;
    const Vec y = eigvecs.transpose() * rhs;
    const Vec scaled = y.array() / (eigvals.array() + lambda);
    return eigvecs * scaled;
  }
};

ProblemInstance instance_from_core(const std::shared_ptr<const QuadCore>& core,
                                   double mu, double lip, double sigma2) {
  ProblemInstance p;
  p.dim = static_cast<int>(core->minimizer.size());
  p.mu = mu;
  p.lip_grad = lip;
  p.sigma2 = sigma2;
  p.value = [core](const Vec& x) { return core->value(x); };
  p.grad = [core](const Vec& x) { return core->grad(x); };
  p.stoch_grad = [core](const Vec& x, RngStream& rng) {
    Vec g = core->grad(x);
    Vec xi(g.size());
    core->noise.fill(xi, rng);
    return Vec(g + xi);
  };
  p.ground_truth = GroundTruth{core->minimizer, core->min_value};
  return p;
}

// Exact solve of min over the ball ||x|| <= radius of
// 1/2 x' M x - b' x, with M = eigvecs diag(evals + shift) eigvecs'.
Vec ball_constrained_argmin(const Mat& eigvecs, const Vec& evals, double shift,
                            const Vec& b, double radius) {
  const Vec bt = eigvecs.transpose() * b;
  const Vec diag = evals.array() + shift;
  Vec x = bt.array() / diag.array();
  if (x.norm() <= radius) return eigvecs * x;
  // Secular equation: ||x(nu)||^2 = sum bt_i^2 / (diag_i + nu)^2 = radius^2.
  double lo = 0.0;
  double hi = bt.norm() / radius;  // ||x(hi)|| <= ||bt|| / hi = radius
  auto norm_at = [&](double nu) {
    return std::sqrt((bt.array() / (diag.array() + nu)).square().sum());
  };
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (norm_at(mid) > radius)
      lo = mid;
    else
      hi = mid;
  }
  const double nu = 0.5 * (lo + hi);
  x = bt.array() / (diag.array() + nu);
  Vec out = eigvecs * x;
  const double n = out.norm();
  if (n > 0.0) out *= radius / n;  // land exactly on the sphere
  return out;
}

}  // namespace

NoiseModel NoiseModel::make(NoiseTail tail, double dof, double sigma2, int dim) {
  NoiseModel m;
  m.tail = tail;
  m.dof = dof;
  if (sigma2 < 0.0) throw std::invalid_argument("NoiseModel: sigma2 < 0");
  if (tail == NoiseTail::student_t && !(dof > 2.0))
    throw std::invalid_argument("NoiseModel: student_t needs dof > 2");
  if (sigma2 == 0.0) {
    m.coord_scale = 0.0;
  } else if (tail == NoiseTail::gaussian) {
    m.coord_scale = std::sqrt(sigma2 / dim);
  } else {
    // Var(t_dof) = dof/(dof-2); scale so the total variance is sigma2.
    m.coord_scale = std::sqrt(sigma2 * (dof - 2.0) / (dof * dim));
  }
  return m;
}

void NoiseModel::fill(Vec& out, RngStream& rng) const {
  const int d = static_cast<int>(out.size());
  if (coord_scale == 0.0) {
    out.setZero();
    return;
  }
  if (tail == NoiseTail::gaussian) {
    const int half = (d + 1) / 2;
    scratch_u.resize(half);
    scratch_v.resize(half);
    for (int i = 0; i < half; ++i) scratch_u[i] = rng.next_open();
    for (int i = 0; i < half; ++i) scratch_v[i] = rng.next_double();
    scratch_r = (-2.0 * scratch_u.log()).sqrt();
    scratch_v *= kTwoPi;
    for (int i = 0; i < half; ++i) {
      out[2 * i] = scratch_r[i] * std::cos(scratch_v[i]);
      if (2 * i + 1 < d) out[2 * i + 1] = scratch_r[i] * std::sin(scratch_v[i]);
    }
  } else {
    scratch_u.resize(d);
    scratch_v.resize(d);
    for (int i = 0; i < d; ++i) scratch_u[i] = rng.next_open();
    for (int i = 0; i < d; ++i) scratch_v[i] = rng.next_double();
    scratch_r = (dof * ((-2.0 / dof) * scratch_u.log()).exp() - dof).sqrt();
    out = (scratch_r * (kTwoPi * scratch_v).cos()).matrix();
  }
  out *= coord_scale;
}

Vec QuadraticProblem::prox_minimizer(double lambda, const Vec& center) const {
  const Vec rhs = lambda * center + matrix * minimizer;
  const Vec y = eigvecs.transpose() * rhs;
  const Vec scaled = y.array() / (eigvals.array() + lambda);
  return eigvecs * scaled;
}

double QuadraticProblem::prox_min_value(double lambda, const Vec& center) const {
  const Vec x = prox_minimizer(lambda, center);
  return instance.value(x) + 0.5 * lambda * (x - center).squaredNorm();
}

ProblemInstance QuadraticProblem::shifted_instance(double lambda,
                                                   const Vec& center) const {
  ProblemInstance base = instance;
  ProblemInstance p;
  p.dim = base.dim;
  p.mu = base.mu + lambda;
  p.lip_grad = base.lip_grad + lambda;
  p.sigma2 = base.sigma2;
  p.value = [base, lambda, center](const Vec& x) {
    return base.value(x) + 0.5 * lambda * (x - center).squaredNorm();
  };
  p.grad = [base, lambda, center](const Vec& x) {
    return Vec(base.grad(x) + lambda * (x - center));
  };
  p.stoch_grad = [base, lambda, center](const Vec& x, RngStream& rng) {
    return Vec(base.stoch_grad(x, rng) + lambda * (x - center));
  };
  p.ground_truth = GroundTruth{prox_minimizer(lambda, center),
                               prox_min_value(lambda, center)};
  return p;
}

QuadraticProblem make_quadratic(int dim, double mu, double lip_grad, double sigma,
                                NoiseTail tail, double dof, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_quadratic: dim < 1");
  if (!(mu > 0.0) || lip_grad < mu)
    throw std::invalid_argument("make_quadratic: need lip_grad >= mu > 0");
  RngStream rng = derive_rng(seed, {0x71ull});
  auto core = std::make_shared<QuadCore>();
  core->eigvals = log_spaced(dim, mu, lip_grad);
  core->eigvecs = random_rotation(dim, rng);
  core->matrix = core->eigvecs * core->eigvals.asDiagonal() *
                 core->eigvecs.transpose();
  core->minimizer = Vec(dim);
  for (int i = 0; i < dim; ++i)
    core->minimizer[i] = rng.next_gaussian() / std::sqrt(static_cast<double>(dim));
  core->min_value = 0.0;
  core->noise = NoiseModel::make(tail, dof, sigma * sigma, dim);

  QuadraticProblem q;
  q.instance = instance_from_core(core, mu, lip_grad, sigma * sigma);
  q.matrix = core->matrix;
  q.eigvecs = core->eigvecs;
  q.eigvals = core->eigvals;
  q.minimizer = core->minimizer;
  q.min_value = core->min_value;
  return q;
}

double LeastSquaresPopulation::population_value(const Vec& x) const {
  return 0.5 * x.dot(hessian * x) - cross.dot(x) + 0.5 * mean_b2 +
         0.5 * ridge * x.squaredNorm();
}

Vec LeastSquaresPopulation::population_grad(const Vec& x) const {
  return hessian * x - cross + ridge * x;
}

Vec LeastSquaresPopulation::empirical_minimizer(
    const std::vector<long long>& counts, long long n, double lambda,
    const Vec& center) const {
  const int d = static_cast<int>(rows.cols());
  Mat h = Mat::Zero(d, d);
  Vec c = Vec::Zero(d);
  for (long long z = 0; z < size(); ++z) {
    if (counts[static_cast<std::size_t>(z)] == 0) continue;
    const double w = static_cast<double>(counts[static_cast<std::size_t>(z)]) /
                     static_cast<double>(n);
    h.selfadjointView<Eigen::Lower>().rankUpdate(rows.row(z).transpose(), w);
    c += (w * offsets[z]) * rows.row(z).transpose();
  }
  h = h.selfadjointView<Eigen::Lower>();
  h.diagonal().array() += ridge + lambda;
  return h.ldlt().solve(c + lambda * center);
}

double ErmProblem::sample_loss(const Vec& x, long long z) const {
  const double r = population->rows.row(z).dot(x) - population->offsets[z];
  return 0.5 * r * r + 0.5 * population->ridge * x.squaredNorm();
}

Vec ErmProblem::sample_loss_grad(const Vec& x, long long z) const {
  const double r = population->rows.row(z).dot(x) - population->offsets[z];
  return r * population->rows.row(z).transpose() + population->ridge * x;
}

long long ErmProblem::draw(RngStream& rng) const {
  return static_cast<long long>(
      rng.next_below(static_cast<std::uint64_t>(population->size())));
}

ErmProblem make_nonneg_erm(int dim, long long n_pop, double mu, double lip_hat,
                           std::uint64_t seed, double kappa,
                           double inconsistency, double target_fstar) {
  if (dim < 1 || n_pop < 2 * dim)
    throw std::invalid_argument("make_nonneg_erm: population too small");
  if (!(mu > 0.0) || !(lip_hat > mu))
    throw std::invalid_argument("make_nonneg_erm: need lip_hat > mu > 0");
  if (kappa <= 0.0) kappa = std::max(2.0, lip_hat / (4.0 * mu));
  if (kappa * mu > lip_hat)
    throw std::invalid_argument("make_nonneg_erm: kappa exceeds lip_hat/mu");

  RngStream rng = derive_rng(seed, {0x72ull});
  const Mat frame = random_rotation(dim, rng);
  const double cap = lip_hat - mu;  // max row norm^2
  const Vec spectrum = log_spaced(dim, mu, std::max(mu * 1.0000001, (kappa - 1.0) * mu));

  // Allocate counts per eigendirection: enough rows that no norm exceeds cap.
  std::vector<long long> counts(static_cast<std::size_t>(dim));
  long long used = 0;
  for (int i = 0; i < dim; ++i) {
    counts[i] = std::max<long long>(
        1, static_cast<long long>(std::ceil(spectrum[i] * n_pop / cap)));
    used += counts[i];
  }
  if (used > n_pop)
    throw std::invalid_argument("make_nonneg_erm: degenerate population (raise n_pop)");
  // Spread the remainder proportionally to the spectrum.
  const double total_s = spectrum.sum();
  long long leftover = n_pop - used;
  for (int i = dim - 1; i >= 0 && leftover > 0; --i) {
    const long long add = std::min<long long>(
        leftover, static_cast<long long>(std::floor(spectrum[i] / total_s * (n_pop - used))) + 1);
    counts[i] += add;
    leftover -= add;
  }
  counts[dim - 1] += leftover;

  const bool consistent = inconsistency <= 0.0;
  Vec plant = consistent ? Vec(Vec::Zero(dim)) : Vec(0.5 * unit_direction(dim, rng));

  Mat rows(n_pop, dim);
  Vec offsets(n_pop);
  std::vector<char> paired(static_cast<std::size_t>(n_pop), 0);
  long long row = 0;
  for (int i = 0; i < dim; ++i) {
    const Vec dir = frame.col(i);
    const long long c = counts[i];
    const bool pin = (i == dim - 1) && spectrum[i] * n_pop >= cap && c >= 2;
    double mass = spectrum[i] * n_pop;
    long long plain = c;
    if (pin) {
      rows.row(row) = std::sqrt(cap) * dir.transpose();
      offsets[row] = rows.row(row).dot(plant);
      ++row;
      mass -= cap;
      plain = c - 1;
    }
    const double r2 = mass / static_cast<double>(plain);
    const double r = std::sqrt(std::max(r2, 0.0));
    for (long long k = 0; k < plain; ++k, ++row) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      rows.row(row) = sign * r * dir.transpose();
      const bool in_pair = (k + 1 < plain) || (k % 2 == 1);
      paired[static_cast<std::size_t>(row)] = in_pair ? 1 : 0;
      offsets[row] = rows.row(row).dot(plant);  // residual added below
    }
  }

  auto pop = std::make_shared<LeastSquaresPopulation>();
  pop->rows = rows;
  pop->ridge = mu;

  auto refresh_moments = [&]() {
    pop->hessian = (rows.transpose() * rows) / static_cast<double>(n_pop);
    pop->cross = (rows.transpose() * offsets) / static_cast<double>(n_pop);
    pop->mean_b2 = offsets.squaredNorm() / static_cast<double>(n_pop);
    pop->offsets = offsets;
  };
  refresh_moments();

  Mat reg = pop->hessian;
  reg.diagonal().array() += mu;
  const Eigen::LDLT<Mat> solver(reg);
  const Vec xbar0 = solver.solve(pop->cross);
  const double f0 = [&] {
    LeastSquaresPopulation tmp = *pop;
    return tmp.population_value(xbar0);
  }();

  if (!consistent) {
    long long n_paired = std::count(paired.begin(), paired.end(), char(1));
    if (n_paired == 0)
      throw std::invalid_argument("make_nonneg_erm: no room for residuals");
    // f*(eta) = f0 + eta^2 n_paired / (2 n_pop); residuals in +- pairs leave
    // the population minimizer unchanged.
    double eta = inconsistency;
    if (target_fstar > f0) {
      eta = std::sqrt(2.0 * (target_fstar - f0) * n_pop / n_paired);
    }
    for (long long z = 0; z < n_pop; ++z)
      if (paired[static_cast<std::size_t>(z)]) offsets[z] += eta;
    refresh_moments();
  }

  ErmProblem erm;
  erm.dim = dim;
  erm.mu = mu;
  erm.population = pop;
  Eigen::SelfAdjointEigenSolver<Mat> es(pop->hessian);
  erm.lip_grad = es.eigenvalues().maxCoeff() + mu;
  erm.lip_hat = rows.rowwise().squaredNorm().maxCoeff() + mu;
  erm.n_min = static_cast<long long>(std::ceil(4.0 * dim * erm.lip_hat / mu));
  const Vec xbar = solver.solve(pop->cross);
  erm.ground_truth = GroundTruth{xbar, pop->population_value(xbar)};
  if (!(erm.ground_truth.min_value > 0.0))
    throw std::invalid_argument("make_nonneg_erm: fstar must be positive");
  return erm;
}

namespace {

std::function<double(const Vec&)> make_h(const ConstraintSpec& c) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (c.kind) {
    case ConstraintKind::ball: {
      const double r = c.radius;
      return [r](const Vec& x) { return x.norm() <= r * (1.0 + 1e-9) ? 0.0 : inf; };
    }
    case ConstraintKind::box: {
      const double lo = c.lo, hi = c.hi;
      const double slack = 1e-9 * (hi - lo);
      return [lo, hi, slack](const Vec& x) {
        return (x.minCoeff() >= lo - slack && x.maxCoeff() <= hi + slack) ? 0.0 : inf;
      };
    }
    case ConstraintKind::l1: {
      const double w = c.weight;
      return [w](const Vec& x) { return w * x.lpNorm<1>(); };
    }
  }
  throw std::logic_error("make_h: unknown constraint");
}

std::function<Vec(const Vec&, double)> make_prox(const ConstraintSpec& c) {
  switch (c.kind) {
    case ConstraintKind::ball: {
      const double r = c.radius;
      return [r](const Vec& x, double) {
        const double n = x.norm();
        return n <= r ? x : Vec(x * (r / n));
      };
    }
    case ConstraintKind::box: {
      const double lo = c.lo, hi = c.hi;
      return [lo, hi](const Vec& x, double) {
        return Vec(x.array().max(lo).min(hi));
      };
    }
    case ConstraintKind::l1: {
      const double w = c.weight;
      return [w](const Vec& x, double t) {
        const double thr = w * t;
        return Vec(x.array().sign() * (x.array().abs() - thr).max(0.0));
      };
    }
  }
  throw std::logic_error("make_prox: unknown constraint");
}

}  // namespace

Vec CompositeQuadratic::exact_minimizer(double lambda, const Vec& center) const {
  // min 1/2 x' (A + lambda I) x - b' x + h(x), b = A x_unc + lambda center.
  const Vec b = matrix * smooth_minimizer + lambda * center;
  if (constraint.kind == ConstraintKind::ball)
    return ball_constrained_argmin(eigvecs, eigvals, lambda, b, constraint.radius);

  SolveSpec spec;
  const Mat& a = matrix;
  spec.value = [&a, &b, lambda](const Vec& x) {
    return 0.5 * x.dot(a * x) + 0.5 * lambda * x.squaredNorm() - b.dot(x);
  };
  spec.grad = [&a, &b, lambda](const Vec& x) { return Vec(a * x + lambda * x - b); };
  spec.prox = make_prox(constraint);
  spec.mu = eigvals.minCoeff() + lambda;
  spec.lip_hint = eigvals.maxCoeff() + lambda;
  spec.max_iter = 200000;
  const double tol = 1e-13 * (1.0 + b.norm());
  return deterministic_solve(spec, Vec::Zero(matrix.rows()), tol);
}

double CompositeQuadratic::exact_min_value(double lambda, const Vec& center) const {
  const Vec x = exact_minimizer(lambda, center);
  return problem.smooth.value(x) + 0.5 * lambda * (x - center).squaredNorm() +
         problem.nonsmooth_value(x);
}

CompositeProblem CompositeQuadratic::shifted_problem(double lambda,
                                                     const Vec& center) const {
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

  const Vec xbar = exact_minimizer(lambda, center);
  CompositeGroundTruth gt;
  gt.minimizer = xbar;
  gt.min_value = exact_min_value(lambda, center);
  gt.grad_at_min = shifted.smooth.grad(xbar);
  shifted.ground_truth = gt;
  shifted.smooth.ground_truth.reset();
  return shifted;
}

CompositeQuadratic make_composite(int dim, ConstraintSpec constraint, double mu,
                                  double lip_grad, double sigma, NoiseTail tail,
                                  double dof, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_composite: dim < 1");
  if (!(mu > 0.0) || lip_grad < mu)
    throw std::invalid_argument("make_composite: need lip_grad >= mu > 0");
  if (constraint.kind == ConstraintKind::ball && !(constraint.radius > 0.0))
    throw std::invalid_argument("make_composite: ball radius must be positive");
  if (constraint.kind == ConstraintKind::box && !(constraint.hi > constraint.lo))
    throw std::invalid_argument("make_composite: empty box");
  if (constraint.kind == ConstraintKind::l1 && !(constraint.weight > 0.0))
    throw std::invalid_argument("make_composite: l1 weight must be positive");

  RngStream rng = derive_rng(seed, {0x73ull});
  auto core = std::make_shared<QuadCore>();
  core->eigvals = log_spaced(dim, mu, lip_grad);
  core->eigvecs = random_rotation(dim, rng);
  core->matrix = core->eigvecs * core->eigvals.asDiagonal() *
                 core->eigvecs.transpose();
  core->noise = NoiseModel::make(tail, dof, sigma * sigma, dim);
  core->min_value = 0.0;

  // Place the unconstrained minimizer outside the feasible region, two times
  // the feasible extent along a random ray.
  const Vec dir = unit_direction(dim, rng);
  Vec x_unc;
  switch (constraint.kind) {
    case ConstraintKind::ball:
      x_unc = 2.0 * constraint.radius * dir;
      break;
    case ConstraintKind::box: {
      const double mid = 0.5 * (constraint.lo + constraint.hi);
      double extent = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim; ++i) {
        if (dir[i] > 1e-14)
          extent = std::min(extent, (constraint.hi - mid) / dir[i]);
        else if (dir[i] < -1e-14)
          extent = std::min(extent, (constraint.lo - mid) / dir[i]);
      }
      x_unc = Vec::Constant(dim, mid) + 2.0 * extent * dir;
      break;
    }
    case ConstraintKind::l1: {
      // Scale so ||grad g(0)||_inf = 4w: the origin is never optimal and the
      // shrinkage stays active at the solution.
      const Vec adir = core->matrix * dir;
      const double scale = 4.0 * constraint.weight / adir.lpNorm<Eigen::Infinity>();
      x_unc = scale * dir;
      break;
    }
  }
  core->minimizer = x_unc;

  CompositeQuadratic cq;
  cq.constraint = constraint;
  cq.matrix = core->matrix;
  cq.eigvecs = core->eigvecs;
  cq.eigvals = core->eigvals;
  cq.smooth_minimizer = x_unc;
  cq.problem.smooth = instance_from_core(core, mu, lip_grad, sigma * sigma);
  cq.problem.smooth.ground_truth.reset();  // the composite owns the ground truth
  cq.problem.nonsmooth_value = make_h(constraint);
  cq.problem.prox = make_prox(constraint);
  cq.problem.combined_mu = mu;

  const Vec xbar = cq.exact_minimizer(0.0, Vec::Zero(dim));
  CompositeGroundTruth gt;
  gt.minimizer = xbar;
  gt.grad_at_min = cq.matrix * (xbar - x_unc);
  gt.min_value = cq.problem.smooth.value(xbar) + cq.problem.nonsmooth_value(xbar);
  if (gt.grad_at_min.norm() <= 1e-10 * lip_grad)
    throw std::invalid_argument("make_composite: minimizer not constrained");
  cq.problem.ground_truth = gt;
  return cq;
}

namespace {

double checked_gap(double gap) {
  if (gap < -1e-12)
    throw std::runtime_error("true_gap: negative gap, inconsistent ground truth");
  return gap;
}

}  // namespace

double true_gap(const ProblemInstance& problem, const Vec& x) {
  if (!problem.ground_truth)
    throw std::invalid_argument("true_gap: ground truth required");
  return checked_gap(problem.value(x) - problem.ground_truth->min_value);
}

double true_gap(const CompositeProblem& problem, const Vec& x) {
  if (!problem.ground_truth)
    throw std::invalid_argument("true_gap: ground truth required");
  const double hx = problem.nonsmooth_value(x);
  if (std::isinf(hx)) return hx;
  return checked_gap(problem.smooth.value(x) + hx - problem.ground_truth->min_value);
}

double true_gap(const ErmProblem& problem, const Vec& x) {
  return checked_gap(problem.population_value(x) - problem.ground_truth.min_value);
}

}  // namespace proxboost
