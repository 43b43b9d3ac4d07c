#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "proxboost/composite.hpp"
#include "proxboost/engine.hpp"
#include "proxboost/erm.hpp"
#include "proxboost/harness.hpp"
#include "proxboost/oracles.hpp"
#include "proxboost/problems.hpp"
#include "proxboost/robust.hpp"

namespace py = pybind11;
using namespace proxboost;

namespace {

NoiseTail tail_of(const std::string& name) {
  if (name == "gaussian") return NoiseTail::gaussian;
  if (name == "student_t") return NoiseTail::student_t;
  throw std::invalid_argument("unknown tail: " + name);
}

Pseudometric metric_of(const std::string& kind, double scale) {
  if (kind == "euclidean") return Pseudometric::euclidean();
  if (kind == "scaled_euclidean") return Pseudometric::scaled_euclidean(scale);
  throw std::invalid_argument("unknown pseudometric: " + kind);
}

MinimizationOracle oracle_of(const QuadraticProblem& problem,
                             const std::string& name) {
  if (name == "sgd") return make_sgd_oracle(problem.instance);
  if (name == "acc_sgd") return make_acc_sgd_oracle(problem.instance);
  throw std::invalid_argument("unknown oracle: " + name);
}

py::dict record_dict(const TrialRecord& r) {
  py::dict out;
  out["trial_id"] = r.trial_id;
  out["method"] = method_name(r.method);
  out["epsilon"] = r.epsilon_target;
  out["p"] = r.p;
  out["T"] = r.stages;
  out["m"] = r.trials_m;
  out["samples_used"] = r.samples_used;
  out["final_gap"] = r.final_gap;
  out["success"] = r.success;
  out["seed"] = r.seed;
  out["error"] = r.error;
  return out;
}

}  // namespace

PYBIND11_MODULE(_proxboost, m) {
  m.doc() = "High-probability guarantees for stochastic convex optimization: "
            "robust distance estimation inside an inexact proximal point "
            "continuation.";

  py::class_<RngStream>(m, "RngStream")
      .def(py::init([](std::uint64_t seed, const std::vector<std::uint64_t>& path) {
             return derive_rng(seed, std::span<const std::uint64_t>(path));
           }),
           py::arg("seed"), py::arg("path") = std::vector<std::uint64_t>{})
      .def("child", &RngStream::child)
      .def("uniform", &RngStream::next_double)
      .def("gaussian", &RngStream::next_gaussian)
      .def("student_t", &RngStream::next_student_t);

  py::class_<QuadraticProblem>(m, "QuadraticProblem")
      .def_property_readonly("dim",
                             [](const QuadraticProblem& q) { return q.instance.dim; })
      .def_property_readonly("mu",
                             [](const QuadraticProblem& q) { return q.instance.mu; })
      .def_property_readonly(
          "lip_grad", [](const QuadraticProblem& q) { return q.instance.lip_grad; })
      .def_readonly("minimizer", &QuadraticProblem::minimizer)
      .def_readonly("min_value", &QuadraticProblem::min_value)
      .def("value",
           [](const QuadraticProblem& q, const Vec& x) { return q.instance.value(x); })
      .def("grad",
           [](const QuadraticProblem& q, const Vec& x) { return q.instance.grad(x); })
      .def("true_gap",
           [](const QuadraticProblem& q, const Vec& x) { return true_gap(q.instance, x); })
      .def("prox_minimizer", &QuadraticProblem::prox_minimizer, py::arg("lambda_"),
           py::arg("center"));

  m.def(
      "make_quadratic",
      [](int dim, double mu, double lip, double sigma, const std::string& tail,
         double dof, std::uint64_t seed) {
        return make_quadratic(dim, mu, lip, sigma, tail_of(tail), dof, seed);
      },
      py::arg("dim"), py::arg("mu"), py::arg("lip_grad"), py::arg("sigma"),
      py::arg("tail") = "gaussian", py::arg("dof") = 2.5, py::arg("seed") = 1);

  m.def(
      "weak_radius",
      [](const std::vector<Vec>& points, std::size_t i, const std::string& metric,
         double scale) { return weak_radius(points, i, metric_of(metric, scale)); },
      py::arg("points"), py::arg("i"), py::arg("metric") = "euclidean",
      py::arg("scale") = 1.0);
  m.def(
      "robust_select",
      [](const std::vector<Vec>& points, const std::string& metric, double scale) {
        const RobustSelection sel = robust_select(points, metric_of(metric, scale));
        return py::make_tuple(sel.index, sel.point, sel.radius);
      },
      py::arg("points"), py::arg("metric") = "euclidean", py::arg("scale") = 1.0);
  m.def(
      "extract",
      [](const std::vector<Vec>& points, const std::string& metric, double scale) {
        return extract(points, metric_of(metric, scale));
      },
      py::arg("points"), py::arg("metric") = "euclidean", py::arg("scale") = 1.0);

  m.def(
      "moreau_envelope",
      [](const std::string& fn, double nu, double t) {
        const MoreauPoint p = moreau_envelope_scalar(
            fn == "abs" ? ScalarFn::abs : ScalarFn::hinge, nu, t);
        return py::make_tuple(p.value, p.derivative);
      },
      py::arg("fn"), py::arg("nu"), py::arg("t"));

  m.def("epsilon_schedule", &epsilon_schedule, py::arg("delta"), py::arg("mu"),
        py::arg("lambda_j"));
  m.def(
      "geometric_schedule",
      [](double mu, double lip, double eps, double p, const std::string& variant) {
        const Schedule s = geometric_schedule(
            mu, lip, eps, p,
            variant == "composite" ? ScheduleVariant::composite
                                   : ScheduleVariant::streaming);
        py::dict out;
        out["T"] = s.num_stages;
        out["m"] = s.trials;
        out["delta"] = s.delta;
        out["lambdas"] = s.lambdas;
        return out;
      },
      py::arg("mu"), py::arg("lip_grad"), py::arg("eps"), py::arg("p"),
      py::arg("variant") = "streaming");

  m.def("clopper_pearson_upper", &clopper_pearson_upper, py::arg("failures"),
        py::arg("n"), py::arg("confidence"));

  m.def(
      "boost_alg",
      [](const QuadraticProblem& problem, const Vec& x_in, double eps, double p,
         std::uint64_t seed, const std::string& oracle) {
        const Schedule schedule = geometric_schedule(
            problem.instance.mu, problem.instance.lip_grad, eps, p);
        const double delta_in = true_gap(problem.instance, x_in);
        const BoostResult r =
            boost_alg(oracle_of(problem, oracle), schedule.delta,
                      std::max(delta_in, 1e-12), x_in, schedule,
                      problem.instance.lip_grad, derive_rng(seed, {0}));
        py::dict out;
        out["point"] = r.point;
        out["samples"] = r.trace.total_samples();
        out["final_gap"] = true_gap(problem.instance, r.point);
        out["T"] = schedule.num_stages;
        out["m"] = schedule.trials;
        return out;
      },
      py::arg("problem"), py::arg("x_in"), py::arg("eps"), py::arg("p"),
      py::arg("seed") = 42, py::arg("oracle") = "sgd");

  m.def(
      "run_trials",
      [](const std::string& config_text, py::object seed, py::object jobs) {
        RunConfig cfg = RunConfig::from_string(config_text);
        if (!seed.is_none()) cfg.base_seed = seed.cast<std::uint64_t>();
        if (!jobs.is_none()) cfg.jobs = jobs.cast<int>();
        const auto records = run_trials(cfg);
        const auto report =
            empirical_failure(records, records.front().epsilon_target);
        py::list out;
        for (const TrialRecord& r : records) out.append(record_dict(r));
        py::dict summary;
        summary["failures"] = report.failures;
        summary["replications"] = report.replications;
        summary["failure_rate"] = report.failure_rate;
        summary["upper95"] = report.upper95;
        summary["upper99"] = report.upper99;
        summary["mean_samples"] = report.mean_samples;
        return py::make_tuple(out, summary);
      },
      py::arg("config_text"), py::arg("seed") = py::none(),
      py::arg("jobs") = py::none());
}
