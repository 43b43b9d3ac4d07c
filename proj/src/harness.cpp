#include "proxboost/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "proxboost/oracles.hpp"

namespace proxboost {

namespace {

const std::map<std::string, Method>& method_table() {
  static const std::map<std::string, Method> table = {
      {"naive-markov", Method::naive_markov},
      {"best-of-m", Method::best_of_m},
      {"robust-distance", Method::robust_distance},
      {"proxboost", Method::proxboost},
      {"boost-erm", Method::boost_erm},
      {"boost-ermc", Method::boost_ermc},
      {"boost-alg", Method::boost_alg},
      {"boost-algc", Method::boost_algc},
  };
  return table;
}

}  // namespace

std::string method_name(Method m) {
  for (const auto& [name, value] : method_table())
    if (value == m) return name;
  throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  const auto it = method_table().find(name);
  if (it == method_table().end())
    throw std::invalid_argument("unknown method: " + name);
  return it->second;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PROXBOOST_JOBS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("bad number: " + v);
  return x;
}

}  // namespace

void RunConfig::set_key(const std::string& key, const std::string& value) {
  if (key == "problem") problem = value;
  else if (key == "dim") dim = std::stoi(value);
  else if (key == "mu") mu = parse_double(value);
  else if (key == "lip_grad") lip_grad = parse_double(value);
  else if (key == "sigma2") sigma2 = parse_double(value);
  else if (key == "tail") tail = value;
  else if (key == "dof") dof = parse_double(value);
  else if (key == "problem_seed") problem_seed = std::stoull(value);
  else if (key == "constraint") constraint = value;
  else if (key == "radius") radius = parse_double(value);
  else if (key == "lo") lo = parse_double(value);
  else if (key == "hi") hi = parse_double(value);
  else if (key == "weight") weight = parse_double(value);
  else if (key == "n_pop") n_pop = std::stoll(value);
  else if (key == "lip_hat") lip_hat = parse_double(value);
  else if (key == "kappa_pop") kappa_pop = parse_double(value);
  else if (key == "method") method = value;
  else if (key == "oracle") oracle = value;
  else if (key == "eps") eps = parse_double(value);
  else if (key == "eps_rel") eps_rel = parse_double(value);
  else if (key == "p") p = parse_double(value);
  else if (key == "gamma_prime") gamma_prime = parse_double(value);
  else if (key == "T") stages_override = std::stoi(value);
  else if (key == "m") trials_override = std::stoi(value);
  else if (key == "init_distance") init_distance = parse_double(value);
  else if (key == "R") replications = std::stoll(value);
  else if (key == "base_seed") base_seed = std::stoull(value);
  else if (key == "jobs") jobs = std::stoi(value);
  else if (key == "out_dir") out_dir = value;
  else throw std::invalid_argument("unknown config key: " + key);
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': " + line);
    cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

std::string RunConfig::to_string() const {
  std::ostringstream out;
  out << "problem = " << problem << "\n";
  out << "dim = " << dim << "\n";
  out << "mu = " << format_double(mu) << "\n";
  out << "lip_grad = " << format_double(lip_grad) << "\n";
  out << "sigma2 = " << format_double(sigma2) << "\n";
  out << "tail = " << tail << "\n";
  out << "dof = " << format_double(dof) << "\n";
  out << "problem_seed = " << problem_seed << "\n";
  out << "constraint = " << constraint << "\n";
  out << "radius = " << format_double(radius) << "\n";
  out << "lo = " << format_double(lo) << "\n";
  out << "hi = " << format_double(hi) << "\n";
  out << "weight = " << format_double(weight) << "\n";
  out << "n_pop = " << n_pop << "\n";
  out << "lip_hat = " << format_double(lip_hat) << "\n";
  out << "kappa_pop = " << format_double(kappa_pop) << "\n";
  out << "method = " << method << "\n";
  out << "oracle = " << oracle << "\n";
  out << "eps = " << format_double(eps) << "\n";
  out << "eps_rel = " << format_double(eps_rel) << "\n";
  out << "p = " << format_double(p) << "\n";
  out << "gamma_prime = " << format_double(gamma_prime) << "\n";
  out << "T = " << stages_override << "\n";
  out << "m = " << trials_override << "\n";
  out << "init_distance = " << format_double(init_distance) << "\n";
  out << "R = " << replications << "\n";
  out << "base_seed = " << base_seed << "\n";
  out << "jobs = " << jobs << "\n";
  out << "out_dir = " << out_dir << "\n";
  return out.str();
}

void RunConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("config: R must be >= 1");
  method_from_name(method);
  if (problem != "quadratic" && problem != "erm" && problem != "composite")
    throw std::invalid_argument("config: unknown problem: " + problem);
  if (tail != "gaussian" && tail != "student_t")
    throw std::invalid_argument("config: unknown tail: " + tail);
  if (constraint != "ball" && constraint != "box" && constraint != "l1")
    throw std::invalid_argument("config: unknown constraint: " + constraint);
  if (!oracle.empty() && oracle != "sgd" && oracle != "acc_sgd" &&
      oracle != "prox_sgd")
    throw std::invalid_argument("config: unknown oracle: " + oracle);
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("config: p in (0,1)");
  const std::string needed = method == "boost-algc" ? "composite"
                             : method == "boost-erm" || method == "boost-ermc"
                                 ? "erm"
                                 : "quadratic";
  if (problem != needed)
    throw std::invalid_argument("config: method " + method + " requires problem " +
                                needed);
}

// ---------------------------------------------------------------------------
// Clopper-Pearson

namespace {

double beta_cont_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_cont_fraction(a, b, x) / a;
  return 1.0 - front * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double clopper_pearson_upper(long long failures, long long n, double confidence) {
  if (n < 1) throw std::invalid_argument("clopper_pearson_upper: n must be >= 1");
  if (failures < 0 || failures > n)
    throw std::invalid_argument("clopper_pearson_upper: failures out of range");
  if (failures >= n) return 1.0;
  // Smallest p with P(Bin(n,p) <= failures) <= 1 - confidence, i.e.
  // I_p(failures+1, n-failures) = confidence.
  const double a = static_cast<double>(failures) + 1.0;
  const double b = static_cast<double>(n - failures);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (incomplete_beta(a, b, mid) < confidence ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Trial runner

namespace {

struct BuiltProblem {
  std::optional<QuadraticProblem> quad;
  std::optional<CompositeQuadratic> comp;
  std::optional<ErmProblem> erm_problem;
  std::optional<CompositeErmProblem> cerm;
  Vec x_in;
  double initial_gap = 0.0;
};

NoiseTail tail_from_string(const std::string& s) {
  return s == "gaussian" ? NoiseTail::gaussian : NoiseTail::student_t;
}

ConstraintSpec constraint_from_config(const RunConfig& cfg) {
  ConstraintSpec spec;
  spec.kind = cfg.constraint == "ball"  ? ConstraintKind::ball
              : cfg.constraint == "box" ? ConstraintKind::box
                                        : ConstraintKind::l1;
  spec.radius = cfg.radius;
  spec.lo = cfg.lo;
  spec.hi = cfg.hi;
  spec.weight = cfg.weight;
  return spec;
}

BuiltProblem build_problem(const RunConfig& cfg) {
  BuiltProblem built;
  const NoiseTail tail = tail_from_string(cfg.tail);
  const double sigma = std::sqrt(cfg.sigma2);
  if (cfg.problem == "quadratic") {
    built.quad = make_quadratic(cfg.dim, cfg.mu, cfg.lip_grad, sigma, tail,
                                cfg.dof, cfg.problem_seed);
    RngStream dir_rng = derive_rng(cfg.problem_seed, {0xD1ull});
    Vec dir(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) dir[i] = dir_rng.next_gaussian();
    dir.normalize();
    built.x_in = built.quad->minimizer + cfg.init_distance * dir;
    built.initial_gap = true_gap(built.quad->instance, built.x_in);
  } else if (cfg.problem == "composite") {
    built.comp = make_composite(cfg.dim, constraint_from_config(cfg), cfg.mu,
                                cfg.lip_grad, sigma, tail, cfg.dof,
                                cfg.problem_seed);
    // Feasible start: worst of a seeded probe set, so the initial gap
    // reflects a genuinely bad initialization inside dom h.
    RngStream dir_rng = derive_rng(cfg.problem_seed, {0xD1ull});
    const auto& gt = *built.comp->problem.ground_truth;
    double worst = -1.0;
    for (int probe = 0; probe < 64; ++probe) {
      Vec dir(cfg.dim);
      for (int i = 0; i < cfg.dim; ++i) dir[i] = dir_rng.next_gaussian();
      dir.normalize();
      const Vec candidate = built.comp->problem.prox(
          gt.minimizer + cfg.init_distance * dir, 1.0);
      const double gap = true_gap(built.comp->problem, candidate);
      if (gap > worst) {
        worst = gap;
        built.x_in = candidate;
      }
    }
    built.initial_gap = worst;
  } else {
    built.erm_problem = make_nonneg_erm(cfg.dim, cfg.n_pop, cfg.mu, cfg.lip_hat,
                                        cfg.problem_seed, cfg.kappa_pop);
    if (cfg.method == "boost-ermc") {
      built.cerm = make_composite_erm(cfg.dim, cfg.n_pop, cfg.mu, cfg.lip_hat,
                                      cfg.radius, cfg.problem_seed);
      built.x_in = Vec::Zero(cfg.dim);
      built.initial_gap =
          built.cerm->value(built.cerm->prox(built.x_in, 1.0)) -
          built.cerm->ground_truth.min_value;
    } else {
      built.x_in = Vec::Zero(cfg.dim);
      built.initial_gap = true_gap(*built.erm_problem, built.x_in);
    }
  }
  return built;
}

MinimizationOracle smooth_oracle(const RunConfig& cfg,
                                 const QuadraticProblem& quad) {
  if (cfg.oracle == "acc_sgd") return make_acc_sgd_oracle(quad.instance);
  return make_sgd_oracle(quad.instance);
}

TrialRecord run_one(const RunConfig& cfg, const BuiltProblem& built,
                    double eps_target, long long trial) {
  TrialRecord rec;
  rec.trial_id = trial;
  rec.method = method_from_name(cfg.method);
  rec.epsilon_target = eps_target;
  rec.p = cfg.p;
  rec.seed = derive_rng(cfg.base_seed, {static_cast<std::uint64_t>(trial)}).key();
  RngStream rng = derive_rng(cfg.base_seed, {static_cast<std::uint64_t>(trial)});
  const auto start = std::chrono::steady_clock::now();

  try {
    switch (rec.method) {
      case Method::boost_alg:
      case Method::proxboost: {
        const QuadraticProblem& quad = *built.quad;
        Schedule schedule = geometric_schedule(cfg.mu, cfg.lip_grad, eps_target,
                                               cfg.p, ScheduleVariant::streaming);
        if (cfg.stages_override > 0) {
          schedule.num_stages = cfg.stages_override;
          schedule.lambdas.resize(static_cast<std::size_t>(schedule.num_stages) + 1);
          for (int i = 0; i <= schedule.num_stages; ++i)
            schedule.lambdas[static_cast<std::size_t>(i)] =
                cfg.mu * std::ldexp(1.0, i);
          schedule.delta = eps_target / (2.0 + 2.0 * schedule.num_stages);
        }
        if (cfg.trials_override > 0) schedule.trials = cfg.trials_override;
        BoostResult r =
            boost_alg(smooth_oracle(cfg, quad), schedule.delta, built.initial_gap,
                      built.x_in, schedule, cfg.lip_grad, std::move(rng));
        rec.stages = schedule.num_stages;
        rec.trials_m = schedule.trials;
        rec.samples_used = r.trace.total_samples();
        rec.final_gap = true_gap(quad.instance, r.point);
        break;
      }
      case Method::boost_algc: {
        const CompositeQuadratic& comp = *built.comp;
        Schedule schedule = geometric_schedule(cfg.mu, cfg.lip_grad, eps_target,
                                               cfg.p, ScheduleVariant::composite);
        if (cfg.trials_override > 0) schedule.trials = cfg.trials_override;
        BoostResult r = boost_algc(comp.problem, make_prox_sgd_oracle(comp.problem),
                                   schedule.delta, built.initial_gap, built.x_in,
                                   schedule, std::move(rng));
        rec.stages = schedule.num_stages;
        rec.trials_m = schedule.trials + (schedule.trials % 2 == 0 ? 1 : 0);
        rec.samples_used = r.trace.total_samples();
        rec.final_gap = true_gap(comp.problem, r.point);
        break;
      }
      case Method::boost_erm: {
        const ErmProblem& erm_problem = *built.erm_problem;
        const double kappa = erm_problem.lip_grad / erm_problem.mu;
        ErmParams params = erm_geometric_params(kappa, cfg.gamma_prime, cfg.p);
        if (cfg.stages_override > 0) {
          params.stages = cfg.stages_override;
          params.gamma = cfg.gamma_prime / (2.0 + 2.0 * params.stages);
        }
        if (cfg.trials_override > 0) params.trials = cfg.trials_override;
        BoostResult r = boost_erm(erm_problem, params.gamma, params.stages,
                                  params.trials, std::move(rng));
        rec.stages = params.stages;
        rec.trials_m = params.trials;
        rec.samples_used = r.trace.total_samples();
        rec.final_gap = true_gap(erm_problem, r.point);
        break;
      }
      case Method::boost_ermc: {
        const CompositeErmProblem& cerm = *built.cerm;
        const double kappa = cerm.lip_grad / cerm.combined_mu;
        ErmcParams params = ermc_geometric_params(kappa, eps_target, cfg.p);
        if (cfg.trials_override > 0) params.trials = cfg.trials_override;
        BoostResult r = boost_ermc(cerm, params.delta, params.stages,
                                   params.trials, std::move(rng));
        rec.stages = params.stages;
        rec.trials_m = params.trials + (params.trials % 2 == 0 ? 1 : 0);
        rec.samples_used = r.trace.total_samples();
        rec.final_gap = cerm.value(r.point) - cerm.ground_truth.min_value;
        break;
      }
      case Method::naive_markov: {
        const QuadraticProblem& quad = *built.quad;
        OracleResult r =
            sgd_oracle(quad.instance, 3.0 * cfg.p * eps_target, 0.0,
                       built.initial_gap, built.x_in, std::move(rng));
        rec.stages = 0;
        rec.trials_m = 1;
        rec.samples_used = r.samples;
        rec.final_gap = true_gap(quad.instance, r.point);
        break;
      }
      case Method::best_of_m: {
        // Idealized baseline: selection by exact function value.
        const QuadraticProblem& quad = *built.quad;
        const int m = cfg.trials_override > 0
                          ? cfg.trials_override
                          : static_cast<int>(std::ceil(18.0 * std::log(1.0 / cfg.p)));
        Vec best;
        double best_value = std::numeric_limits<double>::infinity();
        long long samples = 0;
        for (int q = 0; q < m; ++q) {
          OracleResult r = sgd_oracle(quad.instance, eps_target, 0.0,
                                      built.initial_gap, built.x_in,
                                      rng.child(static_cast<std::uint64_t>(q)));
          samples += r.samples;
          const double v = quad.instance.value(r.point);
          if (v < best_value) {
            best_value = v;
            best = r.point;
          }
        }
        rec.stages = 0;
        rec.trials_m = m;
        rec.samples_used = samples;
        rec.final_gap = true_gap(quad.instance, best);
        break;
      }
      case Method::robust_distance: {
        // Single-shot robust distance estimation; pays the condition number.
        const QuadraticProblem& quad = *built.quad;
        const double kappa = cfg.lip_grad / cfg.mu;
        const int m = cfg.trials_override > 0
                          ? cfg.trials_override
                          : static_cast<int>(std::ceil(18.0 * std::log(1.0 / cfg.p)));
        OracleResult r =
            alg_r(smooth_oracle(cfg, quad), eps_target / (9.0 * kappa), 0.0,
                  built.initial_gap, built.x_in, m, std::move(rng));
        rec.stages = 0;
        rec.trials_m = m;
        rec.samples_used = r.samples;
        rec.final_gap = true_gap(quad.instance, r.point);
        break;
      }
    }
    rec.success = rec.final_gap <= eps_target;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.final_gap = std::numeric_limits<double>::infinity();
    rec.success = false;
  }
  rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_trials(const RunConfig& config) {
  config.validate();
  const BuiltProblem built = build_problem(config);
  const double eps_target =
      config.method == "boost-erm"
          ? config.gamma_prime * built.erm_problem->ground_truth.min_value
          : (config.eps > 0.0 ? config.eps : config.eps_rel * built.initial_gap);

  const long long r = config.replications;
  std::vector<TrialRecord> records(static_cast<std::size_t>(r));
  const int jobs = static_cast<int>(
      std::max<long long>(1, std::min<long long>(resolve_jobs(config.jobs), r)));
  if (jobs == 1) {
    for (long long i = 0; i < r; ++i)
      records[static_cast<std::size_t>(i)] = run_one(config, built, eps_target, i);
  } else {
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const long long i = next.fetch_add(1);
          if (i >= r) return;
          records[static_cast<std::size_t>(i)] =
              run_one(config, built, eps_target, i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return records;
}

SummaryReport empirical_failure(const std::vector<TrialRecord>& records,
                                double eps_target) {
  if (records.empty())
    throw std::invalid_argument("empirical_failure: no records");
  SummaryReport report;
  report.method = method_name(records.front().method);
  report.epsilon = eps_target;
  report.nominal_p = records.front().p;
  report.replications = static_cast<long long>(records.size());
  std::vector<long long> samples;
  samples.reserve(records.size());
  for (const TrialRecord& rec : records) {
    if (!(rec.final_gap <= eps_target)) ++report.failures;
    if (!rec.error.empty()) ++report.errors;
    samples.push_back(rec.samples_used);
  }
  report.failure_rate =
      static_cast<double>(report.failures) / static_cast<double>(records.size());
  report.upper95 = clopper_pearson_upper(report.failures, report.replications, 0.95);
  report.upper99 = clopper_pearson_upper(report.failures, report.replications, 0.99);
  double mean = 0.0;
  for (long long s : samples) mean += static_cast<double>(s);
  report.mean_samples = mean / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  report.median_samples =
      samples.size() % 2 == 1
          ? static_cast<double>(samples[mid])
          : 0.5 * static_cast<double>(samples[mid - 1] + samples[mid]);
  report.bound = "P(f(x) - fstar > eps) <= p";
  return report;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "trial_id,method,epsilon,p,T,m,samples_used,final_gap,success,wall_ms,seed\n";
  for (const TrialRecord& r : records) {
    out << r.trial_id << ',' << method_name(r.method) << ','
        << format_double(r.epsilon_target) << ',' << format_double(r.p) << ','
        << r.stages << ',' << r.trials_m << ',' << r.samples_used << ','
        << format_double(r.final_gap) << ',' << (r.success ? 1 : 0) << ','
        << r.wall_ms << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string summary_to_json(const SummaryReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["bound"] = report.bound;
  j["epsilon"] = report.epsilon;
  j["nominal_p"] = report.nominal_p;
  j["replications"] = report.replications;
  j["failures"] = report.failures;
  j["errors"] = report.errors;
  j["failure_rate"] = report.failure_rate;
  j["upper95"] = report.upper95;
  j["upper99"] = report.upper99;
  j["mean_samples"] = report.mean_samples;
  j["median_samples"] = report.median_samples;
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit(const std::vector<TrialRecord>& records,
                                        const SummaryReport& report,
                                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path = out_dir / "records.csv";
  const std::filesystem::path json_path = out_dir / "summary.json";
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + csv_path.string());
    out << records_to_csv(records);
  }
  {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + json_path.string());
    out << summary_to_json(report);
  }
  return {csv_path, json_path};
}

}  // namespace proxboost
