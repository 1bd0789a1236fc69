#include "rrk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rrk {

namespace {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

RunRecord<double> empty_record(const Problem<double>& problem, const Tableau<double>& tableau,
                               const Strategy& strategy, double tol_or_dt) {
  RunRecord<double> rec;
  rec.problem = problem.name;
  rec.method = tableau.name;
  rec.strategy = strategy.name();
  rec.variant = strategy.variant();
  rec.tol_or_dt = tol_or_dt;
  return rec;
}

// Registry problems fall back to their default span; ad hoc problems to 1.
double final_time(const Problem<double>& problem, const ExperimentSpec& spec) {
  if (spec.t_end) return *spec.t_end;
  const auto& names = problem_names();
  return std::find(names.begin(), names.end(), problem.name) != names.end() ? default_t_end(problem.name) : 1.0;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("read_csv: bad number '" + s + "'");
  return v;
}

RunStatus parse_run_status(const std::string& s) {
  if (s == "dt-collapse") return RunStatus::DtCollapse;
  if (s == "max-steps") return RunStatus::MaxSteps;
  if (s == "non-finite") return RunStatus::NonFinite;
  return RunStatus::Ok;
}

}  // namespace

std::vector<double> default_dt_ladder() {
  std::vector<double> dts;
  for (int k = 0; k <= 6; ++k) dts.push_back(0.1 * std::ldexp(1.0, -k));
  return dts;
}

std::vector<double> default_tolerance_ladder() {
  std::vector<double> tols;
  for (int e = 4; e <= 10; ++e) tols.push_back(std::pow(10.0, -e));
  return tols;
}

bool expected_to_fail(const std::string& problem, const Strategy& strategy) {
  return problem == "bounded_oscillator" && strategy.kind == StrategyKind::RFsal &&
         (strategy.rfsal_embedded == RFsalEmbedded::V1 || strategy.rfsal_embedded == RFsalEmbedded::V2);
}

bool row_passes(const Row& row) { return row.status == "ok" || row.status == "expected-failure"; }

IntegratorOptions<double> integrator_options(const ExperimentSpec& spec) {
  IntegratorOptions<double> o;
  if (spec.abs_tol) o.tol.abs = *spec.abs_tol;
  if (spec.rel_tol) o.tol.rel = *spec.rel_tol;
  if (spec.beta) o.beta = *spec.beta;
  o.dt0 = spec.dt0;
  o.dt_max = spec.dt_max;
  o.max_steps = spec.max_steps;
  return o;
}

Row run_record(const Problem<double>& problem, const Tableau<double>& tableau, const Strategy& strategy,
               const IntegratorOptions<double>& options, double t_end) {
  Row row;
  try {
    row.record = integrate(problem, tableau, strategy, options, t_end);
    row.status = to_string(row.record.status);
  } catch (const std::exception& e) {
    row.record = empty_record(problem, tableau, strategy, options.fixed_dt ? *options.fixed_dt : options.tol.rel);
    row.status = "error";
    row.message = e.what();
  }
  if (row.status != "ok" && row.status != "error" && expected_to_fail(problem.name, strategy)) row.status = "expected-failure";
  return row;
}

ConvergenceTable run_convergence(const ExperimentSpec& spec) {
  return run_convergence(make_problem(spec.problem, spec.problem_options), spec);
}

ConvergenceTable run_convergence(const Problem<double>& problem, const ExperimentSpec& spec) {
  const auto dts = spec.dts.empty() ? default_dt_ladder() : spec.dts;
  const auto tableau = make_tableau(spec.method);
  const double t_end = final_time(problem, spec);

  ConvergenceTable table;
  table.rows.resize(dts.size());
  parallel_for(dts.size(), spec.jobs, [&](std::size_t i) {
    auto o = integrator_options(spec);
    o.fixed_dt = dts[i];
    table.rows[i] = run_record(problem, tableau, spec.strategy, o, t_end);
  });

  std::vector<double> errors;
  for (const auto& r : table.rows) errors.push_back(r.status == "ok" ? r.record.final_error : std::nan(""));
  double scale = 1;
  if (problem.has_reference()) scale = std::max(1.0, problem.l2_norm(problem.exact(t_end)));
  const double floor = 100 * std::numeric_limits<double>::epsilon() * scale;
  table.fit = fit_asymptotic_slope(dts, errors, 0.3, floor);
  if (!table.fit.valid || table.fit.slope < 0.5)
    for (auto& r : table.rows)
      if (r.status == "ok") r.status = "non-convergent";
  return table;
}

std::vector<Row> run_work_precision(const ExperimentSpec& spec) {
  return run_work_precision(make_problem(spec.problem, spec.problem_options), spec);
}

std::vector<Row> run_work_precision(const Problem<double>& problem, const ExperimentSpec& spec) {
  const auto tols = spec.tols.empty() ? default_tolerance_ladder() : spec.tols;
  const auto tableau = make_tableau(spec.method);
  const double t_end = final_time(problem, spec);
  std::vector<Row> rows(tols.size());
  parallel_for(tols.size(), spec.jobs, [&](std::size_t i) {
    auto o = integrator_options(spec);
    o.tol.abs = spec.abs_tol.value_or(tols[i]);
    o.tol.rel = spec.rel_tol.value_or(tols[i]);
    rows[i] = run_record(problem, tableau, spec.strategy, o, t_end);
    rows[i].record.tol_or_dt = tols[i];
  });
  return rows;
}

Row run_single(const ExperimentSpec& spec) { return run_single(make_problem(spec.problem, spec.problem_options), spec); }

Row run_single(const Problem<double>& problem, const ExperimentSpec& spec) {
  const auto tableau = make_tableau(spec.method);
  const double t_end = final_time(problem, spec);
  auto o = integrator_options(spec);
  if (!spec.dts.empty()) {
    o.fixed_dt = spec.dts.front();
  } else if (!spec.tols.empty()) {
    o.tol.abs = spec.abs_tol.value_or(spec.tols.front());
    o.tol.rel = spec.rel_tol.value_or(spec.tols.front());
  }

  std::ofstream traj;
  if (!spec.trajectory.empty()) {
    traj.open(spec.trajectory);
    if (!traj) throw std::runtime_error("cannot open trajectory file '" + spec.trajectory + "'");
    traj << "t,gamma,dt,eta";
    for (Eigen::Index i = 0; i < problem.dim; ++i) traj << ",u" << i;
    traj << '\n';
    auto write = [&traj, &problem](double t, const Vector<double>& u, double gamma, double dt) {
      traj << format_double(t) << ',' << format_double(gamma) << ',' << format_double(dt) << ','
           << format_double(problem.entropy(u));
      for (Eigen::Index i = 0; i < u.size(); ++i) traj << ',' << format_double(u(i));
      traj << '\n';
    };
    write(problem.t0, problem.u0, 1.0, 0.0);
    o.observer = write;
  }
  return run_record(problem, tableau, spec.strategy, o, t_end);
}

std::vector<Row> run_experiment(const ExperimentSpec& spec, std::optional<SlopeFit>* fit) {
  switch (spec.mode) {
    case Mode::Convergence: {
      auto table = run_convergence(spec);
      if (fit) *fit = table.fit;
      return table.rows;
    }
    case Mode::WorkPrecision: return run_work_precision(spec);
    case Mode::Single: return {run_single(spec)};
  }
  return {};
}

double conservation_residual(const Problem<double>& problem, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> clock(0.0, 10.0);
  const double scale = std::max(1.0, problem.u0.cwiseAbs().maxCoeff());
  double worst = 0;
  Vector<double> u(problem.dim), du(problem.dim);
  for (int k = 0; k < samples; ++k) {
    for (Eigen::Index i = 0; i < problem.dim; ++i) u(i) = problem.u0(i) + 0.5 * scale * normal(rng);
    double t = problem.t0;
    if (problem.clock) {
      t = clock(rng);
      u(*problem.clock) = t;
    }
    problem.rhs(t, u, du);
    const Vector<double> g = problem.entropy_gradient(u);
    const double denom = g.norm() * du.norm();
    if (denom > 0) worst = std::max(worst, std::abs(g.dot(du)) / denom);
  }
  return worst;
}

const char* const kCsvHeader =
    "problem,method,strategy,variant,tol_or_dt,final_error,entropy_drift,rhs_calls,accepted,rejected,gamma_min,"
    "gamma_max,status,runtime_ns";

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& os, const Row& row) {
  const auto& r = row.record;
  os << r.problem << ',' << r.method << ',' << r.strategy << ',' << r.variant << ',' << format_double(r.tol_or_dt)
     << ',' << format_double(r.final_error) << ',' << format_double(r.entropy_drift) << ',' << r.rhs_calls << ','
     << r.accepted << ',' << r.rejected << ',' << format_double(r.gamma_min) << ',' << format_double(r.gamma_max)
     << ',' << row.status << ',' << r.runtime_ns << '\n';
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
}

std::vector<Row> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::invalid_argument("read_csv: unexpected header");
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 14) throw std::invalid_argument("read_csv: expected 14 fields, got " + std::to_string(f.size()));
    Row row;
    auto& r = row.record;
    r.problem = f[0];
    r.method = f[1];
    r.strategy = f[2];
    r.variant = f[3];
    r.tol_or_dt = parse_double(f[4]);
    r.final_error = parse_double(f[5]);
    r.entropy_drift = parse_double(f[6]);
    r.rhs_calls = std::stoll(f[7]);
    r.accepted = std::stoll(f[8]);
    r.rejected = std::stoll(f[9]);
    r.gamma_min = parse_double(f[10]);
    r.gamma_max = parse_double(f[11]);
    row.status = f[12];
    r.status = parse_run_status(f[12]);
    r.runtime_ns = std::stoll(f[13]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rrk
