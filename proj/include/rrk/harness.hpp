#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rrk/problem.hpp"
#include "rrk/slope.hpp"
#include "rrk/stepper.hpp"
#include "rrk/tableau.hpp"

namespace rrk {

/// Grid sizes and initial data that the registry forwards to the problem
/// constructors.
struct ProblemOptions {
  int dg_elements = 8;
  int dg_degree = 5;
  int fourier_modes = 64;
  double fourier_x_min = -45;
  double fourier_x_max = 45;
  std::array<double, 2> pendulum_u0{1.5, 0.0};
  double pendulum_reference_dt = 1e-5;
};

const std::vector<std::string>& problem_names();
Problem<double> make_problem(const std::string& name, const ProblemOptions& options = {});
/// Final time used when an experiment does not set one.
double default_t_end(const std::string& name);

const std::vector<std::string>& method_names();
Tableau<double> make_tableau(const std::string& name);

StrategyKind parse_strategy_kind(const std::string& s);
FsalRStage1 parse_fsalr_stage1(const std::string& s);
RFsalEmbedded parse_rfsal_variant(const std::string& s);
RFsalCompare parse_rfsal_compare(const std::string& s);
Strategy make_strategy(const std::string& kind, const std::string& fsalr_stage1 = "interpolation",
                       const std::string& rfsal_variant = "v4", const std::string& rfsal_compare = "c3");

enum class Mode { Convergence, WorkPrecision, Single };
Mode parse_mode(const std::string& s);

struct ExperimentSpec {
  Mode mode = Mode::Single;
  std::string problem = "harmonic_oscillator";
  std::string method = "bs3";
  Strategy strategy = Strategy::fsalr();
  std::vector<double> dts;
  std::vector<double> tols;
  std::optional<double> t_end;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<std::array<double, 3>> beta;
  std::optional<double> dt0;
  std::optional<double> dt_max;
  std::int64_t max_steps = 10'000'000;
  ProblemOptions problem_options;
  std::string out;
  std::string trajectory;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// 0.1 * 2^-k for k = 0..6.
std::vector<double> default_dt_ladder();
/// 1e-4, 1e-5, ..., 1e-10.
std::vector<double> default_tolerance_ladder();

/// One CSV row: the run record plus the harness verdict.
struct Row {
  RunRecord<double> record;
  /// ok, dt-collapse, max-steps, non-finite, error, non-convergent or
  /// expected-failure.
  std::string status = "ok";
  std::string message;
};

struct ConvergenceTable {
  std::vector<Row> rows;
  SlopeFit fit;
};

/// R-FSAL with dt-based embedded bookkeeping (V1, V2) on the time-dependent
/// oscillator; failures of these runs are reported as expected.
bool expected_to_fail(const std::string& problem, const Strategy& strategy);

bool row_passes(const Row& row);

IntegratorOptions<double> integrator_options(const ExperimentSpec& spec);

Row run_record(const Problem<double>& problem, const Tableau<double>& tableau, const Strategy& strategy,
               const IntegratorOptions<double>& options, double t_end);

/// Fixed-step runs over the dt ladder with the asymptotic slope fit. A slope
/// below 0.5 marks every row non-convergent.
ConvergenceTable run_convergence(const ExperimentSpec& spec);
ConvergenceTable run_convergence(const Problem<double>& problem, const ExperimentSpec& spec);

/// Adaptive runs over the tolerance ladder (abs = rel = tol unless overridden).
std::vector<Row> run_work_precision(const ExperimentSpec& spec);
std::vector<Row> run_work_precision(const Problem<double>& problem, const ExperimentSpec& spec);

/// One run: fixed-step when `dts` holds a value, adaptive otherwise. Writes
/// the (t, gamma, dt, eta, u) series when `spec.trajectory` is set.
Row run_single(const ExperimentSpec& spec);
Row run_single(const Problem<double>& problem, const ExperimentSpec& spec);

std::vector<Row> run_experiment(const ExperimentSpec& spec, std::optional<SlopeFit>* fit = nullptr);

/// Largest |<eta'(u), f(t, u)>| / (|eta'(u)| |f(t, u)|) over seeded random
/// states near u0.
double conservation_residual(const Problem<double>& problem, std::uint64_t seed, int samples = 1000);

extern const char* const kCsvHeader;
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const Row& row);
void write_csv(std::ostream& os, const std::vector<Row>& rows);
/// Parses rows written by write_csv; throws on a header mismatch.
std::vector<Row> read_csv(std::istream& is);

}  // namespace rrk
