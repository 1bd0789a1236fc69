#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "rrk/harness.hpp"

using rrk::ExperimentSpec;
using rrk::Row;
using Vec = Eigen::VectorXd;

namespace {

Row sample_row() {
  Row row;
  auto& r = row.record;
  r.problem = "bbm_quadratic";
  r.method = "dp5";
  r.strategy = "rfsal";
  r.variant = "v4-c3";
  r.tol_or_dt = 1e-7;
  r.final_error = 0.1 + 0.2;
  r.entropy_drift = 3.3306690738754696e-16;
  r.rhs_calls = 1234;
  r.accepted = 200;
  r.rejected = 5;
  r.gamma_min = 0.99999987654321;
  r.gamma_max = 1.0000001234567891;
  r.runtime_ns = 987654321;
  return row;
}

std::string temp_path(const std::string& name) { return "rrk_test_" + name; }

}  // namespace

TEST_CASE("CSV header is fixed") {
  std::ostringstream os;
  rrk::write_csv_header(os);
  CHECK(os.str() ==
        "problem,method,strategy,variant,tol_or_dt,final_error,entropy_drift,rhs_calls,accepted,rejected,gamma_min,"
        "gamma_max,status,runtime_ns\n");
}

TEST_CASE("CSV round-trip is exact") {
  auto a = sample_row();
  auto b = sample_row();
  b.status = "expected-failure";
  b.record.final_error = std::numeric_limits<double>::quiet_NaN();
  b.record.gamma_max = std::numeric_limits<double>::infinity();
  std::stringstream ss;
  rrk::write_csv(ss, {a, b});
  const auto rows = rrk::read_csv(ss);
  REQUIRE(rows.size() == 2);
  const auto& r = rows[0].record;
  CHECK(r.problem == "bbm_quadratic");
  CHECK(r.variant == "v4-c3");
  CHECK(r.tol_or_dt == a.record.tol_or_dt);
  CHECK(r.final_error == a.record.final_error);
  CHECK(r.entropy_drift == a.record.entropy_drift);
  CHECK(r.rhs_calls == 1234);
  CHECK(r.accepted == 200);
  CHECK(r.rejected == 5);
  CHECK(r.gamma_min == a.record.gamma_min);
  CHECK(r.gamma_max == a.record.gamma_max);
  CHECK(r.runtime_ns == 987654321);
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status == "expected-failure");
  CHECK(std::isnan(rows[1].record.final_error));
  CHECK(std::isinf(rows[1].record.gamma_max));
}

TEST_CASE("CSV reader rejects malformed input") {
  std::istringstream bad_header("problem,method\n");
  CHECK_THROWS_AS(rrk::read_csv(bad_header), std::invalid_argument);
  std::istringstream short_row(std::string(rrk::kCsvHeader) + "\na,b,c\n");
  CHECK_THROWS_AS(rrk::read_csv(short_row), std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS_AS(rrk::read_csv(empty), std::invalid_argument);
}

TEST_CASE("registry") {
  CHECK(rrk::problem_names().size() == 8);
  for (const auto& name : rrk::problem_names()) {
    CAPTURE(name);
    const auto p = rrk::make_problem(name);
    CHECK(p.name == name);
    CHECK(p.u0.size() == p.dim);
    CHECK(rrk::default_t_end(name) > 0);
  }
  CHECK(rrk::default_t_end("exponential_entropy") == 5);
  CHECK(rrk::default_t_end("bbm_cubic") == 30);
  CHECK(rrk::default_t_end("harmonic_oscillator") == 100);
  CHECK_THROWS_AS(rrk::make_problem("lorenz"), std::invalid_argument);
  CHECK_THROWS_AS(rrk::default_t_end("lorenz"), std::invalid_argument);

  rrk::ProblemOptions o;
  o.dg_elements = 4;
  o.dg_degree = 3;
  o.fourier_modes = 32;
  CHECK(rrk::make_problem("advection_dg", o).dim == 16);
  CHECK(rrk::make_problem("bbm_quadratic", o).dim == 32);
  o.pendulum_u0 = {0.5, 0.1};
  CHECK(rrk::make_problem("nonlinear_pendulum", o).u0(1) == 0.1);

  CHECK(rrk::make_tableau("DP5").name == "dp5");
  CHECK_THROWS_AS(rrk::make_tableau("rk45"), std::invalid_argument);
}

TEST_CASE("strategy and mode parsing") {
  const auto s = rrk::make_strategy("r-fsal", "simple", "V2", "c1");
  CHECK(s.kind == rrk::StrategyKind::RFsal);
  CHECK(s.rfsal_embedded == rrk::RFsalEmbedded::V2);
  CHECK(s.rfsal_compare == rrk::RFsalCompare::C1);
  CHECK(rrk::make_strategy("fsalr", "simple").fsalr_stage1 == rrk::FsalRStage1::Simple);
  CHECK(rrk::parse_strategy_kind("FSAL-R") == rrk::StrategyKind::FsalR);
  CHECK(rrk::parse_mode("work-precision") == rrk::Mode::WorkPrecision);
  CHECK(rrk::parse_mode("convergence") == rrk::Mode::Convergence);
  CHECK_THROWS_AS(rrk::parse_strategy_kind("relaxed"), std::invalid_argument);
  CHECK_THROWS_AS(rrk::parse_rfsal_variant("v5"), std::invalid_argument);
  CHECK_THROWS_AS(rrk::parse_rfsal_compare("c4"), std::invalid_argument);
  CHECK_THROWS_AS(rrk::parse_fsalr_stage1("dense"), std::invalid_argument);
  CHECK_THROWS_AS(rrk::parse_mode("plot"), std::invalid_argument);
}

TEST_CASE("default ladders") {
  const auto dts = rrk::default_dt_ladder();
  REQUIRE(dts.size() == 7);
  CHECK(dts.front() == 0.1);
  CHECK(dts.back() == 0.1 / 64);
  const auto tols = rrk::default_tolerance_ladder();
  REQUIRE(tols.size() == 7);
  CHECK(tols.front() == 1e-4);
  CHECK(tols.back() == doctest::Approx(1e-10).epsilon(1e-15));
}

TEST_CASE("convergence: harmonic oscillator orders") {
  ExperimentSpec spec;
  spec.mode = rrk::Mode::Convergence;
  spec.problem = "harmonic_oscillator";
  spec.strategy = rrk::Strategy::naive();
  spec.jobs = 4;
  spec.method = "rk4";
  auto table = rrk::run_convergence(spec);
  CHECK(table.rows.size() == 7);
  CHECK(table.fit.valid);
  CHECK(table.fit.slope == doctest::Approx(4).epsilon(0.0625));
  spec.method = "bs3";
  table = rrk::run_convergence(spec);
  CHECK(table.fit.slope == doctest::Approx(4).epsilon(0.0625));
  for (const auto& r : table.rows) CHECK(r.status == "ok");
}

TEST_CASE("convergence: exponential entropy keeps the method order") {
  ExperimentSpec spec;
  spec.mode = rrk::Mode::Convergence;
  spec.problem = "exponential_entropy";
  spec.method = "bs3";
  spec.strategy = rrk::Strategy::fsalr();
  const auto table = rrk::run_convergence(spec);
  CHECK(table.fit.slope == doctest::Approx(3).epsilon(0.25 / 3));
}

TEST_CASE("convergence: no decrease is reported as non-convergent") {
  rrk::Problem<double> p = rrk::make_problem("harmonic_oscillator");
  p.name = "wrong_reference";
  p.exact = [](double t) {
    Vec v(2);
    v << std::cos(t) + 0.1, std::sin(t);
    return v;
  };
  ExperimentSpec spec;
  spec.mode = rrk::Mode::Convergence;
  spec.strategy = rrk::Strategy::baseline();
  spec.t_end = 1.0;
  const auto table = rrk::run_convergence(p, spec);
  for (const auto& r : table.rows) CHECK(r.status == "non-convergent");
  CHECK_FALSE(rrk::row_passes(table.rows.front()));
}

TEST_CASE("work precision rows follow the tolerance ladder") {
  ExperimentSpec spec;
  spec.mode = rrk::Mode::WorkPrecision;
  spec.problem = "nonlinear_oscillator";
  spec.method = "dp5";
  spec.tols = {1e-4, 1e-6, 1e-8};
  spec.jobs = 3;
  const auto rows = rrk::run_work_precision(spec);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].record.tol_or_dt == spec.tols[i]);
    CHECK(rows[i].status == "ok");
  }
  CHECK(rows[0].record.rhs_calls < rows[1].record.rhs_calls);
  CHECK(rows[1].record.final_error < rows[0].record.final_error);

  // Parallel and serial sweeps produce the same numbers.
  spec.jobs = 1;
  const auto serial = rrk::run_work_precision(spec);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial[i].record.final_error == rows[i].record.final_error);
    CHECK(serial[i].record.rhs_calls == rows[i].record.rhs_calls);
  }
}

TEST_CASE("failing runs are captured per row") {
  ExperimentSpec spec;
  spec.mode = rrk::Mode::WorkPrecision;
  spec.problem = "harmonic_oscillator";
  spec.tols = {1e-6};
  spec.max_steps = 3;
  const auto rows = rrk::run_work_precision(spec);
  CHECK(rows[0].status == "max-steps");
  CHECK_FALSE(rrk::row_passes(rows[0]));

  spec.strategy = rrk::Strategy::rfsal(rrk::RFsalEmbedded::V1);
  spec.problem = "bounded_oscillator";
  const auto expected = rrk::run_work_precision(spec);
  CHECK(expected[0].status == "expected-failure");
  CHECK(rrk::row_passes(expected[0]));

  spec.method = "rk4";
  const auto err = rrk::run_work_precision(spec);
  CHECK(err[0].status == "error");
  CHECK_FALSE(err[0].message.empty());
}

TEST_CASE("expected failures are limited to dt-based R-FSAL on the bounded oscillator") {
  using rrk::RFsalEmbedded;
  CHECK(rrk::expected_to_fail("bounded_oscillator", rrk::Strategy::rfsal(RFsalEmbedded::V1)));
  CHECK(rrk::expected_to_fail("bounded_oscillator", rrk::Strategy::rfsal(RFsalEmbedded::V2)));
  CHECK_FALSE(rrk::expected_to_fail("bounded_oscillator", rrk::Strategy::rfsal(RFsalEmbedded::V4)));
  CHECK_FALSE(rrk::expected_to_fail("harmonic_oscillator", rrk::Strategy::rfsal(RFsalEmbedded::V1)));
  CHECK_FALSE(rrk::expected_to_fail("bounded_oscillator", rrk::Strategy::naive()));
}

TEST_CASE("single run with a trajectory dump") {
  ExperimentSpec spec;
  spec.problem = "harmonic_oscillator";
  spec.tols = {1e-6};
  spec.t_end = 2.0;
  spec.trajectory = temp_path("trajectory.csv");
  const auto row = rrk::run_single(spec);
  CHECK(row.status == "ok");
  std::ifstream in(spec.trajectory);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,gamma,dt,eta,u0,u1");
  std::int64_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == row.record.accepted + 1);
  std::remove(spec.trajectory.c_str());
}

TEST_CASE("single run: zero field gives a zero-error record") {
  rrk::Problem<double> p;
  p.name = "zero";
  p.dim = 2;
  p.u0 = Vec::Ones(2);
  p.rhs = [](double, const Vec&, Vec& du) { du.setZero(); };
  p.entropy = [](const Vec& u) { return u.squaredNorm(); };
  p.entropy_gradient = [](const Vec& u) -> Vec { return 2 * u; };
  p.exact = [](double) -> Vec { return Vec::Ones(2); };
  ExperimentSpec spec;
  spec.strategy = rrk::Strategy::naive();
  const auto row = rrk::run_single(p, spec);
  CHECK(row.status == "ok");
  CHECK(row.record.final_error == 0);
  CHECK(row.record.entropy_drift == 0);
}

TEST_CASE("conservation residual is tiny on every conserving problem") {
  for (const auto& name : rrk::problem_names()) {
    CAPTURE(name);
    CHECK(rrk::conservation_residual(rrk::make_problem(name), 42, 200) <= 1e-12);
  }
}

TEST_CASE("R-FSAL completes the exponential entropy problem at tight tolerances") {
  ExperimentSpec spec;
  spec.mode = rrk::Mode::WorkPrecision;
  spec.problem = "exponential_entropy";
  spec.tols = {1e-8, 1e-10};
  for (auto compare : {rrk::RFsalCompare::C1, rrk::RFsalCompare::C2, rrk::RFsalCompare::C3}) {
    spec.strategy = rrk::Strategy::rfsal(rrk::RFsalEmbedded::V3, compare);
    for (const auto& row : rrk::run_work_precision(spec)) {
      CAPTURE(row.record.variant);
      CHECK(row.status == "ok");
      CHECK(row.record.gamma_min > 0.5);
    }
  }
}
