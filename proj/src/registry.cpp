#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "rrk/harness.hpp"
#include "rrk/problems_ode.hpp"
#include "rrk/problems_pde.hpp"

namespace rrk {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {
      "harmonic_oscillator", "nonlinear_oscillator", "nonlinear_pendulum", "bounded_oscillator",
      "exponential_entropy", "advection_dg",         "bbm_quadratic",      "bbm_cubic"};
  return names;
}

Problem<double> make_problem(const std::string& name, const ProblemOptions& o) {
  if (name == "harmonic_oscillator") return harmonic_oscillator<double>();
  if (name == "nonlinear_oscillator") return nonlinear_oscillator<double>();
  if (name == "nonlinear_pendulum") {
    Vector<double> u0(2);
    u0 << o.pendulum_u0[0], o.pendulum_u0[1];
    return nonlinear_pendulum<double>(u0, o.pendulum_reference_dt);
  }
  if (name == "bounded_oscillator") return bounded_time_dependent_oscillator<double>();
  if (name == "exponential_entropy") return conserved_exponential_entropy<double>();
  if (name == "advection_dg") return linear_advection_dg<double>(o.dg_elements, o.dg_degree, 2.0);
  if (name == "bbm_quadratic")
    return bbm_fourier<double>(BbmInvariant::Quadratic, o.fourier_modes, o.fourier_x_min, o.fourier_x_max);
  if (name == "bbm_cubic")
    return bbm_fourier<double>(BbmInvariant::Cubic, o.fourier_modes, o.fourier_x_min, o.fourier_x_max);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

double default_t_end(const std::string& name) {
  if (name == "exponential_entropy") return 5.0;
  if (name == "bbm_quadratic" || name == "bbm_cubic") return 30.0;
  if (std::find(problem_names().begin(), problem_names().end(), name) == problem_names().end())
    throw std::invalid_argument("unknown problem '" + name + "'");
  return 100.0;
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"bs3", "dp5", "rk4"};
  return names;
}

Tableau<double> make_tableau(const std::string& name) {
  const auto n = lower(name);
  if (n == "bs3") return bs3<double>();
  if (n == "dp5") return dp5<double>();
  if (n == "rk4") return rk4<double>();
  throw std::invalid_argument("unknown method '" + name + "'");
}

StrategyKind parse_strategy_kind(const std::string& s) {
  const auto n = lower(s);
  if (n == "baseline") return StrategyKind::Baseline;
  if (n == "naive") return StrategyKind::Naive;
  if (n == "fsalr" || n == "fsal-r") return StrategyKind::FsalR;
  if (n == "rfsal" || n == "r-fsal") return StrategyKind::RFsal;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

FsalRStage1 parse_fsalr_stage1(const std::string& s) {
  const auto n = lower(s);
  if (n == "simple") return FsalRStage1::Simple;
  if (n == "interpolation") return FsalRStage1::Interpolation;
  throw std::invalid_argument("unknown FSAL-R first stage '" + s + "'");
}

RFsalEmbedded parse_rfsal_variant(const std::string& s) {
  const auto n = lower(s);
  if (n == "v1") return RFsalEmbedded::V1;
  if (n == "v2") return RFsalEmbedded::V2;
  if (n == "v3") return RFsalEmbedded::V3;
  if (n == "v4") return RFsalEmbedded::V4;
  throw std::invalid_argument("unknown R-FSAL variant '" + s + "'");
}

RFsalCompare parse_rfsal_compare(const std::string& s) {
  const auto n = lower(s);
  if (n == "c1") return RFsalCompare::C1;
  if (n == "c2") return RFsalCompare::C2;
  if (n == "c3") return RFsalCompare::C3;
  throw std::invalid_argument("unknown R-FSAL comparison '" + s + "'");
}

Strategy make_strategy(const std::string& kind, const std::string& fsalr_stage1, const std::string& rfsal_variant,
                       const std::string& rfsal_compare) {
  Strategy s;
  s.kind = parse_strategy_kind(kind);
  s.fsalr_stage1 = parse_fsalr_stage1(fsalr_stage1);
  s.rfsal_embedded = parse_rfsal_variant(rfsal_variant);
  s.rfsal_compare = parse_rfsal_compare(rfsal_compare);
  return s;
}

Mode parse_mode(const std::string& s) {
  const auto n = lower(s);
  if (n == "convergence") return Mode::Convergence;
  if (n == "work-precision" || n == "work_precision" || n == "workprecision") return Mode::WorkPrecision;
  if (n == "single") return Mode::Single;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

}  // namespace rrk
