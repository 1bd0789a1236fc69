#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rrk/problems_ode.hpp"

using rrk::Problem;
using Vec = Eigen::VectorXd;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<Problem<double>> analytic_problems() {
  return {rrk::harmonic_oscillator(), rrk::nonlinear_oscillator(), rrk::bounded_time_dependent_oscillator(),
          rrk::conserved_exponential_entropy()};
}

double inner(const Problem<double>& p, double t, const Vec& u) { return p.entropy_gradient(u).dot(p.eval(t, u)); }

// Largest |exact'(t) - f(t, exact(t))| over sample times, by central
// differences with step h.
double fd_defect(const Problem<double>& p, double h) {
  double worst = 0;
  for (double t : {0.3, 1.0, 2.5, 4.0}) {
    const Vec slope = (p.exact(t + h) - p.exact(t - h)) / (2 * h);
    worst = std::max(worst, (slope - p.eval(t, p.exact(t))).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("exact solutions start at the initial state") {
  for (const auto& p : analytic_problems()) {
    CAPTURE(p.name);
    CHECK((p.exact(p.t0) - p.u0).cwiseAbs().maxCoeff() <= 1e-15);
  }
  const auto pend = rrk::nonlinear_pendulum();
  CHECK(pend.exact(0) == pend.u0);
}

TEST_CASE("harmonic oscillator") {
  const auto p = rrk::harmonic_oscillator();
  CHECK(p.u0 == vec2(1, 0));
  CHECK(p.entropy(p.u0) == 1);
  CHECK(inner(p, 0, vec2(0.3, -0.7)) == 0);
  CHECK(p.eval(0, vec2(2, 3)) == vec2(-3, 2));
}

TEST_CASE("nonlinear oscillator") {
  const auto p = rrk::nonlinear_oscillator();
  CHECK((p.exact(std::numbers::pi / 2) - vec2(0, 1)).norm() <= 1e-15);
  CHECK(p.eval(0, vec2(1, 0)) == vec2(0, 1));
  CHECK(p.eval(0, vec2(2, 0)) == vec2(0, 0.5));
  CHECK(inner(p, 0, vec2(2, 1)) == 0);
  CHECK_THROWS_AS(p.eval(0, vec2(0, 0)), std::domain_error);
}

TEST_CASE("nonlinear pendulum") {
  const auto p = rrk::nonlinear_pendulum();
  CHECK(p.u0 == vec2(1.5, 0));
  CHECK(p.entropy(vec2(0, 0)) == -1);
  CHECK(std::abs(inner(p, 0, vec2(0.4, 2.0))) <= 1e-16);
  CHECK(p.reference_policy == rrk::ReferencePolicy::HighAccuracyNumerical);
}

TEST_CASE("pendulum reference is self-consistent under step halving") {
  const auto coarse = rrk::nonlinear_pendulum(vec2(1.5, 0), 1e-5);
  const auto fine = rrk::nonlinear_pendulum(vec2(1.5, 0), 5e-6);
  const Vec a = coarse.exact(10);
  const Vec b = fine.exact(10);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(coarse.entropy(a) - coarse.entropy(coarse.u0)) <= 1e-12);
  // Continuing from the memoized point matches a fresh evaluation.
  const Vec later = coarse.exact(10.5);
  const Vec fresh = rrk::nonlinear_pendulum(vec2(1.5, 0), 1e-5).exact(10.5);
  CHECK((later - fresh).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("bounded time-dependent oscillator") {
  const auto p = rrk::bounded_time_dependent_oscillator();
  CHECK(p.dim == 3);
  REQUIRE(p.clock);
  CHECK(*p.clock == 2);
  CHECK((p.exact(0).head(2) - vec2(1, 0)).norm() <= 1e-15);
  for (double t : {0.0, 0.7, 3.0, 17.0, 99.0}) {
    CHECK(p.entropy(p.exact(t)) == doctest::Approx(1).epsilon(1e-14));
    CHECK(p.exact(t)(2) == t);
  }
  Vec u(3);
  u << 0.2, 0.9, 0.7;
  CHECK(std::abs(inner(p, 0.7, u)) <= 1e-16);
  // The clock carries no weight in the error.
  Vec e(3);
  e << 0, 0, 5;
  CHECK(p.l2_norm(e) == 0);
}

TEST_CASE("conserved exponential entropy") {
  const auto p = rrk::conserved_exponential_entropy();
  CHECK(p.u0 == vec2(1, 0.5));
  CHECK(p.entropy(p.u0) == doctest::Approx(4.367003099159174).epsilon(1e-15));
  CHECK(std::abs(inner(p, 0, vec2(0.3, -0.2))) <= 1e-16);
  const double eta0 = p.entropy(p.u0);
  for (double t = 0; t <= 10; t += 0.25) CHECK(std::abs(p.entropy(p.exact(t)) - eta0) <= 1e-14 * eta0);
}

TEST_CASE("closed-form solutions satisfy the ODE") {
  for (const auto& p : analytic_problems()) {
    CAPTURE(p.name);
    const double coarse = fd_defect(p, 1e-3);
    const double fine = fd_defect(p, 5e-4);
    CHECK(coarse <= 1e-5);
    // Second-order central differences: halving h divides the defect by 4.
    CHECK(coarse / fine == doctest::Approx(4).epsilon(0.05));
  }
}

TEST_CASE("entropy gradients match finite differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<Problem<double>> all = analytic_problems();
  all.push_back(rrk::nonlinear_pendulum());
  for (const auto& p : all) {
    CAPTURE(p.name);
    for (int trial = 0; trial < 20; ++trial) {
      Vec u(p.dim);
      for (Eigen::Index i = 0; i < p.dim; ++i) u(i) = 0.5 * normal(rng);
      const Vec g = p.entropy_gradient(u);
      for (Eigen::Index i = 0; i < p.dim; ++i) {
        Vec up = u, um = u;
        up(i) += 1e-6;
        um(i) -= 1e-6;
        CHECK(g(i) == doctest::Approx((p.entropy(up) - p.entropy(um)) / 2e-6).epsilon(1e-6).scale(1));
      }
    }
  }
}

TEST_CASE("conservation identity at random states") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> time(0, 10);
  std::vector<Problem<double>> all = analytic_problems();
  all.push_back(rrk::nonlinear_pendulum());
  for (const auto& p : all) {
    CAPTURE(p.name);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec u(p.dim);
      for (Eigen::Index i = 0; i < p.dim; ++i) u(i) = p.u0(i) + normal(rng);
      const double t = time(rng);
      if (p.clock) u(*p.clock) = t;
      const Vec g = p.entropy_gradient(u);
      const Vec f = p.eval(t, u);
      worst = std::max(worst, std::abs(g.dot(f)) / (g.norm() * f.norm()));
    }
    CHECK(worst <= 1e-12);
  }
}
