#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "rrk/problem.hpp"

namespace rrk {

namespace detail {

template <typename Scalar>
Vector<Scalar> vec2(Scalar a, Scalar b) {
  Vector<Scalar> v(2);
  v << a, b;
  return v;
}

template <typename Scalar>
Problem<Scalar> rotation_problem(std::string name) {
  Problem<Scalar> p;
  p.name = std::move(name);
  p.dim = 2;
  p.u0 = vec2<Scalar>(1, 0);
  p.entropy = [](const Vector<Scalar>& u) { return u.squaredNorm(); };
  p.entropy_gradient = [](const Vector<Scalar>& u) -> Vector<Scalar> { return Scalar(2) * u; };
  p.exact = [](Scalar t) { return vec2<Scalar>(std::cos(t), std::sin(t)); };
  p.reference_policy = ReferencePolicy::Analytical;
  return p;
}

}  // namespace detail

/// u1' = -u2, u2' = u1 with eta = |u|^2.
template <typename Scalar = double>
Problem<Scalar> harmonic_oscillator() {
  auto p = detail::rotation_problem<Scalar>("harmonic_oscillator");
  p.rhs = [](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
    du(0) = -u(1);
    du(1) = u(0);
  };
  return p;
}

/// Harmonic oscillator scaled by |u|^{-2}; same entropy and solution.
template <typename Scalar = double>
Problem<Scalar> nonlinear_oscillator() {
  auto p = detail::rotation_problem<Scalar>("nonlinear_oscillator");
  p.rhs = [](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
    const Scalar r2 = u.squaredNorm();
    if (r2 == Scalar(0)) throw std::domain_error("nonlinear_oscillator: singular at u = 0");
    du(0) = -u(1) / r2;
    du(1) = u(0) / r2;
  };
  return p;
}

/// Fixed-step RK4 from (t0, u0) to t; the pendulum reference oracle.
template <typename Scalar, typename Rhs>
Vector<Scalar> rk4_reference(Rhs&& f, Scalar t0, Vector<Scalar> u, Scalar t, Scalar max_dt) {
  const Scalar span = t - t0;
  if (span == Scalar(0)) return u;
  const auto n = static_cast<long long>(std::ceil(std::abs(span) / max_dt));
  const Scalar h = span / Scalar(n);
  Vector<Scalar> k1(u.size()), k2(u.size()), k3(u.size()), k4(u.size());
  for (long long i = 0; i < n; ++i) {
    const Scalar ti = t0 + Scalar(i) * h;
    f(ti, u, k1);
    f(ti + h / 2, u + (h / 2) * k1, k2);
    f(ti + h / 2, u + (h / 2) * k2, k3);
    f(ti + h, u + h * k3, k4);
    u += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

/// Idealized pendulum u1' = -sin(u2), u2' = u1, eta = u1^2/2 - cos(u2).
/// The reference is a tiny-step RK4 solution; evaluations reuse the most
/// recent reference point so nearby final times are cheap.
template <typename Scalar = double>
Problem<Scalar> nonlinear_pendulum(Vector<Scalar> u0 = detail::vec2<Scalar>(Scalar(1.5), 0),
                                   Scalar reference_dt = Scalar(1e-5)) {
  Problem<Scalar> p;
  p.name = "nonlinear_pendulum";
  p.dim = 2;
  p.u0 = u0;
  auto rhs = [](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
    du(0) = -std::sin(u(1));
    du(1) = u(0);
  };
  p.rhs = rhs;
  p.entropy = [](const Vector<Scalar>& u) { return u(0) * u(0) / 2 - std::cos(u(1)); };
  p.entropy_gradient = [](const Vector<Scalar>& u) { return detail::vec2<Scalar>(u(0), std::sin(u(1))); };

  struct Memo {
    std::mutex mutex;
    Scalar t;
    Vector<Scalar> u;
  };
  auto memo = std::make_shared<Memo>();
  memo->t = 0;
  memo->u = u0;
  p.exact = [memo, u0, rhs, reference_dt](Scalar t) {
    std::lock_guard lock(memo->mutex);
    Scalar start_t = 0;
    Vector<Scalar> start_u = u0;
    if (std::abs(t - memo->t) < std::abs(t)) {
      start_t = memo->t;
      start_u = memo->u;
    }
    Vector<Scalar> u = rk4_reference<Scalar>(rhs, start_t, start_u, t, reference_dt);
    memo->t = t;
    memo->u = u;
    return u;
  };
  p.reference_policy = ReferencePolicy::HighAccuracyNumerical;
  return p;
}

/// Rotation with angular velocity 1 + sin(t)/2. The state carries the time as
/// a third component (t' = 1) so the problem is autonomous; the clock has no
/// weight in the entropy or the error norm.
template <typename Scalar = double>
Problem<Scalar> bounded_time_dependent_oscillator() {
  Problem<Scalar> p;
  p.name = "bounded_oscillator";
  p.dim = 3;
  p.clock = 2;
  p.u0 = Vector<Scalar>(3);
  p.u0 << 1, 0, 0;
  p.rhs = [](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
    const Scalar omega = Scalar(1) + std::sin(u(2)) / 2;
    du(0) = -omega * u(1);
    du(1) = omega * u(0);
    du(2) = 1;
  };
  p.entropy = [](const Vector<Scalar>& u) { return u(0) * u(0) + u(1) * u(1); };
  p.entropy_gradient = [](const Vector<Scalar>& u) {
    Vector<Scalar> g(3);
    g << 2 * u(0), 2 * u(1), 0;
    return g;
  };
  p.exact = [](Scalar t) {
    const Scalar phase = t - std::cos(t) / 2;
    const Scalar c = std::cos(Scalar(0.5)), s = std::sin(Scalar(0.5));
    Vector<Scalar> u(3);
    u << c * std::cos(phase) - s * std::sin(phase), s * std::cos(phase) + c * std::sin(phase), t;
    return u;
  };
  p.reference_policy = ReferencePolicy::Analytical;
  p.error_weights = Vector<Scalar>(3);
  p.error_weights << Scalar(0.5), Scalar(0.5), 0;
  return p;
}

/// u1' = -exp(u2), u2' = exp(u1) conserving eta = exp(u1) + exp(u2).
template <typename Scalar = double>
Problem<Scalar> conserved_exponential_entropy() {
  Problem<Scalar> p;
  p.name = "exponential_entropy";
  p.dim = 2;
  p.u0 = detail::vec2<Scalar>(1, Scalar(0.5));
  p.rhs = [](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
    du(0) = -std::exp(u(1));
    du(1) = std::exp(u(0));
  };
  p.entropy = [](const Vector<Scalar>& u) { return std::exp(u(0)) + std::exp(u(1)); };
  p.entropy_gradient = [](const Vector<Scalar>& u) {
    return detail::vec2<Scalar>(std::exp(u(0)), std::exp(u(1)));
  };
  // u1 = log(e + e^{3/2}) - log(sqrt(e) + e^{a t}),
  // u2 = log(e^{a t} a / (sqrt(e) + e^{a t})),  a = sqrt(e) + e.
  p.exact = [](Scalar t) {
    const Scalar sqrt_e = std::exp(Scalar(0.5));
    const Scalar e = std::exp(Scalar(1));
    const Scalar a = sqrt_e + e;
    const Scalar at = a * t;
    const Scalar log_sum = at > 0 ? at + std::log1p(sqrt_e * std::exp(-at)) : std::log(sqrt_e + std::exp(at));
    return detail::vec2<Scalar>(std::log(e + std::exp(Scalar(1.5))) - log_sum, at + std::log(a) - log_sum);
  };
  p.reference_policy = ReferencePolicy::Analytical;
  return p;
}

}  // namespace rrk
