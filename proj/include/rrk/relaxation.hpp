#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rrk/root_finding.hpp"
#include "rrk/tableau.hpp"

namespace rrk {

template <typename Scalar>
struct RelaxationConfig {
  Scalar bracket_lo = Scalar(0.5);
  Scalar bracket_hi = Scalar(1.5);
  Scalar gamma_tol = Scalar(1e-14);
  /// Base tolerance; the effective bound is residual_tol * max(1, |eta(u_old)|).
  Scalar residual_tol = Scalar(1e-13);
  int max_expand = 8;
  /// Roots below this are the trivial branch near gamma = 0.
  Scalar min_gamma = Scalar(0.1);
  /// An entropy residual at gamma = 1 within resolution * |eta(u_old)| is
  /// rounding noise; gamma = 1 is returned.
  Scalar resolution = Scalar(8) * std::numeric_limits<Scalar>::epsilon();
};

class RelaxationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No sign change of the entropy residual on any expanded bracket.
class BracketFailure : public RelaxationFailure {
 public:
  using RelaxationFailure::RelaxationFailure;
};

/// Root found but the entropy residual still exceeds the tolerance.
class ResidualFailure : public RelaxationFailure {
 public:
  using RelaxationFailure::RelaxationFailure;
};

template <typename Scalar>
struct RelaxationResult {
  Scalar gamma;
  Scalar residual;
  Vector<Scalar> u_relaxed;
};

/// Relaxed state u_old + gamma (u_new - u_old). Every caller builds it with
/// this expression so the stored state is the one whose entropy was checked.
template <typename Scalar>
Vector<Scalar> relaxed_state(const Vector<Scalar>& u_old, const Vector<Scalar>& direction, Scalar gamma) {
  return u_old + gamma * direction;
}

/// Solves eta(u_old + gamma (u_new - u_old)) = eta(u_old) for the root near 1.
///
/// The trivial root gamma = 0 is excluded by keeping the bracket above
/// `min_gamma`; the bracket widens geometrically around 1 until the residual
/// changes sign.
template <typename Scalar, typename Entropy>
RelaxationResult<Scalar> solve_gamma(const Vector<Scalar>& u_old, const Vector<Scalar>& u_new, Entropy&& eta,
                                     const RelaxationConfig<Scalar>& cfg = {}) {
  if (!(cfg.bracket_lo < Scalar(1) && Scalar(1) < cfg.bracket_hi))
    throw std::invalid_argument("solve_gamma: bracket must contain 1");
  if (!(cfg.gamma_tol > 0)) throw std::invalid_argument("solve_gamma: gamma_tol must be positive");

  const Vector<Scalar> direction = u_new - u_old;
  if (direction.isZero(Scalar(0))) throw std::invalid_argument("solve_gamma: zero update direction");

  const Scalar eta_old = eta(u_old);
  const Scalar tol = cfg.residual_tol * std::max(Scalar(1), std::abs(eta_old));
  auto residual = [&](Scalar gamma) { return Scalar(eta(relaxed_state(u_old, direction, gamma))) - eta_old; };

  // Entropy already matches to rounding: any root found from here on would be noise.
  const Scalar r_one = residual(Scalar(1));
  if (std::abs(r_one) <= cfg.resolution * std::abs(eta_old)) return {Scalar(1), std::abs(r_one), u_new};

  Scalar lo = std::max(cfg.bracket_lo, cfg.min_gamma);
  Scalar hi = cfg.bracket_hi;
  Scalar r_lo = residual(lo);
  Scalar r_hi = residual(hi);
  int expansions = 0;
  while ((r_lo > 0) == (r_hi > 0) && r_lo != Scalar(0) && r_hi != Scalar(0)) {
    if (expansions++ >= cfg.max_expand)
      throw BracketFailure("solve_gamma: no sign change in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "]");
    lo = std::max(Scalar(1) - Scalar(2) * (Scalar(1) - lo), cfg.min_gamma);
    hi = Scalar(1) + Scalar(2) * (hi - Scalar(1));
    r_lo = residual(lo);
    r_hi = residual(hi);
  }

  // Split at gamma = 1 so the root closest to 1 is the one refined.
  Scalar a = lo, b = hi, ra = r_lo, rb = r_hi;
  if (r_lo == Scalar(0) || (r_lo > 0) != (r_one > 0)) {
    b = Scalar(1);
    rb = r_one;
  } else {
    a = Scalar(1);
    ra = r_one;
  }
  const auto root = brent_root<Scalar>(residual, a, b, ra, rb, cfg.gamma_tol);
  const Scalar gamma = root.x;
  if (gamma < cfg.min_gamma) throw BracketFailure("solve_gamma: converged to the trivial root");

  Vector<Scalar> u_relaxed = relaxed_state(u_old, direction, gamma);
  const Scalar achieved = std::abs(Scalar(eta(u_relaxed)) - eta_old);
  if (achieved > tol)
    throw ResidualFailure("solve_gamma: entropy residual " + std::to_string(achieved) + " exceeds tolerance");
  return {gamma, achieved, std::move(u_relaxed)};
}

}  // namespace rrk
