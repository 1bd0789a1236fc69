#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "rrk/tableau.hpp"

namespace rrk {

enum class ReferencePolicy { Analytical, HighAccuracyNumerical, None };

/// An initial value problem u' = f(t, u) with a conserved functional.
///
/// RHS, entropy and reference callables must be pure; integrations of the same
/// problem may run concurrently.
template <typename Scalar>
struct Problem {
  using Vec = Vector<Scalar>;

  std::string name;
  Eigen::Index dim = 0;
  std::function<void(Scalar t, const Vec& u, Vec& du)> rhs;
  std::function<Scalar(const Vec& u)> entropy;
  std::function<Vec(const Vec& u)> entropy_gradient;
  Vec u0;
  Scalar t0 = 0;
  std::function<Vec(Scalar t)> exact;
  ReferencePolicy reference_policy = ReferencePolicy::None;
  /// Quadrature weights of the discrete L2 error; empty means 1/N each.
  Vec error_weights;
  bool conserving = true;
  /// Index of an appended clock component (t' = 1) for non-autonomous problems.
  std::optional<Eigen::Index> clock;

  Vec eval(Scalar t, const Vec& u) const {
    Vec du(dim);
    rhs(t, u, du);
    return du;
  }

  bool has_reference() const { return static_cast<bool>(exact); }

  /// Discrete L2 norm sqrt(sum w_i v_i^2).
  Scalar l2_norm(const Vec& v) const {
    if (error_weights.size() == 0) return std::sqrt(v.squaredNorm() / Scalar(v.size()));
    return std::sqrt(error_weights.dot(v.cwiseAbs2()));
  }
};

}  // namespace rrk
