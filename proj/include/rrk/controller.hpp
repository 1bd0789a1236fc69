#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rrk/tableau.hpp"

namespace rrk {

template <typename Scalar>
struct Tolerances {
  Scalar abs = Scalar(1e-6);
  Scalar rel = Scalar(1e-6);
};

class DegenerateWeightError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Root-mean-square of the componentwise scaled difference
///   (u_i - u_hat_i) / (tau_a + tau_r max(|u_i|, |u_hat_i|)).
template <typename DerivedA, typename DerivedB, typename Scalar = typename DerivedA::Scalar>
Scalar weighted_error_norm(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& u_hat,
                           const Tolerances<Scalar>& tol) {
  const auto n = u.size();
  if (n == 0 || u_hat.size() != n) throw std::invalid_argument("weighted_error_norm: dimension mismatch");
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar scale = tol.abs + tol.rel * std::max(std::abs(u(i)), std::abs(u_hat(i)));
    if (scale == Scalar(0)) throw DegenerateWeightError("weighted_error_norm: zero weight in component");
    const Scalar e = (u(i) - u_hat(i)) / scale;
    sum += e * e;
  }
  return std::sqrt(sum / Scalar(n));
}

template <typename Scalar>
struct ControllerState {
  std::array<Scalar, 3> beta{Scalar(0.60), Scalar(-0.20), Scalar(0)};
  int p_ctrl = 1;
  Scalar eps_prev = 1;   // epsilon_n
  Scalar eps_prev2 = 1;  // epsilon_{n-1}
  Scalar dt = 0;
  Scalar dt_min = 0;
  Scalar dt_max = std::numeric_limits<Scalar>::infinity();
  Scalar accept_threshold = Scalar(0.81);
  Scalar w_floor = Scalar(1e-10);
};

template <typename Scalar>
struct StepProposal {
  Scalar dt_new;
  bool accept;
  Scalar factor;
};

/// PID update with the arctan limiter. Advances the epsilon history only on
/// acceptance and stores the proposed step in `st.dt`.
template <typename Scalar>
StepProposal<Scalar> propose_step(ControllerState<Scalar>& st, Scalar w_new, int p) {
  if (!(w_new >= 0)) throw std::invalid_argument("propose_step: error estimate must be nonnegative");
  if (p < 1) throw std::invalid_argument("propose_step: order must be positive");

  const Scalar eps = Scalar(1) / std::max(w_new, st.w_floor);
  const Scalar k = Scalar(p);
  const Scalar prod = std::pow(eps, st.beta[0] / k) * std::pow(st.eps_prev, st.beta[1] / k) *
                      std::pow(st.eps_prev2, st.beta[2] / k);
  const Scalar factor = Scalar(1) + std::atan(prod - Scalar(1));
  const Scalar dt_new = std::clamp(factor * st.dt, st.dt_min, st.dt_max);
  const bool accept = factor >= st.accept_threshold;
  if (accept) {
    st.eps_prev2 = st.eps_prev;
    st.eps_prev = eps;
  }
  st.dt = dt_new;
  return {dt_new, accept, factor};
}

/// Default controller order: min(p, p_hat + 1).
template <typename Scalar>
int controller_order(const Tableau<Scalar>& t) {
  return std::min(t.p, t.p_hat + 1);
}

/// Automatic initial step (Hairer, Norsett & Wanner, II.4). Uses f0 = f(t0,u0)
/// supplied by the caller and one more evaluation through `rhs`.
template <typename Scalar, typename Rhs>
Scalar initial_step(Rhs&& rhs, Scalar t0, const Vector<Scalar>& u0, const Vector<Scalar>& f0, int order,
                    const Tolerances<Scalar>& tol) {
  const auto n = u0.size();
  auto scaled_norm = [&](const Vector<Scalar>& v) {
    Scalar sum = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar e = v(i) / (tol.abs + tol.rel * std::abs(u0(i)));
      sum += e * e;
    }
    return std::sqrt(sum / Scalar(n));
  };
  const Scalar d0 = scaled_norm(u0);
  const Scalar d1 = scaled_norm(f0);
  const Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;

  Vector<Scalar> u1 = u0 + h0 * f0;
  Vector<Scalar> f1(n);
  rhs(t0 + h0, u1, f1);
  const Scalar d2 = scaled_norm(f1 - f0) / h0;

  const Scalar dmax = std::max(d1, d2);
  const Scalar h1 = dmax <= Scalar(1e-15) ? std::max(Scalar(1e-6), h0 * Scalar(1e-3))
                                          : std::pow(Scalar(0.01) / dmax, Scalar(1) / Scalar(order + 1));
  return std::min(Scalar(100) * h0, h1);
}

}  // namespace rrk
