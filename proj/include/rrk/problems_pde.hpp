#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "rrk/problem.hpp"

namespace rrk {

/// Gauss-Lobatto-Legendre nodes and weights on [-1, 1] for polynomial degree n.
template <typename Scalar>
void gauss_lobatto_legendre(int n, Vector<Scalar>& nodes, Vector<Scalar>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_lobatto_legendre: degree must be >= 1");
  nodes.resize(n + 1);
  weights.resize(n + 1);
  auto legendre = [n](Scalar x, Scalar& p, Scalar& dp) {
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar pk = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = pk;
    }
    p = n == 0 ? Scalar(1) : p1;
    dp = Scalar(n) * (p0 - x * p1) / (Scalar(1) - x * x);
  };
  nodes(0) = -1;
  nodes(n) = 1;
  for (int j = 1; j < n; ++j) {
    Scalar x = -std::cos(std::numbers::pi_v<Scalar> * Scalar(j) / Scalar(n));
    for (int it = 0; it < 100; ++it) {
      Scalar p, dp;
      legendre(x, p, dp);
      const Scalar ddp = (Scalar(2) * x * dp - Scalar(n * (n + 1)) * p) / (Scalar(1) - x * x);
      const Scalar dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    nodes(j) = x;
  }
  for (int j = 0; j <= n; ++j) {
    Scalar p = 1, p0 = 1, p1 = nodes(j);
    for (int k = 2; k <= n; ++k) {
      p = (Scalar(2 * k - 1) * nodes(j) * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = p;
    }
    if (n == 1) p = nodes(j);
    weights(j) = Scalar(2) / (Scalar(n * (n + 1)) * p * p);
  }
}

/// Lagrange differentiation matrix on arbitrary distinct nodes (barycentric form).
template <typename Scalar>
Matrix<Scalar> differentiation_matrix(const Vector<Scalar>& x) {
  const auto n = x.size();
  Vector<Scalar> lambda = Vector<Scalar>::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) lambda(j) /= (x(j) - x(k));
  Matrix<Scalar> d = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar diag = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (lambda(j) / lambda(i)) / (x(i) - x(j));
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

/// Periodic DG spectral element grid with GLL collocation.
template <typename Scalar>
struct DgsemGrid {
  int n_elements = 8;
  int degree = 5;
  Scalar length = 2;

  Vector<Scalar> nodes;    // reference nodes on [-1, 1]
  Vector<Scalar> weights;  // reference GLL weights
  Matrix<Scalar> d;        // reference differentiation matrix
  Scalar dx = 0;           // element width
  Vector<Scalar> x;        // physical node positions, element-major
  Vector<Scalar> mass;     // physical quadrature weights, element-major

  DgsemGrid(int elements = 8, int deg = 5, Scalar len = 2) : n_elements(elements), degree(deg), length(len) {
    if (n_elements < 1) throw std::invalid_argument("DgsemGrid: need at least one element");
    gauss_lobatto_legendre(degree, nodes, weights);
    d = differentiation_matrix(nodes);
    dx = length / Scalar(n_elements);
    const int np = degree + 1;
    x.resize(n_elements * np);
    mass.resize(n_elements * np);
    for (int e = 0; e < n_elements; ++e)
      for (int i = 0; i < np; ++i) {
        x(e * np + i) = Scalar(e) * dx + (nodes(i) + 1) * dx / 2;
        mass(e * np + i) = weights(i) * dx / 2;
      }
  }

  Eigen::Index size() const { return x.size(); }

  /// Semidiscrete u_t = -u_x in strong form with central interface fluxes.
  void advection_rhs(const Vector<Scalar>& u, Vector<Scalar>& du) const {
    const int np = degree + 1;
    const int K = n_elements;
    const Scalar scale = Scalar(2) / dx;
    for (int e = 0; e < K; ++e) {
      const auto ue = u.segment(e * np, np);
      auto due = du.segment(e * np, np);
      due.noalias() = -scale * (d * ue);
      const int left = (e + K - 1) % K;
      const int right = (e + 1) % K;
      const Scalar flux_left = (u(left * np + degree) + ue(0)) / 2;
      const Scalar flux_right = (ue(degree) + u(right * np)) / 2;
      due(0) += scale / weights(0) * (flux_left - ue(0));
      due(degree) -= scale / weights(degree) * (flux_right - ue(degree));
    }
  }
};

/// Periodic Fourier collocation on n equispaced nodes of [x_min, x_max).
template <typename Scalar>
struct FourierGrid {
  int n_modes = 64;
  Scalar x_min = -45;
  Scalar x_max = 45;

  Vector<Scalar> x;
  Matrix<Scalar> d1;             // first derivative, Nyquist mode removed
  Matrix<Scalar> helmholtz_inv;  // (I - d1^2)^{-1}
  Scalar h = 0;                  // node spacing

  FourierGrid(int n = 64, Scalar lo = -45, Scalar hi = 45) : n_modes(n), x_min(lo), x_max(hi) {
    if (n_modes < 2 || n_modes % 2 != 0) throw std::invalid_argument("FourierGrid: n_modes must be even");
    if (!(x_max > x_min)) throw std::invalid_argument("FourierGrid: empty domain");
    const Scalar len = x_max - x_min;
    h = len / Scalar(n_modes);
    x.resize(n_modes);
    for (int i = 0; i < n_modes; ++i) x(i) = x_min + Scalar(i) * h;

    // d1_ij = (pi/L) (-1)^{i-j} cot(pi (i-j) / n), assembled as an exactly
    // skew-symmetric matrix.
    const Scalar pi = std::numbers::pi_v<Scalar>;
    d1 = Matrix<Scalar>::Zero(n_modes, n_modes);
    for (int i = 0; i < n_modes; ++i)
      for (int j = 0; j < i; ++j) {
        const int k = i - j;
        const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
        const Scalar v = (pi / len) * sign / std::tan(pi * Scalar(k) / Scalar(n_modes));
        d1(i, j) = v;
        d1(j, i) = -v;
      }
    const Matrix<Scalar> op = Matrix<Scalar>::Identity(n_modes, n_modes) - d1 * d1;
    helmholtz_inv = op.partialPivLu().inverse();
  }

  Eigen::Index size() const { return x.size(); }
  Scalar length() const { return x_max - x_min; }
};

template <typename Scalar>
struct BbmSoliton {
  Scalar c = Scalar(12) / Scalar(10);
  Scalar amplitude() const { return Scalar(3) * (c - Scalar(1)); }
  Scalar width() const { return std::sqrt(Scalar(1) - Scalar(1) / c) / Scalar(2); }

  /// A / cosh^2(K (x - c t)) with x - c t wrapped into [x_min, x_max).
  Vector<Scalar> sample(const FourierGrid<Scalar>& grid, Scalar t) const {
    Vector<Scalar> u(grid.size());
    const Scalar len = grid.length();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      Scalar xi = std::fmod(grid.x(i) - c * t - grid.x_min, len);
      if (xi < 0) xi += len;
      xi += grid.x_min;
      const Scalar ch = std::cosh(width() * xi);
      u(i) = amplitude() / (ch * ch);
    }
    return u;
  }
};

enum class BbmInvariant { Quadratic, Cubic };

/// Linear advection on (0, L) with DGSEM and the discrete energy
/// eta = 1/2 sum_i mass_i u_i^2.
template <typename Scalar = double>
Problem<Scalar> linear_advection_dg(int elements = 8, int degree = 5, Scalar length = 2) {
  const auto grid = std::make_shared<const DgsemGrid<Scalar>>(elements, degree, length);
  Problem<Scalar> p;
  p.name = "advection_dg";
  p.dim = grid->size();
  p.rhs = [grid](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) { grid->advection_rhs(u, du); };
  p.entropy = [grid](const Vector<Scalar>& u) { return grid->mass.dot(u.cwiseAbs2()) / 2; };
  p.entropy_gradient = [grid](const Vector<Scalar>& u) -> Vector<Scalar> { return grid->mass.cwiseProduct(u); };
  p.exact = [grid](Scalar t) {
    const Scalar k = Scalar(2) * std::numbers::pi_v<Scalar> / grid->length;
    return Vector<Scalar>((k * (grid->x.array() - t)).sin().exp());
  };
  p.u0 = p.exact(0);
  p.reference_policy = ReferencePolicy::Analytical;
  p.error_weights = grid->mass;
  return p;
}

/// BBM (I - d_xx) u_t + (u^2/2 + u)_x = 0 with Fourier collocation.
///
/// Quadratic: u_t = -(I - D^2)^{-1} [D(u^2)/3 + u D u / 3 + D u] conserves
///   J2 = 1/2 sum h (u^2 + (D u)^2).
/// Cubic: u_t = -(I - D^2)^{-1} D (u^2/2 + u) conserves J3 = sum h (u + 1)^3.
template <typename Scalar = double>
Problem<Scalar> bbm_fourier(BbmInvariant invariant, int n_modes = 64, Scalar x_min = -45, Scalar x_max = 45) {
  if (n_modes < 16) throw std::invalid_argument("bbm_fourier: need at least 16 modes");
  const auto grid = std::make_shared<const FourierGrid<Scalar>>(n_modes, x_min, x_max);
  const BbmSoliton<Scalar> soliton;
  Problem<Scalar> p;
  p.dim = grid->size();
  if (invariant == BbmInvariant::Quadratic) {
    p.name = "bbm_quadratic";
    p.rhs = [grid](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
      const Vector<Scalar> ux = grid->d1 * u;
      const Vector<Scalar> flux = (grid->d1 * u.cwiseAbs2() + u.cwiseProduct(ux)) / Scalar(3) + ux;
      du.noalias() = -(grid->helmholtz_inv * flux);
    };
    p.entropy = [grid](const Vector<Scalar>& u) {
      return grid->h * (u.squaredNorm() + (grid->d1 * u).squaredNorm()) / 2;
    };
    p.entropy_gradient = [grid](const Vector<Scalar>& u) -> Vector<Scalar> {
      return grid->h * (u - grid->d1 * (grid->d1 * u));
    };
  } else {
    p.name = "bbm_cubic";
    p.rhs = [grid](Scalar, const Vector<Scalar>& u, Vector<Scalar>& du) {
      const Vector<Scalar> flux = grid->d1 * (u.cwiseAbs2() / Scalar(2) + u);
      du.noalias() = -(grid->helmholtz_inv * flux);
    };
    p.entropy = [grid](const Vector<Scalar>& u) { return grid->h * (u.array() + Scalar(1)).cube().sum(); };
    p.entropy_gradient = [grid](const Vector<Scalar>& u) -> Vector<Scalar> {
      return Scalar(3) * grid->h * (u.array() + Scalar(1)).square().matrix();
    };
  }
  p.exact = [grid, soliton](Scalar t) { return soliton.sample(*grid, t); };
  p.u0 = p.exact(0);
  p.reference_policy = ReferencePolicy::Analytical;
  p.error_weights = Vector<Scalar>::Constant(p.dim, grid->h);
  return p;
}

/// J1 = sum h u for the BBM grid of the given size and domain.
template <typename Scalar>
Scalar bbm_mass(const Vector<Scalar>& u, Scalar h) {
  return h * u.sum();
}

}  // namespace rrk
