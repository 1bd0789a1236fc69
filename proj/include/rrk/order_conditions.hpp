#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rrk/tableau.hpp"

namespace rrk {

enum class Weights { Main, Embedded };

namespace detail {

/// One rooted-tree condition  b^T Phi(t) = 1 / density(t).
template <typename Scalar>
struct OrderCondition {
  int order;
  Vector<Scalar> phi;
  Scalar rhs;
};

// Elementary weights for all trees through order 5 (17 trees).
template <typename Scalar>
std::vector<OrderCondition<Scalar>> elementary_weights(const Matrix<Scalar>& a, const Vector<Scalar>& c) {
  const auto n = c.size();
  const Vector<Scalar> one = Vector<Scalar>::Ones(n);
  const Vector<Scalar> c2 = c.cwiseProduct(c);
  const Vector<Scalar> c3 = c2.cwiseProduct(c);
  const Vector<Scalar> ac = a * c;
  const Vector<Scalar> ac2 = a * c2;
  const Vector<Scalar> aac = a * ac;

  std::vector<OrderCondition<Scalar>> conds;
  auto add = [&](int order, Vector<Scalar> phi, long long density) {
    conds.push_back({order, std::move(phi), Scalar(1) / Scalar(density)});
  };
  add(1, one, 1);
  add(2, c, 2);
  add(3, c2, 3);
  add(3, ac, 6);
  add(4, c3, 4);
  add(4, c.cwiseProduct(ac), 8);
  add(4, ac2, 12);
  add(4, aac, 24);
  add(5, c3.cwiseProduct(c), 5);
  add(5, c2.cwiseProduct(ac), 10);
  add(5, c.cwiseProduct(ac2), 15);
  add(5, c.cwiseProduct(aac), 30);
  add(5, ac.cwiseProduct(ac), 20);
  add(5, a * c3, 20);
  add(5, a * c.cwiseProduct(ac), 40);
  add(5, a * ac2, 60);
  add(5, a * aac, 120);
  return conds;
}

}  // namespace detail

/// True iff every order condition up to `order` holds to `tol`.
///
/// Embedded weights are checked on the tableau extended by one stage whose
/// row equals `b` (the FSAL evaluation f(u^{n+1})).
template <typename Scalar>
bool verify_order_conditions(const Tableau<Scalar>& t, int order, Weights which = Weights::Main,
                             Scalar tol = Scalar(1e-13)) {
  if (order > 5) throw std::invalid_argument("order conditions are tabulated through order 5 only");
  if (order < 1) throw std::invalid_argument("order must be positive");

  Matrix<Scalar> a;
  Vector<Scalar> c;
  Vector<Scalar> w;
  if (which == Weights::Main) {
    a = t.a;
    c = t.c;
    w = t.b;
  } else {
    if (!t.has_embedded()) throw std::invalid_argument("tableau " + t.name + " has no embedded weights");
    a = Matrix<Scalar>::Zero(t.s + 1, t.s + 1);
    a.topLeftCorner(t.s, t.s) = t.a;
    a.row(t.s).head(t.s) = t.b.transpose();
    c.resize(t.s + 1);
    c.head(t.s) = t.c;
    c(t.s) = t.b.sum();
    w = t.b_hat;
  }

  for (const auto& cond : detail::elementary_weights(a, c)) {
    if (cond.order > order) break;
    if (std::abs(w.dot(cond.phi) - cond.rhs) > tol) return false;
  }
  return true;
}

}  // namespace rrk
