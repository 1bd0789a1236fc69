#pragma once

#include <initializer_list>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace rrk {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Butcher tableau of an explicit Runge-Kutta method with an optional
/// embedded companion.
///
/// `b_hat` has `s + 1` entries; the last one multiplies the derivative at the
/// new solution, f(u^{n+1}). For FSAL pairs the final stage already is
/// f(u^{n+1}) (its row of `a` equals `b`), so its embedded weight lives in
/// that extra slot and `b_hat[s - 1]` is zero. Methods without an embedded
/// companion leave `b_hat` empty.
template <typename Scalar>
struct Tableau {
  int s = 0;
  Matrix<Scalar> a;
  Vector<Scalar> b;
  Vector<Scalar> b_hat;
  Vector<Scalar> c;
  int p = 0;
  int p_hat = 0;
  bool fsal = false;
  std::string name;

  bool has_embedded() const { return b_hat.size() == s + 1; }

  /// Number of stages that feed the main update. The trailing FSAL stage is
  /// evaluated separately as f(u^{n+1}).
  int main_stages() const { return fsal ? s - 1 : s; }
};

namespace detail {

struct Rational {
  long long num;
  long long den = 1;

  template <typename Scalar>
  Scalar value() const {
    return Scalar(num) / Scalar(den);
  }
};

template <typename Scalar>
Vector<Scalar> rational_vector(std::initializer_list<Rational> entries) {
  Vector<Scalar> v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const auto& r : entries) v(i++) = r.template value<Scalar>();
  return v;
}

// Rows of the strictly lower triangle; row i carries i entries.
template <typename Scalar>
Matrix<Scalar> rational_lower(int s, std::initializer_list<std::initializer_list<Rational>> rows) {
  Matrix<Scalar> a = Matrix<Scalar>::Zero(s, s);
  int i = 1;
  for (const auto& row : rows) {
    int j = 0;
    for (const auto& r : row) a(i, j++) = r.template value<Scalar>();
    ++i;
  }
  return a;
}

}  // namespace detail

/// Bogacki-Shampine 3(2) FSAL pair.
template <typename Scalar = double>
Tableau<Scalar> bs3() {
  using detail::Rational;
  Tableau<Scalar> t;
  t.name = "bs3";
  t.s = 4;
  t.p = 3;
  t.p_hat = 2;
  t.fsal = true;
  t.a = detail::rational_lower<Scalar>(4, {
      {{1, 2}},
      {{0}, {3, 4}},
      {{2, 9}, {1, 3}, {4, 9}},
  });
  t.c = detail::rational_vector<Scalar>({{0}, {1, 2}, {3, 4}, {1}});
  t.b = detail::rational_vector<Scalar>({{2, 9}, {1, 3}, {4, 9}, {0}});
  t.b_hat = detail::rational_vector<Scalar>({{7, 24}, {1, 4}, {1, 3}, {0}, {1, 8}});
  return t;
}

/// Dormand-Prince 5(4) FSAL pair.
template <typename Scalar = double>
Tableau<Scalar> dp5() {
  Tableau<Scalar> t;
  t.name = "dp5";
  t.s = 7;
  t.p = 5;
  t.p_hat = 4;
  t.fsal = true;
  t.a = detail::rational_lower<Scalar>(7, {
      {{1, 5}},
      {{3, 40}, {9, 40}},
      {{44, 45}, {-56, 15}, {32, 9}},
      {{19372, 6561}, {-25360, 2187}, {64448, 6561}, {-212, 729}},
      {{9017, 3168}, {-355, 33}, {46732, 5247}, {49, 176}, {-5103, 18656}},
      {{35, 384}, {0}, {500, 1113}, {125, 192}, {-2187, 6784}, {11, 84}},
  });
  t.c = detail::rational_vector<Scalar>({{0}, {1, 5}, {3, 10}, {4, 5}, {8, 9}, {1}, {1}});
  t.b = detail::rational_vector<Scalar>(
      {{35, 384}, {0}, {500, 1113}, {125, 192}, {-2187, 6784}, {11, 84}, {0}});
  t.b_hat = detail::rational_vector<Scalar>({{5179, 57600},
                                              {0},
                                              {7571, 16695},
                                              {393, 640},
                                              {-92097, 339200},
                                              {187, 2100},
                                              {0},
                                              {1, 40}});
  return t;
}

/// Classical fourth-order method. Fixed-step only: no embedded weights.
template <typename Scalar = double>
Tableau<Scalar> rk4() {
  Tableau<Scalar> t;
  t.name = "rk4";
  t.s = 4;
  t.p = 4;
  t.p_hat = 0;
  t.fsal = false;
  t.a = detail::rational_lower<Scalar>(4, {
      {{1, 2}},
      {{0}, {1, 2}},
      {{0}, {0}, {1}},
  });
  t.c = detail::rational_vector<Scalar>({{0}, {1, 2}, {1, 2}, {1}});
  t.b = detail::rational_vector<Scalar>({{1, 6}, {1, 3}, {1, 3}, {1, 6}});
  return t;
}

}  // namespace rrk
