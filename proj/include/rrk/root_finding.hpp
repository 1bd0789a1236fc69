#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace rrk {

template <typename Scalar>
struct RootResult {
  Scalar x;
  Scalar fx;
  int iterations;
};

/// Brent's method (bisection, secant and inverse quadratic interpolation) on a
/// bracket [a, b] with f(a) f(b) <= 0. Stops when the bracket half-width falls
/// below 2 eps |x| + tol/2 or f vanishes.
template <typename Scalar, typename F>
RootResult<Scalar> brent_root(F&& f, Scalar a, Scalar b, Scalar fa, Scalar fb, Scalar tol, int max_iter = 200) {
  if (fa == Scalar(0)) return {a, fa, 0};
  if (fb == Scalar(0)) return {b, fb, 0};
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("brent_root: interval does not bracket a root");

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar c = a, fc = fa;
  Scalar d = b - a, e = d;

  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const Scalar tol1 = Scalar(2) * eps * std::abs(b) + Scalar(0.5) * tol;
    const Scalar xm = Scalar(0.5) * (c - b);
    if (std::abs(xm) <= tol1 || fb == Scalar(0)) return {b, fb, iter};

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      Scalar p, q;
      const Scalar s = fb / fa;
      if (a == c) {
        p = Scalar(2) * xm * s;
        q = Scalar(1) - s;
      } else {
        const Scalar qa = fa / fc;
        const Scalar r = fb / fc;
        p = s * (Scalar(2) * xm * qa * (qa - r) - (b - a) * (r - Scalar(1)));
        q = (qa - Scalar(1)) * (r - Scalar(1)) * (s - Scalar(1));
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const Scalar min1 = Scalar(3) * xm * q - std::abs(tol1 * q);
      const Scalar min2 = std::abs(e * q);
      if (Scalar(2) * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  return {b, fb, max_iter};
}

}  // namespace rrk
