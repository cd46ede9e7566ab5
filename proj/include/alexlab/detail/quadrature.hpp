#pragma once

#include <cmath>

namespace alexlab {
namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  // A coarse pass fixes the absolute target from the integral's scale.
  const int pieces = 16;
  double h = (b - a) / pieces, coarse = 0.0;
  for (int i = 0; i < pieces; ++i) {
    double x0 = a + i * h, x1 = x0 + h;
    coarse += h / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
  }
  double tol = rel_tol * std::abs(coarse) / pieces + 1e-300;
  double sum = 0.0;
  for (int i = 0; i < pieces; ++i) {
    double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
    double f0 = f(x0), fm = f(xm), f1 = f(x1);
    double whole = h / 6.0 * (f0 + 4.0 * fm + f1);
    sum += detail::simpson_step(f, x0, x1, f0, fm, f1, whole, tol, 40);
  }
  return sum;
}

}  // namespace alexlab
