#pragma once

#include <cmath>
#include <cstddef>

#include "levyrisk/errors.hpp"

namespace levyrisk::detail {

// Adaptive Simpson quadrature with Richardson extrapolation as the error
// estimate. The integrands in this library are smooth with exponential or
// polynomial decay and at most a kink at a jump-size boundary, so bisection
// refinement with a per-panel budget converges quickly and reliably.

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Integrate f over [a, b] to absolute tolerance abs_tol. The interval is
// pre-split into a few panels so that a deceptively symmetric integrand
// cannot fool the first Richardson estimate.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10) {
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw invalid_input("integrate: bounds must be finite");
  }
  if (!(abs_tol > 0.0)) throw invalid_input("integrate: tolerance must be positive");
  if (b <= a) return 0.0;
  constexpr int kPanels = 8;
  const double width = (b - a) / kPanels;
  const double panel_tol = abs_tol / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double pa = a + p * width;
    const double pb = (p + 1 == kPanels) ? b : pa + width;
    const double pm = 0.5 * (pa + pb);
    const double fa = f(pa);
    const double fm = f(pm);
    const double fb = f(pb);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson_rec(f, pa, pb, fa, fm, fb, whole, panel_tol, 44);
  }
  if (!std::isfinite(total)) throw numerical_error("integrate: non-finite result");
  return total;
}

}  // namespace levyrisk::detail
