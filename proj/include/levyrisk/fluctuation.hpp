#pragma once

#include <cmath>
#include <utility>

#include "levyrisk/errors.hpp"
#include "levyrisk/model.hpp"

namespace levyrisk {

// ---------------------------------------------------------------------------
// Root finding for the Laplace exponent
// ---------------------------------------------------------------------------

struct RootResult {
  double b = 0.0;            // largest root of psi_x
  double bracket_lo = 0.0;   // bracket in which the root was isolated
  double bracket_hi = 0.0;
  double residual = 0.0;     // |psi_x(b)| achieved
};

namespace detail_fluct {

// Solve psi_x(beta) = target for the unique solution in [lo0, inf) past which
// psi_x stays above target. psi_x is convex with psi_x(lo0) <= target, so the
// sign change is simple: bisection to isolate, Newton to polish.
inline double solve_psi_level(const ModelSpec& m, double target, double lo0, double hi0) {
  double lo = lo0;
  double hi = hi0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi_x(m, mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double d = psi_x_prime(m, x);
    if (!(std::abs(d) > 1e-12)) break;
    const double step = (psi_x(m, x) - target) / d;
    const double next = x - step;
    if (!(next > lo0) || !(next < hi0) || !std::isfinite(next)) break;
    x = next;
  }
  return x;
}

// Expand hi from start by doubling until psi_x(hi) > target.
inline double expand_bracket(const ModelSpec& m, double target, double start, const char* who) {
  double hi = start;
  while (psi_x(m, hi) <= target) {
    hi *= 2.0;
    if (hi > 1e9) {
      throw numerical_error(std::string(who) + ": no sign change found below beta = 1e9");
    }
  }
  return hi;
}

}  // namespace detail_fluct

// Largest nonnegative root b of psi_x. b == 0 exactly when E X(1) >= 0;
// otherwise b > 0 is bracketed by doubling and isolated by bisection with a
// Newton polish. Postcondition: |psi_x(b)| <= 1e-10 * max(1, |psi_x'(b)|).
inline RootResult largest_root(const ModelSpec& m) {
  if (!m.has_exponential_moments()) {
    throw model_error("largest_root: heavy-tailed jumps, Laplace exponent unavailable");
  }
  if (mean_x(m) >= 0.0) {
    return RootResult{0.0, 0.0, 0.0, 0.0};
  }
  // E X(1) < 0: psi_x dips negative right of 0 and the positive root exists
  // whenever psi_x eventually grows (guaranteed here: premium > 0 or Brownian
  // part or the bracket search fails loudly).
  const double hi = detail_fluct::expand_bracket(m, 0.0, 1.0, "largest_root");
  const double lo = (hi == 1.0) ? 0.0 : 0.5 * hi;
  const double b = detail_fluct::solve_psi_level(m, 0.0, lo, hi);
  RootResult r;
  r.b = b;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.residual = std::abs(psi_x(m, b));
  if (!(r.residual <= 1e-10 * std::max(1.0, std::abs(psi_x_prime(m, b))))) {
    throw numerical_error("largest_root: residual tolerance not met");
  }
  return r;
}

// Right inverse of psi_x: the unique phi(q) >= b with psi_x(phi(q)) = q, q > 0.
// Monotone in q by construction.
inline double phi(const ModelSpec& m, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw invalid_input("phi: q must be positive and finite");
  if (!m.has_exponential_moments()) {
    throw model_error("phi: heavy-tailed jumps, Laplace exponent unavailable");
  }
  const double b = largest_root(m).b;
  const double start = std::max(2.0 * std::max(b, 0.5), 1.0);
  const double hi = detail_fluct::expand_bracket(m, q, start, "phi");
  const double p = detail_fluct::solve_psi_level(m, q, b, hi);
  if (!(std::abs(psi_x(m, p) - q) <= 1e-10 * std::max(1.0, q))) {
    throw numerical_error("phi: residual tolerance not met");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Ladder context and exponents
// ---------------------------------------------------------------------------

// Precomputed quantities for the killed process at rate q = kill_rate.
struct LadderContext {
  ModelSpec model;
  double q = 0.0;      // kill rate
  double b = 0.0;      // largest root of psi_x, phi(0+)
  double phi_q = 0.0;  // phi(q)
};

inline LadderContext make_ladder_context(const ModelSpec& m) {
  validate(m);
  if (!m.has_exponential_moments()) {
    throw model_error("make_ladder_context: heavy-tailed jumps, analytic engine unavailable");
  }
  LadderContext ctx;
  ctx.model = m;
  ctx.q = m.kill_rate;
  ctx.b = largest_root(m).b;
  ctx.phi_q = phi(m, m.kill_rate);
  if (!(ctx.phi_q > 0.0) || !(ctx.phi_q >= ctx.b)) {
    throw numerical_error("make_ladder_context: inconsistent phi(q)");
  }
  return ctx;
}

// Ascending ladder exponent under the normalization that fixes the local-time
// scale so kappa(q, 0) = phi(q): kappa(q, beta) = phi(q) + beta.
inline double kappa(const LadderContext& ctx, double beta) {
  if (!(beta >= 0.0)) throw invalid_input("kappa: beta must be >= 0");
  return ctx.phi_q + beta;
}

// Renewal function of the supremum ladder height under the same normalization:
// Upsilon^q(x) = (1 - e^{-phi(q) x}) / phi(q). Satisfies
// lambda * int_0^inf e^{-lambda x} Upsilon^q(x) dx = 1 / (phi(q) + lambda).
inline double upsilon_q(const LadderContext& ctx, double x) {
  if (!(x >= 0.0)) throw invalid_input("upsilon_q: x must be >= 0");
  return -std::expm1(-ctx.phi_q * x) / ctx.phi_q;
}

// Descending ladder exponent kappa_hat(alpha, beta) = (alpha - psi_x(beta)) /
// (phi(alpha) - beta), alpha > 0, beta >= 0. The singularity at
// beta = phi(alpha) is removable with value psi_x'(phi(alpha)); near it the
// quotient is replaced by a symmetric difference of psi_x.
inline double kappa_hat(const LadderContext& ctx, double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw invalid_input("kappa_hat: alpha must be positive and finite");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw invalid_input("kappa_hat: beta must be >= 0 and finite");
  }
  const double pa = phi(ctx.model, alpha);
  if (std::abs(pa - beta) < 1e-6 * std::max(1.0, pa)) {
    const double mid = 0.5 * (pa + beta);
    const double h = 1e-6 * std::max(1.0, std::abs(mid));
    return (psi_x(ctx.model, mid + h) - psi_x(ctx.model, mid - h)) / (2.0 * h);
  }
  return (alpha - psi_x(ctx.model, beta)) / (pa - beta);
}

// alpha -> 0+ limit of kappa_hat: psi_x(beta) / (beta - b), with the removable
// singularity at beta = b handled the same way.
inline double kappa_hat_zero(const LadderContext& ctx, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw invalid_input("kappa_hat_zero: beta must be >= 0 and finite");
  }
  const double b = ctx.b;
  if (std::abs(beta - b) < 1e-6 * std::max(1.0, b)) {
    const double mid = 0.5 * (beta + b);
    const double h = 1e-6 * std::max(1.0, std::abs(mid));
    return (psi_x(ctx.model, mid + h) - psi_x(ctx.model, mid - h)) / (2.0 * h);
  }
  return psi_x(ctx.model, beta) / (beta - b);
}

// ---------------------------------------------------------------------------
// Residual ladder diagnostic
// ---------------------------------------------------------------------------

// Residual part of the descending ladder exponent once the perturbation
// contribution is stripped off:
//   resid(beta) = ((c_net + b) beta - int (1 - e^{-beta x}) nu(dx)) / (beta - b)
// where c_net = premium - claim drift and nu is the claim measure. Defined for
// beta > b; tends to c_net + b as beta -> inf.
inline double ladder_residual(const LadderContext& ctx, double beta) {
  if (!(beta > ctx.b)) {
    throw invalid_input("ladder_residual: beta must exceed the largest root b");
  }
  if (!std::isfinite(beta)) throw invalid_input("ladder_residual: beta must be finite");
  const double c_net = ctx.model.premium - ctx.model.claims.drift;
  const double jump_part = claim_jump_exponent(ctx.model.claims, beta);
  return ((c_net + ctx.b) * beta - jump_part) / (beta - ctx.b);
}

struct LadderLimitReport {
  double beta_max = 0.0;
  double estimate = 0.0;  // resid(beta_max)
  double target = 0.0;    // c_net + b
  double rel_error = 0.0;
};

// Checks convergence of the residual to its drift limit at a large beta.
inline LadderLimitReport ladder_limit_check(const LadderContext& ctx, double beta_max) {
  if (!(beta_max >= 1e4)) throw invalid_input("ladder_limit_check: beta_max must be >= 1e4");
  LadderLimitReport r;
  r.beta_max = beta_max;
  r.estimate = ladder_residual(ctx, beta_max);
  r.target = ctx.model.premium - ctx.model.claims.drift + ctx.b;
  r.rel_error = std::abs(r.estimate - r.target) / std::max(std::abs(r.target), 1e-300);
  return r;
}

}  // namespace levyrisk
