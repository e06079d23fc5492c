#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "levyrisk/detail/fft.hpp"
#include "levyrisk/detail/quadrature.hpp"
#include "levyrisk/errors.hpp"
#include "levyrisk/fluctuation.hpp"
#include "levyrisk/model.hpp"

namespace levyrisk {

// ---------------------------------------------------------------------------
// Grid distributions
// ---------------------------------------------------------------------------

struct GridSpec {
  double h = 0.0;      // lattice step
  std::size_t n = 0;   // lattice {0, h, ..., n h}; n + 1 CDF values
};

// A sub-probability distribution on the lattice {0, h, ..., n h}, stored as
// CDF values F(k h). Mass that falls beyond n h at construction time is
// dropped, never renormalized; truncated_mass() reports how much.
class GridDistribution {
 public:
  GridDistribution(double step, std::vector<double> cdf) : step_(step), cdf_(std::move(cdf)) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
      throw invalid_input("GridDistribution: step must be positive and finite");
    }
    if (cdf_.empty()) throw invalid_input("GridDistribution: empty CDF");
    double prev = 0.0;
    for (double& v : cdf_) {
      if (!std::isfinite(v) || v < -1e-9 || v > 1.0 + 1e-9) {
        throw invalid_input("GridDistribution: CDF values must lie in [0, 1]");
      }
      if (v < prev - 1e-9) throw invalid_input("GridDistribution: CDF must be nondecreasing");
      // Clip round-off so downstream consumers see a clean monotone CDF.
      v = std::min(1.0, std::max(v, prev));
      prev = v;
    }
  }

  static GridDistribution delta_zero(const GridSpec& g) {
    return GridDistribution(g.h, std::vector<double>(g.n + 1, 1.0));
  }

  template <class F>
  static GridDistribution from_cdf(F&& cdf_fn, const GridSpec& g) {
    std::vector<double> v(g.n + 1);
    for (std::size_t k = 0; k <= g.n; ++k) v[k] = cdf_fn(static_cast<double>(k) * g.h);
    return GridDistribution(g.h, std::move(v));
  }

  // Mass-preserving discretization of samples: a sample in ((k-1)h, kh] lands
  // on lattice point k, nonpositive samples on the zero atom, samples beyond
  // n h are dropped into the truncated mass.
  static GridDistribution from_samples(const std::vector<double>& samples, const GridSpec& g) {
    if (samples.empty()) throw invalid_input("GridDistribution::from_samples: no samples");
    std::vector<double> mass(g.n + 1, 0.0);
    const double w = 1.0 / static_cast<double>(samples.size());
    for (double v : samples) {
      if (v <= 0.0) {
        mass[0] += w;
        continue;
      }
      const double kf = std::ceil(v / g.h - 1e-12);
      if (kf > static_cast<double>(g.n)) continue;  // truncated
      mass[static_cast<std::size_t>(kf)] += w;
    }
    std::vector<double> cdf(g.n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k <= g.n; ++k) {
      acc += mass[k];
      cdf[k] = acc;
    }
    return GridDistribution(g.h, std::move(cdf));
  }

  double step() const { return step_; }
  std::size_t points() const { return cdf_.size(); }
  std::size_t n() const { return cdf_.size() - 1; }
  double x(std::size_t k) const { return static_cast<double>(k) * step_; }
  double cdf(std::size_t k) const { return cdf_[k]; }
  const std::vector<double>& values() const { return cdf_; }

  double atom_at_zero() const { return cdf_.front(); }
  double truncated_mass() const { return std::max(0.0, 1.0 - cdf_.back()); }

  bool is_delta_zero() const { return cdf_.front() == 1.0; }

  // Step-function evaluation at arbitrary x (right-continuous).
  double eval(double v) const {
    if (v < 0.0) return 0.0;
    const double kf = std::floor(v / step_);
    if (kf >= static_cast<double>(n())) return cdf_.back();
    return cdf_[static_cast<std::size_t>(kf)];
  }

  // Point masses at the lattice sites.
  std::vector<double> masses() const {
    std::vector<double> m(cdf_.size());
    m[0] = cdf_[0];
    for (std::size_t k = 1; k < cdf_.size(); ++k) m[k] = cdf_[k] - cdf_[k - 1];
    return m;
  }

 private:
  double step_;
  std::vector<double> cdf_;
};

namespace detail_pk {

// Convolve two mass vectors on the same lattice, truncating to their common
// size. Small problems go through the direct O(n^2) sum; larger ones through
// the radix-2 FFT. Both routes are exercised by the tests and must agree.
inline std::vector<double> convolve_masses(const std::vector<double>& p,
                                           const std::vector<double>& q) {
  const std::size_t out = p.size();
  // A unit mass at zero is the convolution identity; return the other operand
  // exactly rather than passing it through the transform.
  if (p[0] == 1.0) return {q.begin(), q.begin() + static_cast<std::ptrdiff_t>(out)};
  if (q[0] == 1.0) return {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(out)};
  if (out <= 1025) return detail::convolve_masses_direct(p, q, out);
  return detail::convolve_masses_fft(p, q, out);
}

inline std::vector<double> cumsum_clipped(const std::vector<double>& mass) {
  std::vector<double> cdf(mass.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    acc += mass[k];
    cdf[k] = std::min(acc, 1.0);
  }
  return cdf;
}

}  // namespace detail_pk

// Convolution of two grid distributions on the same lattice. Operands are
// ordered canonically before convolving so the result is bitwise symmetric in
// its arguments; convolving with a point mass at zero returns the other
// operand unchanged.
inline GridDistribution convolve(const GridDistribution& a, const GridDistribution& b) {
  if (a.step() != b.step() || a.points() != b.points()) {
    throw invalid_input("convolve: operands must share the same lattice");
  }
  if (a.is_delta_zero()) return b;
  if (b.is_delta_zero()) return a;
  const GridDistribution* first = &a;
  const GridDistribution* second = &b;
  if (std::lexicographical_compare(b.values().begin(), b.values().end(),
                                   a.values().begin(), a.values().end())) {
    std::swap(first, second);
  }
  const auto mass = detail_pk::convolve_masses(first->masses(), second->masses());
  return GridDistribution(a.step(), detail_pk::cumsum_clipped(mass));
}

// ---------------------------------------------------------------------------
// Exponentially weighted claim-tail integrals
// ---------------------------------------------------------------------------

// int_a^inf e^{-phi(q) u} nu(u, inf) du for the claim measure. Closed forms
// for exponential and deterministic claim laws; adaptive quadrature with an
// explicit tail cutoff otherwise. Zero when the model has no claim jumps.
inline double exp_weighted_tail_integral(const LadderContext& ctx, double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw invalid_input("exp_weighted_tail_integral: lower bound must be >= 0 and finite");
  }
  const auto& jumps = ctx.model.claims.jumps;
  if (!jumps) return 0.0;
  const double lambda = jumps->intensity;
  const double p = ctx.phi_q;
  switch (jumps->law.kind()) {
    case JumpKind::Exponential: {
      const double mu = jumps->law.rate();
      return lambda * std::exp(-(mu + p) * a) / (mu + p);
    }
    case JumpKind::Deterministic: {
      const double s = jumps->law.size();
      if (a >= s) return 0.0;
      return lambda * (std::exp(-p * a) - std::exp(-p * s)) / p;
    }
    default: {
      const auto f = [&](double u) { return std::exp(-p * u) * lambda * jumps->law.survival(u); };
      double cutoff = std::max(a, 1.0);
      while (f(cutoff) >= 1e-14) {
        cutoff *= 2.0;
        if (cutoff > 1e12) throw numerical_error("exp_weighted_tail_integral: tail cutoff not found");
      }
      return detail::integrate(f, a, cutoff, 1e-10);
    }
  }
}

// ---------------------------------------------------------------------------
// Overshoot law H_tau and the geometric weight
// ---------------------------------------------------------------------------

// Continuous CDF of the overshoot law (excess of the triggering claim over the
// pre-epoch gap, conditional on an epoch):
//   1 - H_tau(x) = e^{phi(q) x} I(x) / I(0),
//   I(a) = int_a^inf e^{-phi(q) u} nu(u, inf) du.
// The gap at the epoch carries the occupation density phi(q) e^{-phi(q) g} dg
// and the triggering claim must clear it by more than x, so the survival is
// int_0^inf e^{-phi(q) g} nu(g + x, inf) dg / I(0), which the substitution
// u = g + x turns into the tilted tail above. For exponential(mu) claims this
// reduces to the Exp(mu) law, as memorylessness requires; for deterministic
// claims of size s it is (e^{phi(q) x} - 1) / (e^{phi(q) s} - 1) on [0, s].
inline double h_tau_cdf(const LadderContext& ctx, double v) {
  if (!ctx.model.claims.jumps) {
    throw model_error("h_tau_cdf: model has no claim jumps; overshoot law undefined");
  }
  if (v <= 0.0) return 0.0;
  const auto& jumps = *ctx.model.claims.jumps;
  const double p = ctx.phi_q;
  switch (jumps.law.kind()) {
    case JumpKind::Exponential:
      return -std::expm1(-jumps.law.rate() * v);
    case JumpKind::Deterministic: {
      const double s = jumps.law.size();
      if (v >= s) return 1.0;
      return std::expm1(p * v) / std::expm1(p * s);
    }
    default: {
      const double total = exp_weighted_tail_integral(ctx, 0.0);
      const double tail = exp_weighted_tail_integral(ctx, v);
      if (tail <= 0.0) return 1.0;
      return std::min(1.0, std::max(0.0, 1.0 - std::exp(p * v) * tail / total));
    }
  }
}

struct HTauResult {
  GridDistribution dist;
  double normalizer;  // int_0^inf e^{-phi(q) u} nu(u, inf) du
};

// Discretized overshoot law on the given lattice. The law is absolutely
// continuous, so the zero atom is exactly zero; tail mass beyond the lattice
// shows up as truncated_mass() on the result.
inline HTauResult h_tau(const LadderContext& ctx, const GridSpec& grid) {
  if (!ctx.model.claims.jumps) {
    throw model_error("h_tau: model has no claim jumps; overshoot law undefined");
  }
  if (!(grid.h > 0.0) || grid.n == 0) throw invalid_input("h_tau: bad grid");
  const double total = exp_weighted_tail_integral(ctx, 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw numerical_error("h_tau: degenerate normalizer");
  }
  auto dist = GridDistribution::from_cdf(
      [&](double v) { return h_tau_cdf(ctx, v); }, grid);
  return HTauResult{std::move(dist), total};
}

// Geometric success weight of the killed ladder decomposition:
//   K = (phi(q) / q) int_0^inf e^{-phi(q) u} nu(u, inf) du,  p_tau = K / (1 + K).
// Zero when the model has no claim jumps (a modified ladder epoch needs one).
inline double p_tau(const LadderContext& ctx) {
  if (!ctx.model.claims.jumps) return 0.0;
  const double k = ctx.phi_q / ctx.q * exp_weighted_tail_integral(ctx, 0.0);
  if (!std::isfinite(k) || k < 0.0) throw numerical_error("p_tau: non-finite weight");
  return k / (1.0 + k);
}

// General-form weight from the ladder normalization: given kappa(q, 0) and the
// exponentially weighted tail integral I, the odds are kappa(q,0) * I / q.
inline double rho_tau_general(double kappa_q0, double tail_integral, double q) {
  if (!(kappa_q0 > 0.0)) throw invalid_input("rho_tau_general: kappa(q,0) must be positive");
  if (!(tail_integral >= 0.0)) {
    throw invalid_input("rho_tau_general: tail integral must be nonnegative");
  }
  if (!(q > 0.0)) throw invalid_input("rho_tau_general: q must be positive");
  const double odds = kappa_q0 * tail_integral / q;
  return odds / (1.0 + odds);
}

// P(N_tau = n) for the geometric ladder count with success weight rho.
inline double n_tau_pmf(double rho, std::size_t n) {
  if (!(rho >= 0.0) || !(rho < 1.0)) throw invalid_input("n_tau_pmf: need 0 <= rho < 1");
  return (1.0 - rho) * std::pow(rho, static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Pollaczek-Khinchine series
// ---------------------------------------------------------------------------

struct PkParams {
  double rho_tau = 0.0;
  GridDistribution g_tau;   // law of the pre-epoch supremum contribution
  GridDistribution h_tau;   // overshoot law (zero atom required)
  double series_eps = 1e-10;
};

struct PkResult {
  GridDistribution cdf;
  std::size_t terms = 0;          // series terms accumulated
  double truncation_bound = 0.0;  // sup-norm bound on the dropped tail
};

// Evaluate the compound-geometric series
//   F(x) = (1 - rho) sum_n rho^n (G^{*(n+1)} * H^{*n})(x)
// on the common lattice of G and H. Truncates after N terms once
// rho^{N+1} < series_eps * (1 - rho); the dropped tail has total mass
// rho^{N+1}, which bounds its sup-norm contribution.
inline PkResult pk_cdf(const PkParams& params) {
  const double rho = params.rho_tau;
  if (!(rho >= 0.0) || !(rho < 1.0)) throw invalid_input("pk_cdf: need 0 <= rho_tau < 1");
  if (!(params.series_eps > 0.0)) throw invalid_input("pk_cdf: series_eps must be positive");
  if (params.g_tau.step() != params.h_tau.step() ||
      params.g_tau.points() != params.h_tau.points()) {
    throw invalid_input("pk_cdf: G and H must share the same lattice");
  }
  if (params.h_tau.atom_at_zero() > 1e-12) {
    throw invalid_input("pk_cdf: overshoot law must not carry an atom at zero");
  }
  if (rho == 0.0) {
    return PkResult{params.g_tau, 1, 0.0};
  }

  const double thresh = params.series_eps * (1.0 - rho);
  std::size_t n_terms = 1;
  double tail = rho;  // rho^{n_terms}
  while (tail >= thresh) {
    tail *= rho;
    ++n_terms;
    if (n_terms > 1000000) throw numerical_error("pk_cdf: series truncation did not converge");
  }
  // n_terms terms (n = 0 .. n_terms-1); dropped mass = rho^{n_terms} = tail.

  const auto g_mass = params.g_tau.masses();
  const auto h_mass = params.h_tau.masses();
  const auto gh_mass = detail_pk::convolve_masses(g_mass, h_mass);

  std::vector<double> acc(g_mass.size(), 0.0);
  std::vector<double> cur = g_mass;
  double weight = 1.0 - rho;
  for (std::size_t term = 0; term < n_terms; ++term) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += weight * cur[k];
    weight *= rho;
    if (term + 1 < n_terms) cur = detail_pk::convolve_masses(cur, gh_mass);
  }
  return PkResult{GridDistribution(params.g_tau.step(), detail_pk::cumsum_clipped(acc)),
                  n_terms, tail};
}

}  // namespace levyrisk
