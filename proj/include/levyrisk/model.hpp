#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "levyrisk/errors.hpp"

namespace levyrisk {

// ---------------------------------------------------------------------------
// Jump-size laws
// ---------------------------------------------------------------------------

enum class JumpKind { Exponential, Deterministic, Uniform, Pareto };

// A positive jump-size law. Sizes are downward moves of the risk process
// (claims, or negative perturbation jumps).
class JumpDistribution {
 public:
  static JumpDistribution exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw invalid_input("exponential jump law: rate must be positive and finite");
    }
    return {JumpKind::Exponential, rate, 0.0};
  }

  static JumpDistribution deterministic(double size) {
    if (!(size > 0.0) || !std::isfinite(size)) {
      throw invalid_input("deterministic jump law: size must be positive and finite");
    }
    return {JumpKind::Deterministic, size, 0.0};
  }

  static JumpDistribution uniform(double lo, double hi) {
    if (!(0.0 <= lo) || !(lo < hi) || !std::isfinite(hi)) {
      throw invalid_input("uniform jump law: need 0 <= lo < hi < inf");
    }
    return {JumpKind::Uniform, lo, hi};
  }

  // Survival (scale/u)^index for u >= scale. index > 1 so the mean exists.
  static JumpDistribution pareto(double index, double scale) {
    if (!(index > 1.0) || !std::isfinite(index) || !(scale > 0.0) || !std::isfinite(scale)) {
      throw invalid_input("pareto jump law: need index > 1 and scale > 0");
    }
    return {JumpKind::Pareto, index, scale};
  }

  JumpKind kind() const { return kind_; }

  double rate() const { require(JumpKind::Exponential); return a_; }
  double size() const { require(JumpKind::Deterministic); return a_; }
  double lo() const { require(JumpKind::Uniform); return a_; }
  double hi() const { require(JumpKind::Uniform); return b_; }
  double index() const { require(JumpKind::Pareto); return a_; }
  double scale() const { require(JumpKind::Pareto); return b_; }

  double mean() const {
    switch (kind_) {
      case JumpKind::Exponential: return 1.0 / a_;
      case JumpKind::Deterministic: return a_;
      case JumpKind::Uniform: return 0.5 * (a_ + b_);
      case JumpKind::Pareto: return a_ * b_ / (a_ - 1.0);
    }
    return 0.0;
  }

  // P(size > u) for u >= 0.
  double survival(double u) const {
    if (!(u >= 0.0)) throw invalid_input("survival: argument must be >= 0");
    switch (kind_) {
      case JumpKind::Exponential: return std::exp(-a_ * u);
      case JumpKind::Deterministic: return u < a_ ? 1.0 : 0.0;
      case JumpKind::Uniform:
        if (u <= a_) return 1.0;
        if (u >= b_) return 0.0;
        return (b_ - u) / (b_ - a_);
      case JumpKind::Pareto: return u < b_ ? 1.0 : std::pow(b_ / u, a_);
    }
    return 0.0;
  }

  double cdf(double u) const { return 1.0 - survival(u); }

  // Laplace transforms exist on [0, inf) only for light-tailed kinds.
  bool has_laplace_transform() const { return kind_ != JumpKind::Pareto; }

  // E exp(-beta * size), beta >= 0.
  double laplace(double beta) const {
    if (!(beta >= 0.0)) throw invalid_input("laplace: beta must be >= 0");
    if (beta == 0.0) return 1.0;
    switch (kind_) {
      case JumpKind::Exponential: return a_ / (a_ + beta);
      case JumpKind::Deterministic: return std::exp(-beta * a_);
      case JumpKind::Uniform: {
        const double w = b_ - a_;
        // (e^{-beta lo} - e^{-beta hi}) / (beta (hi - lo)), written stably.
        return std::exp(-beta * a_) * (-std::expm1(-beta * w)) / (beta * w);
      }
      case JumpKind::Pareto:
        throw model_error("laplace: pareto jump law has no usable Laplace transform");
    }
    return 0.0;
  }

  // E [size * exp(-beta * size)] = -d/dbeta laplace(beta), beta >= 0.
  double mean_times_exp(double beta) const {
    if (!(beta >= 0.0)) throw invalid_input("mean_times_exp: beta must be >= 0");
    if (beta == 0.0) return mean();
    switch (kind_) {
      case JumpKind::Exponential: {
        const double s = a_ + beta;
        return a_ / (s * s);
      }
      case JumpKind::Deterministic: return a_ * std::exp(-beta * a_);
      case JumpKind::Uniform: {
        const double w = b_ - a_;
        if (beta * b_ < 1e-4) {
          // Small-beta series; the direct formula cancels catastrophically.
          const double m1 = 0.5 * (a_ + b_);
          const double m2 = (a_ * a_ + a_ * b_ + b_ * b_) / 3.0;
          const double m3 = (b_ * b_ * b_ * b_ - a_ * a_ * a_ * a_) / (4.0 * w);
          return m1 - beta * m2 + 0.5 * beta * beta * m3;
        }
        const double ea = std::exp(-beta * a_);
        const double eb = std::exp(-beta * b_);
        return ((a_ / beta + 1.0 / (beta * beta)) * ea -
                (b_ / beta + 1.0 / (beta * beta)) * eb) / w;
      }
      case JumpKind::Pareto:
        throw model_error("mean_times_exp: pareto jump law has no usable Laplace transform");
    }
    return 0.0;
  }

  // Draw one jump size. Uses only uniform deviates from the engine so the
  // draw count per sample is fixed (one) for every kind.
  template <class Urbg>
  double sample(Urbg& rng) const {
    const double u = rng.uniform_pos();  // in (0, 1]
    switch (kind_) {
      case JumpKind::Exponential: return -std::log(u) / a_;
      case JumpKind::Deterministic: return a_;
      case JumpKind::Uniform: return a_ + (b_ - a_) * (1.0 - u);
      case JumpKind::Pareto: return b_ * std::pow(u, -1.0 / a_);
    }
    return 0.0;
  }

 private:
  JumpDistribution(JumpKind k, double a, double b) : kind_(k), a_(a), b_(b) {}

  void require(JumpKind k) const {
    if (kind_ != k) throw invalid_input("jump law parameter accessor used with wrong kind");
  }

  JumpKind kind_;
  double a_;
  double b_;
};

template <class Urbg>
double sample_jump(const JumpDistribution& law, Urbg& rng) {
  return law.sample(rng);
}

// ---------------------------------------------------------------------------
// Process specifications
// ---------------------------------------------------------------------------

struct JumpComponent {
  double intensity;  // expected jumps per unit time
  JumpDistribution law;
};

// Finite-activity subordinator: nonnegative drift plus compound Poisson jumps.
struct SubordinatorSpec {
  double drift = 0.0;
  std::optional<JumpComponent> jumps;
  // Bookkeeping only: records that jumps below this size were truncated away
  // when the spec was produced. The laws above are used as given.
  double small_jump_cutoff = 0.0;

  double intensity() const { return jumps ? jumps->intensity : 0.0; }
  double mean_rate() const { return drift + (jumps ? jumps->intensity * jumps->law.mean() : 0.0); }
};

// Zero-mean perturbation: Brownian part plus mean-compensated negative jumps.
struct PerturbationSpec {
  double brownian_vol = 0.0;  // diffusion scale s; psi_Z gets s^2 beta^2 / 2
  std::optional<JumpComponent> neg_jumps;

  // Linear drift added so that E Z(1) = 0.
  double compensation_drift() const {
    return neg_jumps ? neg_jumps->intensity * neg_jumps->law.mean() : 0.0;
  }
};

// X = c t + Z(t) - C(t), killed at an independent Exp(kill_rate) time.
struct ModelSpec {
  double premium = 0.0;  // c
  SubordinatorSpec claims;
  PerturbationSpec perturbation;
  double kill_rate = 0.0;  // q

  bool has_exponential_moments() const {
    const bool claims_ok = !claims.jumps || claims.jumps->law.has_laplace_transform();
    const bool pert_ok =
        !perturbation.neg_jumps || perturbation.neg_jumps->law.has_laplace_transform();
    return claims_ok && pert_ok;
  }

  // Linear drift of X between jumps (premium, minus subordinator drift, plus
  // the perturbation compensation drift).
  double net_drift() const {
    return premium - claims.drift + perturbation.compensation_drift();
  }
};

inline void validate(const SubordinatorSpec& c) {
  if (!(c.drift >= 0.0) || !std::isfinite(c.drift)) {
    throw invalid_input("subordinator: drift must be >= 0 and finite");
  }
  if (c.jumps && (!(c.jumps->intensity > 0.0) || !std::isfinite(c.jumps->intensity))) {
    throw invalid_input("subordinator: jump intensity must be positive and finite");
  }
  if (!(c.small_jump_cutoff >= 0.0) || !std::isfinite(c.small_jump_cutoff)) {
    throw invalid_input("subordinator: small-jump cutoff must be >= 0 and finite");
  }
}

inline void validate(const PerturbationSpec& z) {
  if (!(z.brownian_vol >= 0.0) || !std::isfinite(z.brownian_vol)) {
    throw invalid_input("perturbation: brownian_vol must be >= 0 and finite");
  }
  if (z.neg_jumps && (!(z.neg_jumps->intensity > 0.0) || !std::isfinite(z.neg_jumps->intensity))) {
    throw invalid_input("perturbation: jump intensity must be positive and finite");
  }
}

inline void validate(const ModelSpec& m) {
  if (!std::isfinite(m.premium)) throw invalid_input("model: premium must be finite");
  if (!(m.kill_rate > 0.0) || !std::isfinite(m.kill_rate)) {
    throw invalid_input("model: kill_rate must be positive and finite");
  }
  validate(m.claims);
  validate(m.perturbation);
}

// ---------------------------------------------------------------------------
// Levy-measure tail and Laplace exponents
// ---------------------------------------------------------------------------

// Tail mass nu(u, inf) of the claim-size Levy measure, u > 0.
inline double nu_tail(const SubordinatorSpec& claims, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw invalid_input("nu_tail: u must be positive and finite");
  if (!claims.jumps) return 0.0;
  return claims.jumps->intensity * claims.jumps->law.survival(u);
}

// Integral (1 - e^{-beta x}) nu(dx) over (0, inf) for the claim measure.
inline double claim_jump_exponent(const SubordinatorSpec& claims, double beta) {
  if (!claims.jumps) return 0.0;
  return claims.jumps->intensity * (1.0 - claims.jumps->law.laplace(beta));
}

// Subordinator Laplace exponent: psi_C(beta) with E e^{-beta C(t)} = e^{-t psi_C(beta)}.
inline double psi_c(const SubordinatorSpec& claims, double beta) {
  if (!(beta >= 0.0)) throw invalid_input("psi_c: beta must be >= 0");
  return claims.drift * beta + claim_jump_exponent(claims, beta);
}

inline double psi_c_prime(const SubordinatorSpec& claims, double beta) {
  if (!(beta >= 0.0)) throw invalid_input("psi_c_prime: beta must be >= 0");
  return claims.drift + (claims.jumps ? claims.jumps->intensity * claims.jumps->law.mean_times_exp(beta) : 0.0);
}

// Perturbation exponent: psi_Z(beta) with E e^{beta Z(t)} = e^{t psi_Z(beta)}.
// Brownian scale s contributes s^2 beta^2 / 2; compensated negative jumps
// contribute lambda (E e^{-beta U} - 1) + beta lambda E U.
inline double psi_z(const PerturbationSpec& z, double beta) {
  if (!(beta >= 0.0)) throw invalid_input("psi_z: beta must be >= 0");
  double v = 0.5 * z.brownian_vol * z.brownian_vol * beta * beta;
  if (z.neg_jumps) {
    const double lambda = z.neg_jumps->intensity;
    v += lambda * (z.neg_jumps->law.laplace(beta) - 1.0) + beta * lambda * z.neg_jumps->law.mean();
  }
  return v;
}

inline double psi_z_prime(const PerturbationSpec& z, double beta) {
  if (!(beta >= 0.0)) throw invalid_input("psi_z_prime: beta must be >= 0");
  double v = z.brownian_vol * z.brownian_vol * beta;
  if (z.neg_jumps) {
    const double lambda = z.neg_jumps->intensity;
    v += lambda * (z.neg_jumps->law.mean() - z.neg_jumps->law.mean_times_exp(beta));
  }
  return v;
}

// Laplace exponent of X: E e^{beta X(t)} = e^{t psi_x(beta)}, beta >= 0.
// psi_x(0) == 0 exactly.
inline double psi_x(const ModelSpec& m, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw invalid_input("psi_x: beta must be >= 0 and finite");
  if (beta > 0.0 && !m.has_exponential_moments()) {
    throw model_error("psi_x: model has heavy-tailed jumps; Laplace exponent undefined for beta > 0");
  }
  if (beta == 0.0) return 0.0;
  return m.premium * beta + psi_z(m.perturbation, beta) - psi_c(m.claims, beta);
}

inline double psi_x_prime(const ModelSpec& m, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw invalid_input("psi_x_prime: beta must be >= 0 and finite");
  if (beta > 0.0 && !m.has_exponential_moments()) {
    throw model_error("psi_x_prime: model has heavy-tailed jumps; Laplace exponent undefined for beta > 0");
  }
  return m.premium + psi_z_prime(m.perturbation, beta) - psi_c_prime(m.claims, beta);
}

// E X(1) = c - E C(1); the perturbation has zero mean. Defined for all kinds,
// heavy-tailed included (pareto index > 1 guarantees a finite mean).
inline double mean_x(const ModelSpec& m) {
  return m.premium - m.claims.mean_rate();
}

enum class NetProfit { Holds, Boundary, Violated };

inline NetProfit npc_status(const ModelSpec& m) {
  const double mx = mean_x(m);
  if (mx > 0.0) return NetProfit::Holds;
  if (mx == 0.0) return NetProfit::Boundary;
  return NetProfit::Violated;
}

}  // namespace levyrisk
