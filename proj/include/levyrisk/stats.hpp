#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "levyrisk/errors.hpp"
#include "levyrisk/fluctuation.hpp"
#include "levyrisk/pk.hpp"
#include "levyrisk/simulate.hpp"

namespace levyrisk {

// ---------------------------------------------------------------------------
// Empirical CDF and Kolmogorov-Smirnov distances
// ---------------------------------------------------------------------------

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw invalid_input("EmpiricalCdf: no samples");
    for (double v : sorted_) {
      if (std::isnan(v)) throw invalid_input("EmpiricalCdf: NaN sample");
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

  // Fraction of samples <= v.
  double operator()(double v) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), v);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

 private:
  std::vector<double> sorted_;
};

// One-sample KS distance against a reference CDF, taking both one-sided gaps
// at every jump of the empirical CDF.
template <class RefCdf>
double ks_distance(const EmpiricalCdf& emp, RefCdf&& ref) {
  const auto& v = emp.sorted();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double fr = ref(v[i]);
    d = std::max(d, fr - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - fr);
  }
  return d;
}

// Two-sample KS distance by a merge walk over both sorted sample sets.
inline double ks_two_sample(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  const auto& va = a.sorted();
  const auto& vb = b.sorted();
  const double na = static_cast<double>(va.size());
  const double nb = static_cast<double>(vb.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  while (ia < va.size() && ib < vb.size()) {
    const double v = std::min(va[ia], vb[ib]);
    while (ia < va.size() && va[ia] <= v) ++ia;
    while (ib < vb.size() && vb[ib] <= v) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Check reports
// ---------------------------------------------------------------------------

struct CheckReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool inconclusive = false;  // sample too small to decide; does not fail
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::string detail;
};

inline CheckReport make_report(std::string name, double statistic, double threshold,
                               std::int64_t n1 = 0, std::int64_t n2 = 0) {
  CheckReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.pass = statistic <= threshold;
  r.n1 = n1;
  r.n2 = n2;
  return r;
}

// Wilson score interval at 99% two-sided confidence.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval proportion_ci(std::int64_t hits, std::int64_t n) {
  if (n <= 0 || hits < 0 || hits > n) throw invalid_input("proportion_ci: bad counts");
  constexpr double z = 2.5758293035489004;  // 99.5th percentile of the standard normal
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return Interval{center - half, center + half};
}

// ---------------------------------------------------------------------------
// Model-vs-simulation checks
// ---------------------------------------------------------------------------

// KS of the supremum at the kill time against its exponential law:
// P(S(tau) <= x) = 1 - e^{-phi(q) x}.
inline CheckReport s_tau_law_check(const EmpiricalSummary& s, const LadderContext& ctx,
                                   double threshold) {
  const EmpiricalCdf emp(s.s_tau);
  const double p = ctx.phi_q;
  const double d = ks_distance(emp, [p](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-p * v); });
  return make_report("s_tau_exponential_ks", d, threshold,
                     static_cast<std::int64_t>(emp.size()));
}

// Epoch frequency against the analytic geometric weight, as a z-score.
inline CheckReport p_tau_check(const EmpiricalSummary& s, double p_analytic, double se_threshold) {
  const std::int64_t n = s.paths();
  if (n <= 0) throw invalid_input("p_tau_check: empty summary");
  const double nn = static_cast<double>(n);
  const double p_hat = static_cast<double>(s.sigma_count()) / nn;
  const double se = std::sqrt(std::max(p_analytic * (1.0 - p_analytic), 1e-300) / nn);
  auto r = make_report("p_tau_frequency", std::abs(p_hat - p_analytic) / se, se_threshold, n);
  r.detail = "p_hat=" + std::to_string(p_hat) + " p=" + std::to_string(p_analytic);
  return r;
}

// KS of the observed first overshoots against the analytic overshoot law.
// The reference CDF is accumulated incrementally along the sorted samples, so
// laws without a closed form cost one quadrature pass in total.
inline CheckReport overshoot_check(const EmpiricalSummary& s, const LadderContext& ctx,
                                   double threshold, std::int64_t min_samples = 1000) {
  if (s.overshoots.empty()) {
    auto r = make_report("overshoot_ks", 0.0, threshold, 0);
    r.inconclusive = true;
    r.detail = "no epochs observed";
    return r;
  }
  const EmpiricalCdf emp(s.overshoots);
  const auto& jumps = ctx.model.claims.jumps;
  if (!jumps) throw model_error("overshoot_check: model has no claim jumps");
  double d = 0.0;
  const double n = static_cast<double>(emp.size());
  const bool closed =
      jumps->law.kind() == JumpKind::Exponential || jumps->law.kind() == JumpKind::Deterministic;
  if (closed) {
    d = ks_distance(emp, [&](double v) { return h_tau_cdf(ctx, v); });
  } else {
    const double total = exp_weighted_tail_integral(ctx, 0.0);
    const double lambda = jumps->intensity;
    const double p = ctx.phi_q;
    const auto f = [&](double u) { return std::exp(-p * u) * lambda * jumps->law.survival(u); };
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < emp.sorted().size(); ++i) {
      const double v = emp.sorted()[i];
      if (v > prev) acc += detail::integrate(f, prev, v, 1e-12);
      prev = std::max(prev, v);
      const double rem = std::max(0.0, total - acc);
      const double fr = std::min(1.0, std::max(0.0, 1.0 - std::exp(p * v) * rem / total));
      d = std::max(d, fr - static_cast<double>(i) / n);
      d = std::max(d, static_cast<double>(i + 1) / n - fr);
    }
  }
  auto r = make_report("overshoot_ks", d, threshold, static_cast<std::int64_t>(emp.size()));
  if (static_cast<std::int64_t>(emp.size()) < min_samples) {
    r.inconclusive = true;
    r.detail = "fewer than " + std::to_string(min_samples) + " overshoot samples";
  }
  return r;
}

// Two-sample KS between Shat((sigma ^ tau)-) on paths with an epoch and paths
// without one; the two groups must agree in law by the independence lemma.
// The 99% band is coeff * sqrt((n1 + n2) / (n1 n2)) with coeff = 1.63.
inline CheckReport independence_check(const EmpiricalSummary& s, double coeff = 1.63,
                                      std::int64_t min_group = 1000) {
  std::vector<double> with;
  std::vector<double> without;
  for (std::size_t i = 0; i < s.g_pre.size(); ++i) {
    (s.has_sigma[i] ? with : without).push_back(s.g_pre[i]);
  }
  if (with.empty() || without.empty()) {
    auto r = make_report("independence_two_sample_ks", 0.0, 0.0,
                         static_cast<std::int64_t>(with.size()),
                         static_cast<std::int64_t>(without.size()));
    r.inconclusive = true;
    r.detail = "one group is empty";
    return r;
  }
  const double n1 = static_cast<double>(with.size());
  const double n2 = static_cast<double>(without.size());
  const double band = coeff * std::sqrt((n1 + n2) / (n1 * n2));
  const double d = ks_two_sample(EmpiricalCdf(std::move(with)), EmpiricalCdf(std::move(without)));
  auto r = make_report("independence_two_sample_ks", d, band, static_cast<std::int64_t>(n1),
                       static_cast<std::int64_t>(n2));
  if (static_cast<std::int64_t>(n1) < min_group || static_cast<std::int64_t>(n2) < min_group) {
    r.inconclusive = true;
    r.detail = "a group has fewer than " + std::to_string(min_group) + " paths";
  }
  return r;
}

// Total variation between the empirical N_tau histogram and Geometric(1-rho),
// including the analytic tail mass beyond the observed range.
inline CheckReport n_tau_geometric_check(const EmpiricalSummary& s, double rho,
                                         double tv_threshold) {
  if (!(rho >= 0.0) || !(rho < 1.0)) throw invalid_input("n_tau_geometric_check: bad rho");
  const auto hist = s.n_tau_histogram();
  const double n = static_cast<double>(s.paths());
  double tv = 0.0;
  double tail = 1.0;  // geometric mass not yet accounted for
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const double pk = n_tau_pmf(rho, k);
    tv += std::abs(static_cast<double>(hist[k]) / n - pk);
    tail -= pk;
  }
  tv += std::max(0.0, tail);  // empirical mass beyond the range is zero
  return make_report("n_tau_geometric_tv", 0.5 * tv, tv_threshold, s.paths());
}

// Exactness of the per-path telescoping identity shat_tau = sum L_i + sum J_i.
inline CheckReport decomposition_check(const EmpiricalSummary& s, double rel_threshold = 1e-9) {
  auto r = make_report("ladder_decomposition_identity", s.max_decomposition_residual,
                       rel_threshold, s.paths());
  r.detail = std::to_string(s.decomposition_violations) + " paths above tolerance";
  r.pass = s.decomposition_violations == 0 && r.pass;
  return r;
}

namespace detail_stats {

// z-score of mean(D) against zero for per-path differences D_i; pairing the
// indicator with the occupation value path by path keeps the variance tight.
inline std::pair<double, std::int64_t> mean_zero_zscore(const std::vector<double>& d) {
  const std::int64_t n = static_cast<std::int64_t>(d.size());
  if (n < 2) throw invalid_input("mean_zero_zscore: need at least two values");
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return {mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity(), n};
  return {std::abs(mean) / (sd / std::sqrt(static_cast<double>(n))), n};
}

inline std::size_t find_index(const std::vector<double>& v, double value, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == value) return i;
  }
  throw invalid_input(std::string("probe level not found for ") + what);
}

}  // namespace detail_stats

// Occupation identity at probe (x, y):
//   E int_0^{sigma ^ tau_y ^ tau} 1{R(t) <= x} dt
//     = P(sigma > tau, Shat(tau) <= y) * kappa(q,0) Upsilon^q(x) / q,
// checked as a paired z-score of D_i = occ_i - c * B_i with B_i the per-path
// indicator and c the analytic constant (1 - e^{-phi(q) x}) / q.
inline CheckReport occupation_check(const EmpiricalSummary& s, const LadderContext& ctx, double x,
                                    double y, double z_threshold = 3.0) {
  const auto pairs = occupation_pairs(s.probes);
  std::size_t pair_idx = SIZE_MAX;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k].first == x && pairs[k].second == y) pair_idx = k;
  }
  if (pair_idx == SIZE_MAX) throw invalid_input("occupation_check: probe pair not recorded");
  const std::size_t y_idx = detail_stats::find_index(s.probes.y, y, "occupation_check");
  const double c = -std::expm1(-ctx.phi_q * x) / ctx.q;

  const auto& occ = s.occupation[pair_idx];
  const auto& le_y = s.shat_le_y[y_idx];
  std::vector<double> d(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const double b = (s.has_sigma[i] == 0 && le_y[i] == 1) ? 1.0 : 0.0;
    d[i] = occ[i] - c * b;
  }
  const auto [zval, n] = detail_stats::mean_zero_zscore(d);
  auto r = make_report("occupation_identity", zval, z_threshold, n);
  r.detail = "x=" + std::to_string(x) + " y=" + std::to_string(y);
  return r;
}

// Joint law of the first epoch at probe (x, y, z):
//   P(Shat(sigma-) <= y, gap > z, J > x, sigma <= tau)
//     = (kappa(q,0) / q) P(sigma > tau, Shat(tau) <= y)
//       * int_z^inf e^{-phi(q) g} nu(g + x, inf) dg,
// where the gap integral equals e^{phi(q) x} int_{z+x}^inf e^{-phi(q) u}
// nu(u, inf) du; checked as a paired z-score of D_i = A_i - c * B_i.
inline CheckReport joint_law_check(const EmpiricalSummary& s, const LadderContext& ctx, double x,
                                   double y, double z, double z_threshold = 3.0) {
  const auto triples = joint_triples(s.probes);
  std::size_t t_idx = SIZE_MAX;
  for (std::size_t k = 0; k < triples.size(); ++k) {
    if (triples[k][0] == x && triples[k][1] == y && triples[k][2] == z) t_idx = k;
  }
  if (t_idx == SIZE_MAX) throw invalid_input("joint_law_check: probe triple not recorded");
  const std::size_t y_idx = detail_stats::find_index(s.probes.y, y, "joint_law_check");
  const double c =
      ctx.phi_q / ctx.q * std::exp(ctx.phi_q * x) * exp_weighted_tail_integral(ctx, z + x);

  const auto& hit = s.joint_event[t_idx];
  const auto& le_y = s.shat_le_y[y_idx];
  std::vector<double> d(hit.size());
  for (std::size_t i = 0; i < hit.size(); ++i) {
    const double b = (s.has_sigma[i] == 0 && le_y[i] == 1) ? 1.0 : 0.0;
    d[i] = static_cast<double>(hit[i]) - c * b;
  }
  const auto [zval, n] = detail_stats::mean_zero_zscore(d);
  auto r = make_report("joint_epoch_law", zval, z_threshold, n);
  r.detail = "x=" + std::to_string(x) + " y=" + std::to_string(y) + " z=" + std::to_string(z);
  return r;
}

// Sup-norm comparison between the analytic supremum CDF on its lattice and an
// empirical CDF, evaluated at the lattice points.
inline CheckReport pk_comparison_check(const GridDistribution& pk, const EmpiricalCdf& emp,
                                       double threshold) {
  double d = 0.0;
  for (std::size_t k = 0; k < pk.points(); ++k) {
    d = std::max(d, std::abs(pk.cdf(k) - emp(pk.x(k))));
  }
  return make_report("pk_vs_empirical_supnorm", d, threshold,
                     static_cast<std::int64_t>(emp.size()));
}

}  // namespace levyrisk
