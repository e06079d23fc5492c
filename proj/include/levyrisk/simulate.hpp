#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "levyrisk/detail/rng.hpp"
#include "levyrisk/errors.hpp"
#include "levyrisk/model.hpp"

namespace levyrisk {

// ---------------------------------------------------------------------------
// Path storage
// ---------------------------------------------------------------------------

enum class JumpSource : std::uint8_t { Claim, Perturbation };

struct PathEvent {
  double time = 0.0;
  double size = 0.0;  // downward move of X
  JumpSource source = JumpSource::Claim;
};

struct SimConfig {
  std::int64_t n_paths = 1;
  double dt = 1e-3;             // skeleton step for the Brownian part
  std::uint64_t master_seed = 1;
  std::int64_t batch_size = 1000;
};

// One killed path of X, stored as time-ordered segments. Segment i covers
// (start_i, seg_time[i]] where start_i is the previous segment's end (0 for
// the first). Over the open part of a segment X moves continuously
// (linear drift plus Brownian); seg_max / seg_min are the exact extremes of
// that continuous piece sampled from the Brownian-bridge law given the
// endpoints, and a downward jump, if any, is applied at the right endpoint:
// seg_xpre is X just before it, seg_xpost just after. The last segment always
// ends at the kill time tau.
struct KilledRun {
  double tau = 0.0;
  double dt = 0.0;
  double drift = 0.0;  // net linear drift of X between jumps
  double vol = 0.0;    // Brownian scale
  std::vector<PathEvent> events;
  std::vector<double> seg_time;
  std::vector<double> seg_xpre;
  std::vector<double> seg_max;
  std::vector<double> seg_min;
  std::vector<double> seg_xpost;
  std::vector<std::int32_t> seg_event;  // index into events, -1 if none
  double s_tau = 0.0;     // sup of X on [0, tau]
  double i_tau = 0.0;     // inf of X on [0, tau]
  double shat_tau = 0.0;  // sup of the dual, -i_tau

  std::size_t segments() const { return seg_time.size(); }
  double seg_start(std::size_t i) const { return i == 0 ? 0.0 : seg_time[i - 1]; }
  double x_start(std::size_t i) const { return i == 0 ? 0.0 : seg_xpost[i - 1]; }

  void clear() {
    events.clear();
    seg_time.clear();
    seg_xpre.clear();
    seg_max.clear();
    seg_min.clear();
    seg_xpost.clear();
    seg_event.clear();
  }
};

inline void validate(const SimConfig& cfg, const ModelSpec& m) {
  validate(m);
  if (cfg.n_paths < 1) throw invalid_input("sim: n_paths must be >= 1");
  if (cfg.batch_size < 1) throw invalid_input("sim: batch_size must be >= 1");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw invalid_input("sim: dt must be positive and finite");
  }
  const double guard = 0.01 / std::max(1.0, m.premium + m.claims.intensity());
  if (cfg.dt > guard * (1.0 + 1e-12)) {
    throw invalid_input("sim: dt too coarse; need dt <= 0.01 / max(1, premium + claim intensity)");
  }
}

// ---------------------------------------------------------------------------
// Path generation
// ---------------------------------------------------------------------------

namespace detail_sim {

// Exact extremes of a Brownian segment given its endpoints: conditional on
// X(t0)=a, X(t1)=b the maximum satisfies P(M >= v) = exp(-2(v-a)(v-b)/var),
// inverted here with one uniform draw; the minimum is symmetric. The drift
// drops out once the endpoints are fixed.
inline double bridge_max(double a, double b, double var, double u) {
  const double gamma = -0.5 * var * std::log(u);
  const double d = a - b;
  return 0.5 * ((a + b) + std::sqrt(d * d + 4.0 * gamma));
}

inline double bridge_min(double a, double b, double var, double u) {
  const double gamma = -0.5 * var * std::log(u);
  const double d = a - b;
  return 0.5 * ((a + b) - std::sqrt(d * d + 4.0 * gamma));
}

struct PathBuilder {
  KilledRun& run;
  detail::Xoshiro256pp& rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  double t = 0.0;
  double xv = 0.0;

  void push_segment(double t_end, double xpre, double smax, double smin) {
    run.seg_time.push_back(t_end);
    run.seg_xpre.push_back(xpre);
    run.seg_max.push_back(smax);
    run.seg_min.push_back(smin);
    run.seg_xpost.push_back(xpre);
    run.seg_event.push_back(-1);
  }

  // Advance the continuous motion to t_next, emitting skeleton segments.
  void advance(double t_next) {
    if (t_next <= t) return;
    if (run.vol == 0.0) {
      const double xn = xv + run.drift * (t_next - t);
      push_segment(t_next, xn, std::max(xv, xn), std::min(xv, xn));
      xv = xn;
      t = t_next;
      return;
    }
    while (t < t_next) {
      double step = t_next - t;
      const bool last = step <= run.dt * (1.0 + 1e-12);
      if (!last) step = run.dt;
      const double xn = xv + run.drift * step + run.vol * std::sqrt(step) * normal(rng);
      const double var = run.vol * run.vol * step;
      const double smax = bridge_max(xv, xn, var, rng.uniform_pos());
      const double smin = bridge_min(xv, xn, var, rng.uniform_pos());
      push_segment(last ? t_next : t + step, xn, smax, smin);
      xv = xn;
      t = last ? t_next : t + step;
    }
  }

  // Apply a downward jump at the current time. Attaches to the segment that
  // just ended here, or emits a zero-length segment when that one is taken
  // (two jumps at the same instant) or absent.
  void apply_jump(double size, JumpSource source) {
    if (run.seg_time.empty() || run.seg_time.back() != t || run.seg_event.back() != -1) {
      push_segment(t, xv, xv, xv);
    }
    run.events.push_back(PathEvent{t, size, source});
    run.seg_event.back() = static_cast<std::int32_t>(run.events.size()) - 1;
    xv -= size;
    run.seg_xpost.back() = xv;
  }
};

inline void finalize_extremes(KilledRun& run) {
  double smax = 0.0;
  double imin = 0.0;
  for (std::size_t i = 0; i < run.segments(); ++i) {
    smax = std::max(smax, run.seg_max[i]);
    imin = std::min(imin, std::min(run.seg_min[i], run.seg_xpost[i]));
  }
  run.s_tau = smax;
  run.i_tau = imin;
  run.shat_tau = -imin;
}

}  // namespace detail_sim

// Simulate one killed path into an existing buffer. The draw sequence depends
// only on (master_seed, path_index), never on batching or threading, so any
// partition of paths into batches reproduces identical paths.
inline void simulate_killed_run_into(KilledRun& run, const ModelSpec& m, const SimConfig& cfg,
                                     std::uint64_t path_index) {
  validate(cfg, m);
  run.clear();
  run.dt = cfg.dt;
  run.drift = m.net_drift();
  run.vol = m.perturbation.brownian_vol;

  detail::Xoshiro256pp rng(detail::substream_seed(cfg.master_seed, path_index));
  const auto exp_draw = [&rng](double rate) { return -std::log(rng.uniform_pos()) / rate; };

  run.tau = exp_draw(m.kill_rate);
  const double lambda_c = m.claims.intensity();
  const double lambda_z = m.perturbation.neg_jumps ? m.perturbation.neg_jumps->intensity : 0.0;
  constexpr double kNever = std::numeric_limits<double>::infinity();
  double next_claim = lambda_c > 0.0 ? exp_draw(lambda_c) : kNever;
  double next_pert = lambda_z > 0.0 ? exp_draw(lambda_z) : kNever;

  if (run.vol > 0.0) {
    run.seg_time.reserve(static_cast<std::size_t>(run.tau / cfg.dt) + 16);
    run.seg_xpre.reserve(run.seg_time.capacity());
    run.seg_max.reserve(run.seg_time.capacity());
    run.seg_min.reserve(run.seg_time.capacity());
    run.seg_xpost.reserve(run.seg_time.capacity());
    run.seg_event.reserve(run.seg_time.capacity());
  }

  detail_sim::PathBuilder builder{run, rng};
  while (true) {
    const double t_next = std::min(run.tau, std::min(next_claim, next_pert));
    builder.advance(t_next);
    const bool claim_due = next_claim == t_next;
    const bool pert_due = !claim_due && next_pert == t_next;
    if (claim_due) {
      const double size = m.claims.jumps->law.sample(rng);
      builder.apply_jump(size, JumpSource::Claim);
      next_claim = t_next + exp_draw(lambda_c);
    } else if (pert_due) {
      const double size = m.perturbation.neg_jumps->law.sample(rng);
      builder.apply_jump(size, JumpSource::Perturbation);
      next_pert = t_next + exp_draw(lambda_z);
    }
    if (t_next == run.tau && !claim_due && !pert_due) break;
    if (t_next == run.tau) break;  // jump exactly at the kill time: applied, then stop
  }
  detail_sim::finalize_extremes(run);
}

inline KilledRun simulate_killed_run(const ModelSpec& m, const SimConfig& cfg,
                                     std::uint64_t path_index) {
  KilledRun run;
  simulate_killed_run_into(run, m, cfg, path_index);
  return run;
}

// Deterministic path for hand-checked traces: drift-only motion (no Brownian
// part) with the given jumps. Events must be time-ordered in (0, tau].
inline KilledRun scripted_run(const ModelSpec& m, double tau, std::vector<PathEvent> events) {
  validate(m);
  if (m.perturbation.brownian_vol != 0.0) {
    throw invalid_input("scripted_run: only drift-plus-jump models can be scripted");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw invalid_input("scripted_run: tau must be positive");
  KilledRun run;
  run.tau = tau;
  run.dt = 0.0;
  run.drift = m.net_drift();
  run.vol = 0.0;
  detail::Xoshiro256pp unused_rng(0);
  detail_sim::PathBuilder builder{run, unused_rng};
  double prev = 0.0;
  for (const auto& ev : events) {
    if (!(ev.time > 0.0) || ev.time < prev || ev.time > tau) {
      throw invalid_input("scripted_run: events must be time-ordered in (0, tau]");
    }
    if (!(ev.size > 0.0)) throw invalid_input("scripted_run: jump sizes must be positive");
    builder.advance(ev.time);
    builder.apply_jump(ev.size, ev.source);
    prev = ev.time;
  }
  builder.advance(tau);
  detail_sim::finalize_extremes(run);
  return run;
}

// ---------------------------------------------------------------------------
// Modified ladder decomposition
// ---------------------------------------------------------------------------

// Epochs sigma_i where a claim jump takes X strictly below its running
// infimum; equivalently, in dual terms, where the claim exceeds the gap
// Shat(t-) - Xhat(t-). Between epochs the dual supremum creeps up by L_i >= 0
// (continuous-part contribution), at each epoch it jumps by the overshoot
// J_i > 0. Identity: shat_tau == sum L_i + sum J_i.
struct LadderDecomposition {
  std::vector<double> sigmas;   // epoch times, increasing
  std::vector<double> l_parts;  // n_tau + 1 creep increments
  std::vector<double> j_parts;  // n_tau overshoots
  std::int64_t n_tau = 0;
  double shat_tau = 0.0;

  double parts_sum() const {
    double s = 0.0;
    for (double v : l_parts) s += v;
    for (double v : j_parts) s += v;
    return s;
  }

  double decomposition_residual() const {
    return std::abs(shat_tau - parts_sum()) / std::max(1.0, std::abs(shat_tau));
  }
};

inline LadderDecomposition detect_modified_ladder(const KilledRun& run) {
  LadderDecomposition d;
  double i_run = 0.0;     // running infimum of X, including X(0) = 0
  double last_sup = 0.0;  // dual supremum at the last epoch, exactly -i_run then
  for (std::size_t i = 0; i < run.segments(); ++i) {
    const double i_pre = std::min(i_run, run.seg_min[i]);
    const std::int32_t ev = run.seg_event[i];
    if (ev >= 0 && run.events[static_cast<std::size_t>(ev)].source == JumpSource::Claim) {
      const double size = run.events[static_cast<std::size_t>(ev)].size;
      const double gap = run.seg_xpre[i] - i_pre;  // Shat(t-) - Xhat(t-)
      if (size > gap) {
        d.sigmas.push_back(run.seg_time[i]);
        d.l_parts.push_back(-i_pre - last_sup);
        d.j_parts.push_back(size - gap);
        last_sup = -run.seg_xpost[i];  // new infimum is the post-jump value
      }
    }
    i_run = std::min(i_pre, run.seg_xpost[i]);
  }
  d.shat_tau = -i_run;
  d.l_parts.push_back(d.shat_tau - last_sup);
  d.n_tau = static_cast<std::int64_t>(d.sigmas.size());
  return d;
}

// ---------------------------------------------------------------------------
// First passage and occupation functionals
// ---------------------------------------------------------------------------

struct FirstPassage {
  bool hit = false;
  double time = std::numeric_limits<double>::quiet_NaN();
};

// First time the dual exceeds y, i.e. X goes strictly below -y, within
// [0, tau]. Exact for drift-plus-jump paths; for Brownian paths a crossing
// inside a skeleton step is reported at the step end. Consistent with
// shat_tau by construction: hit if and only if shat_tau > y.
inline FirstPassage first_passage(const KilledRun& run, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw invalid_input("first_passage: y must be positive");
  for (std::size_t i = 0; i < run.segments(); ++i) {
    if (run.seg_min[i] < -y) {
      if (run.vol == 0.0) {
        const double t0 = run.seg_start(i);
        const double x0 = run.x_start(i);
        // Linear motion; a fresh interior crossing forces a negative drift.
        double tc = t0;
        if (x0 > -y && run.drift < 0.0) tc = t0 + ((-y) - x0) / run.drift;
        return FirstPassage{true, std::min(std::max(tc, t0), run.seg_time[i])};
      }
      return FirstPassage{true, run.seg_time[i]};
    }
    if (run.seg_xpost[i] < -y) return FirstPassage{true, run.seg_time[i]};
  }
  return FirstPassage{false, std::numeric_limits<double>::quiet_NaN()};
}

namespace detail_sim {

// Per-run precomputation for occupation integrals of the reflected process
// R(t) = X(t) - inf_{s<=t} X(s) = Shat(t) - Xhat(t): reflected values at both
// ends of every segment, plus the first modified ladder epoch.
struct ReflectedSweep {
  const KilledRun* run;
  std::vector<double> r_left;   // R at segment start (after any previous jump)
  std::vector<double> r_right;  // R just before the segment's right endpoint
  std::size_t sigma_seg = SIZE_MAX;
  double sigma_time = std::numeric_limits<double>::infinity();

  explicit ReflectedSweep(const KilledRun& r) : run(&r) {
    const std::size_t n = r.segments();
    r_left.resize(n);
    r_right.resize(n);
    double i_run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r_left[i] = r.x_start(i) - i_run;
      const double i_pre = std::min(i_run, r.seg_min[i]);
      r_right[i] = r.seg_xpre[i] - i_pre;
      const std::int32_t ev = r.seg_event[i];
      if (sigma_seg == SIZE_MAX && ev >= 0 &&
          r.events[static_cast<std::size_t>(ev)].source == JumpSource::Claim &&
          r.events[static_cast<std::size_t>(ev)].size > r_right[i]) {
        sigma_seg = i;
        sigma_time = r.seg_time[i];
      }
      i_run = std::min(i_pre, r.seg_xpost[i]);
    }
  }

  // Time R spends at or below x on a drift-only segment of length len with
  // entering value r0. With drift d >= 0 the infimum is frozen and R grows
  // linearly; with d < 0, R decreases linearly to zero and sticks there.
  static double linear_time_below(double r0, double d, double len, double x) {
    if (d == 0.0) return r0 <= x ? len : 0.0;
    if (d > 0.0) {
      if (r0 > x) return 0.0;
      return std::min(len, (x - r0) / d);
    }
    const double enter = r0 > x ? (x - r0) / d : 0.0;
    return std::max(0.0, len - enter);
  }

  // int_0^{sigma  ^ tau_y ^ tau} 1{R(t) <= x} dt. Exact for drift-plus-jump
  // paths; trapezoidal in the endpoint indicators on the Brownian skeleton,
  // with a half-step left indicator on a step whose bridge minimum crosses -y.
  double occupation_below(double x, double y) const {
    const KilledRun& r = *run;
    double total = 0.0;
    for (std::size_t i = 0; i < r.segments(); ++i) {
      const double t0 = r.seg_start(i);
      const double t1 = r.seg_time[i];
      const double len = t1 - t0;
      const bool interior_cross = r.seg_min[i] < -y;
      if (r.vol == 0.0) {
        double upto = len;
        if (interior_cross) {
          const double x0 = r.x_start(i);
          double tc = t0;
          if (x0 > -y && r.drift < 0.0) tc = t0 + ((-y) - x0) / r.drift;
          upto = std::min(std::max(tc, t0), t1) - t0;
        }
        total += linear_time_below(r_left[i], r.drift, upto, x);
        if (interior_cross) return total;
      } else {
        if (interior_cross) {
          total += 0.5 * len * (r_left[i] <= x ? 1.0 : 0.0);
          return total;
        }
        total += 0.5 * len * ((r_left[i] <= x ? 1.0 : 0.0) + (r_right[i] <= x ? 1.0 : 0.0));
      }
      if (i == sigma_seg) return total;               // sigma at t1
      if (r.seg_xpost[i] < -y) return total;          // dual crosses y by a jump at t1
    }
    return total;
  }
};

}  // namespace detail_sim

// Occupation time of the reflected dual process at or below x, stopped at the
// first modified ladder epoch, the first passage of the dual above y, or tau,
// whichever comes first.
inline double occupation_time(const KilledRun& run, double x, double y) {
  if (!(x > 0.0) || !std::isfinite(x)) throw invalid_input("occupation_time: x must be positive");
  if (!(y > 0.0) || !std::isfinite(y)) throw invalid_input("occupation_time: y must be positive");
  return detail_sim::ReflectedSweep(run).occupation_below(x, y);
}

// ---------------------------------------------------------------------------
// Batch simulation
// ---------------------------------------------------------------------------

// Probe levels for the occupation and joint-law checks. Occupation pairs are
// the cartesian product x * y; joint triples are x * y * z.
struct Probes {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;

  bool operator==(const Probes&) const = default;
};

inline void validate(const Probes& p) {
  for (double v : p.x)
    if (!(v > 0.0) || !std::isfinite(v)) throw invalid_input("probes: x levels must be positive");
  for (double v : p.y)
    if (!(v > 0.0) || !std::isfinite(v)) throw invalid_input("probes: y levels must be positive");
  for (double v : p.z)
    if (!(v > 0.0) || !std::isfinite(v)) throw invalid_input("probes: z levels must be positive");
}

inline std::vector<std::pair<double, double>> occupation_pairs(const Probes& p) {
  std::vector<std::pair<double, double>> out;
  for (double x : p.x)
    for (double y : p.y) out.emplace_back(x, y);
  return out;
}

inline std::vector<std::array<double, 3>> joint_triples(const Probes& p) {
  std::vector<std::array<double, 3>> out;
  for (double x : p.x)
    for (double y : p.y)
      for (double z : p.z) out.push_back({x, y, z});
  return out;
}

// Per-path records of everything the statistical checks need. Parallel
// vectors indexed by path; sigma1 / g_pre_sigma / j1 use NaN when there is no
// epoch on the path (overshoots additionally collects the j1 values that do
// exist).
struct EmpiricalSummary {
  Probes probes;
  std::vector<double> tau;
  std::vector<double> s_tau;
  std::vector<double> shat_tau;
  std::vector<double> g_pre;      // Shat((sigma ^ tau)-): l_parts[0]
  std::vector<double> sigma1;     // first epoch time, NaN if none
  std::vector<double> j1;         // first overshoot, NaN if none
  std::vector<double> overshoots; // j1 restricted to paths with an epoch
  std::vector<std::int32_t> n_tau;
  std::vector<std::uint8_t> has_sigma;
  std::vector<std::vector<double>> occupation;        // [pair][path]
  std::vector<std::vector<std::uint8_t>> shat_le_y;   // [y index][path]
  std::vector<std::vector<std::uint8_t>> joint_event; // [triple][path]
  double max_decomposition_residual = 0.0;
  std::int64_t decomposition_violations = 0;  // residual > 1e-9

  std::int64_t paths() const { return static_cast<std::int64_t>(tau.size()); }
  std::int64_t sigma_count() const {
    std::int64_t c = 0;
    for (auto f : has_sigma) c += f;
    return c;
  }

  std::vector<std::int64_t> n_tau_histogram() const {
    std::vector<std::int64_t> h;
    for (auto n : n_tau) {
      const auto idx = static_cast<std::size_t>(n);
      if (idx >= h.size()) h.resize(idx + 1, 0);
      ++h[idx];
    }
    return h;
  }

  void reserve(std::size_t n) {
    tau.reserve(n);
    s_tau.reserve(n);
    shat_tau.reserve(n);
    g_pre.reserve(n);
    sigma1.reserve(n);
    j1.reserve(n);
    n_tau.reserve(n);
    has_sigma.reserve(n);
    for (auto& v : occupation) v.reserve(n);
    for (auto& v : shat_le_y) v.reserve(n);
    for (auto& v : joint_event) v.reserve(n);
  }

  // Ordered concatenation; both operands must carry the same probe set.
  void merge(EmpiricalSummary&& other) {
    if (!(probes == other.probes)) throw invalid_input("merge: probe sets differ");
    const auto app = [](auto& dst, auto& src) {
      dst.insert(dst.end(), src.begin(), src.end());
    };
    app(tau, other.tau);
    app(s_tau, other.s_tau);
    app(shat_tau, other.shat_tau);
    app(g_pre, other.g_pre);
    app(sigma1, other.sigma1);
    app(j1, other.j1);
    app(overshoots, other.overshoots);
    app(n_tau, other.n_tau);
    app(has_sigma, other.has_sigma);
    for (std::size_t k = 0; k < occupation.size(); ++k) app(occupation[k], other.occupation[k]);
    for (std::size_t k = 0; k < shat_le_y.size(); ++k) app(shat_le_y[k], other.shat_le_y[k]);
    for (std::size_t k = 0; k < joint_event.size(); ++k) app(joint_event[k], other.joint_event[k]);
    max_decomposition_residual =
        std::max(max_decomposition_residual, other.max_decomposition_residual);
    decomposition_violations += other.decomposition_violations;
  }
};

namespace detail_sim {

inline EmpiricalSummary make_summary(const Probes& probes) {
  EmpiricalSummary s;
  s.probes = probes;
  s.occupation.resize(occupation_pairs(probes).size());
  s.shat_le_y.resize(probes.y.size());
  s.joint_event.resize(joint_triples(probes).size());
  return s;
}

inline void record_path(EmpiricalSummary& s, const KilledRun& run,
                        const std::vector<std::pair<double, double>>& pairs,
                        const std::vector<std::array<double, 3>>& triples) {
  const LadderDecomposition d = detect_modified_ladder(run);
  const bool has = d.n_tau > 0;
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

  s.tau.push_back(run.tau);
  s.s_tau.push_back(run.s_tau);
  s.shat_tau.push_back(run.shat_tau);
  s.g_pre.push_back(d.l_parts.front());
  s.sigma1.push_back(has ? d.sigmas.front() : kNan);
  s.j1.push_back(has ? d.j_parts.front() : kNan);
  if (has) s.overshoots.push_back(d.j_parts.front());
  s.n_tau.push_back(static_cast<std::int32_t>(d.n_tau));
  s.has_sigma.push_back(has ? 1 : 0);

  const double resid = d.decomposition_residual();
  s.max_decomposition_residual = std::max(s.max_decomposition_residual, resid);
  if (resid > 1e-9) ++s.decomposition_violations;

  const ReflectedSweep sweep(run);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    s.occupation[k].push_back(sweep.occupation_below(pairs[k].first, pairs[k].second));
  }
  for (std::size_t k = 0; k < s.probes.y.size(); ++k) {
    s.shat_le_y[k].push_back(run.shat_tau <= s.probes.y[k] ? 1 : 0);
  }
  // Joint event of the first epoch: Shat(sigma-) <= y, gap > z, overshoot > x,
  // with the gap recovered from the triggering claim size.
  double gap1 = kNan;
  if (has) {
    const double t1 = d.sigmas.front();
    for (const auto& ev : run.events) {
      if (ev.source == JumpSource::Claim && ev.time == t1) {
        gap1 = ev.size - d.j_parts.front();
        break;
      }
    }
  }
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const auto& [px, py, pz] = triples[k];
    const bool hit = has && d.l_parts.front() <= py && gap1 > pz && d.j_parts.front() > px;
    s.joint_event[k].push_back(hit ? 1 : 0);
  }
}

}  // namespace detail_sim

// Simulate cfg.n_paths paths and collect per-path summaries. Paths are
// partitioned into batches of cfg.batch_size and merged in batch order, and
// every path draws from its own (master_seed, path_index) substream, so the
// result is identical for every batch size and thread count.
inline EmpiricalSummary batch_simulate(const ModelSpec& m, const SimConfig& cfg,
                                       const Probes& probes, unsigned n_threads = 1) {
  validate(cfg, m);
  validate(probes);
  const auto pairs = occupation_pairs(probes);
  const auto triples = joint_triples(probes);
  const std::int64_t n_batches = (cfg.n_paths + cfg.batch_size - 1) / cfg.batch_size;

  std::vector<EmpiricalSummary> parts(static_cast<std::size_t>(n_batches));
  std::atomic<std::int64_t> next_batch{0};
  const auto worker = [&]() {
    KilledRun run;
    while (true) {
      const std::int64_t batch = next_batch.fetch_add(1);
      if (batch >= n_batches) break;
      EmpiricalSummary local = detail_sim::make_summary(probes);
      const std::int64_t lo = batch * cfg.batch_size;
      const std::int64_t hi = std::min(cfg.n_paths, lo + cfg.batch_size);
      local.reserve(static_cast<std::size_t>(hi - lo));
      for (std::int64_t p = lo; p < hi; ++p) {
        simulate_killed_run_into(run, m, cfg, static_cast<std::uint64_t>(p));
        detail_sim::record_path(local, run, pairs, triples);
      }
      parts[static_cast<std::size_t>(batch)] = std::move(local);
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const unsigned count = std::min<unsigned>(n_threads, static_cast<unsigned>(n_batches));
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  EmpiricalSummary out = detail_sim::make_summary(probes);
  out.reserve(static_cast<std::size_t>(cfg.n_paths));
  for (auto& part : parts) out.merge(std::move(part));
  return out;
}

}  // namespace levyrisk
