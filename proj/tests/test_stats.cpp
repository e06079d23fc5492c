#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "levyrisk/errors.hpp"
#include "levyrisk/fluctuation.hpp"
#include "levyrisk/model.hpp"
#include "levyrisk/pk.hpp"
#include "levyrisk/simulate.hpp"
#include "levyrisk/stats.hpp"
#include "oracles.hpp"

using namespace levyrisk;

namespace {

ModelSpec model_m2() {
  ModelSpec m;
  m.premium = 1.5;
  m.claims.jumps = JumpComponent{1.0, JumpDistribution::exponential(1.0)};
  m.kill_rate = 0.1;
  return m;
}

ModelSpec model_m3_flat() {
  ModelSpec m;
  m.premium = 1.0;
  m.claims.jumps = JumpComponent{2.0, JumpDistribution::deterministic(1.0)};
  m.kill_rate = 0.1;
  return m;
}

ModelSpec drift_only_unit() {
  ModelSpec m;
  m.premium = 1.0;
  m.kill_rate = 1.0;
  return m;
}

}  // namespace

TEST_CASE("EmpiricalCdf counts the fraction of samples at or below v") {
  const EmpiricalCdf e({3.0, 1.0, 2.0, 2.0});
  REQUIRE(e.size() == 4);
  REQUIRE(e(0.5) == 0.0);
  REQUIRE(e(1.0) == 0.25);
  REQUIRE(e(1.5) == 0.25);
  REQUIRE(e(2.0) == 0.75);
  REQUIRE(e(3.0) == 1.0);
  REQUIRE(e(99.0) == 1.0);
  REQUIRE(std::is_sorted(e.sorted().begin(), e.sorted().end()));

  REQUIRE_THROWS_AS(EmpiricalCdf(std::vector<double>{}), invalid_input);
  REQUIRE_THROWS_AS(EmpiricalCdf({1.0, std::nan("")}), invalid_input);
}

TEST_CASE("ks_distance on hand-placed quantiles") {
  // Samples at the n mid-quantiles of U(0,1): both one-sided gaps are 1/(2n).
  std::vector<double> mids;
  for (int i = 0; i < 10; ++i) mids.push_back(0.05 + 0.1 * i);
  const double d = ks_distance(EmpiricalCdf(mids), [](double v) {
    return std::min(1.0, std::max(0.0, v));
  });
  REQUIRE(std::abs(d - 0.05) <= 1e-12);

  // A single sample at the reference median has distance exactly one half.
  const double single =
      ks_distance(EmpiricalCdf({std::log(2.0)}), [](double v) { return oracle::exp_cdf(v, 1.0); });
  REQUIRE(std::abs(single - 0.5) <= 1e-12);
}

TEST_CASE("ks_distance accepts the true law and rejects a wrong one") {
  const auto samples = oracle::std_exponential_samples(100000, 2.0, 77);
  const EmpiricalCdf emp(samples);
  REQUIRE(ks_distance(emp, [](double v) { return oracle::exp_cdf(v, 2.0); }) <= 0.01);
  // Exp(1) vs Exp(2) differ by 0.25 in sup norm.
  REQUIRE(ks_distance(emp, [](double v) { return oracle::exp_cdf(v, 1.0); }) >= 0.15);
}

TEST_CASE("ks_two_sample basics") {
  const EmpiricalCdf a({1.0, 3.0});
  const EmpiricalCdf b({2.0, 4.0});
  REQUIRE(ks_two_sample(a, b) == 0.5);
  REQUIRE(ks_two_sample(a, a) == 0.0);
  REQUIRE(ks_two_sample(EmpiricalCdf({1.0, 2.0}), EmpiricalCdf({5.0, 6.0})) == 1.0);

  const EmpiricalCdf c(oracle::std_exponential_samples(20000, 1.0, 101));
  const EmpiricalCdf d(oracle::std_exponential_samples(20000, 1.0, 202));
  REQUIRE(ks_two_sample(c, d) <= 0.02);
}

TEST_CASE("make_report passes on the boundary") {
  const CheckReport r = make_report("x", 0.5, 0.5);
  REQUIRE(r.pass);
  REQUIRE_FALSE(make_report("x", 0.5000001, 0.5).pass);
}

TEST_CASE("proportion_ci covers hand-checked cases") {
  const Interval zero = proportion_ci(0, 1000);
  REQUIRE(std::abs(zero.lo) <= 1e-12);
  REQUIRE(zero.hi > 0.0);
  REQUIRE(zero.hi < 0.02);

  const Interval all = proportion_ci(1000, 1000);
  REQUIRE(all.hi <= 1.0 + 1e-12);
  REQUIRE(all.lo < 1.0);
  REQUIRE(all.lo > 0.98);

  const Interval half = proportion_ci(5000, 10000);
  const double hw = 0.5 * (half.hi - half.lo);
  REQUIRE(std::abs(hw - 0.0128748) <= 1e-6);
  REQUIRE(std::abs(hw - oracle::wilson_halfwidth(0.5, 10000.0, 2.5758293035489004)) <= 1e-12);
  REQUIRE(half.lo < 0.5);
  REQUIRE(half.hi > 0.5);

  REQUIRE_THROWS_AS(proportion_ci(-1, 10), invalid_input);
  REQUIRE_THROWS_AS(proportion_ci(11, 10), invalid_input);
  REQUIRE_THROWS_AS(proportion_ci(0, 0), invalid_input);
}

TEST_CASE("independence_check calibration on synthetic data") {
  std::mt19937_64 eng(31337);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  // Null case: the group label is independent of the value.
  EmpiricalSummary null_s;
  for (int i = 0; i < 20000; ++i) {
    null_s.g_pre.push_back(std::abs(normal(eng)));
    null_s.has_sigma.push_back(coin(eng) ? 1 : 0);
  }
  const CheckReport null_r = independence_check(null_s);
  REQUIRE(null_r.pass);
  REQUIRE_FALSE(null_r.inconclusive);
  REQUIRE(null_r.n1 + null_r.n2 == 20000);

  // Shifted alternative: the epoch group sits half a unit higher.
  EmpiricalSummary shifted;
  for (int i = 0; i < 20000; ++i) {
    const bool flag = coin(eng);
    shifted.g_pre.push_back(std::abs(normal(eng)) + (flag ? 0.5 : 0.0));
    shifted.has_sigma.push_back(flag ? 1 : 0);
  }
  const CheckReport alt_r = independence_check(shifted);
  REQUIRE_FALSE(alt_r.pass);
  REQUIRE_FALSE(alt_r.inconclusive);

  // Small groups are flagged, not failed.
  EmpiricalSummary tiny;
  for (int i = 0; i < 50; ++i) {
    tiny.g_pre.push_back(std::abs(normal(eng)));
    tiny.has_sigma.push_back(i < 5 ? 1 : 0);
  }
  REQUIRE(independence_check(tiny).inconclusive);

  // One empty group: inconclusive, never a hard failure.
  EmpiricalSummary lop;
  for (int i = 0; i < 50; ++i) {
    lop.g_pre.push_back(1.0 + i);
    lop.has_sigma.push_back(1);
  }
  REQUIRE(independence_check(lop).inconclusive);
}

TEST_CASE("independence_check false-failure rate stays near its design point") {
  std::mt19937_64 eng(904);
  std::exponential_distribution<double> expd(1.0);
  std::bernoulli_distribution coin(0.5);
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    EmpiricalSummary s;
    for (int i = 0; i < 2400; ++i) {
      s.g_pre.push_back(expd(eng));
      s.has_sigma.push_back(coin(eng) ? 1 : 0);
    }
    const CheckReport r = independence_check(s);
    if (!r.pass && !r.inconclusive) ++failures;
  }
  // The 99% band should fail about one rep in a hundred under the null.
  REQUIRE(failures <= 5);
}

TEST_CASE("n_tau_geometric_check on an exact dyadic histogram") {
  EmpiricalSummary s;
  // 16383 paths laid out exactly as Geometric(1/2) up to k = 13, one leftover
  // at k = 14: every bin matches the pmf to machine precision.
  for (int k = 0; k <= 13; ++k) {
    const int count = 1 << (13 - k);
    for (int i = 0; i < count; ++i) {
      s.tau.push_back(1.0);
      s.n_tau.push_back(k);
    }
  }
  s.tau.push_back(1.0);
  s.n_tau.push_back(14);

  const CheckReport r = n_tau_geometric_check(s, 0.5, 0.02);
  REQUIRE(r.pass);
  REQUIRE(r.statistic <= 1e-4);

  const CheckReport wrong = n_tau_geometric_check(s, 0.3, 0.02);
  REQUIRE_FALSE(wrong.pass);
  REQUIRE(wrong.statistic >= 0.1);

  REQUIRE_THROWS_AS(n_tau_geometric_check(s, 1.0, 0.02), invalid_input);
  REQUIRE_THROWS_AS(n_tau_geometric_check(s, -0.2, 0.02), invalid_input);
}

TEST_CASE("decomposition_check requires zero violations") {
  EmpiricalSummary good;
  good.tau = {1.0, 2.0};
  good.max_decomposition_residual = 1e-12;
  good.decomposition_violations = 0;
  const CheckReport g = decomposition_check(good);
  REQUIRE(g.pass);
  REQUIRE(g.statistic == 1e-12);

  EmpiricalSummary bad = good;
  bad.max_decomposition_residual = 1e-6;
  bad.decomposition_violations = 1;
  REQUIRE_FALSE(decomposition_check(bad).pass);
}

TEST_CASE("occupation_check validates an exactly solvable model") {
  // Pure drift c = 1, q = 1: R(t) = t, no epochs, Shat = 0, so the identity
  // reads E min(x, tau) = (1 - e^{-q x}) / q, which is an exact calculus fact.
  const ModelSpec m = drift_only_unit();
  const LadderContext ctx = make_ladder_context(m);
  const Probes probes{{0.5, 50.0}, {1.0}, {}};
  const SimConfig cfg{.n_paths = 20000, .dt = 0.01, .master_seed = 12};
  const EmpiricalSummary s = batch_simulate(m, cfg, probes, 1);

  const CheckReport a = occupation_check(s, ctx, 0.5, 1.0);
  REQUIRE(a.pass);
  const CheckReport b = occupation_check(s, ctx, 50.0, 1.0);
  REQUIRE(b.pass);

  // A wrong kill rate in the analytic constant must be detected.
  ModelSpec m2 = m;
  m2.kill_rate = 2.0;
  const CheckReport wrong = occupation_check(s, make_ladder_context(m2), 0.5, 1.0);
  REQUIRE_FALSE(wrong.pass);
  REQUIRE(wrong.statistic > 10.0);

  REQUIRE_THROWS_AS(occupation_check(s, ctx, 0.7, 1.0), invalid_input);
  REQUIRE_THROWS_AS(occupation_check(s, ctx, 0.5, 2.0), invalid_input);
}

TEST_CASE("joint_law_check is degenerate-exact without claims") {
  const ModelSpec m = drift_only_unit();
  const LadderContext ctx = make_ladder_context(m);
  const Probes probes{{0.5}, {1.0}, {0.3}};
  const SimConfig cfg{.n_paths = 200, .dt = 0.01, .master_seed = 13};
  const EmpiricalSummary s = batch_simulate(m, cfg, probes, 1);
  // No claim jumps: both the empirical event and the analytic constant vanish.
  const CheckReport r = joint_law_check(s, ctx, 0.5, 1.0, 0.3);
  REQUIRE(r.pass);
  REQUIRE(r.statistic == 0.0);
  REQUIRE_THROWS_AS(joint_law_check(s, ctx, 0.5, 1.0, 0.7), invalid_input);
}

TEST_CASE("joint_law_check respects the deterministic claim support") {
  // Unit claims split into gap + overshoot = 1, so {J > x, gap > z} is
  // impossible once x + z >= 1, and the analytic constant vanishes too.
  const ModelSpec m = model_m3_flat();
  const LadderContext ctx = make_ladder_context(m);
  const Probes probes{{0.7}, {1.0}, {0.3}};
  const SimConfig cfg{.n_paths = 5000, .dt = 1e-3, .master_seed = 14};
  const EmpiricalSummary s = batch_simulate(m, cfg, probes, 1);
  const CheckReport r = joint_law_check(s, ctx, 0.7, 1.0, 0.3);
  REQUIRE(r.statistic == 0.0);
  REQUIRE(r.pass);
}

TEST_CASE("joint_law_check on exponential claims") {
  const ModelSpec m = model_m2();
  const LadderContext ctx = make_ladder_context(m);
  const Probes probes{{0.5}, {5.0}, {0.3}};
  const SimConfig cfg{.n_paths = 20000, .dt = 1e-3, .master_seed = 15};
  const EmpiricalSummary s = batch_simulate(m, cfg, probes, 1);
  const CheckReport r = joint_law_check(s, ctx, 0.5, 5.0, 0.3, 3.5);
  REQUIRE(r.pass);
}

TEST_CASE("occupation_check on exponential claims") {
  const ModelSpec m = model_m2();
  const LadderContext ctx = make_ladder_context(m);
  const Probes probes{{0.5, 2.0}, {1.0}, {}};
  const SimConfig cfg{.n_paths = 20000, .dt = 1e-3, .master_seed = 16};
  const EmpiricalSummary s = batch_simulate(m, cfg, probes, 1);
  REQUIRE(occupation_check(s, ctx, 0.5, 1.0, 3.5).pass);
  REQUIRE(occupation_check(s, ctx, 2.0, 1.0, 3.5).pass);
}

TEST_CASE("overshoot_check is inconclusive without enough epochs") {
  ModelSpec no_claims;
  no_claims.premium = 0.5;
  no_claims.perturbation.brownian_vol = 1.0;
  no_claims.kill_rate = 0.5;
  const SimConfig cfg{.n_paths = 100, .dt = 0.01, .master_seed = 17};
  const EmpiricalSummary none = batch_simulate(no_claims, cfg, Probes{{1.0}, {1.0}, {}}, 1);
  const LadderContext ctx2 = make_ladder_context(model_m2());
  const CheckReport empty = overshoot_check(none, ctx2, 0.02);
  REQUIRE(empty.inconclusive);

  const SimConfig small{.n_paths = 500, .dt = 1e-3, .master_seed = 18};
  const EmpiricalSummary few = batch_simulate(model_m2(), small, Probes{{1.0}, {1.0}, {}}, 1);
  const CheckReport r = overshoot_check(few, ctx2, 0.05);
  REQUIRE(r.inconclusive);      // fewer than 1000 epochs
  REQUIRE(r.statistic <= 0.15); // but the statistic itself is sane
}

TEST_CASE("overshoot_check quadrature branch on uniform claims") {
  ModelSpec m;
  m.premium = 2.0;
  m.claims.jumps = JumpComponent{1.0, JumpDistribution::uniform(1.0, 2.0)};
  m.kill_rate = 0.5;
  const LadderContext ctx = make_ladder_context(m);
  const SimConfig cfg{.n_paths = 20000, .dt = 1e-3, .master_seed = 19};
  const EmpiricalSummary s = batch_simulate(m, cfg, Probes{{1.0}, {1.0}, {}}, 1);
  REQUIRE(s.overshoots.size() >= 1000);
  const CheckReport r = overshoot_check(s, ctx, 0.03);
  REQUIRE(r.pass);
  REQUIRE_FALSE(r.inconclusive);
  // All overshoots live inside the claim support.
  for (double j : s.overshoots) REQUIRE(j <= 2.0);
}

TEST_CASE("pk_comparison_check against independently sampled compound geometric") {
  const double rho = 0.55;
  const double theta = 2.0;
  std::mt19937_64 eng(123);
  std::uniform_real_distribution<double> urd(0.0, 1.0);
  std::vector<double> samples;
  samples.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    const double u = 1.0 - urd(eng);  // in (0, 1]
    const int n = static_cast<int>(std::floor(std::log(u) / std::log(rho)));
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += -std::log(1.0 - urd(eng)) / theta;
    samples.push_back(sum);
  }
  const EmpiricalCdf emp(samples);

  const GridSpec g{0.01, 3000};
  const GridDistribution gtau = GridDistribution::delta_zero(g);
  const GridDistribution htau =
      GridDistribution::from_cdf([&](double x) { return oracle::exp_cdf(x, theta); }, g);
  const PkResult right = pk_cdf(PkParams{rho, gtau, htau, 1e-10});
  REQUIRE(pk_comparison_check(right.cdf, emp, 0.02).pass);

  const PkResult wrong = pk_cdf(PkParams{0.75, gtau, htau, 1e-10});
  const CheckReport bad = pk_comparison_check(wrong.cdf, emp, 0.02);
  REQUIRE_FALSE(bad.pass);
  REQUIRE(bad.statistic >= 0.1);
}

TEST_CASE("s_tau and p_tau check reports carry names and counts") {
  const ModelSpec m = model_m2();
  const LadderContext ctx = make_ladder_context(m);
  const SimConfig cfg{.n_paths = 2000, .dt = 1e-3, .master_seed = 20};
  const EmpiricalSummary s = batch_simulate(m, cfg, Probes{{1.0}, {1.0}, {}}, 1);

  const CheckReport sup = s_tau_law_check(s, ctx, 0.05);
  REQUIRE(sup.name == "s_tau_exponential_ks");
  REQUIRE(sup.n1 == 2000);
  REQUIRE(sup.pass);

  const CheckReport freq = p_tau_check(s, p_tau(ctx), 4.0);
  REQUIRE(freq.name == "p_tau_frequency");
  REQUIRE(freq.pass);
  REQUIRE_FALSE(freq.detail.empty());

  // A grossly wrong weight fails by many standard errors.
  REQUIRE_FALSE(p_tau_check(s, 0.05, 4.0).pass);
}
