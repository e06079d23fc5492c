#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "levyrisk/errors.hpp"
#include "levyrisk/fluctuation.hpp"
#include "levyrisk/io.hpp"
#include "levyrisk/model.hpp"
#include "levyrisk/pk.hpp"
#include "levyrisk/scenario.hpp"
#include "levyrisk/simulate.hpp"
#include "levyrisk/stats.hpp"
#include "levyrisk/version.hpp"

namespace levyrisk {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitCheckFailed = 3;

namespace detail_cmd {

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const model_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

inline std::filesystem::path resolve_out_dir(const Scenario& sc, const std::string& out_override) {
  std::filesystem::path dir = out_override.empty() ? sc.output_dir : out_override;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw invalid_input("cannot create output directory: " + dir.string());
  return dir;
}

inline json base_report(const Scenario& sc, const std::string& command) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["generator_version"] = kVersion;
  j["command"] = command;
  j["scenario"] = scenario_to_json(sc);
  return j;
}

inline json check_to_json(const CheckReport& c) {
  json j;
  j["name"] = c.name;
  j["statistic"] = c.statistic;
  j["threshold"] = c.threshold;
  j["pass"] = c.pass;
  j["inconclusive"] = c.inconclusive;
  j["n1"] = c.n1;
  j["n2"] = c.n2;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

inline void write_report(const std::filesystem::path& dir, const json& j) {
  auto out = open_out(dir / "report.json");
  out << j.dump(2) << '\n';
}

// Resolve the G_tau distribution for the series. For split_half the caller
// supplies the first-half pre-epoch supremum samples; models without a
// perturbation part fall back to the exact point mass at zero.
inline GridDistribution resolve_g_tau(const Scenario& sc, const GridSpec& grid,
                                      const std::vector<double>* split_samples) {
  const bool perturbed =
      sc.model.perturbation.brownian_vol > 0.0 || sc.model.perturbation.neg_jumps.has_value();
  switch (sc.gtau.source) {
    case GTauSource::Delta0:
      return GridDistribution::delta_zero(grid);
    case GTauSource::File:
      return read_cdf_csv(sc.gtau.path, grid);
    case GTauSource::SplitHalf:
      if (split_samples) return GridDistribution::from_samples(*split_samples, grid);
      if (!perturbed) return GridDistribution::delta_zero(grid);
      throw invalid_input(
          "gtau source 'split_half' needs simulation samples; use 'delta0' or 'file' with the "
          "analytic command for perturbed models");
  }
  throw invalid_input("resolve_g_tau: bad source");
}

struct AnalyticBundle {
  LadderContext ctx;
  double p = 0.0;  // p_tau
  GridSpec grid;
  std::optional<HTauResult> h;
};

inline AnalyticBundle make_analytic(const Scenario& sc) {
  AnalyticBundle b{make_ladder_context(sc.model), 0.0, sc.grid.to_grid_spec(), std::nullopt};
  b.p = p_tau(b.ctx);
  if (sc.model.claims.jumps) b.h = h_tau(b.ctx, b.grid);
  return b;
}

inline PkResult eval_series(const AnalyticBundle& a, const GridDistribution& g, double series_eps) {
  if (!a.h) return PkResult{g, 1, 0.0};  // no claim jumps: no epochs, law is G itself
  return pk_cdf(PkParams{a.p, g, a.h->dist, series_eps});
}

}  // namespace detail_cmd

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

inline int cmd_validate(const std::string& scenario_path) {
  return detail_cmd::guarded([&]() {
    const Scenario sc = load_scenario(scenario_path);
    const ModelSpec& m = sc.model;
    std::cout << "scenario: ok\n";
    std::cout << "mean_x_per_unit_time: " << fmt17(mean_x(m)) << '\n';
    switch (npc_status(m)) {
      case NetProfit::Holds: std::cout << "net_profit_condition: holds\n"; break;
      case NetProfit::Boundary: std::cout << "net_profit_condition: boundary\n"; break;
      case NetProfit::Violated:
        std::cout << "net_profit_condition: violated\n";
        std::cout << "warning: net profit condition violated (E C(1) >= premium); the Laplace "
                     "exponent has a positive root and the supremum grows with it\n";
        break;
    }
    if (!m.claims.jumps) {
      std::cout << "warning: no claim jumps; modified ladder epochs never occur and the killed "
                   "supremum law reduces to the pre-epoch part\n";
    }
    if (!m.has_exponential_moments()) {
      std::cout << "warning: heavy-tailed jump law present; the analytic engine (roots, ladder "
                   "exponents, series) is unavailable for this model\n";
    } else {
      const auto root = largest_root(m);
      std::cout << "largest_root_b: " << fmt17(root.b) << '\n';
      std::cout << "phi_q: " << fmt17(phi(m, m.kill_rate)) << '\n';
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// analytic
// ---------------------------------------------------------------------------

inline int cmd_analytic(const std::string& scenario_path, const std::string& out_override) {
  return detail_cmd::guarded([&]() {
    const Scenario sc = load_scenario(scenario_path);
    const auto dir = detail_cmd::resolve_out_dir(sc, out_override);
    const auto a = detail_cmd::make_analytic(sc);
    const GridDistribution g = detail_cmd::resolve_g_tau(sc, a.grid, nullptr);
    const PkResult pk = detail_cmd::eval_series(a, g, sc.grid.series_eps);

    json rep = detail_cmd::base_report(sc, "analytic");
    std::vector<std::string> files{"report.json", "phi_b.json", "pk_cdf.csv"};
    write_grid_csv(dir / "pk_cdf.csv", pk.cdf);
    if (a.h) {
      write_grid_csv(dir / "h_tau.csv", a.h->dist);
      files.push_back("h_tau.csv");
    }
    {
      json pb;
      pb["phi_q"] = a.ctx.phi_q;
      pb["b"] = a.ctx.b;
      pb["p_tau"] = a.p;
      pb["K"] = a.p / (1.0 - a.p);  // p = K/(1+K) inverted; p < 1 always
      auto out = open_out(dir / "phi_b.json");
      out << pb.dump(2) << '\n';
    }
    json an;
    an["b"] = a.ctx.b;
    an["phi_q"] = a.ctx.phi_q;
    an["p_tau"] = a.p;
    an["h_tau_normalizer"] = a.h ? a.h->normalizer : 0.0;
    an["h_tau_truncated_mass"] = a.h ? a.h->dist.truncated_mass() : 0.0;
    an["g_tau_truncated_mass"] = g.truncated_mass();
    an["pk_terms"] = pk.terms;
    an["pk_truncation_bound"] = pk.truncation_bound;
    an["pk_truncated_mass"] = pk.cdf.truncated_mass();
    an["grid"] = {{"h", a.grid.h}, {"n", a.grid.n}};
    rep["analytic"] = an;
    rep["files"] = files;
    detail_cmd::write_report(dir, rep);
    std::cout << "analytic: b=" << fmt17(a.ctx.b) << " phi_q=" << fmt17(a.ctx.phi_q)
              << " p_tau=" << fmt17(a.p) << " terms=" << pk.terms << '\n';
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace detail_cmd {

inline json simulate_block(const EmpiricalSummary& s, double elapsed_seconds) {
  const auto ci = proportion_ci(s.sigma_count(), s.paths());
  json j;
  j["n_paths"] = s.paths();
  j["sigma_count"] = s.sigma_count();
  j["p_hat"] = static_cast<double>(s.sigma_count()) / static_cast<double>(s.paths());
  j["p_hat_ci99"] = {ci.lo, ci.hi};
  j["max_decomposition_residual"] = s.max_decomposition_residual;
  j["decomposition_violations"] = s.decomposition_violations;
  j["elapsed_seconds"] = elapsed_seconds;
  return j;
}

inline std::vector<std::string> write_simulation_files(const std::filesystem::path& dir,
                                                       const EmpiricalSummary& s) {
  std::vector<std::string> files;
  write_samples_csv(dir / "samples.csv", s);
  files.push_back("samples.csv");
  write_ecdf_csv(dir / "ecdf_s.csv", EmpiricalCdf(s.s_tau));
  files.push_back("ecdf_s.csv");
  write_ecdf_csv(dir / "ecdf_shat.csv", EmpiricalCdf(s.shat_tau));
  files.push_back("ecdf_shat.csv");
  write_ecdf_csv(dir / "ecdf_g.csv", EmpiricalCdf(s.g_pre));
  files.push_back("ecdf_g.csv");
  write_samples_ecdf_csv(dir / "overshoots.csv", s.overshoots);
  files.push_back("overshoots.csv");
  write_ntau_hist_csv(dir / "n_tau_hist.csv", s);
  files.push_back("n_tau_hist.csv");
  return files;
}

}  // namespace detail_cmd

inline int cmd_simulate(const std::string& scenario_path, const std::string& out_override,
                        unsigned threads) {
  return detail_cmd::guarded([&]() {
    const Scenario sc = load_scenario(scenario_path);
    const auto dir = detail_cmd::resolve_out_dir(sc, out_override);
    const auto start = std::chrono::steady_clock::now();
    const EmpiricalSummary s = batch_simulate(sc.model, sc.sim, sc.probes, threads);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json rep = detail_cmd::base_report(sc, "simulate");
    auto files = detail_cmd::write_simulation_files(dir, s);
    files.insert(files.begin(), "report.json");
    rep["simulate"] = detail_cmd::simulate_block(s, elapsed);
    rep["files"] = files;
    detail_cmd::write_report(dir, rep);
    std::cout << "simulate: n_paths=" << s.paths() << " sigma_count=" << s.sigma_count()
              << " elapsed=" << elapsed << "s\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

inline int cmd_compare(const std::string& scenario_path, const std::string& out_override,
                       unsigned threads) {
  return detail_cmd::guarded([&]() {
    const Scenario sc = load_scenario(scenario_path);
    const auto dir = detail_cmd::resolve_out_dir(sc, out_override);
    const auto a = detail_cmd::make_analytic(sc);

    const auto start = std::chrono::steady_clock::now();
    const EmpiricalSummary s = batch_simulate(sc.model, sc.sim, sc.probes, threads);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Series evaluation: with a split-half G the first half of the paths
    // feeds the pre-epoch law and the second half the target ECDF, keeping
    // the two sides independent. Analytic G sources use the full sample.
    std::vector<double> target_samples;
    GridDistribution g = GridDistribution::delta_zero(a.grid);
    const bool perturbed =
        sc.model.perturbation.brownian_vol > 0.0 || sc.model.perturbation.neg_jumps.has_value();
    if (sc.gtau.source == GTauSource::SplitHalf && perturbed) {
      if (s.paths() < 2) throw invalid_input("compare: split-half estimate needs >= 2 paths");
      const auto half = static_cast<std::size_t>(s.paths() / 2);
      std::vector<double> first(s.g_pre.begin(), s.g_pre.begin() + half);
      target_samples.assign(s.shat_tau.begin() + half, s.shat_tau.end());
      g = GridDistribution::from_samples(first, a.grid);
    } else {
      g = detail_cmd::resolve_g_tau(sc, a.grid, nullptr);
      target_samples = s.shat_tau;
    }
    const PkResult pk = detail_cmd::eval_series(a, g, sc.grid.series_eps);
    const EmpiricalCdf target(std::move(target_samples));

    std::vector<CheckReport> checks;
    checks.push_back(s_tau_law_check(s, a.ctx, sc.checks.s_tau_ks));
    checks.push_back(p_tau_check(s, a.p, sc.checks.p_tau_se));
    if (sc.model.claims.jumps) {
      checks.push_back(overshoot_check(s, a.ctx, sc.checks.overshoot_ks));
    }
    checks.push_back(independence_check(s, sc.checks.independence_coeff));
    checks.push_back(n_tau_geometric_check(s, a.p, sc.checks.n_tau_tv));
    checks.push_back(decomposition_check(s, sc.checks.decomposition_rel));
    for (const auto& [px, py] : occupation_pairs(sc.probes)) {
      checks.push_back(occupation_check(s, a.ctx, px, py, sc.checks.occupation_se));
    }
    for (const auto& [px, py, pz] : joint_triples(sc.probes)) {
      checks.push_back(joint_law_check(s, a.ctx, px, py, pz, sc.checks.joint_se));
    }
    checks.push_back(pk_comparison_check(pk.cdf, target, sc.checks.pk_supnorm));

    bool all_ok = true;
    json jchecks = json::array();
    for (const auto& c : checks) {
      jchecks.push_back(detail_cmd::check_to_json(c));
      if (!c.pass && !c.inconclusive) all_ok = false;
      std::cout << (c.pass ? "pass" : (c.inconclusive ? "inconclusive" : "FAIL")) << ' ' << c.name
                << " statistic=" << fmt17(c.statistic) << " threshold=" << fmt17(c.threshold)
                << '\n';
    }

    json rep = detail_cmd::base_report(sc, "compare");
    auto files = detail_cmd::write_simulation_files(dir, s);
    write_grid_csv(dir / "pk_cdf.csv", pk.cdf);
    files.push_back("pk_cdf.csv");
    if (a.h) {
      write_grid_csv(dir / "h_tau.csv", a.h->dist);
      files.push_back("h_tau.csv");
    }
    files.insert(files.begin(), "report.json");
    json an;
    an["b"] = a.ctx.b;
    an["phi_q"] = a.ctx.phi_q;
    an["p_tau"] = a.p;
    an["pk_terms"] = pk.terms;
    an["pk_truncation_bound"] = pk.truncation_bound;
    rep["analytic"] = an;
    rep["simulate"] = detail_cmd::simulate_block(s, elapsed);
    rep["checks"] = jchecks;
    rep["overall_pass"] = all_ok;
    rep["files"] = files;
    detail_cmd::write_report(dir, rep);
    return all_ok ? kExitOk : kExitCheckFailed;
  });
}

// ---------------------------------------------------------------------------
// ladder-diag
// ---------------------------------------------------------------------------

inline int cmd_ladder_diag(const std::string& scenario_path, const std::string& out_override,
                           double beta_max = 1e6, std::size_t points = 200) {
  return detail_cmd::guarded([&]() {
    const Scenario sc = load_scenario(scenario_path);
    const auto dir = detail_cmd::resolve_out_dir(sc, out_override);
    const LadderContext ctx = make_ladder_context(sc.model);

    const double beta_lo = ctx.b + 0.1 * std::max(1.0, ctx.b);
    if (!(beta_max > beta_lo)) throw invalid_input("ladder-diag: beta_max too small");
    std::vector<LadderDiagRow> rows;
    rows.reserve(points);
    const double ratio = beta_max / beta_lo;
    for (std::size_t i = 0; i < points; ++i) {
      const double t = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
      const double beta = beta_lo * std::pow(ratio, t);
      rows.push_back(LadderDiagRow{beta, kappa_hat_zero(ctx, beta), ladder_residual(ctx, beta)});
    }
    write_ladder_csv(dir / "ladder.csv", rows);

    const auto limit = ladder_limit_check(ctx, beta_max);
    json rep = detail_cmd::base_report(sc, "ladder-diag");
    json lad;
    lad["b"] = ctx.b;
    lad["beta_max"] = limit.beta_max;
    lad["estimate"] = limit.estimate;
    lad["target"] = limit.target;
    lad["rel_error"] = limit.rel_error;
    {
      auto out = open_out(dir / "ladder.json");
      out << lad.dump(2) << '\n';
    }
    rep["ladder"] = lad;
    rep["files"] = {"report.json", "ladder.json", "ladder.csv"};
    detail_cmd::write_report(dir, rep);
    std::cout << "ladder-diag: b=" << fmt17(ctx.b) << " target=" << fmt17(limit.target)
              << " rel_error=" << fmt17(limit.rel_error) << '\n';
    return kExitOk;
  });
}

}  // namespace levyrisk
