#pragma once

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "levyrisk/errors.hpp"
#include "levyrisk/model.hpp"
#include "levyrisk/pk.hpp"
#include "levyrisk/simulate.hpp"

namespace levyrisk {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario structures
// ---------------------------------------------------------------------------

struct GridConfig {
  double h = 0.01;
  double xmax = 50.0;
  double series_eps = 1e-10;

  GridSpec to_grid_spec() const {
    if (!(h > 0.0) || !(xmax > h)) throw invalid_input("grid: need 0 < h < xmax");
    return GridSpec{h, static_cast<std::size_t>(std::llround(xmax / h))};
  }
};

struct CheckThresholds {
  double s_tau_ks = 0.01;
  double p_tau_se = 3.0;
  double overshoot_ks = 0.02;
  double independence_coeff = 1.63;
  double n_tau_tv = 0.02;
  double decomposition_rel = 1e-9;
  double pk_supnorm = 0.02;
  double occupation_se = 3.0;
  double joint_se = 3.0;
};

// Where the pre-epoch supremum law G_tau comes from when evaluating the
// series: a point mass at zero (exact for drift-plus-claims models), an
// external x,F CSV, or a split-half empirical estimate from the simulation.
enum class GTauSource { Delta0, File, SplitHalf };

struct GTauConfig {
  GTauSource source = GTauSource::SplitHalf;
  std::string path;  // for File
};

struct Scenario {
  ModelSpec model;
  SimConfig sim;
  GridConfig grid;
  Probes probes;
  CheckThresholds checks;
  GTauConfig gtau;
  std::string output_dir = "out";
};

// ---------------------------------------------------------------------------
// Strict JSON helpers
// ---------------------------------------------------------------------------

namespace detail_scn {

inline void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                        const std::string& where) {
  if (!obj.is_object()) throw invalid_input(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw invalid_input("unknown key '" + item.key() + "' in " + where);
  }
}

inline double get_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw invalid_input(where + " is missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw invalid_input(where + "." + key + " must be a number");
  return v.get<double>();
}

inline double get_number_or(const json& obj, const char* key, double fallback,
                            const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw invalid_input(where + "." + key + " must be a number");
  return v.get<double>();
}

inline std::vector<double> get_number_list(const json& obj, const char* key,
                                           const std::string& where) {
  if (!obj.contains(key)) return {};
  const auto& v = obj.at(key);
  if (!v.is_array()) throw invalid_input(where + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw invalid_input(where + "." + key + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline JumpDistribution parse_law(const json& obj, const std::string& where) {
  expect_keys(obj, {"kind", "rate", "size", "lo", "hi", "index", "scale"}, where);
  if (!obj.contains("kind") || !obj.at("kind").is_string()) {
    throw invalid_input(where + " needs a string 'kind'");
  }
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "exponential") {
    expect_keys(obj, {"kind", "rate"}, where);
    return JumpDistribution::exponential(get_number(obj, "rate", where));
  }
  if (kind == "deterministic") {
    expect_keys(obj, {"kind", "size"}, where);
    return JumpDistribution::deterministic(get_number(obj, "size", where));
  }
  if (kind == "uniform") {
    expect_keys(obj, {"kind", "lo", "hi"}, where);
    return JumpDistribution::uniform(get_number(obj, "lo", where), get_number(obj, "hi", where));
  }
  if (kind == "pareto") {
    expect_keys(obj, {"kind", "index", "scale"}, where);
    return JumpDistribution::pareto(get_number(obj, "index", where),
                                    get_number(obj, "scale", where));
  }
  throw invalid_input(where + ": unknown jump law kind '" + kind + "'");
}

inline json law_to_json(const JumpDistribution& law) {
  switch (law.kind()) {
    case JumpKind::Exponential: return {{"kind", "exponential"}, {"rate", law.rate()}};
    case JumpKind::Deterministic: return {{"kind", "deterministic"}, {"size", law.size()}};
    case JumpKind::Uniform: return {{"kind", "uniform"}, {"lo", law.lo()}, {"hi", law.hi()}};
    case JumpKind::Pareto: return {{"kind", "pareto"}, {"index", law.index()}, {"scale", law.scale()}};
  }
  throw invalid_input("law_to_json: bad kind");
}

inline std::optional<JumpComponent> parse_jump_component(const json& parent, const char* key,
                                                         const std::string& where) {
  if (!parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
  const auto& obj = parent.at(key);
  expect_keys(obj, {"intensity", "law"}, where);
  if (!obj.contains("law")) throw invalid_input(where + " needs a 'law'");
  return JumpComponent{get_number(obj, "intensity", where), parse_law(obj.at("law"), where + ".law")};
}

}  // namespace detail_scn

// ---------------------------------------------------------------------------
// Scenario <-> JSON
// ---------------------------------------------------------------------------

inline Scenario scenario_from_json(const json& j) {
  using namespace detail_scn;
  expect_keys(j, {"model", "sim", "grid", "probes", "checks", "gtau", "output_dir"}, "scenario");
  if (!j.contains("model")) throw invalid_input("scenario is missing 'model'");

  Scenario sc;

  const auto& jm = j.at("model");
  expect_keys(jm, {"premium", "kill_rate", "claims", "perturbation"}, "model");
  sc.model.premium = get_number(jm, "premium", "model");
  sc.model.kill_rate = get_number(jm, "kill_rate", "model");
  if (jm.contains("claims") && !jm.at("claims").is_null()) {
    const auto& jc = jm.at("claims");
    expect_keys(jc, {"drift", "jumps", "small_jump_cutoff"}, "model.claims");
    sc.model.claims.drift = get_number_or(jc, "drift", 0.0, "model.claims");
    sc.model.claims.small_jump_cutoff =
        get_number_or(jc, "small_jump_cutoff", 0.0, "model.claims");
    sc.model.claims.jumps = parse_jump_component(jc, "jumps", "model.claims.jumps");
  }
  if (jm.contains("perturbation") && !jm.at("perturbation").is_null()) {
    const auto& jp = jm.at("perturbation");
    expect_keys(jp, {"brownian_vol", "neg_jumps"}, "model.perturbation");
    sc.model.perturbation.brownian_vol = get_number_or(jp, "brownian_vol", 0.0, "model.perturbation");
    sc.model.perturbation.neg_jumps =
        parse_jump_component(jp, "neg_jumps", "model.perturbation.neg_jumps");
  }

  if (j.contains("sim")) {
    const auto& js = j.at("sim");
    expect_keys(js, {"n_paths", "dt", "master_seed", "batch_size"}, "sim");
    sc.sim.n_paths = static_cast<std::int64_t>(get_number_or(js, "n_paths", 1, "sim"));
    sc.sim.dt = get_number_or(js, "dt", 1e-3, "sim");
    sc.sim.master_seed = static_cast<std::uint64_t>(get_number_or(js, "master_seed", 1, "sim"));
    sc.sim.batch_size = static_cast<std::int64_t>(get_number_or(js, "batch_size", 1000, "sim"));
  }

  if (j.contains("grid")) {
    const auto& jg = j.at("grid");
    expect_keys(jg, {"h", "xmax", "series_eps"}, "grid");
    sc.grid.h = get_number_or(jg, "h", sc.grid.h, "grid");
    sc.grid.xmax = get_number_or(jg, "xmax", sc.grid.xmax, "grid");
    sc.grid.series_eps = get_number_or(jg, "series_eps", sc.grid.series_eps, "grid");
  }

  if (j.contains("probes")) {
    const auto& jp = j.at("probes");
    expect_keys(jp, {"x", "y", "z"}, "probes");
    sc.probes.x = get_number_list(jp, "x", "probes");
    sc.probes.y = get_number_list(jp, "y", "probes");
    sc.probes.z = get_number_list(jp, "z", "probes");
  }

  if (j.contains("checks")) {
    const auto& jc = j.at("checks");
    expect_keys(jc,
                {"s_tau_ks", "p_tau_se", "overshoot_ks", "independence_coeff", "n_tau_tv",
                 "decomposition_rel", "pk_supnorm", "occupation_se", "joint_se"},
                "checks");
    auto& c = sc.checks;
    c.s_tau_ks = get_number_or(jc, "s_tau_ks", c.s_tau_ks, "checks");
    c.p_tau_se = get_number_or(jc, "p_tau_se", c.p_tau_se, "checks");
    c.overshoot_ks = get_number_or(jc, "overshoot_ks", c.overshoot_ks, "checks");
    c.independence_coeff = get_number_or(jc, "independence_coeff", c.independence_coeff, "checks");
    c.n_tau_tv = get_number_or(jc, "n_tau_tv", c.n_tau_tv, "checks");
    c.decomposition_rel = get_number_or(jc, "decomposition_rel", c.decomposition_rel, "checks");
    c.pk_supnorm = get_number_or(jc, "pk_supnorm", c.pk_supnorm, "checks");
    c.occupation_se = get_number_or(jc, "occupation_se", c.occupation_se, "checks");
    c.joint_se = get_number_or(jc, "joint_se", c.joint_se, "checks");
  }

  if (j.contains("gtau")) {
    const auto& jg = j.at("gtau");
    expect_keys(jg, {"source", "path"}, "gtau");
    const std::string src =
        jg.contains("source") ? jg.at("source").get<std::string>() : "split_half";
    if (src == "delta0") {
      sc.gtau.source = GTauSource::Delta0;
    } else if (src == "file") {
      sc.gtau.source = GTauSource::File;
      if (!jg.contains("path") || !jg.at("path").is_string()) {
        throw invalid_input("gtau with source 'file' needs a string 'path'");
      }
      sc.gtau.path = jg.at("path").get<std::string>();
    } else if (src == "split_half") {
      sc.gtau.source = GTauSource::SplitHalf;
    } else {
      throw invalid_input("gtau.source must be one of delta0 | file | split_half");
    }
  }

  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw invalid_input("output_dir must be a string");
    sc.output_dir = j.at("output_dir").get<std::string>();
  }

  validate(sc.model);
  validate(sc.sim, sc.model);
  validate(sc.probes);
  sc.grid.to_grid_spec();  // throws on a bad grid
  if (!(sc.grid.series_eps > 0.0)) throw invalid_input("grid.series_eps must be positive");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open scenario file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw invalid_input(std::string("scenario JSON parse error: ") + e.what());
  }
  return scenario_from_json(j);
}

inline json scenario_to_json(const Scenario& sc) {
  using namespace detail_scn;
  json jm;
  jm["premium"] = sc.model.premium;
  jm["kill_rate"] = sc.model.kill_rate;
  json jc;
  jc["drift"] = sc.model.claims.drift;
  jc["small_jump_cutoff"] = sc.model.claims.small_jump_cutoff;
  if (sc.model.claims.jumps) {
    jc["jumps"] = {{"intensity", sc.model.claims.jumps->intensity},
                   {"law", law_to_json(sc.model.claims.jumps->law)}};
  } else {
    jc["jumps"] = nullptr;
  }
  jm["claims"] = jc;
  json jp;
  jp["brownian_vol"] = sc.model.perturbation.brownian_vol;
  if (sc.model.perturbation.neg_jumps) {
    jp["neg_jumps"] = {{"intensity", sc.model.perturbation.neg_jumps->intensity},
                       {"law", law_to_json(sc.model.perturbation.neg_jumps->law)}};
  } else {
    jp["neg_jumps"] = nullptr;
  }
  jm["perturbation"] = jp;

  json j;
  j["model"] = jm;
  j["sim"] = {{"n_paths", sc.sim.n_paths},
              {"dt", sc.sim.dt},
              {"master_seed", sc.sim.master_seed},
              {"batch_size", sc.sim.batch_size}};
  j["grid"] = {{"h", sc.grid.h}, {"xmax", sc.grid.xmax}, {"series_eps", sc.grid.series_eps}};
  j["probes"] = {{"x", sc.probes.x}, {"y", sc.probes.y}, {"z", sc.probes.z}};
  j["checks"] = {{"s_tau_ks", sc.checks.s_tau_ks},
                 {"p_tau_se", sc.checks.p_tau_se},
                 {"overshoot_ks", sc.checks.overshoot_ks},
                 {"independence_coeff", sc.checks.independence_coeff},
                 {"n_tau_tv", sc.checks.n_tau_tv},
                 {"decomposition_rel", sc.checks.decomposition_rel},
                 {"pk_supnorm", sc.checks.pk_supnorm},
                 {"occupation_se", sc.checks.occupation_se},
                 {"joint_se", sc.checks.joint_se}};
  switch (sc.gtau.source) {
    case GTauSource::Delta0: j["gtau"] = {{"source", "delta0"}}; break;
    case GTauSource::File: j["gtau"] = {{"source", "file"}, {"path", sc.gtau.path}}; break;
    case GTauSource::SplitHalf: j["gtau"] = {{"source", "split_half"}}; break;
  }
  j["output_dir"] = sc.output_dir;
  return j;
}

}  // namespace levyrisk
