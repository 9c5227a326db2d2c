#pragma once

// JSON encoding of results and scenario configs. Non-finite numbers are
// written as the strings "inf" / "-inf", NaN as null. Config parsing is
// strict: unknown keys and wrongly typed values raise ConfigError.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>

#include <json.hpp>

#include "winratio/classic_tests.hpp"
#include "winratio/harness.hpp"
#include "winratio/power.hpp"
#include "winratio/wr_tests.hpp"

namespace winratio {

using Json = nlohmann::ordered_json;

inline Json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline Json to_json(const WrResult& r) {
  return Json{{"method", to_string(r.method)},
              {"n_w", r.n_w},
              {"n_l", r.n_l},
              {"n_tie", r.n_tie},
              {"p_w", number_json(r.p_w)},
              {"r_w", number_json(r.r_w)},
              {"z", number_json(r.z)},
              {"p_value", number_json(r.p_value)},
              {"ci_low", number_json(r.ci_low)},
              {"ci_high", number_json(r.ci_high)},
              {"dropped_strata", r.dropped_strata}};
}

inline Json to_json(const CoxResult& r) {
  return Json{{"beta_t_hat", number_json(r.beta_t_hat)}, {"se", number_json(r.se)},
              {"z", number_json(r.z)},                   {"p_value", number_json(r.p_value)},
              {"hr", number_json(r.hr)},                 {"ci_low", number_json(r.ci_low)},
              {"ci_high", number_json(r.ci_high)},       {"iterations", r.iterations},
              {"converged", r.converged},                {"separation", r.separation}};
}

inline Json to_json(const ObrienResult& r) {
  return Json{{"f_stat", number_json(r.f_stat)},
              {"df_between", r.df_between},
              {"df_within", r.df_within},
              {"p_value", number_json(r.p_value)}};
}

inline Json to_json(const OrResult& r) {
  return Json{{"table", {r.table[0], r.table[1], r.table[2], r.table[3]}},
              {"or_hat", number_json(r.or_hat)},
              {"se_log", number_json(r.se_log)},
              {"z", number_json(r.z)},
              {"p_value", number_json(r.p_value)},
              {"corrected", r.corrected}};
}

inline Json to_json(const McSummary& s) {
  Json analyses = Json::array();
  for (const auto& a : s.analyses)
    analyses.push_back({{"analysis", to_string(a.analysis)},
                        {"rejection_rate", number_json(a.rejection_rate)},
                        {"mean_estimate", number_json(a.mean_estimate)},
                        {"mean_ci", {number_json(a.mean_ci_low), number_json(a.mean_ci_high)}},
                        {"reps_used", a.reps_used},
                        {"degenerate_count", a.degenerate_count},
                        {"nonfinite_estimates", a.nonfinite_estimates}});
  Json out{{"reps", s.reps}, {"analyses", analyses}};
  if (s.stage2_dropped > 0) out["stage2_dropped"] = s.stage2_dropped;
  return out;
}

// --------------------------------------------------------------- parsing ---

namespace json_detail {

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
}

inline double get_number(const Json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError(key + ": expected a number (or \"inf\" / \"-inf\")");
}

inline void read(const Json& obj, const char* key, double& out) {
  if (obj.contains(key)) out = get_number(obj.at(key), key);
}

inline void read(const Json& obj, const char* key, int& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  out = v.get<int>();
}

template <std::size_t N>
void read(const Json& obj, const char* key, std::array<double, N>& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != N)
    throw ConfigError(std::string(key) + ": expected an array of " + std::to_string(N) + " numbers");
  for (std::size_t i = 0; i < N; ++i) out[i] = get_number(v[i], key);
}

template <class Enum, std::size_t N>
Enum parse_enum(const Json& v, const std::string& key, const std::array<Enum, N>& values) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  const auto s = v.get<std::string>();
  for (Enum e : values)
    if (s == to_string(e)) return e;
  std::string names;
  for (Enum e : values) names += std::string(names.empty() ? "" : ", ") + to_string(e);
  throw ConfigError(key + ": unknown value \"" + s + "\" (expected one of " + names + ")");
}

}  // namespace json_detail

inline ScenarioConfig parse_scenario_config(const Json& j) {
  using namespace json_detail;
  reject_unknown(j,
                 {"design", "outcome_family", "generator", "analyses", "n_total", "cutoffs", "alpha", "reps",
                  "master_seed", "winning_rule", "allocation"},
                 "config");
  for (const char* key : {"design", "outcome_family", "analyses"})
    if (!j.contains(key)) throw ConfigError(std::string("config: missing required key \"") + key + "\"");

  ScenarioConfig c;
  c.design = parse_enum(j.at("design"), "design", std::array{Design::Parallel, Design::CR, Design::SED});
  c.outcome_family = parse_enum(j.at("outcome_family"), "outcome_family",
                                std::array{OutcomeFamily::Binary, OutcomeFamily::Survival, OutcomeFamily::Continuous});
  if (!j.at("analyses").is_array()) throw ConfigError("analyses: expected an array");
  for (const auto& a : j.at("analyses")) c.analyses.push_back(parse_enum(a, "analyses", kAllAnalyses));

  read(j, "n_total", c.n_total);
  read(j, "alpha", c.alpha);
  read(j, "reps", c.reps);
  read(j, "allocation", c.allocation);
  if (j.contains("master_seed")) {
    const auto& v = j.at("master_seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("master_seed: expected a nonnegative integer");
    c.master_seed = v.get<std::uint64_t>();
  }
  if (j.contains("winning_rule"))
    c.winning_rule = parse_enum(j.at("winning_rule"), "winning_rule",
                                std::array{SurvivalPriority::DeathFirst, SurvivalPriority::HospitalizationFirst});
  if (j.contains("cutoffs")) {
    const auto& cut = j.at("cutoffs");
    reject_unknown(cut, {"c_t", "c_s0", "c_s1"}, "cutoffs");
    read(cut, "c_t", c.cutoffs.c_t);
    read(cut, "c_s0", c.cutoffs.c_s0);
    read(cut, "c_s1", c.cutoffs.c_s1);
  }
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    switch (c.outcome_family) {
      case OutcomeFamily::Binary:
        reject_unknown(g, {"p_t", "q_t", "p_c", "q_c"}, "generator");
        read(g, "p_t", c.binary.p_t);
        read(g, "q_t", c.binary.q_t);
        read(g, "p_c", c.binary.p_c);
        read(g, "q_c", c.binary.q_c);
        break;
      case OutcomeFamily::Survival:
        reject_unknown(g, {"beta_t", "beta_in", "beta_dhratio", "beta_cov1", "beta_cov2"}, "generator");
        read(g, "beta_t", c.survival.beta_t);
        read(g, "beta_in", c.survival.beta_in);
        read(g, "beta_dhratio", c.survival.beta_dhratio);
        read(g, "beta_cov1", c.survival.beta_cov1);
        read(g, "beta_cov2", c.survival.beta_cov2);
        break;
      case OutcomeFamily::Continuous:
        reject_unknown(g, {"beta_p", "beta_t1", "beta_in2", "beta_in3", "beta_cov1", "beta_cov2", "noise_sd", "mix"},
                       "generator");
        read(g, "beta_p", c.continuous.beta_p);
        read(g, "beta_t1", c.continuous.beta_t1);
        read(g, "beta_in2", c.continuous.beta_in2);
        read(g, "beta_in3", c.continuous.beta_in3);
        read(g, "beta_cov1", c.continuous.beta_cov1);
        read(g, "beta_cov2", c.continuous.beta_cov2);
        read(g, "noise_sd", c.continuous.noise_sd);
        read(g, "mix", c.mix.p);
        break;
    }
  }
  c.validate();
  return c;
}

inline ScenarioConfig parse_scenario_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_scenario_config(j);
}

inline ScenarioConfig parse_scenario_config(const char* text) { return parse_scenario_config(std::string(text)); }

inline Json to_json(const ScenarioConfig& c) {
  Json analyses = Json::array();
  for (Analysis a : c.analyses) analyses.push_back(to_string(a));
  Json gen;
  switch (c.outcome_family) {
    case OutcomeFamily::Binary:
      gen = {{"p_t", c.binary.p_t}, {"q_t", c.binary.q_t}, {"p_c", c.binary.p_c}, {"q_c", c.binary.q_c}};
      break;
    case OutcomeFamily::Survival:
      gen = {{"beta_t", c.survival.beta_t},       {"beta_in", c.survival.beta_in},
             {"beta_dhratio", c.survival.beta_dhratio}, {"beta_cov1", c.survival.beta_cov1},
             {"beta_cov2", c.survival.beta_cov2}};
      break;
    case OutcomeFamily::Continuous:
      gen = {{"beta_p", c.continuous.beta_p},     {"beta_t1", c.continuous.beta_t1},
             {"beta_in2", c.continuous.beta_in2}, {"beta_in3", c.continuous.beta_in3},
             {"beta_cov1", c.continuous.beta_cov1}, {"beta_cov2", c.continuous.beta_cov2},
             {"noise_sd", c.continuous.noise_sd}, {"mix", c.mix.p}};
      break;
  }
  return Json{{"design", to_string(c.design)},
              {"outcome_family", to_string(c.outcome_family)},
              {"generator", gen},
              {"analyses", analyses},
              {"n_total", c.n_total},
              {"cutoffs",
               {{"c_t", number_json(c.cutoffs.c_t)},
                {"c_s0", number_json(c.cutoffs.c_s0)},
                {"c_s1", number_json(c.cutoffs.c_s1)}}},
              {"alpha", c.alpha},
              {"reps", c.reps},
              {"master_seed", c.master_seed},
              {"winning_rule", to_string(c.winning_rule)},
              {"allocation", c.allocation}};
}

}  // namespace winratio
