#pragma once

// Trial runners (parallel, complete randomization, sequential enriched), the
// Monte Carlo engine and presets for the published simulation tables.
//
// Every trial derives independent sub-streams from one trial seed:
//   0 cohort / patient profiles   1 placebo lead-in   2 stage 1
//   3 stage 2                     4 analysis (matched pairing)
// so a sequential enriched run whose lead-in keeps everybody and whose stage
// 2 is empty sees exactly the same stage-1 data as complete randomization.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "winratio/classic_tests.hpp"
#include "winratio/core.hpp"
#include "winratio/datagen.hpp"
#include "winratio/errors.hpp"
#include "winratio/random.hpp"
#include "winratio/stats.hpp"
#include "winratio/wr_tests.hpp"

namespace winratio {

enum class Design : std::uint8_t { Parallel, CR, SED };
enum class OutcomeFamily : std::uint8_t { Binary, Survival, Continuous };
enum class Analysis : std::uint8_t { MatchedWR, StratUnmatchedWR, UnstratUnmatchedWR, Cox, Obrien, Contingency };

inline const char* to_string(Design d) {
  switch (d) {
    case Design::Parallel: return "Parallel";
    case Design::CR: return "CR";
    case Design::SED: return "SED";
  }
  return "?";
}

inline const char* to_string(OutcomeFamily f) {
  switch (f) {
    case OutcomeFamily::Binary: return "Binary";
    case OutcomeFamily::Survival: return "Survival";
    case OutcomeFamily::Continuous: return "Continuous";
  }
  return "?";
}

inline const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::MatchedWR: return "MatchedWR";
    case Analysis::StratUnmatchedWR: return "StratUnmatchedWR";
    case Analysis::UnstratUnmatchedWR: return "UnstratUnmatchedWR";
    case Analysis::Cox: return "Cox";
    case Analysis::Obrien: return "Obrien";
    case Analysis::Contingency: return "Contingency";
  }
  return "?";
}

inline constexpr std::array<Analysis, 6> kAllAnalyses{Analysis::MatchedWR, Analysis::StratUnmatchedWR,
                                                      Analysis::UnstratUnmatchedWR, Analysis::Cox,
                                                      Analysis::Obrien, Analysis::Contingency};

struct Cutoffs {
  double c_t = 0.8;   // improvement cutoff for the continuous rule
  double c_s0 = 0.8;  // placebo nonresponder: every lead-in ratio above c_s0
  double c_s1 = 0.9;  // drug nonresponder: every stage-1 ratio above c_s1
};

struct ScenarioConfig {
  Design design = Design::Parallel;
  OutcomeFamily outcome_family = OutcomeFamily::Survival;
  BinaryGenConfig binary;
  SurvivalGenConfig survival;
  ContinuousGenConfig continuous;
  SubpopMix mix;
  std::vector<Analysis> analyses;
  int n_total = 200;
  Cutoffs cutoffs;
  double alpha = 0.05;
  int reps = 2000;
  std::uint64_t master_seed = 20240601;
  SurvivalPriority winning_rule = SurvivalPriority::DeathFirst;
  double allocation = 0.5;  // binary and survival families

  void validate() const {
    if (n_total < 2) throw ConfigError("n_total must be at least 2");
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (!(allocation > 0.0 && allocation < 1.0)) throw ConfigError("allocation must lie in (0, 1)");
    if (analyses.empty()) throw ConfigError("no analyses requested");
    if ((design == Design::CR || design == Design::SED) && outcome_family != OutcomeFamily::Continuous)
      throw ConfigError(std::string(to_string(design)) + " design requires the Continuous family");
    if (std::isnan(cutoffs.c_t) || std::isnan(cutoffs.c_s0) || std::isnan(cutoffs.c_s1))
      throw ConfigError("cutoffs must not be NaN");
    for (Analysis a : analyses) {
      if (a == Analysis::Cox && outcome_family != OutcomeFamily::Survival)
        throw ConfigError("Cox requires the Survival family");
      if (a == Analysis::Contingency && outcome_family != OutcomeFamily::Continuous)
        throw ConfigError("Contingency requires the Continuous family");
      if (a == Analysis::Obrien && outcome_family == OutcomeFamily::Binary)
        throw ConfigError("Obrien requires the Survival or Continuous family");
    }
    switch (outcome_family) {
      case OutcomeFamily::Binary: binary.validate(); break;
      case OutcomeFamily::Survival: survival_config().validate(); break;
      case OutcomeFamily::Continuous:
        continuous_config().validate();
        mix.validate();
        break;
    }
  }

  SurvivalGenConfig survival_config() const {
    auto s = survival;
    s.n = n_total;
    s.allocation = allocation;
    return s;
  }

  ContinuousGenConfig continuous_config() const {
    auto c = continuous;
    c.n = n_total;
    return c;
  }

  BinaryGenConfig binary_config() const {
    auto b = binary;
    b.n1 = std::clamp(static_cast<int>(std::lround(n_total * allocation)), 1, n_total - 1);
    b.n0 = n_total - b.n1;
    return b;
  }
};

// ----------------------------------------------------------------- trials ---

struct AnalysisOutcome {
  Analysis analysis = Analysis::MatchedWR;
  bool degenerate = false;
  std::string note;
  double estimate = kNaN;  // R_w, HR, OR, or F for O'Brien
  double ci_low = kNaN;
  double ci_high = kNaN;
  double z = kNaN;
  double p_value = kNaN;
};

struct TrialResult {
  std::vector<AnalysisOutcome> analyses;
  int stage1_size = 0;  // SED only
  int stage2_size = 0;
  bool stage2_dropped = false;
};

enum SubStream : std::uint64_t { kStreamCohort = 0, kStreamLeadIn = 1, kStreamStage1 = 2, kStreamStage2 = 3, kStreamAnalysis = 4 };

inline Rng sub_rng(std::uint64_t trial_seed, SubStream s) { return Rng(split_seed(trial_seed, s)); }

namespace detail {

template <WinningRule Rule>
AnalysisOutcome wr_outcome(Analysis a, std::span<const PatientRecord> cohort, const Rule& rule, Rng& pairing_rng) {
  AnalysisOutcome out;
  out.analysis = a;
  WrResult r;
  if (a == Analysis::MatchedWR)
    r = matched_wr_test(form_matched_pairs(cohort, true, pairing_rng), cohort, rule);
  else
    r = fs_unmatched_test(cohort, a == Analysis::StratUnmatchedWR, rule).result;
  out.estimate = r.r_w;
  out.ci_low = r.ci_low;
  out.ci_high = r.ci_high;
  out.z = r.z;
  out.p_value = r.p_value;
  return out;
}

inline AnalysisOutcome run_analysis(Analysis a, const ScenarioConfig& cfg, std::span<const PatientRecord> cohort,
                                    Rng& pairing_rng) {
  try {
    switch (a) {
      case Analysis::MatchedWR:
      case Analysis::StratUnmatchedWR:
      case Analysis::UnstratUnmatchedWR:
        switch (cfg.outcome_family) {
          case OutcomeFamily::Binary: return wr_outcome(a, cohort, BinaryRule{}, pairing_rng);
          case OutcomeFamily::Survival: return wr_outcome(a, cohort, SurvivalRule{cfg.winning_rule}, pairing_rng);
          case OutcomeFamily::Continuous: return wr_outcome(a, cohort, ContinuousRule{cfg.cutoffs.c_t}, pairing_rng);
        }
        break;
      case Analysis::Cox: {
        const auto r = cox_fit(cohort);
        if (r.separation) throw DegenerateError("cox: monotone likelihood, coefficient capped");
        if (!r.converged) throw DegenerateError("cox: Newton iteration did not converge");
        return {a, false, {}, r.hr, r.ci_low, r.ci_high, r.z, r.p_value};
      }
      case Analysis::Obrien: {
        const auto r = obrien_test(cohort);
        return {a, false, {}, r.f_stat, kNaN, kNaN, kNaN, r.p_value};
      }
      case Analysis::Contingency: {
        const auto r = contingency_or_test(cohort, cfg.cutoffs.c_t);
        return {a,
                false,
                r.corrected ? "haldane" : "",
                r.or_hat,
                std::exp(std::log(r.or_hat) - 1.96 * r.se_log),
                std::exp(std::log(r.or_hat) + 1.96 * r.se_log),
                r.z,
                r.p_value};
      }
    }
  } catch (const DegenerateError& e) {
    AnalysisOutcome out;
    out.analysis = a;
    out.degenerate = true;
    out.note = e.what();
    return out;
  }
  throw ConfigError("unknown analysis");
}

inline TrialResult analyze(const ScenarioConfig& cfg, std::span<const PatientRecord> cohort, std::uint64_t trial_seed) {
  TrialResult out;
  Rng pairing_rng = sub_rng(trial_seed, kStreamAnalysis);
  for (Analysis a : cfg.analyses) out.analyses.push_back(run_analysis(a, cfg, cohort, pairing_rng));
  return out;
}

inline TrialResult all_degenerate(const ScenarioConfig& cfg, const std::string& why) {
  TrialResult out;
  for (Analysis a : cfg.analyses) {
    AnalysisOutcome o;
    o.analysis = a;
    o.degenerate = true;
    o.note = why;
    out.analyses.push_back(o);
  }
  return out;
}

// Every component ratio strictly above the cutoff.
inline bool all_ratios_above(const ContinuousOutcome& o, double cutoff) {
  return std::all_of(o.y.begin(), o.y.end(), [&](double y) { return y / o.y_base > cutoff; });
}

}  // namespace detail

// Cohort of one single-stage trial, for `gen` and the parallel/CR runners.
inline Cohort generate_parallel_cohort(const ScenarioConfig& cfg, std::uint64_t trial_seed,
                                       std::vector<Subpop>* subpops = nullptr) {
  Rng cohort_rng = sub_rng(trial_seed, kStreamCohort);
  switch (cfg.outcome_family) {
    case OutcomeFamily::Binary: return gen_binary_cohort(cfg.binary_config(), cohort_rng);
    case OutcomeFamily::Survival: return gen_survival_cohort(cfg.survival_config(), cohort_rng);
    case OutcomeFamily::Continuous: {
      const auto gen = cfg.continuous_config();
      gen.validate();
      cfg.mix.validate();
      const auto profiles = draw_continuous_profiles(gen, cfg.mix, cohort_rng);
      Rng stage_rng = sub_rng(trial_seed, kStreamStage1);
      const auto arms = assign_arms(gen.n, 0.5, stage_rng);
      Cohort cohort;
      cohort.reserve(profiles.size());
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        cohort.push_back(make_record(profiles[i], arms[i], draw_continuous_response(profiles[i], arms[i], gen, stage_rng)));
        if (subpops) subpops->push_back(profiles[i].subpop);
      }
      return cohort;
    }
  }
  throw ConfigError("unknown outcome family");
}

inline TrialResult run_parallel_trial(const ScenarioConfig& cfg, std::uint64_t trial_seed) {
  const auto cohort = generate_parallel_cohort(cfg, trial_seed);
  return detail::analyze(cfg, cohort, trial_seed);
}

inline TrialResult run_parallel_trial(const ScenarioConfig& cfg, Rng& rng) { return run_parallel_trial(cfg, rng.next()); }

inline TrialResult run_cr_trial(const ScenarioConfig& cfg, std::uint64_t trial_seed) {
  if (cfg.outcome_family != OutcomeFamily::Continuous) throw ConfigError("CR design requires the Continuous family");
  return run_parallel_trial(cfg, trial_seed);
}

inline TrialResult run_cr_trial(const ScenarioConfig& cfg, Rng& rng) { return run_cr_trial(cfg, rng.next()); }

struct SedCohort {
  Cohort cohort;  // stage-1 records, then stage-2 records (ids offset by n_total, strata by 4)
  int lead_in = 0;
  int stage1 = 0;
  int stage2 = 0;
};

// Placebo lead-in on every enrolled patient, stage-1 1:1 randomization of
// placebo nonresponders, stage-2 1:1 re-randomization of stage-1 drug-arm
// responders with fresh measurements.
inline SedCohort generate_sed_cohort(const ScenarioConfig& cfg, std::uint64_t trial_seed) {
  const auto gen = cfg.continuous_config();
  gen.validate();
  cfg.mix.validate();
  Rng cohort_rng = sub_rng(trial_seed, kStreamCohort);
  const auto profiles = draw_continuous_profiles(gen, cfg.mix, cohort_rng);

  SedCohort out;
  out.lead_in = gen.n;
  Rng lead_rng = sub_rng(trial_seed, kStreamLeadIn);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto lead = draw_continuous_response(profiles[i], Arm::Control, gen, lead_rng);
    if (detail::all_ratios_above(lead, cfg.cutoffs.c_s0)) kept.push_back(i);
  }
  out.stage1 = static_cast<int>(kept.size());
  if (out.stage1 < 2) return out;

  Rng stage1_rng = sub_rng(trial_seed, kStreamStage1);
  const auto arms1 = assign_arms(out.stage1, 0.5, stage1_rng);
  std::vector<std::size_t> responders;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& p = profiles[kept[k]];
    const auto o = draw_continuous_response(p, arms1[k], gen, stage1_rng);
    out.cohort.push_back(make_record(p, arms1[k], o));
    if (arms1[k] == Arm::Treatment && !detail::all_ratios_above(o, cfg.cutoffs.c_s1)) responders.push_back(kept[k]);
  }

  out.stage2 = static_cast<int>(responders.size());
  if (out.stage2 < 2) return out;
  Rng stage2_rng = sub_rng(trial_seed, kStreamStage2);
  const auto arms2 = assign_arms(out.stage2, 0.5, stage2_rng);
  for (std::size_t k = 0; k < responders.size(); ++k) {
    const auto& p = profiles[responders[k]];
    auto rec = make_record(p, arms2[k], draw_continuous_response(p, arms2[k], gen, stage2_rng));
    rec.id += gen.n;
    rec.stratum += kCovariateStrata;
    out.cohort.push_back(rec);
  }
  return out;
}

inline TrialResult run_sed_trial(const ScenarioConfig& cfg, std::uint64_t trial_seed) {
  if (cfg.outcome_family != OutcomeFamily::Continuous) throw ConfigError("SED design requires the Continuous family");
  const auto sed = generate_sed_cohort(cfg, trial_seed);
  if (sed.stage1 < 2) return detail::all_degenerate(cfg, "degenerate: fewer than two placebo nonresponders");
  auto out = detail::analyze(cfg, sed.cohort, trial_seed);
  out.stage1_size = sed.stage1;
  out.stage2_size = sed.stage2 >= 2 ? sed.stage2 : 0;
  out.stage2_dropped = sed.stage2 < 2;
  return out;
}

inline TrialResult run_sed_trial(const ScenarioConfig& cfg, Rng& rng) { return run_sed_trial(cfg, rng.next()); }

inline TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t trial_seed) {
  switch (cfg.design) {
    case Design::Parallel: return run_parallel_trial(cfg, trial_seed);
    case Design::CR: return run_cr_trial(cfg, trial_seed);
    case Design::SED: return run_sed_trial(cfg, trial_seed);
  }
  throw ConfigError("unknown design");
}

// ------------------------------------------------------------ Monte Carlo ---

struct McAnalysisSummary {
  Analysis analysis = Analysis::MatchedWR;
  double rejection_rate = kNaN;
  double mean_estimate = kNaN;  // over reps with a finite estimate
  double mean_ci_low = kNaN;    // over reps with a finite interval
  double mean_ci_high = kNaN;
  int reps_used = 0;
  int degenerate_count = 0;
  int nonfinite_estimates = 0;
};

struct McSummary {
  std::vector<McAnalysisSummary> analyses;
  int reps = 0;
  int stage2_dropped = 0;  // SED only

  const McAnalysisSummary& at(Analysis a) const {
    for (const auto& s : analyses)
      if (s.analysis == a) return s;
    throw ConfigError(std::string("analysis not in summary: ") + to_string(a));
  }
};

struct McOptions {
  unsigned workers = 0;  // 0: hardware concurrency
};

inline std::uint64_t replicate_seed(std::uint64_t master_seed, int rep) {
  return split_seed(master_seed, static_cast<std::uint64_t>(rep));
}

// Runs cfg.reps independent trials. Results are collected per replicate and
// reduced in replicate order, so the summary does not depend on `workers`.
inline McSummary monte_carlo(const ScenarioConfig& cfg, const McOptions& opt = {}) {
  cfg.validate();
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<TrialResult> results(reps);
  unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto work = [&] {
    try {
      for (std::size_t i = next++; i < reps && !failed; i = next++)
        results[i] = run_trial(cfg, replicate_seed(cfg.master_seed, static_cast<int>(i)));
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  McSummary summary;
  summary.reps = cfg.reps;
  for (std::size_t k = 0; k < cfg.analyses.size(); ++k) {
    McAnalysisSummary s;
    s.analysis = cfg.analyses[k];
    long rejections = 0;
    int n_est = 0, n_ci = 0;
    CompensatedSum est, lo, hi;
    for (const auto& r : results) {
      const auto& o = r.analyses[k];
      if (o.degenerate || std::isnan(o.p_value)) {
        ++s.degenerate_count;
        continue;
      }
      ++s.reps_used;
      if (o.p_value <= cfg.alpha) ++rejections;
      if (std::isfinite(o.estimate)) {
        est.add(o.estimate);
        ++n_est;
      } else {
        ++s.nonfinite_estimates;
      }
      if (std::isfinite(o.ci_low) && std::isfinite(o.ci_high)) {
        lo.add(o.ci_low);
        hi.add(o.ci_high);
        ++n_ci;
      }
    }
    if (s.reps_used > 0) s.rejection_rate = static_cast<double>(rejections) / s.reps_used;
    if (n_est > 0) s.mean_estimate = est.value() / n_est;
    if (n_ci > 0) {
      s.mean_ci_low = lo.value() / n_ci;
      s.mean_ci_high = hi.value() / n_ci;
    }
    summary.analyses.push_back(s);
  }
  for (const auto& r : results) summary.stage2_dropped += r.stage2_dropped;
  return summary;
}

// Every analysis degenerate in every replicate.
inline bool all_degenerate(const McSummary& s) {
  return std::all_of(s.analyses.begin(), s.analyses.end(), [](const auto& a) { return a.reps_used == 0; });
}

// ---------------------------------------------------------------- presets ---

namespace presets {

inline ScenarioConfig survival_base() {
  ScenarioConfig c;
  c.design = Design::Parallel;
  c.outcome_family = OutcomeFamily::Survival;
  c.survival.beta_cov1 = -0.5;
  c.survival.beta_cov2 = 0.5;
  c.analyses = {Analysis::Cox, Analysis::MatchedWR, Analysis::StratUnmatchedWR, Analysis::UnstratUnmatchedWR,
                Analysis::Obrien};
  return c;
}

inline ScenarioConfig survival_null(int n) {
  auto c = survival_base();
  c.n_total = n;
  return c;
}

inline ScenarioConfig survival_equal_effects(int n) {
  auto c = survival_null(n);
  c.survival.beta_t = std::log(0.6);
  return c;
}

inline ScenarioConfig survival_death_only(int n) {
  auto c = survival_null(n);
  c.survival.beta_in = std::log(0.18);
  return c;
}

// Death-only data analyzed with hospitalization given priority.
inline ScenarioConfig survival_wrong_criteria(int n) {
  auto c = survival_death_only(n);
  c.winning_rule = SurvivalPriority::HospitalizationFirst;
  return c;
}

enum class SedScenario { Null, One, Two, Three };

inline ScenarioConfig continuous(Design d, SedScenario s, int n) {
  ScenarioConfig c;
  c.design = d;
  c.outcome_family = OutcomeFamily::Continuous;
  c.n_total = n;
  c.cutoffs = {0.8, 0.8, 0.9};
  c.mix.p = {0.05, 0.05, 0.8, 0.1};
  c.continuous.beta_p = {-1.5, -1.5, -1.5};
  c.continuous.beta_cov1 = 5.0;
  c.continuous.beta_cov2 = 5.0;
  c.continuous.noise_sd = 1.0;
  c.continuous.beta_t1 = s == SedScenario::Null ? -1.5 : -2.0;
  if (s == SedScenario::Two) c.continuous.beta_in2 = c.continuous.beta_in3 = 0.5;
  if (s == SedScenario::Three) c.mix.p = {0.6, 0.05, 0.3, 0.05};
  c.analyses = {Analysis::Contingency, Analysis::MatchedWR, Analysis::StratUnmatchedWR,
                Analysis::UnstratUnmatchedWR};
  return c;
}

}  // namespace presets

// ------------------------------------------------------ table reproduction ---

enum class CellKind { Rate, Estimate };

struct TableRow {
  std::string label;
  Analysis analysis;
  std::vector<double> reference;  // one per column
};

struct TableSpec {
  std::string id;
  std::string title;
  CellKind kind = CellKind::Rate;
  double tolerance = 0.05;  // absolute for rates, relative for estimates
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
  // Scenario behind each column.
  std::vector<ScenarioConfig> scenarios;
};

namespace detail {

inline std::vector<TableRow> survival_rows(std::array<double, 3> cox, std::array<double, 3> matched,
                                           std::array<double, 3> strat, std::array<double, 3> unstrat,
                                           std::optional<std::array<double, 3>> obrien) {
  std::vector<TableRow> rows{
      {"Cox regression", Analysis::Cox, {cox.begin(), cox.end()}},
      {"Stratified matched WR", Analysis::MatchedWR, {matched.begin(), matched.end()}},
      {"Stratified unmatched WR", Analysis::StratUnmatchedWR, {strat.begin(), strat.end()}},
      {"Unstratified unmatched WR", Analysis::UnstratUnmatchedWR, {unstrat.begin(), unstrat.end()}},
  };
  if (obrien) rows.push_back({"O'Brien rank-sum-type", Analysis::Obrien, {obrien->begin(), obrien->end()}});
  return rows;
}

template <class Make>
TableSpec survival_table(std::string id, std::string title, CellKind kind, double tol, Make make,
                         std::vector<TableRow> rows) {
  TableSpec t{std::move(id), std::move(title), kind, tol, {"N=60", "N=100", "N=200"}, std::move(rows), {}};
  for (int n : {60, 100, 200}) t.scenarios.push_back(make(n));
  return t;
}

inline TableSpec sed_table(std::string id, std::string title, presets::SedScenario s, double tol,
                           std::array<std::array<double, 6>, 4> reference, bool sed_first) {
  TableSpec t;
  t.id = std::move(id);
  t.title = std::move(title);
  t.kind = CellKind::Rate;
  t.tolerance = tol;
  const std::array<const char*, 4> labels{"Contingency table", "Stratified matched WR", "Stratified unmatched WR",
                                          "Unstratified unmatched WR"};
  const std::array<Analysis, 4> analyses{Analysis::Contingency, Analysis::MatchedWR, Analysis::StratUnmatchedWR,
                                         Analysis::UnstratUnmatchedWR};
  for (int n : {100, 200, 500}) {
    for (int k = 0; k < 2; ++k) {
      const bool sed = (k == 0) == sed_first;
      t.columns.push_back((sed ? "SED N=" : "CR N=") + std::to_string(n));
      t.scenarios.push_back(presets::continuous(sed ? Design::SED : Design::CR, s, n));
    }
  }
  for (std::size_t r = 0; r < 4; ++r) t.rows.push_back({labels[r], analyses[r], {reference[r].begin(), reference[r].end()}});
  return t;
}

}  // namespace detail

inline std::vector<std::string> table_ids() {
  return {"t3", "t4", "t5", "t6", "t7", "t8", "t9", "t10", "t11", "t12", "t13", "t14"};
}

inline TableSpec table_spec(const std::string& id) {
  using detail::survival_rows;
  using detail::survival_table;
  using presets::SedScenario;
  if (id == "t3")
    return survival_table(id, "Null survival: mean estimates", CellKind::Estimate, 0.10, presets::survival_null,
                          survival_rows({1.05, 1.02, 1.02}, {1.01, 1.01, 1.00}, {1.05, 1.03, 1.00},
                                        {1.04, 1.03, 1.01}, std::nullopt));
  if (id == "t4")
    return survival_table(id, "Null survival: Type I error", CellKind::Rate, 0.02, presets::survival_null,
                          survival_rows({0.05, 0.05, 0.05}, {0.06, 0.06, 0.06}, {0.04, 0.05, 0.05},
                                        {0.04, 0.05, 0.05}, std::array<double, 3>{0.05, 0.05, 0.05}));
  if (id == "t5")
    return survival_table(id, "Equal effects (HR 0.6): mean estimates", CellKind::Estimate, 0.10,
                          presets::survival_equal_effects,
                          survival_rows({0.62, 0.61, 0.60}, {1.51, 1.49, 1.49}, {1.59, 1.55, 1.52},
                                        {1.55, 1.51, 1.49}, std::nullopt));
  if (id == "t6")
    return survival_table(id, "Equal effects (HR 0.6): power", CellKind::Rate, 0.05, presets::survival_equal_effects,
                          survival_rows({0.44, 0.66, 0.92}, {0.17, 0.26, 0.47}, {0.19, 0.36, 0.65},
                                        {0.21, 0.35, 0.61}, std::array<double, 3>{0.32, 0.51, 0.82}));
  if (id == "t7")
    return survival_table(id, "Effect on death only: mean estimates", CellKind::Estimate, 0.10,
                          presets::survival_death_only,
                          survival_rows({0.61, 0.59, 0.60}, {3.02, 3.06, 2.98}, {3.29, 3.24, 3.05},
                                        {3.14, 3.09, 2.96}, std::nullopt));
  if (id == "t8")
    return survival_table(id, "Effect on death only: power", CellKind::Rate, 0.05, presets::survival_death_only,
                          survival_rows({0.51, 0.65, 0.81}, {0.78, 0.94, 0.99}, {0.90, 0.99, 1.00},
                                        {0.89, 0.99, 1.00}, std::array<double, 3>{0.50, 0.74, 0.93}));
  if (id == "t9")
    return survival_table(id, "Death only, hospitalization prioritized: mean estimates", CellKind::Estimate, 0.10,
                          presets::survival_wrong_criteria,
                          survival_rows({0.60, 0.59, 0.60}, {1.12, 1.17, 1.12}, {1.19, 1.19, 1.15},
                                        {1.18, 1.17, 1.14}, std::nullopt));
  if (id == "t10")
    return survival_table(id, "Death only, hospitalization prioritized: power", CellKind::Rate, 0.05,
                          presets::survival_wrong_criteria,
                          survival_rows({0.50, 0.66, 0.82}, {0.07, 0.07, 0.10}, {0.06, 0.09, 0.12},
                                        {0.09, 0.07, 0.11}, std::array<double, 3>{0.51, 0.72, 0.91}));
  if (id == "t11")
    return detail::sed_table(id, "Continuous, SED vs CR: Type I error", SedScenario::Null, 0.03,
                             {{{0.05, 0.05, 0.05, 0.05, 0.05, 0.05},
                               {0.08, 0.13, 0.07, 0.07, 0.06, 0.06},
                               {0.05, 0.05, 0.06, 0.04, 0.05, 0.05},
                               {0.05, 0.05, 0.06, 0.04, 0.05, 0.05}}},
                             false);
  if (id == "t12")
    return detail::sed_table(id, "Continuous scenario 1: power", SedScenario::One, 0.05,
                             {{{0.30, 0.30, 0.58, 0.45, 0.92, 0.90},
                               {0.48, 0.46, 0.77, 0.69, 0.99, 0.99},
                               {0.49, 0.47, 0.81, 0.74, 0.99, 0.99},
                               {0.33, 0.32, 0.59, 0.51, 0.92, 0.93}}},
                             true);
  if (id == "t13")
    return detail::sed_table(id, "Continuous scenario 2: power", SedScenario::Two, 0.05,
                             {{{0.09, 0.07, 0.16, 0.13, 0.27, 0.20},
                               {0.15, 0.14, 0.23, 0.20, 0.40, 0.31},
                               {0.23, 0.11, 0.27, 0.17, 0.41, 0.32},
                               {0.22, 0.07, 0.24, 0.14, 0.32, 0.22}}},
                             true);
  if (id == "t14")
    return detail::sed_table(id, "Continuous scenario 3: power", SedScenario::Three, 0.05,
                             {{{0.07, 0.06, 0.10, 0.10, 0.20, 0.17},
                               {0.12, 0.07, 0.13, 0.11, 0.23, 0.23},
                               {0.23, 0.07, 0.25, 0.15, 0.33, 0.26},
                               {0.20, 0.06, 0.24, 0.10, 0.29, 0.19}}},
                             true);
  throw ConfigError("unknown table id: " + id + " (expected t3..t14)");
}

struct TableCell {
  double reference = kNaN;
  double simulated = kNaN;
  double diff = kNaN;
  bool pass = false;
};

struct OrderingCheck {
  std::string description;
  bool pass = false;
};

struct TableReport {
  TableSpec spec;
  std::vector<std::vector<TableCell>> cells;  // [row][column]
  std::vector<McSummary> summaries;           // per column
  std::vector<OrderingCheck> orderings;

  bool cells_pass() const {
    for (const auto& row : cells)
      for (const auto& c : row)
        if (!c.pass) return false;
    return true;
  }
  bool orderings_pass() const {
    return std::all_of(orderings.begin(), orderings.end(), [](const auto& o) { return o.pass; });
  }
};

struct ReproduceOptions {
  int reps = 2000;
  std::uint64_t seed = 20240601;
  unsigned workers = 0;
};

namespace detail {

inline double cell_value(const TableSpec& t, const McSummary& s, Analysis a) {
  const auto& m = s.at(a);
  return t.kind == CellKind::Rate ? m.rejection_rate : m.mean_estimate;
}

inline OrderingCheck ordering(const std::string& what, std::initializer_list<std::pair<std::string, double>> chain,
                              std::initializer_list<bool> strict) {
  std::ostringstream os;
  os << what << ": ";
  bool ok = true;
  auto it = chain.begin();
  auto st = strict.begin();
  os << std::fixed << std::setprecision(3) << it->first << " " << it->second;
  for (auto prev = it++; it != chain.end(); prev = it++, ++st) {
    const bool s = *st;
    ok = ok && (s ? prev->second > it->second : prev->second >= it->second);
    os << (s ? " > " : " >= ") << it->first << " " << it->second;
  }
  return {os.str(), ok};
}

}  // namespace detail

inline TableReport reproduce_table(const std::string& id, const ReproduceOptions& opt = {}) {
  TableReport rep;
  rep.spec = table_spec(id);
  auto& t = rep.spec;
  for (std::size_t c = 0; c < t.scenarios.size(); ++c) {
    auto cfg = t.scenarios[c];
    cfg.reps = opt.reps;
    cfg.master_seed = split_seed(opt.seed, c);
    rep.summaries.push_back(monte_carlo(cfg, {opt.workers}));
  }
  for (const auto& row : t.rows) {
    std::vector<TableCell> cells;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      TableCell cell;
      cell.reference = row.reference[c];
      cell.simulated = detail::cell_value(t, rep.summaries[c], row.analysis);
      cell.diff = cell.simulated - cell.reference;
      const double tol = t.kind == CellKind::Rate ? t.tolerance : t.tolerance * std::fabs(cell.reference);
      cell.pass = std::fabs(cell.diff) <= tol + 1e-12;
      cells.push_back(cell);
    }
    rep.cells.push_back(std::move(cells));
  }

  const auto sim = [&](std::size_t col, Analysis a) { return detail::cell_value(t, rep.summaries[col], a); };
  using A = Analysis;
  if (id == "t6")
    rep.orderings.push_back(detail::ordering(
        "power order at N=200",
        {{"Cox", sim(2, A::Cox)}, {"O'Brien", sim(2, A::Obrien)}, {"strat unmatched", sim(2, A::StratUnmatchedWR)},
         {"unstrat unmatched", sim(2, A::UnstratUnmatchedWR)}, {"matched", sim(2, A::MatchedWR)}},
        {true, true, false, true}));
  if (id == "t8")
    rep.orderings.push_back(detail::ordering(
        "power order at N=100",
        {{"strat unmatched", sim(1, A::StratUnmatchedWR)}, {"unstrat unmatched", sim(1, A::UnstratUnmatchedWR)},
         {"matched", sim(1, A::MatchedWR)}, {"O'Brien", sim(1, A::Obrien)}, {"Cox", sim(1, A::Cox)}},
        {false, true, true, true}));
  if (id == "t10") {
    const double wr_max =
        std::max({sim(1, A::MatchedWR), sim(1, A::StratUnmatchedWR), sim(1, A::UnstratUnmatchedWR)});
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << "N=100: max WR power " << wr_max << " <= 0.15, O'Brien "
       << sim(1, A::Obrien) << " >= 0.65, Cox " << sim(1, A::Cox) << " >= 0.60";
    rep.orderings.push_back({os.str(), wr_max <= 0.15 && sim(1, A::Obrien) >= 0.65 && sim(1, A::Cox) >= 0.60});
  }
  if (id == "t12" || id == "t13" || id == "t14") {
    for (std::size_t n = 0; n < 2; ++n) {  // N = 100, 200
      for (A a : {A::StratUnmatchedWR, A::UnstratUnmatchedWR}) {
        const double sed = sim(2 * n, a), cr = sim(2 * n + 1, a);
        std::ostringstream os;
        os << std::fixed << std::setprecision(3) << t.columns[2 * n].substr(4) << " " << to_string(a) << ": SED "
           << sed << " - CR " << cr << " = " << sed - cr << " >= 0.05";
        rep.orderings.push_back({os.str(), sed - cr >= 0.05});
      }
    }
  }
  return rep;
}

inline void print_table(std::ostream& os, const TableReport& rep) {
  const auto& t = rep.spec;
  os << t.id << ": " << t.title << "\n";
  os << (t.kind == CellKind::Rate ? "cells: simulated rejection rate [reference] (diff), tolerance +-"
                                  : "cells: simulated mean estimate [reference] (diff), relative tolerance ")
     << t.tolerance << "\n";
  os << std::left << std::setw(28) << "";
  for (const auto& c : t.columns) os << std::setw(26) << c;
  os << "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << std::setw(28) << t.rows[r].label;
    for (const auto& cell : rep.cells[r]) {
      std::ostringstream c;
      c << std::fixed << std::setprecision(3) << cell.simulated << " [" << std::setprecision(2) << cell.reference << "] ("
        << std::showpos << std::setprecision(3) << cell.diff << std::noshowpos << ")" << (cell.pass ? "" : " *");
      os << std::setw(26) << c.str();
    }
    os << "\n";
  }
  os << std::right;
  for (const auto& o : rep.orderings) os << (o.pass ? "[ok]   " : "[FAIL] ") << o.description << "\n";
  os << "cells within tolerance: " << (rep.cells_pass() ? "yes" : "no (* marks misses)") << "\n";
}

inline void write_table_csv(std::ostream& os, const TableReport& rep) {
  os << "table,row,analysis,column,reference,simulated,diff,pass,reps_used,degenerate\n";
  const auto& t = rep.spec;
  const auto old = os.precision(6);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& cell = rep.cells[r][c];
      const auto& m = rep.summaries[c].at(t.rows[r].analysis);
      os << t.id << ",\"" << t.rows[r].label << "\"," << to_string(t.rows[r].analysis) << "," << t.columns[c] << ","
         << cell.reference << "," << cell.simulated << "," << cell.diff << "," << (cell.pass ? 1 : 0) << ","
         << m.reps_used << "," << m.degenerate_count << "\n";
    }
  os.precision(old);
}

}  // namespace winratio
