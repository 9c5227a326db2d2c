#pragma once

// Domain types shared by every estimator and design runner: patient records,
// pairwise win status, stratification and pair formation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "winratio/errors.hpp"
#include "winratio/random.hpp"

namespace winratio {

enum class Arm : std::uint8_t { Treatment, Control };

inline const char* to_string(Arm a) { return a == Arm::Treatment ? "treatment" : "control"; }

// Death (higher priority) and hospitalization indicators.
struct BinaryOutcome {
  bool y_death = false;
  bool x_hosp = false;
};

// Event times; both strictly positive.
struct SurvivalOutcome {
  double e_death = 1.0;
  double e_hosp = 1.0;
};

// Baseline and time to improvement on three equally weighted components.
struct ContinuousOutcome {
  double y_base = 1.0;
  std::array<double, 3> y{};
};

using OutcomePayload = std::variant<BinaryOutcome, SurvivalOutcome, ContinuousOutcome>;

struct Covariates {
  bool x_cov1 = false;
  bool x_cov2 = false;
};

inline constexpr int kCovariateStrata = 4;

// Fixed encoding 2*x_cov1 + x_cov2.
constexpr int stratify(Covariates c) noexcept {
  return 2 * static_cast<int>(c.x_cov1) + static_cast<int>(c.x_cov2);
}

struct PatientRecord {
  int id = 0;
  Arm arm = Arm::Control;
  Covariates covariates;
  int stratum = 0;
  OutcomePayload outcome;
};

using Cohort = std::vector<PatientRecord>;

template <class Payload>
const Payload& outcome_as(const PatientRecord& p) {
  if (const auto* v = std::get_if<Payload>(&p.outcome)) return *v;
  throw InputError("patient " + std::to_string(p.id) + ": outcome payload has the wrong family");
}

// Treatment-arm perspective.
enum class WinStatus : std::int8_t { Loss = -1, Tie = 0, Win = 1 };

constexpr WinStatus mirror(WinStatus s) noexcept { return static_cast<WinStatus>(-static_cast<int>(s)); }
constexpr int score(WinStatus s) noexcept { return static_cast<int>(s); }

inline const char* to_string(WinStatus s) {
  switch (s) {
    case WinStatus::Win: return "win";
    case WinStatus::Loss: return "loss";
    case WinStatus::Tie: return "tie";
  }
  return "?";
}

struct MatchedPair {
  int treatment_id = 0;
  int control_id = 0;
  int stratum = 0;
};

struct Pairing {
  std::vector<MatchedPair> pairs;
  std::size_t unpaired = 0;    // surplus patients of the larger arm, summed over strata
  int strata_without_pairs = 0;
};

struct StratumMembers {
  int stratum = 0;
  std::vector<std::size_t> treatment;  // cohort indices, cohort order
  std::vector<std::size_t> control;
};

// Cohort indices grouped by stratum (ascending). `stratified == false` puts
// everybody into one pooled group labelled 0.
inline std::vector<StratumMembers> group_by_stratum(std::span<const PatientRecord> cohort, bool stratified) {
  std::map<int, StratumMembers> groups;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const int key = stratified ? cohort[i].stratum : 0;
    auto& g = groups[key];
    g.stratum = key;
    (cohort[i].arm == Arm::Treatment ? g.treatment : g.control).push_back(i);
  }
  std::vector<StratumMembers> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

// Random one-to-one pairing of treatment and control patients, within strata
// when `stratified`. Surplus patients of the larger arm stay unpaired.
inline Pairing form_matched_pairs(std::span<const PatientRecord> cohort, bool stratified, Rng& rng) {
  Pairing out;
  for (auto& g : group_by_stratum(cohort, stratified)) {
    rng.shuffle(std::span<std::size_t>(g.treatment));
    rng.shuffle(std::span<std::size_t>(g.control));
    const std::size_t m = std::min(g.treatment.size(), g.control.size());
    if (m == 0) ++out.strata_without_pairs;
    out.unpaired += g.treatment.size() + g.control.size() - 2 * m;
    for (std::size_t k = 0; k < m; ++k)
      out.pairs.push_back({cohort[g.treatment[k]].id, cohort[g.control[k]].id, g.stratum});
  }
  if (out.pairs.empty()) throw DegenerateError("no pairs formable: an arm is empty in every stratum");
  return out;
}

struct CrossPair {
  int treatment_id = 0;
  int control_id = 0;
  int stratum = 0;
};

// Visits every treatment x control pair (within strata when `stratified`)
// as fn(treatment_index, control_index, stratum).
template <class Fn>
void for_each_cross_pair(std::span<const PatientRecord> cohort, bool stratified, Fn&& fn) {
  for (const auto& g : group_by_stratum(cohort, stratified))
    for (std::size_t t : g.treatment)
      for (std::size_t c : g.control) fn(t, c, g.stratum);
}

inline std::vector<CrossPair> all_cross_pairs(std::span<const PatientRecord> cohort, bool stratified) {
  std::vector<CrossPair> out;
  for_each_cross_pair(cohort, stratified, [&](std::size_t t, std::size_t c, int s) {
    out.push_back({cohort[t].id, cohort[c].id, s});
  });
  return out;
}

}  // namespace winratio
