#pragma once

// Seeded synthetic cohorts for the three outcome families.
//
// Survival times use the inverse cumulative hazard transform with a unit
// exponential baseline, H0(t) = t, so E = -log(u) * exp(-x'beta) and the
// proportional-hazards model holds exactly. No censoring.
//
// Continuous outcomes follow an additive placebo + drug model gated by a
// latent responder class (see SubpopMix):
//   y_j = y_base + [placebo responder] * beta_pj
//               + [drug arm][drug responder] * (beta_tj - beta_pj) + eps_j
// so a full responder on drug sees beta_tj, a placebo responder on placebo
// sees beta_pj, and beta_t == beta_p is an exact null for any mixture.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "winratio/core.hpp"
#include "winratio/errors.hpp"
#include "winratio/random.hpp"

namespace winratio {

// ---------------------------------------------------------------- binary ---

struct BinaryGenConfig {
  double p_t = 0.5;  // P(death), treatment
  double q_t = 0.5;  // P(hospitalization), treatment
  double p_c = 0.5;
  double q_c = 0.5;
  int n1 = 100;
  int n0 = 100;

  void validate() const {
    for (double p : {p_t, q_t, p_c, q_c})
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("binary rates must lie in [0, 1]");
    if (n1 < 0 || n0 < 0) throw ConfigError("arm sizes must be nonnegative");
  }
};

// Death and hospitalization drawn independently per patient. Covariates are
// Bernoulli(0.5) and unrelated to outcome; they only define strata.
inline Cohort gen_binary_cohort(const BinaryGenConfig& cfg, Rng& rng) {
  cfg.validate();
  Cohort out;
  out.reserve(static_cast<std::size_t>(cfg.n1 + cfg.n0));
  for (int i = 0; i < cfg.n1 + cfg.n0; ++i) {
    PatientRecord p;
    p.id = i;
    p.arm = i < cfg.n1 ? Arm::Treatment : Arm::Control;
    p.covariates = {rng.bernoulli(0.5), rng.bernoulli(0.5)};
    p.stratum = stratify(p.covariates);
    const bool t = p.arm == Arm::Treatment;
    BinaryOutcome o;
    o.y_death = rng.bernoulli(t ? cfg.p_t : cfg.p_c);
    o.x_hosp = rng.bernoulli(t ? cfg.q_t : cfg.q_c);
    p.outcome = o;
    out.push_back(p);
  }
  return out;
}

// ------------------------------------------------------------ allocation ---

// Complete randomization with a fixed treatment count round(n * allocation),
// kept within [1, n-1] when n >= 2.
inline std::vector<Arm> assign_arms(int n, double allocation, Rng& rng) {
  if (n <= 0) return {};
  auto n_t = static_cast<int>(std::lround(n * allocation));
  if (n >= 2) n_t = std::clamp(n_t, 1, n - 1);
  std::vector<Arm> arms(static_cast<std::size_t>(n), Arm::Control);
  std::fill_n(arms.begin(), n_t, Arm::Treatment);
  rng.shuffle(std::span<Arm>(arms));
  return arms;
}

// -------------------------------------------------------------- survival ---

struct SurvivalGenConfig {
  double beta_t = 0.0;        // log-HR of treatment on hospitalization
  double beta_in = 0.0;       // extra log-HR of treatment on death
  double beta_dhratio = 0.0;  // death-hospitalization link, death predictor only
  double beta_cov1 = 0.0;
  double beta_cov2 = 0.0;
  int n = 200;
  double allocation = 0.5;

  void validate() const {
    if (n < 2) throw ConfigError("survival cohort needs n >= 2");
    if (!(allocation > 0.0 && allocation < 1.0)) throw ConfigError("allocation must lie in (0, 1)");
  }
};

// Inverse cumulative hazard with H0(t) = t. Zero only for u = 1, which the
// generator never passes (it draws u from the open interval).
inline double survival_event_time(double u, double linear_predictor) {
  return -std::log(u) * std::exp(-linear_predictor);
}

// Uniform(0,1) centered and scaled to mean 0, variance 1.
inline double standardized_uniform(Rng& rng) { return (rng.uniform() - 0.5) * std::sqrt(12.0); }

inline Cohort gen_survival_cohort(const SurvivalGenConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto arms = assign_arms(cfg.n, cfg.allocation, rng);
  Cohort out;
  out.reserve(arms.size());
  for (int i = 0; i < cfg.n; ++i) {
    PatientRecord p;
    p.id = i;
    p.arm = arms[static_cast<std::size_t>(i)];
    p.covariates = {rng.bernoulli(0.5), rng.bernoulli(0.5)};
    p.stratum = stratify(p.covariates);
    const double x_t = p.arm == Arm::Treatment ? 1.0 : 0.0;
    const double x_dh = standardized_uniform(rng);
    const double cov = cfg.beta_cov1 * p.covariates.x_cov1 + cfg.beta_cov2 * p.covariates.x_cov2;
    const double lp_hosp = cfg.beta_t * x_t + cov;
    const double lp_death = (cfg.beta_t + cfg.beta_in) * x_t + cfg.beta_dhratio * x_dh + cov;
    SurvivalOutcome o;
    o.e_hosp = survival_event_time(rng.uniform_open(), lp_hosp);
    o.e_death = survival_event_time(rng.uniform_open(), lp_death);
    p.outcome = o;
    out.push_back(p);
  }
  return out;
}

// ------------------------------------------------------------ continuous ---

// Latent responder classes of the overall population.
enum class Subpop : std::uint8_t {
  PlaceboAndDrug = 0,  // p1
  PlaceboOnly = 1,     // p2
  DrugOnly = 2,        // p3, the enrichment target
  Neither = 3,         // p4
};

constexpr bool placebo_responder(Subpop s) noexcept { return s == Subpop::PlaceboAndDrug || s == Subpop::PlaceboOnly; }
constexpr bool drug_responder(Subpop s) noexcept { return s == Subpop::PlaceboAndDrug || s == Subpop::DrugOnly; }

struct SubpopMix {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  void validate() const {
    double sum = 0.0;
    for (double v : p) {
      if (!(v >= 0.0)) throw ConfigError("subpopulation probabilities must be nonnegative");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw ConfigError("subpopulation probabilities must sum to 1");
  }

  Subpop draw(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      acc += p[k];
      if (u < acc) return static_cast<Subpop>(k);
    }
    return Subpop::Neither;
  }
};

struct ContinuousGenConfig {
  std::array<double, 3> beta_p{-1.5, -1.5, -1.5};
  double beta_t1 = -1.5;
  double beta_in2 = 0.0;
  double beta_in3 = 0.0;
  double beta_cov1 = 5.0;
  double beta_cov2 = 5.0;
  double noise_sd = 1.0;  // eps ~ N(0, noise_sd^2), independent across components
  int n = 200;

  std::array<double, 3> drug_effects() const { return {beta_t1, beta_t1 + beta_in2, beta_t1 + beta_in3}; }

  void validate() const {
    if (n < 2) throw ConfigError("continuous cohort needs n >= 2");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw ConfigError("noise_sd must be finite and >= 0");
    if (!(beta_cov1 > 0.0 || beta_cov2 > 0.0))
      throw ConfigError("y_base = beta_cov1*x1 + beta_cov2*x2 can never be positive");
  }
};

// Patient-level quantities that persist across lead-in and stages.
struct ContinuousProfile {
  int id = 0;
  Covariates covariates;
  int stratum = 0;
  double y_base = 1.0;
  Subpop subpop = Subpop::Neither;
};

inline ContinuousProfile draw_continuous_profile(int id, const ContinuousGenConfig& cfg, const SubpopMix& mix,
                                                 Rng& rng) {
  ContinuousProfile p;
  p.id = id;
  do {
    p.covariates = {rng.bernoulli(0.5), rng.bernoulli(0.5)};
    p.y_base = cfg.beta_cov1 * p.covariates.x_cov1 + cfg.beta_cov2 * p.covariates.x_cov2;
  } while (!(p.y_base > 0.0));
  p.stratum = stratify(p.covariates);
  p.subpop = mix.draw(rng);
  return p;
}

// One fresh measurement of the three components under `arm`.
inline ContinuousOutcome draw_continuous_response(const ContinuousProfile& p, Arm arm,
                                                  const ContinuousGenConfig& cfg, Rng& rng) {
  const auto beta_t = cfg.drug_effects();
  ContinuousOutcome o;
  o.y_base = p.y_base;
  for (std::size_t j = 0; j < 3; ++j) {
    double effect = placebo_responder(p.subpop) ? cfg.beta_p[j] : 0.0;
    if (arm == Arm::Treatment && drug_responder(p.subpop)) effect += beta_t[j] - cfg.beta_p[j];
    o.y[j] = effect + p.y_base + cfg.noise_sd * rng.normal();
  }
  return o;
}

inline PatientRecord make_record(const ContinuousProfile& p, Arm arm, const ContinuousOutcome& o) {
  PatientRecord r;
  r.id = p.id;
  r.arm = arm;
  r.covariates = p.covariates;
  r.stratum = p.stratum;
  r.outcome = o;
  return r;
}

struct LabelledPatient {
  PatientRecord record;
  Subpop subpop = Subpop::Neither;
};

inline std::vector<ContinuousProfile> draw_continuous_profiles(const ContinuousGenConfig& cfg, const SubpopMix& mix,
                                                               Rng& rng) {
  std::vector<ContinuousProfile> out;
  out.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) out.push_back(draw_continuous_profile(i, cfg, mix, rng));
  return out;
}

// Single-stage 1:1 cohort.
inline std::vector<LabelledPatient> gen_continuous_cohort(const ContinuousGenConfig& cfg, const SubpopMix& mix,
                                                          Rng& rng) {
  cfg.validate();
  mix.validate();
  const auto profiles = draw_continuous_profiles(cfg, mix, rng);
  const auto arms = assign_arms(cfg.n, 0.5, rng);
  std::vector<LabelledPatient> out;
  out.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i)
    out.push_back({make_record(profiles[i], arms[i], draw_continuous_response(profiles[i], arms[i], cfg, rng)),
                   profiles[i].subpop});
  return out;
}

// -------------------------------------------------------------------- csv ---

// One row per patient; header always written. `subpops`, when nonempty, adds
// a trailing subpop column (1..4).
inline void write_cohort_csv(std::ostream& os, std::span<const PatientRecord> cohort,
                             std::span<const Subpop> subpops = {}) {
  if (cohort.empty()) {
    os << "id,arm,x_cov1,x_cov2,stratum\n";
    return;
  }
  os << "id,arm,x_cov1,x_cov2,stratum";
  const auto& first = cohort.front().outcome;
  if (std::holds_alternative<BinaryOutcome>(first))
    os << ",y_death,x_hosp";
  else if (std::holds_alternative<SurvivalOutcome>(first))
    os << ",e_death,e_hosp";
  else
    os << ",y_base,y_1,y_2,y_3";
  if (!subpops.empty()) os << ",subpop";
  os << '\n';

  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& p = cohort[i];
    os << p.id << ',' << to_string(p.arm) << ',' << int{p.covariates.x_cov1} << ',' << int{p.covariates.x_cov2}
       << ',' << p.stratum;
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, BinaryOutcome>)
            os << ',' << int{o.y_death} << ',' << int{o.x_hosp};
          else if constexpr (std::is_same_v<T, SurvivalOutcome>)
            os << ',' << o.e_death << ',' << o.e_hosp;
          else
            os << ',' << o.y_base << ',' << o.y[0] << ',' << o.y[1] << ',' << o.y[2];
        },
        p.outcome);
    if (!subpops.empty()) os << ',' << static_cast<int>(subpops[i]) + 1;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace winratio
