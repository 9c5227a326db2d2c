// One simulated trial with a treatment effect on death only, analyzed five
// ways, then again with the priority of the components reversed.
//
//   survival_walkthrough [seed] [n]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "winratio/classic_tests.hpp"
#include "winratio/datagen.hpp"
#include "winratio/json_io.hpp"
#include "winratio/wr_tests.hpp"

using namespace winratio;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  const int n = argc > 2 ? std::atoi(argv[2]) : 200;

  SurvivalGenConfig gen;
  gen.n = n;
  gen.beta_in = std::log(0.18);
  gen.beta_cov1 = -0.5;
  gen.beta_cov2 = 0.5;
  Rng rng(seed);
  const auto cohort = gen_survival_cohort(gen, rng);

  int deaths_first = 0;
  for (const auto& p : cohort) {
    const auto& o = outcome_as<SurvivalOutcome>(p);
    deaths_first += o.e_death < o.e_hosp;
  }
  std::printf("n=%d, death is the first event for %d patients\n\n", n, deaths_first);

  const auto cox = cox_fit(cohort);
  std::printf("Cox on time to first event: HR %.3f (%.3f, %.3f), p=%.4f, %d Newton steps\n", cox.hr, cox.ci_low,
              cox.ci_high, cox.p_value, cox.iterations);
  const auto ob = obrien_test(cohort);
  std::printf("O'Brien rank-sum-type:      F %.3f on (%d, %d), p=%.4f\n\n", ob.f_stat, ob.df_between, ob.df_within,
              ob.p_value);

  for (auto priority : {SurvivalPriority::DeathFirst, SurvivalPriority::HospitalizationFirst}) {
    const SurvivalRule rule{priority};
    Rng pairing(seed + 1);
    std::printf("win ratios, %s\n", to_string(priority));
    std::cout << to_json(matched_wr_test(form_matched_pairs(cohort, true, pairing), cohort, rule)).dump() << '\n';
    std::cout << to_json(fs_unmatched_test(cohort, true, rule).result).dump() << '\n';
    std::cout << to_json(fs_unmatched_test(cohort, false, rule).result).dump() << "\n\n";
  }
  return 0;
}
