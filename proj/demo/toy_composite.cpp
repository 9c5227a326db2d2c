// Two-component toy composite: every drug patient responds to A but not B,
// half the placebo patients respond to both and half to neither.
//
// "A or B" makes the drug look twice as good as placebo, yet the drug is
// worse on B. Prioritized and counting win rules expose what drives the
// composite.

#include <cstdio>

#include "winratio/core.hpp"
#include "winratio/wr_tests.hpp"

using namespace winratio;

namespace {

// Event indicators are "no response" so that 1 is the bad outcome, as in the
// death/hospitalization pair: y_death <-> missed A, x_hosp <-> missed B.
Cohort toy_cohort(int per_arm) {
  Cohort c;
  for (int i = 0; i < 2 * per_arm; ++i) {
    PatientRecord p;
    p.id = i;
    p.arm = i < per_arm ? Arm::Treatment : Arm::Control;
    const bool responds_both = p.arm == Arm::Control && (i - per_arm) % 2 == 0;
    if (p.arm == Arm::Treatment)
      p.outcome = BinaryOutcome{false, true};
    else
      p.outcome = BinaryOutcome{!responds_both, !responds_both};
    c.push_back(p);
  }
  return c;
}

double response_rate(const Cohort& c, Arm arm, bool (*responded)(const BinaryOutcome&)) {
  int hit = 0, n = 0;
  for (const auto& p : c)
    if (p.arm == arm) {
      ++n;
      hit += responded(outcome_as<BinaryOutcome>(p));
    }
  return static_cast<double>(hit) / n;
}

template <class Rule>
void report(const char* name, const Cohort& c, const Rule& rule) {
  const auto r = fs_unmatched_test(c, false, rule).result;
  std::printf("  %-22s N_w=%3ld N_L=%3ld ties=%3ld  WR=%6.3f  z=%6.3f  p=%.4f\n", name, r.n_w, r.n_l, r.n_tie,
              r.r_w, r.z, r.p_value);
}

}  // namespace

int main() {
  const auto cohort = toy_cohort(10);

  std::printf("response rates       drug   placebo\n");
  const auto either = [](const BinaryOutcome& o) { return !o.y_death || !o.x_hosp; };
  const auto a = [](const BinaryOutcome& o) { return !o.y_death; };
  const auto b = [](const BinaryOutcome& o) { return !o.x_hosp; };
  std::printf("  A or B             %5.2f   %5.2f\n", response_rate(cohort, Arm::Treatment, either),
              response_rate(cohort, Arm::Control, either));
  std::printf("  A                  %5.2f   %5.2f\n", response_rate(cohort, Arm::Treatment, a),
              response_rate(cohort, Arm::Control, a));
  std::printf("  B                  %5.2f   %5.2f\n\n", response_rate(cohort, Arm::Treatment, b),
              response_rate(cohort, Arm::Control, b));

  std::printf("unmatched win ratios over all drug x placebo pairs\n");
  report("A first, then B", cohort, BinaryRule{});
  report("B first, then A", cohort, [](const PatientRecord& x, const PatientRecord& y) {
    const auto& s = outcome_as<BinaryOutcome>(x);
    const auto& t = outcome_as<BinaryOutcome>(y);
    return win_binary({s.x_hosp, s.y_death}, {t.x_hosp, t.y_death});
  });
  report("count of responses", cohort, [](const PatientRecord& x, const PatientRecord& y) {
    const auto& s = outcome_as<BinaryOutcome>(x);
    const auto& t = outcome_as<BinaryOutcome>(y);
    const int cs = !s.y_death + !s.x_hosp, ct = !t.y_death + !t.x_hosp;
    return cs > ct ? WinStatus::Win : cs < ct ? WinStatus::Loss : WinStatus::Tie;
  });
  return 0;
}
