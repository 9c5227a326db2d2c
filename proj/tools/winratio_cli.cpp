// winratio: simulate scenarios, closed-form sample sizes, table reproduction
// and cohort export.
//
// Exit codes: 0 success, 2 configuration error, 3 only degenerate results.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "winratio/datagen.hpp"
#include "winratio/harness.hpp"
#include "winratio/json_io.hpp"
#include "winratio/power.hpp"

namespace {

using namespace winratio;

constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write to " + path);
  return out;
}

void write_summary_csv(std::ostream& os, const McSummary& s) {
  os << "analysis,rejection_rate,mean_estimate,mean_ci_low,mean_ci_high,reps_used,degenerate_count\n";
  for (const auto& a : s.analyses)
    os << to_string(a.analysis) << ',' << a.rejection_rate << ',' << a.mean_estimate << ',' << a.mean_ci_low << ','
       << a.mean_ci_high << ',' << a.reps_used << ',' << a.degenerate_count << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& csv_path, unsigned workers) {
  const auto cfg = parse_scenario_config(read_file(config_path));
  const auto summary = monte_carlo(cfg, {workers});
  Json out{{"config", to_json(cfg)}, {"summary", to_json(summary)}};
  std::cout << out.dump(2) << '\n';
  if (!csv_path.empty()) {
    auto csv = open_out(csv_path);
    write_summary_csv(csv, summary);
  }
  return all_degenerate(summary) ? kExitDegenerate : 0;
}

struct PowerArgs {
  bool matched = false;
  bool unmatched = false;
  double pt = 0, qt = 0, pc = 0, qc = 0;
  double alpha = 0.05;
  double power = 0.8;
  double allocation = 0.5;
};

int cmd_power(const PowerArgs& a) {
  if (a.matched == a.unmatched) throw ConfigError("power: pass exactly one of --matched / --unmatched");
  const auto probs = matched_win_probs(a.pt, a.qt, a.pc, a.qc);
  const double g = probs.p_l > 0.0 ? probs.p_w / probs.p_l : kInf;
  Json out;
  if (a.matched) {
    if (!(probs.p_w + probs.p_l > 0.0)) throw ConfigError("power: every pair ties, no informative pairs");
    const double p_a = probs.p_w / (probs.p_w + probs.p_l);
    const auto s = matched_sample_size(p_a, probs.p_tie, a.alpha, a.power);
    out = {{"method", "matched"},    {"n", s.n},         {"N", s.N},
           {"p_w", probs.p_w},       {"p_l", probs.p_l}, {"p_tie", probs.p_tie},
           {"g", number_json(g)},    {"C0", nullptr},    {"C1", nullptr},
           {"p_a", p_a},             {"alpha", a.alpha}, {"power", a.power}};
  } else {
    const auto s = unmatched_sample_size(ThetaBinary::from_rates(a.pt, a.qt, a.pc, a.qc), a.alpha, a.power,
                                         a.allocation);
    out = {{"method", "unmatched"}, {"n", s.n_t},          {"N", s.n_t},          {"p_w", probs.p_w},
           {"p_l", probs.p_l},      {"p_tie", probs.p_tie}, {"g", s.g1},           {"C0", s.c0},
           {"C1", s.c1},            {"n1", s.n1},           {"n0", s.n0},          {"alpha", a.alpha},
           {"power", a.power}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_reproduce(const std::string& id, int reps, std::uint64_t seed, const std::string& csv_path, unsigned workers) {
  const auto rep = reproduce_table(id, {reps, seed, workers});
  print_table(std::cout, rep);
  std::cout << '\n';
  write_table_csv(std::cout, rep);
  if (!csv_path.empty()) {
    auto csv = open_out(csv_path);
    write_table_csv(csv, rep);
  }
  return 0;
}

int cmd_gen(const std::string& config_path, const std::string& out_path) {
  const auto cfg = parse_scenario_config(read_file(config_path));
  const auto seed = replicate_seed(cfg.master_seed, 0);
  auto out = open_out(out_path);
  if (cfg.design == Design::SED) {
    write_cohort_csv(out, generate_sed_cohort(cfg, seed).cohort);
  } else {
    std::vector<Subpop> subpops;
    const auto cohort = generate_parallel_cohort(cfg, seed, &subpops);
    write_cohort_csv(out, cohort, subpops);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Win-ratio estimators, comparator tests, sample sizes and design simulation"};
  app.require_subcommand(1);

  unsigned workers = 0;
  std::string config_path, csv_path, out_path, table_id;
  int reps = 2000;
  std::uint64_t seed = 20240601;
  PowerArgs pa;

  auto* sim = app.add_subcommand("simulate", "Run one scenario config and print the Monte Carlo summary as JSON");
  sim->add_option("--config", config_path, "Scenario config (JSON)")->required();
  sim->add_option("--csv", csv_path, "Also write the per-analysis summary as CSV");
  sim->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* pow = app.add_subcommand("power", "Closed-form sample size for the binary prioritized composite");
  std::string family = "binary";
  pow->add_option("--family", family, "Outcome family (only binary)")->check(CLI::IsMember({"binary"}));
  pow->add_flag("--matched", pa.matched, "Matched pairs, win-proportion formula");
  pow->add_flag("--unmatched", pa.unmatched, "All cross-arm pairs, delta-method formula");
  pow->add_option("--pt", pa.pt, "Death rate, treatment")->required();
  pow->add_option("--qt", pa.qt, "Hospitalization rate, treatment")->required();
  pow->add_option("--pc", pa.pc, "Death rate, control")->required();
  pow->add_option("--qc", pa.qc, "Hospitalization rate, control")->required();
  pow->add_option("--alpha", pa.alpha, "Two-sided level")->capture_default_str();
  pow->add_option("--power", pa.power, "Target power")->capture_default_str();
  pow->add_option("--allocation", pa.allocation, "Treatment fraction (unmatched)")->capture_default_str();

  auto* rep = app.add_subcommand("reproduce-table", "Simulate a published table preset and compare cell by cell");
  rep->add_option("table", table_id, "t3 .. t14")->required();
  rep->add_option("--reps", reps, "Replicates per column")->capture_default_str();
  rep->add_option("--seed", seed, "Master seed")->capture_default_str();
  rep->add_option("--csv", csv_path, "Also write the cell CSV to a file");
  rep->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* gen = app.add_subcommand("gen", "Write one synthetic cohort to CSV");
  gen->add_option("--config", config_path, "Scenario config (JSON)")->required();
  gen->add_option("--out", out_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(config_path, csv_path, workers);
    if (*pow) return cmd_power(pa);
    if (*rep) return cmd_reproduce(table_id, reps, seed, csv_path, workers);
    if (*gen) return cmd_gen(config_path, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
