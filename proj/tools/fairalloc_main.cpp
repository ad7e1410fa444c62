#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairalloc/config.hpp"
#include "fairalloc/generators.hpp"
#include "fairalloc/json_io.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/numeric.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/solvers.hpp"

namespace {

using fairalloc::Allocation;
using fairalloc::AllocationMode;
using fairalloc::Instance;
using fairalloc::OracleResult;
using fairalloc::SolveReport;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitVerifyMismatch = 2;

void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      throw std::invalid_argument("cannot write to " + out_path);
    }
    out << text;
  }
}

std::vector<double> parse_allocation(const std::string& csv, std::size_t n) {
  std::vector<double> amounts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const double value = std::stod(item, &pos);
    amounts.push_back(value);
  }
  if (amounts.size() != n) {
    throw std::invalid_argument("--allocation needs one amount per group (" +
                                std::to_string(n) + " expected)");
  }
  for (double a : amounts) {
    if (!(a >= 0.0)) {
      throw std::invalid_argument("--allocation amounts must be >= 0");
    }
  }
  return amounts;
}

double grid_step_for(const Instance& inst, double preferred) {
  double step = preferred;
  const double dims = static_cast<double>(inst.size()) - 1.0;
  while (std::pow(inst.budget / step + 1.0, dims) > 1e7) step *= 2.0;
  return step;
}

double lipschitz_slack(const Instance& inst, double step) {
  double slack = 0.0;
  for (const auto& g : inst.groups) slack += g.demand.survival(0.0) * step;
  return slack;
}

// Appends oracle-agreement diagnostics; returns false on disagreement.
bool verify_solve(const Instance& inst, const std::string& objective,
                  double epsilon, const SolveReport& report,
                  nlohmann::json& verification) {
  const double value_tol = 1e-9 * std::max(1.0, std::abs(report.utilization));
  if (inst.mode == AllocationMode::kInteger) {
    if (objective == "fair") {
      verification = {{"note", "solver side is already the exhaustive oracle"},
                      {"agree", true}};
      return true;
    }
    const OracleResult oracle = fairalloc::exhaustive_discrete_max(inst);
    const double diff = std::abs(oracle.best_value - report.utilization);
    verification = {{"oracle", "exhaustive_discrete_max"},
                    {"oracle_value", fairalloc::numeric::round12(oracle.best_value)},
                    {"difference", fairalloc::numeric::round12(diff)},
                    {"agree", diff <= value_tol}};
    return diff <= value_tol;
  }
  const double step = grid_step_for(inst, 1e-3);
  const double slack = lipschitz_slack(inst, step) + 1e-9;
  std::optional<double> eps_filter;
  if (objective == "fair") eps_filter = epsilon;
  const OracleResult oracle = fairalloc::grid_fractional(inst, eps_filter, step);
  if (!oracle.feasible) {
    verification = {{"oracle", "grid_fractional"},
                    {"note", "no grid point satisfies the fairness filter"},
                    {"agree", true}};
    return true;
  }
  const bool not_worse = report.utilization >= oracle.best_value - value_tol;
  const bool not_impossible = report.utilization <= oracle.best_value + slack;
  verification = {{"oracle", "grid_fractional"},
                  {"step", fairalloc::numeric::round12(step)},
                  {"oracle_value", fairalloc::numeric::round12(oracle.best_value)},
                  {"slack", fairalloc::numeric::round12(slack)},
                  {"agree", not_worse && not_impossible}};
  return not_worse && not_impossible;
}

int cmd_solve(const std::string& scenario_path, const std::string& objective,
              double epsilon, bool verify, const std::string& out_path,
              const std::string& format) {
  const Instance inst = fairalloc::load_scenario(scenario_path);
  SolveReport report;
  if (objective == "max") {
    report = fairalloc::solve_max_utilization(inst);
  } else if (inst.mode == AllocationMode::kInteger) {
    const OracleResult fair = fairalloc::exhaustive_discrete_fair(inst, epsilon);
    report = fairalloc::make_report(inst, fair.best_allocation, std::nullopt, 0);
  } else {
    report = fairalloc::fair_band(inst, epsilon);
  }

  bool agree = true;
  nlohmann::json verification;
  if (verify) {
    agree = verify_solve(inst, objective, epsilon, report, verification);
  }

  if (format == "csv") {
    std::string text = fairalloc::solve_report_to_csv(inst, report);
    if (verify) {
      text += std::string("verification,,,,,,") + (agree ? "ok" : "mismatch") + "\n";
    }
    emit(text, out_path);
  } else {
    nlohmann::json doc = fairalloc::solve_report_to_json(inst, report);
    if (verify) doc["verification"] = verification;
    emit(doc.dump(2) + "\n", out_path);
  }
  return agree ? kExitOk : kExitVerifyMismatch;
}

int cmd_pof(const std::string& scenario_path, double epsilon,
            const std::string& out_path, const std::string& format) {
  const Instance inst = fairalloc::load_scenario(scenario_path);
  const fairalloc::PofReport report = fairalloc::price_of_fairness(inst, epsilon);
  if (format == "csv") {
    emit(fairalloc::pof_report_to_csv(report), out_path);
  } else {
    emit(fairalloc::pof_report_to_json(report).dump(2) + "\n", out_path);
  }
  return kExitOk;
}

int cmd_generate(const std::string& kind, double rho, double epsilon, double k,
                 double p1, const std::string& out_path) {
  fairalloc::AdversarialResult result;
  if (kind == "discrete") {
    result = fairalloc::adversarial_discrete(epsilon, rho);
  } else if (kind == "fractional") {
    result = fairalloc::adversarial_fractional(rho, k, p1);
  } else {
    throw std::invalid_argument("--kind must be discrete or fractional");
  }
  const double measured = fairalloc::measured_pof(result);
  emit(fairalloc::adversarial_to_json(result, measured).dump(2) + "\n", out_path);
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& alloc_csv,
                 std::int64_t reps, std::uint64_t seed, int threads,
                 const std::string& out_path, const std::string& format) {
  const Instance inst = fairalloc::load_scenario(scenario_path);
  Allocation alloc{parse_allocation(alloc_csv, inst.size())};
  const fairalloc::MonteCarloResult result =
      fairalloc::monte_carlo(inst, alloc, reps, seed, threads);
  if (format == "csv") {
    emit(fairalloc::monte_carlo_to_csv(inst, result), out_path);
  } else {
    emit(fairalloc::monte_carlo_to_json(inst, result).dump(2) + "\n", out_path);
  }
  return kExitOk;
}

int cmd_check_family(const std::string& scenario_path, int grid_points,
                     const std::string& out_path) {
  const Instance inst = fairalloc::load_scenario(scenario_path);
  const bool scaled = fairalloc::scaled_family_check(inst, grid_points);
  nlohmann::json doc = {{"scaled_family", scaled}, {"grid_points", grid_points}};
  emit(doc.dump(2) + "\n", out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* tol = std::getenv("FAIRALLOC_TOL")) {
    try {
      const double factor = std::stod(tol);
      if (!(factor > 0.0)) throw std::invalid_argument("nonpositive");
      fairalloc::tolerances().residual_factor = factor;
    } catch (const std::exception&) {
      std::cerr << "FAIRALLOC_TOL must be a positive number\n";
      return kExitInputError;
    }
  }

  CLI::App app{"Budget allocation under stochastic demand: max-utilization "
               "and epsilon-fair solvers, price-of-fairness reports, "
               "adversarial generators and simulation"};
  app.require_subcommand(1);

  std::string scenario;
  std::string objective = "max";
  double epsilon = 0.0;
  bool verify = false;
  std::string out_path;
  std::string format = "json";

  CLI::App* solve = app.add_subcommand("solve", "Solve a scenario");
  solve->add_option("scenario", scenario, "Scenario JSON file")->required();
  solve->add_option("--objective", objective, "max or fair")
      ->check(CLI::IsMember({"max", "fair"}));
  solve->add_option("--epsilon", epsilon, "Fairness level for --objective fair")
      ->check(CLI::Range(0.0, 1.0));
  solve->add_flag("--verify", verify, "Cross-check against the matching oracle");
  solve->add_option("--out", out_path, "Also write the report to this file");
  solve->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string pof_scenario;
  double pof_epsilon = 0.0;
  std::string pof_out;
  std::string pof_format = "json";
  CLI::App* pof = app.add_subcommand("pof", "Price of Fairness report");
  pof->add_option("scenario", pof_scenario, "Scenario JSON file")->required();
  pof->add_option("--epsilon", pof_epsilon, "Fairness level")
      ->check(CLI::Range(0.0, 1.0));
  pof->add_option("--out", pof_out, "Also write the report to this file");
  pof->add_option("--format", pof_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string gen_kind;
  double gen_rho = 2.0;
  double gen_epsilon = 0.5;
  double gen_k = 1.0;
  double gen_p1 = 0.5;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand(
      "generate", "Construct an adversarial instance with PoF > rho");
  gen->add_option("--kind", gen_kind, "discrete or fractional")
      ->required()
      ->check(CLI::IsMember({"discrete", "fractional"}));
  gen->add_option("--rho", gen_rho, "Target PoF lower bound")->required();
  gen->add_option("--epsilon", gen_epsilon, "Fairness level (discrete kind)");
  gen->add_option("--k", gen_k, "Fair-side budget multiplier (fractional kind)");
  gen->add_option("--p1", gen_p1, "Tail probability p1 (fractional kind)");
  gen->add_option("--out", gen_out, "Also write the scenario to this file");

  std::string sim_scenario;
  std::string sim_alloc;
  std::int64_t sim_reps = 0;
  std::uint64_t sim_seed = 0;
  int sim_threads = 0;
  std::string sim_out;
  std::string sim_format = "json";
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimate of an allocation");
  sim->add_option("scenario", sim_scenario, "Scenario JSON file")->required();
  sim->add_option("--allocation", sim_alloc, "Comma-separated amounts, one per group")
      ->required();
  sim->add_option("--reps", sim_reps, "Number of replicates")->required();
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--threads", sim_threads,
                  "Worker threads (0 = auto; result is identical either way)");
  sim->add_option("--out", sim_out, "Also write the report to this file");
  sim->add_option("--format", sim_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string fam_scenario;
  int fam_grid = 64;
  std::string fam_out;
  CLI::App* fam = app.add_subcommand(
      "check-family", "Test whether the CDFs are mean-scaled copies (predicts PoF 1)");
  fam->add_option("scenario", fam_scenario, "Scenario JSON file")->required();
  fam->add_option("--grid-points", fam_grid, "Quantile grid resolution");
  fam->add_option("--out", fam_out, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(scenario, objective, epsilon, verify, out_path, format);
    }
    if (pof->parsed()) {
      return cmd_pof(pof_scenario, pof_epsilon, pof_out, pof_format);
    }
    if (gen->parsed()) {
      return cmd_generate(gen_kind, gen_rho, gen_epsilon, gen_k, gen_p1, gen_out);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_scenario, sim_alloc, sim_reps, sim_seed,
                          sim_threads, sim_out, sim_format);
    }
    if (fam->parsed()) {
      return cmd_check_family(fam_scenario, fam_grid, fam_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
