#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hiddenpop/commands.hpp"

using namespace hiddenpop;

namespace {

void add_false_match_options(CLI::App* cmd, FalseMatchOptions& fm) {
  cmd->add_option("--fm-method", fm.method, "False-match expectation: mc or closed")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, FalseMatchMethod>{{"mc", FalseMatchMethod::kMonteCarlo},
                                                  {"closed", FalseMatchMethod::kClosedForm}}));
  cmd->add_option("--fm-trials", fm.mc_trials, "Monte Carlo draws for the false-match expectation")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-population size estimation from RDS capture/recapture surveys"};
  app.require_subcommand(1);

  GenerateArgs generate;
  auto* gen = app.add_subcommand("generate", "Generate a random population graph");
  gen->add_option("--family", generate.family, "Graph family: ba or er")->check(CLI::IsMember({"ba", "er"}));
  gen->add_option("--n", generate.n, "Vertex count")->required();
  gen->add_option("--attach", generate.attach, "Edges per new vertex (ba)");
  gen->add_option("--mean-degree", generate.mean_degree, "Expected degree (er)");
  gen->add_option("--seed", generate.seed, "Random seed");
  gen->add_option("-o,--output", generate.output, "Edge-list file (default: stdout)");

  SimulateArgs simulate;
  bool no_bootstrap = false;
  std::string bootstrap_mode = "restrict";
  auto* sim = app.add_subcommand("simulate", "Run one capture/recapture trial on a graph");
  sim->add_option("--graph", simulate.graph, "Edge-list file")->required();
  sim->add_option("--n0", simulate.params.capture_size, "Target capture size");
  sim->add_option("--s", simulate.params.seeds, "Initial seeds");
  sim->add_option("--c", simulate.params.coupons, "Coupons per subject");
  sim->add_option("--p", simulate.params.max_reports, "Reports per subject");
  sim->add_option("--m", simulate.params.hash_space, "Hash space size");
  sim->add_flag("--no-bootstrap", no_bootstrap, "Skip the bootstrapped estimate");
  sim->add_option("--alpha", simulate.alpha, "Bootstrap replay fraction");
  sim->add_option("--kappa", simulate.kappa, "Bootstrap replicates");
  sim->add_option("--bootstrap-mode", bootstrap_mode, "restrict (recorded reports) or resample")
      ->check(CLI::IsMember({"restrict", "resample"}));
  add_false_match_options(sim, simulate.false_matches);
  sim->add_option("--seed", simulate.seed, "Trial seed");
  sim->add_option("--json", simulate.json, "Write JSON detail to this file");
  sim->add_option("--export-survey", simulate.export_survey, "Write the hashed survey CSV to this file");

  SweepArgs sweep;
  auto* swp = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
  swp->add_option("config", sweep.config, "Sweep config file")->required();
  swp->add_option("-o,--output", sweep.output, "Cell CSV (default: stdout)");
  swp->add_option("--trials-csv", sweep.trials_csv, "Per-trial long-format CSV");
  swp->add_option("--threads", sweep.threads, "Worker threads (0: all cores)");
  swp->add_option("--seed", sweep.master_seed, "Override master_seed");
  swp->add_flag("-q,--quiet", sweep.quiet, "Suppress progress lines");

  EstimateArgs estimate;
  auto* est = app.add_subcommand("estimate", "Estimate population size from a hashed field survey");
  est->add_option("--survey", estimate.survey, "Survey CSV")->required();
  auto* m_opt = est->add_option("--m", estimate.hash_space, "Hash space size");
  est->add_option("--digits", estimate.telefunken_digits, "Telefunken digit count d (m = 4^d)")->excludes(m_opt);
  est->add_option("--s", estimate.seeds, "Seeds used when replaying the coupon forest");
  est->add_option("--c", estimate.coupons, "Coupons used when replaying the coupon forest");
  est->add_option("--p", estimate.max_reports, "Maximum reports per record");
  est->add_option("--alpha", estimate.alpha, "Bootstrap replay fraction");
  est->add_option("--kappa", estimate.kappa, "Bootstrap replicates");
  add_false_match_options(est, estimate.false_matches);
  est->add_option("--seed", estimate.seed, "Trial seed");
  est->add_option("--json", estimate.json, "Write JSON detail to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*gen) return cmd_generate(generate, std::cout, std::cerr);
  if (*sim) {
    simulate.bootstrap = !no_bootstrap;
    simulate.bootstrap_mode = bootstrap_mode == "resample" ? BootstrapMode::kResample : BootstrapMode::kRestrict;
    return cmd_simulate(simulate, std::cout, std::cerr);
  }
  if (*swp) return cmd_sweep(sweep, std::cout, std::cerr);
  return cmd_estimate(estimate, std::cout, std::cerr);
}
