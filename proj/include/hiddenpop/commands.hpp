#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "hiddenpop/estimators.hpp"
#include "hiddenpop/experiments.hpp"

namespace hiddenpop {

// Process exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;  // bad arguments, unreadable or malformed input
inline constexpr int kExitPathology = 3;   // the requested estimate could not be produced

struct GenerateArgs {
  std::string family = "ba";
  std::size_t n = 0;
  std::size_t attach = 3;
  double mean_degree = 6.0;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> output;  // edge list goes to `out` when unset
};

struct SimulateArgs {
  std::filesystem::path graph;
  TrialParams params;
  bool bootstrap = true;
  double alpha = 0.9;
  std::size_t kappa = 100;
  FalseMatchOptions false_matches;
  BootstrapMode bootstrap_mode = BootstrapMode::kRestrict;
  std::uint64_t seed = 1;  // trial seed; every stage seed derives from it
  std::optional<std::filesystem::path> json;
  std::optional<std::filesystem::path> export_survey;
};

struct SweepArgs {
  std::filesystem::path config;
  std::optional<std::filesystem::path> output;  // cell CSV goes to `out` when unset
  std::optional<std::filesystem::path> trials_csv;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> master_seed;
  bool quiet = false;
};

struct EstimateArgs {
  std::filesystem::path survey;
  std::optional<std::size_t> hash_space;
  std::optional<unsigned> telefunken_digits;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> coupons;
  std::optional<std::size_t> max_reports;
  double alpha = 0.9;
  std::size_t kappa = 100;
  FalseMatchOptions false_matches;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> json;
};

// Sweeps with more trials than this print a runtime warning.
inline constexpr std::size_t kLargeSweepTrials = 2000;

// Each command writes its report to `out`, diagnostics to `err`, and
// returns an exit code. Errors are reported, not thrown.
int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace hiddenpop
