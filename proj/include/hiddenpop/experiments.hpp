#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hiddenpop/estimators.hpp"
#include "hiddenpop/graph.hpp"

namespace hiddenpop {

// The five survey parameters.
struct TrialParams {
  std::size_t capture_size = 500;  // n0
  std::size_t seeds = 6;           // s
  std::size_t coupons = 3;         // c
  std::size_t max_reports = 25;    // p
  std::size_t hash_space = 3125;   // m = |H|
};

// Throws std::invalid_argument when any parameter is zero or s > n0.
void validate_params(const TrialParams& params);

enum class SweepParameter { kCaptureSize, kSeeds, kCoupons, kReports, kHashSpace };

// Config/CSV names: "n0", "s", "c", "p", "m".
std::string_view parameter_name(SweepParameter parameter);
std::optional<SweepParameter> parse_parameter(std::string_view name);

TrialParams with_parameter(TrialParams params, SweepParameter parameter, std::size_t value);

struct EstimatorSet {
  bool n1 = true;
  bool n3 = true;
  bool n3_bootstrap = true;
};

// How bootstrap replicates obtain their reports: restrict the recorded ones
// (what a field survey can do) or draw new ones from the graph.
enum class BootstrapMode { kRestrict, kResample };

struct TrialOptions {
  EstimatorSet estimators;
  double alpha = 0.9;
  std::size_t kappa = 100;
  FalseMatchOptions false_matches;
  BootstrapMode bootstrap_mode = BootstrapMode::kRestrict;
};

// Everything one simulated survey produces. `survey` is the hashed view that
// an exported survey file would contain.
struct TrialOutcome {
  RdsForest forest;
  ReportMultiset reports;
  HashedSurvey survey;
  std::vector<EstimateResult> estimates;  // n1, n3, n3-bootstrap as enabled, in that order
};

// One capture + recapture draw on `graph`, a fresh hash over all vertices,
// then the enabled estimators. Stage seeds derive from trial_seed.
TrialOutcome simulate_trial(const Graph& graph, const TrialParams& params, const TrialOptions& options,
                            std::uint64_t trial_seed);

std::vector<EstimateResult> run_trial(const Graph& graph, const TrialParams& params,
                                      const TrialOptions& options, std::uint64_t trial_seed);

enum class GraphFamily { kBarabasiAlbert, kErdosRenyi };

struct ExperimentConfig {
  std::vector<std::size_t> population_sizes{6250, 12500};
  std::size_t graphs_per_size = 3;
  std::size_t trials_per_graph = 30;
  GraphFamily family = GraphFamily::kBarabasiAlbert;
  std::size_t attach = 3;
  double mean_degree = 6.0;
  TrialParams baseline;
  SweepParameter sweep = SweepParameter::kCaptureSize;
  std::vector<std::size_t> sweep_values{500};
  TrialOptions options;
  std::uint64_t master_seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency

  std::size_t total_trials() const;
};

// Throws std::invalid_argument describing the first problem.
void validate_config(const ExperimentConfig& config);

// Declarative config text. `key = value` lines, '#' comments, and exactly
// one `[sweep]` block holding `param` and `values`:
//
//   population_sizes = 6250, 12500
//   graphs_per_size = 3
//   trials_per_graph = 30
//   n0 = 500
//   [sweep]
//   param = n0
//   values = 200, 400, 600, 800, 1000
//
// Unknown keys and malformed values throw ParseError with the line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// The full-scale grid for one sweep: 4 sizes x 10 graphs x 100 trials.
ExperimentConfig full_scale_config(SweepParameter sweep, std::vector<std::size_t> values);

Graph make_population_graph(const ExperimentConfig& config, std::size_t population_size,
                            std::uint64_t graph_seed);

std::uint64_t graph_seed_for(std::uint64_t master_seed, std::size_t population_size, std::size_t graph_index);
std::uint64_t trial_seed_for(std::uint64_t graph_seed, std::size_t trial_index);

struct FlagCounts {
  std::size_t zero_match = 0;
  std::size_t negative_denominator = 0;
  std::size_t clamped_correction = 0;
  std::size_t exhausted_capture = 0;
  std::size_t unrecoverable_denominator = 0;
};

struct CellStats {
  double mean = kNoEstimate;
  double stddev = kNoEstimate;  // sample standard deviation; NaN with fewer than two estimates
  std::size_t n_trials = 0;     // results with a finite positive estimate
  std::size_t n_flagged = 0;    // results without one
  FlagCounts flags;
  bool failed() const { return n_trials == 0; }
};

// Moments over results that carry an estimate; the rest are counted as
// flagged. Throws std::invalid_argument for an empty input.
CellStats aggregate_stats(std::span<const EstimateResult> results);

struct SweepCell {
  std::size_t population_size = 0;
  SweepParameter parameter = SweepParameter::kCaptureSize;
  std::size_t value = 0;
  Variant estimator = Variant::kN1;
  CellStats stats;
};

struct TrialFailure {
  std::size_t population_size = 0;
  std::size_t value = 0;
  std::size_t graph_index = 0;
  std::size_t trial_index = 0;
  std::string what;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<TrialFailure> failures;
};

struct SweepSinks {
  std::ostream* cells_csv = nullptr;   // written and flushed cell by cell
  std::ostream* trials_csv = nullptr;  // long format, one row per estimate
  std::ostream* log = nullptr;         // progress lines
};

// Runs the whole grid. Trials within a cell run in parallel and are merged
// in (graph, trial) order, so output is independent of the thread count.
// The same graphs and trial seeds are reused across sweep values.
SweepResult run_sweep(const ExperimentConfig& config, const SweepSinks& sinks = {});

inline constexpr std::string_view kSweepCsvHeader =
    "pop_size,param,value,estimator,mean,stddev,n_trials,n_flagged";

void write_cell_row(std::ostream& out, const SweepCell& cell);

// Shortest round-trip decimal text for a double ("nan" for NaN).
std::string format_number(double value);

}  // namespace hiddenpop
