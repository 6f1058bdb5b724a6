#include "hiddenpop/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <variant>

#include "hiddenpop/seeding.hpp"

namespace hiddenpop {

namespace {

struct ParameterName {
  SweepParameter parameter;
  std::string_view name;
};

constexpr ParameterName kParameterNames[] = {
    {SweepParameter::kCaptureSize, "n0"}, {SweepParameter::kSeeds, "s"},
    {SweepParameter::kCoupons, "c"},      {SweepParameter::kReports, "p"},
    {SweepParameter::kHashSpace, "m"},
};

// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& worker : workers) worker.join();
}

void tally(FlagCounts& counts, const EstimateFlags& flags) {
  counts.zero_match += flags.zero_match;
  counts.negative_denominator += flags.negative_denominator;
  counts.clamped_correction += flags.clamped_correction;
  counts.exhausted_capture += flags.exhausted_capture;
  counts.unrecoverable_denominator += flags.unrecoverable_denominator;
}

}  // namespace

void validate_params(const TrialParams& params) {
  if (params.capture_size == 0) throw std::invalid_argument("n0 must be >= 1");
  if (params.seeds == 0) throw std::invalid_argument("s must be >= 1");
  if (params.seeds > params.capture_size) throw std::invalid_argument("s must not exceed n0");
  if (params.coupons == 0) throw std::invalid_argument("c must be >= 1");
  if (params.max_reports == 0) throw std::invalid_argument("p must be >= 1");
  if (params.hash_space == 0) throw std::invalid_argument("m must be >= 1");
}

std::string_view parameter_name(SweepParameter parameter) {
  for (const auto& entry : kParameterNames) {
    if (entry.parameter == parameter) return entry.name;
  }
  return "?";
}

std::optional<SweepParameter> parse_parameter(std::string_view name) {
  for (const auto& entry : kParameterNames) {
    if (entry.name == name) return entry.parameter;
  }
  return std::nullopt;
}

TrialParams with_parameter(TrialParams params, SweepParameter parameter, std::size_t value) {
  switch (parameter) {
    case SweepParameter::kCaptureSize: params.capture_size = value; break;
    case SweepParameter::kSeeds: params.seeds = value; break;
    case SweepParameter::kCoupons: params.coupons = value; break;
    case SweepParameter::kReports: params.max_reports = value; break;
    case SweepParameter::kHashSpace: params.hash_space = value; break;
  }
  return params;
}

TrialOutcome simulate_trial(const Graph& graph, const TrialParams& params, const TrialOptions& options,
                            std::uint64_t trial_seed) {
  validate_params(params);
  TrialOutcome outcome;
  outcome.forest = rds_capture(graph, {params.seeds, params.coupons, params.capture_size},
                               derive_seed(trial_seed, Stage::kCapture));
  outcome.reports =
      recapture(graph, outcome.forest, params.max_reports, derive_seed(trial_seed, Stage::kRecapture));
  const auto psi = draw_hash(graph, params.hash_space, derive_seed(trial_seed, Stage::kHash));
  outcome.survey = make_hashed_survey(outcome.forest, outcome.reports, psi);

  if (options.estimators.n1) outcome.estimates.push_back(estimate_n1(outcome.forest, outcome.reports));
  if (options.estimators.n3) {
    auto n3 = hashing_estimate(outcome.survey.capture_codes(), outcome.survey.report_codes(),
                               params.hash_space, options.false_matches,
                               derive_seed(trial_seed, Stage::kFalseMatch));
    n3.flags.exhausted_capture = outcome.forest.exhausted;
    outcome.estimates.push_back(n3);
  }
  if (options.estimators.n3_bootstrap) {
    BootstrapOptions bootstrap;
    bootstrap.alpha = options.alpha;
    bootstrap.kappa = options.kappa;
    bootstrap.seeds = params.seeds;
    bootstrap.coupons = params.coupons;
    bootstrap.false_matches = options.false_matches;
    const auto seed = derive_seed(trial_seed, Stage::kBootstrap);
    auto boot = options.bootstrap_mode == BootstrapMode::kRestrict
                    ? bootstrapped_estimate(outcome.survey, bootstrap, seed)
                    : bootstrapped_estimate_resampled(graph, outcome.forest, outcome.reports, psi,
                                                      params.max_reports, bootstrap, seed);
    boot.flags.exhausted_capture = outcome.forest.exhausted;
    outcome.estimates.push_back(boot);
  }
  return outcome;
}

std::vector<EstimateResult> run_trial(const Graph& graph, const TrialParams& params,
                                      const TrialOptions& options, std::uint64_t trial_seed) {
  return simulate_trial(graph, params, options, trial_seed).estimates;
}

std::size_t ExperimentConfig::total_trials() const {
  return population_sizes.size() * sweep_values.size() * graphs_per_size * trials_per_graph;
}

void validate_config(const ExperimentConfig& config) {
  if (config.population_sizes.empty()) throw std::invalid_argument("population_sizes is empty");
  if (config.graphs_per_size == 0) throw std::invalid_argument("graphs_per_size must be >= 1");
  if (config.trials_per_graph == 0) throw std::invalid_argument("trials_per_graph must be >= 1");
  if (config.sweep_values.empty()) throw std::invalid_argument("sweep has no values");
  const auto& est = config.options.estimators;
  if (!est.n1 && !est.n3 && !est.n3_bootstrap) throw std::invalid_argument("no estimators selected");
  if (!(config.options.alpha > 0.0 && config.options.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1]");
  }
  if (config.options.kappa == 0) throw std::invalid_argument("kappa must be >= 1");
  if (config.options.false_matches.mc_trials == 0) throw std::invalid_argument("fm_trials must be >= 1");
  if (config.family == GraphFamily::kBarabasiAlbert && config.attach == 0) {
    throw std::invalid_argument("attach must be >= 1");
  }
  for (const auto size : config.population_sizes) {
    if (config.family == GraphFamily::kBarabasiAlbert && size <= config.attach) {
      throw std::invalid_argument("population size " + std::to_string(size) + " must exceed attach");
    }
    if (config.family == GraphFamily::kErdosRenyi &&
        !(config.mean_degree > 0.0 && config.mean_degree < static_cast<double>(size) - 1.0)) {
      throw std::invalid_argument("mean_degree out of range for population " + std::to_string(size));
    }
    for (const auto value : config.sweep_values) {
      const auto params = with_parameter(config.baseline, config.sweep, value);
      validate_params(params);
      if (params.capture_size > size) {
        throw std::invalid_argument("n0=" + std::to_string(params.capture_size) + " exceeds population " +
                                    std::to_string(size));
      }
    }
  }
}

ExperimentConfig full_scale_config(SweepParameter sweep, std::vector<std::size_t> values) {
  ExperimentConfig config;
  config.population_sizes = {6250, 12500, 25000, 50000};
  config.graphs_per_size = 10;
  config.trials_per_graph = 100;
  config.sweep = sweep;
  config.sweep_values = std::move(values);
  return config;
}

Graph make_population_graph(const ExperimentConfig& config, std::size_t population_size,
                            std::uint64_t graph_seed) {
  if (config.family == GraphFamily::kErdosRenyi) {
    return generate_er(population_size, config.mean_degree, graph_seed);
  }
  return generate_ba(population_size, config.attach, graph_seed);
}

std::uint64_t graph_seed_for(std::uint64_t master_seed, std::size_t population_size, std::size_t graph_index) {
  return derive_seed(derive_seed(derive_seed(master_seed, Stage::kGraph), population_size), graph_index);
}

std::uint64_t trial_seed_for(std::uint64_t graph_seed, std::size_t trial_index) {
  return derive_seed(derive_seed(graph_seed, Stage::kTrial), trial_index);
}

CellStats aggregate_stats(std::span<const EstimateResult> results) {
  if (results.empty()) throw std::invalid_argument("aggregate_stats needs at least one result");
  CellStats stats;
  std::vector<double> values;
  for (const auto& result : results) {
    tally(stats.flags, result.flags);
    if (result.has_estimate()) {
      values.push_back(result.estimate);
    } else {
      ++stats.n_flagged;
    }
  }
  stats.n_trials = values.size();
  if (values.empty()) return stats;
  double sum = 0.0;
  for (const double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double squares = 0.0;
    for (const double v : values) squares += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
  }
  return stats;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buffer, end);
}

void write_cell_row(std::ostream& out, const SweepCell& cell) {
  out << cell.population_size << ',' << parameter_name(cell.parameter) << ',' << cell.value << ','
      << variant_name(cell.estimator) << ',' << format_number(cell.stats.mean) << ','
      << format_number(cell.stats.stddev) << ',' << cell.stats.n_trials << ',' << cell.stats.n_flagged
      << '\n';
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepSinks& sinks) {
  validate_config(config);
  SweepResult sweep;

  if (sinks.cells_csv) {
    *sinks.cells_csv << "# hiddenpop-sweep v1 master_seed=" << config.master_seed << '\n'
                     << kSweepCsvHeader << '\n';
    sinks.cells_csv->flush();
  }
  if (sinks.trials_csv) {
    *sinks.trials_csv << "# hiddenpop-trials v1 master_seed=" << config.master_seed << '\n'
                      << "pop_size,param,value,graph,trial,trial_seed,estimator,estimate,"
                         "match_mass,false_match_correction,corrected_denominator,flags\n";
  }

  std::vector<Variant> variants;
  if (config.options.estimators.n1) variants.push_back(Variant::kN1);
  if (config.options.estimators.n3) variants.push_back(Variant::kN3);
  if (config.options.estimators.n3_bootstrap) variants.push_back(Variant::kN3Bootstrap);

  const auto per_cell = config.graphs_per_size * config.trials_per_graph;
  for (const auto population : config.population_sizes) {
    std::vector<Graph> graphs(config.graphs_per_size);
    std::vector<std::uint64_t> graph_seeds(config.graphs_per_size);
    for (std::size_t g = 0; g < config.graphs_per_size; ++g) graph_seeds[g] = graph_seed_for(config.master_seed, population, g);
    parallel_for(config.graphs_per_size, config.threads,
                 [&](std::size_t g) { graphs[g] = make_population_graph(config, population, graph_seeds[g]); });

    for (const auto value : config.sweep_values) {
      const auto params = with_parameter(config.baseline, config.sweep, value);
      std::vector<std::variant<std::vector<EstimateResult>, std::string>> outcomes(per_cell);
      parallel_for(per_cell, config.threads, [&](std::size_t task) {
        const auto g = task / config.trials_per_graph;
        const auto t = task % config.trials_per_graph;
        try {
          outcomes[task] = run_trial(graphs[g], params, config.options, trial_seed_for(graph_seeds[g], t));
        } catch (const std::exception& error) {
          outcomes[task] = std::string(error.what());
        }
      });

      std::vector<std::vector<EstimateResult>> by_variant(variants.size());
      for (std::size_t task = 0; task < per_cell; ++task) {
        const auto g = task / config.trials_per_graph;
        const auto t = task % config.trials_per_graph;
        if (const auto* failure = std::get_if<std::string>(&outcomes[task])) {
          sweep.failures.push_back({population, value, g, t, *failure});
          if (sinks.log) *sinks.log << "trial failed (pop " << population << ", value " << value << ", graph " << g
                                    << ", trial " << t << "): " << *failure << '\n';
          continue;
        }
        const auto& results = std::get<std::vector<EstimateResult>>(outcomes[task]);
        for (std::size_t i = 0; i < variants.size(); ++i) {
          by_variant[i].push_back(results[i]);
          if (sinks.trials_csv) {
            const auto& r = results[i];
            *sinks.trials_csv << population << ',' << parameter_name(config.sweep) << ',' << value << ',' << g
                              << ',' << t << ',' << trial_seed_for(graph_seeds[g], t) << ','
                              << variant_name(r.variant) << ',' << format_number(r.estimate) << ','
                              << format_number(r.match_mass) << ',' << format_number(r.false_match_correction)
                              << ',' << format_number(r.corrected_denominator) << ',' << r.flags.to_string()
                              << '\n';
          }
        }
      }

      for (std::size_t i = 0; i < variants.size(); ++i) {
        SweepCell cell;
        cell.population_size = population;
        cell.parameter = config.sweep;
        cell.value = value;
        cell.estimator = variants[i];
        if (!by_variant[i].empty()) {
          cell.stats = aggregate_stats(by_variant[i]);
        } else {
          cell.stats.n_flagged = 0;
        }
        if (sinks.cells_csv) write_cell_row(*sinks.cells_csv, cell);
        if (sinks.log) {
          *sinks.log << "pop=" << population << ' ' << parameter_name(config.sweep) << '=' << value << ' '
                     << variant_name(cell.estimator) << " mean=" << format_number(cell.stats.mean)
                     << " sd=" << format_number(cell.stats.stddev) << " ok=" << cell.stats.n_trials
                     << " flagged=" << cell.stats.n_flagged
                     << " negative-denominator=" << cell.stats.flags.negative_denominator
                     << " zero-match=" << cell.stats.flags.zero_match
                     << " clamped=" << cell.stats.flags.clamped_correction
                     << (cell.stats.failed() ? " FAILED" : "") << '\n';
        }
        sweep.cells.push_back(cell);
      }
      if (sinks.cells_csv) {
        sinks.cells_csv->flush();
        if (!*sinks.cells_csv) throw std::runtime_error("failed writing sweep results");
      }
      if (sinks.trials_csv) sinks.trials_csv->flush();
    }
  }
  return sweep;
}

}  // namespace hiddenpop
