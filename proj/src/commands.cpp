#include "hiddenpop/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "hiddenpop/seeding.hpp"
#include "hiddenpop/survey.hpp"

namespace hiddenpop {

namespace {

using nlohmann::ordered_json;

ordered_json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

ordered_json to_json(const EstimateResult& r) {
  ordered_json j;
  j["estimator"] = variant_name(r.variant);
  j["estimate"] = number(r.estimate);
  j["flags"] = r.flags.to_string();
  j["capture_size"] = r.capture_size;
  j["recapture_support"] = r.recapture_support;
  j["recapture_mass"] = r.recapture_mass;
  j["unique_support"] = r.unique_support;
  j["match_support"] = r.match_support;
  j["match_mass"] = r.match_mass;
  j["false_match_correction"] = number(r.false_match_correction);
  j["raw_denominator"] = number(r.raw_denominator);
  j["corrected_denominator"] = number(r.corrected_denominator);
  j["fallback_estimate"] = number(r.fallback_estimate);
  if (r.variant == Variant::kN3Bootstrap) {
    j["bootstrap_iterations"] = r.bootstrap_iterations;
    j["bootstrap_accepted"] = r.bootstrap_accepted;
  }
  return j;
}

std::string label(Variant variant) {
  switch (variant) {
    case Variant::kN1: return "RDS full-knowledge (n1)";
    case Variant::kN3: return "RDS + ANON/hashing (n3)";
    case Variant::kN3Bootstrap: return "RDS + ANON/hashing, bootstrapped (n3-bootstrap)";
    default: return std::string(variant_name(variant));
  }
}

void print_estimate(std::ostream& out, const EstimateResult& r) {
  out << label(r.variant) << ": " << format_number(r.estimate) << "  [flags: " << r.flags.to_string() << "]\n";
  if (r.variant == Variant::kN1) {
    out << "  |S|=" << format_number(r.capture_size) << " |(rS)*|=" << format_number(r.recapture_support)
        << " <rS>=" << format_number(r.recapture_mass) << " |M*|=" << format_number(r.match_support) << '\n';
    if (r.flags.fallback) out << "  fallback (+1 adjusted): " << format_number(r.fallback_estimate) << '\n';
    return;
  }
  out << "  <psi S>=" << format_number(r.capture_size) << " |(psi rS)*|=" << format_number(r.recapture_support)
      << " corrected support=" << format_number(r.unique_support) << " <M>=" << format_number(r.match_mass)
      << " E[F]=" << format_number(r.false_match_correction) << '\n';
  out << "  denominator: raw=" << format_number(r.raw_denominator)
      << " used=" << format_number(r.corrected_denominator);
  if (r.variant == Variant::kN3Bootstrap) {
    out << " accepted=" << r.bootstrap_accepted << '/' << r.bootstrap_iterations;
  }
  out << '\n';
}

template <class Stream>
Stream open_file(const std::filesystem::path& path) {
  Stream stream(path);
  if (!stream) throw std::runtime_error("cannot open " + path.string());
  return stream;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  auto out = open_file<std::ofstream>(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ordered_json options_json(double alpha, std::size_t kappa, const FalseMatchOptions& fm) {
  ordered_json j;
  j["alpha"] = alpha;
  j["kappa"] = kappa;
  j["fm_method"] = fm.method == FalseMatchMethod::kMonteCarlo ? "mc" : "closed";
  j["fm_trials"] = fm.mc_trials;
  return j;
}

// Runs `body`, mapping exceptions to exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& error) {
    err << "error: " << error.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Graph graph;
    if (args.family == "ba") {
      graph = generate_ba(args.n, args.attach, args.seed);
    } else if (args.family == "er") {
      graph = generate_er(args.n, args.mean_degree, args.seed);
    } else {
      throw std::invalid_argument("unknown family `" + args.family + "` (ba, er)");
    }
    std::ostream& summary = args.output ? out : err;
    if (args.output) {
      save_edge_list(*args.output, graph);
    } else {
      write_edge_list(out, graph);
    }
    const auto degrees = degree_summary(graph);
    summary << "n=" << graph.vertex_count() << " edges=" << graph.edge_count()
            << " mean_degree=" << format_number(degrees.mean) << " max_degree=" << degrees.max << '\n';
    return kExitOk;
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto graph = load_edge_list(args.graph);
    validate_params(args.params);
    if (args.params.capture_size > graph.vertex_count()) {
      throw std::invalid_argument("n0=" + std::to_string(args.params.capture_size) + " exceeds graph size " +
                                  std::to_string(graph.vertex_count()));
    }
    TrialOptions options;
    options.estimators.n3_bootstrap = args.bootstrap;
    options.alpha = args.alpha;
    options.kappa = args.kappa;
    options.false_matches = args.false_matches;
    options.bootstrap_mode = args.bootstrap_mode;
    if (!(options.alpha > 0.0 && options.alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
    if (options.kappa == 0) throw std::invalid_argument("kappa must be >= 1");

    const auto trial = simulate_trial(graph, args.params, options, args.seed);
    const auto& p = args.params;
    out << "# hiddenpop-simulate v1 seed=" << args.seed << '\n';
    out << "graph: n=" << graph.vertex_count() << " edges=" << graph.edge_count() << '\n';
    out << "params: n0=" << p.capture_size << " s=" << p.seeds << " c=" << p.coupons << " p=" << p.max_reports
        << " m=" << p.hash_space << '\n';
    out << "capture: |S|=" << trial.forest.subjects.size() << " seeds=" << trial.forest.seeds.size()
        << (trial.forest.exhausted ? " (population exhausted)" : "") << '\n';
    for (const auto& estimate : trial.estimates) print_estimate(out, estimate);

    if (args.json) {
      ordered_json j;
      j["format"] = "hiddenpop-simulate v1";
      j["seed"] = args.seed;
      j["graph"] = {{"path", args.graph.string()}, {"n", graph.vertex_count()}, {"edges", graph.edge_count()}};
      j["params"] = {{"n0", p.capture_size}, {"s", p.seeds}, {"c", p.coupons}, {"p", p.max_reports},
                     {"m", p.hash_space}};
      j["options"] = options_json(args.alpha, args.kappa, args.false_matches);
      j["options"]["bootstrap"] = args.bootstrap;
      j["options"]["bootstrap_mode"] = args.bootstrap_mode == BootstrapMode::kRestrict ? "restrict" : "resample";
      j["capture"] = {{"subjects", trial.forest.subjects.size()},
                      {"referrals", trial.forest.referrals.size()},
                      {"seeds", trial.forest.seeds.size()},
                      {"exhausted", trial.forest.exhausted}};
      j["estimates"] = ordered_json::array();
      for (const auto& estimate : trial.estimates) j["estimates"].push_back(to_json(estimate));
      write_json(*args.json, j);
    }
    if (args.export_survey) {
      auto file = open_file<std::ofstream>(*args.export_survey);
      SurveyMetadata metadata;
      metadata.hash_space = p.hash_space;
      metadata.seeds = p.seeds;
      metadata.coupons = p.coupons;
      metadata.max_reports = p.max_reports;
      write_survey(file, trial.survey, metadata);
      if (!file) throw std::runtime_error("failed writing " + args.export_survey->string());
    }

    // The hashed estimate is the bootstrap when requested, plain n3 otherwise.
    const auto& hashed = trial.estimates.back();
    if (!hashed.has_estimate()) {
      err << "warning: " << label(hashed.variant) << " produced no estimate (" << hashed.flags.to_string()
          << ")\n";
      return kExitPathology;
    }
    return kExitOk;
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto config = load_config(args.config);
    if (args.threads) config.threads = *args.threads;
    if (args.master_seed) config.master_seed = *args.master_seed;
    validate_config(config);
    if (config.total_trials() > kLargeSweepTrials) {
      err << "warning: this grid runs " << config.total_trials()
          << " trials; expect a long runtime (hours at full scale)\n";
    }

    std::ofstream cells_file;
    std::ofstream trials_file;
    SweepSinks sinks;
    if (args.output) {
      cells_file = open_file<std::ofstream>(*args.output);
      sinks.cells_csv = &cells_file;
    } else {
      sinks.cells_csv = &out;
    }
    if (args.trials_csv) {
      trials_file = open_file<std::ofstream>(*args.trials_csv);
      sinks.trials_csv = &trials_file;
    }
    if (!args.quiet) sinks.log = &err;

    const auto result = run_sweep(config, sinks);
    for (const auto& failure : result.failures) {
      err << "failed trial: pop=" << failure.population_size << " value=" << failure.value
          << " graph=" << failure.graph_index << " trial=" << failure.trial_index << ": " << failure.what << '\n';
    }
    return kExitOk;
  });
}

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto file = load_survey(args.survey);
    const auto& meta = file.metadata;

    HashedSurvey survey;
    survey.records = std::move(file.records);
    const auto digits = args.telefunken_digits ? args.telefunken_digits : meta.telefunken_digits;
    if (digits) {
      if (*digits < 1 || *digits > kMaxTelefunkenDigits) {
        throw std::invalid_argument("telefunken digits must be in [1, " + std::to_string(kMaxTelefunkenDigits) + "]");
      }
      // Telefunken codes are written as 0 .. 4^d - 1; shift them into [1, m].
      const std::uint64_t space = std::uint64_t{1} << (2 * *digits);
      if (args.hash_space && *args.hash_space != space) {
        throw std::invalid_argument("--m " + std::to_string(*args.hash_space) + " contradicts " +
                                    std::to_string(*digits) + " telefunken digits (m=" + std::to_string(space) + ")");
      }
      survey.hash_space = space;
      for (std::size_t row = 0; row < survey.records.size(); ++row) {
        auto shift = [&](Code& code) {
          if (code_value(code) >= space) {
            throw std::invalid_argument("record " + std::to_string(row + 1) + ": telefunken code " +
                                        std::to_string(code_value(code)) + " outside [0, " +
                                        std::to_string(space - 1) + "]");
          }
          code = Code{code_value(code) + 1};
        };
        shift(survey.records[row].subject_code);
        for (auto& code : survey.records[row].report_codes) shift(code);
      }
    } else if (args.hash_space) {
      survey.hash_space = *args.hash_space;
    } else if (meta.hash_space) {
      survey.hash_space = *meta.hash_space;
    } else {
      throw std::invalid_argument("hash space unknown: pass --m or --digits");
    }
    if (survey.hash_space == 0) throw std::invalid_argument("m must be >= 1");

    const auto max_reports = args.max_reports ? args.max_reports : meta.max_reports;
    validate_survey(survey, max_reports);

    BootstrapOptions options;
    options.alpha = args.alpha;
    options.kappa = args.kappa;
    options.seeds = args.seeds.value_or(meta.seeds.value_or(options.seeds));
    options.coupons = args.coupons.value_or(meta.coupons.value_or(options.coupons));
    options.false_matches = args.false_matches;
    if (options.seeds == 0) throw std::invalid_argument("s must be >= 1");
    if (options.coupons == 0) throw std::invalid_argument("c must be >= 1");

    const auto result = bootstrapped_estimate(survey, options, derive_seed(args.seed, Stage::kBootstrap));

    out << "# hiddenpop-estimate v1 seed=" << args.seed << '\n';
    out << "survey: records=" << survey.records.size() << " m=" << survey.hash_space << " s=" << options.seeds
        << " c=" << options.coupons;
    if (max_reports) out << " p=" << *max_reports;
    out << '\n';
    print_estimate(out, result);

    if (args.json) {
      ordered_json j;
      j["format"] = "hiddenpop-estimate v1";
      j["seed"] = args.seed;
      j["survey"] = {{"path", args.survey.string()}, {"records", survey.records.size()}, {"m", survey.hash_space}};
      j["options"] = options_json(args.alpha, args.kappa, args.false_matches);
      j["options"]["s"] = options.seeds;
      j["options"]["c"] = options.coupons;
      j["estimate"] = to_json(result);
      write_json(*args.json, j);
    }
    if (!result.has_estimate()) {
      err << "warning: no estimate (" << result.flags.to_string() << ")\n";
      return kExitPathology;
    }
    return kExitOk;
  });
}

}  // namespace hiddenpop
