#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>

#include "hiddenpop/errors.hpp"
#include "hiddenpop/experiments.hpp"

namespace hiddenpop {

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  for (;;) {
    const auto end = text.find(',', start);
    items.push_back(trim(text.substr(start, end - start)));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return items;
}

std::size_t parse_size(const std::string& text, std::size_t line) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    throw ParseError(line, "expected a non-negative integer, got `" + text + "`");
  }
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (const std::exception&) {
    throw ParseError(line, "integer `" + text + "` out of range");
  }
}

double parse_real(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) throw ParseError(line, "expected a number, got `" + text + "`");
  return value;
}

std::vector<std::size_t> parse_size_list(const std::string& text, std::size_t line) {
  std::vector<std::size_t> values;
  for (const auto& item : split_list(text)) values.push_back(parse_size(item, line));
  return values;
}

bool parse_bool(const std::string& text, std::size_t line) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ParseError(line, "expected true or false, got `" + text + "`");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  bool in_sweep = false;
  bool sweep_block = false;
  bool full_scale = false;
  std::optional<SweepParameter> sweep_param;
  std::optional<std::vector<std::size_t>> sweep_values;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const auto text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text != "[sweep]") throw ParseError(line, "unknown section `" + text + "`");
      if (sweep_block) throw ParseError(line, "only one [sweep] block is allowed");
      sweep_block = in_sweep = true;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected `key = value`");
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    const auto scoped = (in_sweep ? "sweep." : "") + key;
    if (!seen.insert(scoped).second) throw ParseError(line, "duplicate key `" + key + "`");

    if (in_sweep) {
      if (key == "param") {
        sweep_param = parse_parameter(value);
        if (!sweep_param) throw ParseError(line, "unknown sweep parameter `" + value + "` (n0, s, c, p, m)");
      } else if (key == "values") {
        sweep_values = parse_size_list(value, line);
      } else {
        throw ParseError(line, "unknown sweep key `" + key + "`");
      }
      continue;
    }

    if (key == "population_sizes") config.population_sizes = parse_size_list(value, line);
    else if (key == "graphs_per_size") config.graphs_per_size = parse_size(value, line);
    else if (key == "trials_per_graph") config.trials_per_graph = parse_size(value, line);
    else if (key == "family") {
      if (value == "ba") config.family = GraphFamily::kBarabasiAlbert;
      else if (value == "er") config.family = GraphFamily::kErdosRenyi;
      else throw ParseError(line, "unknown graph family `" + value + "` (ba, er)");
    } else if (key == "attach") config.attach = parse_size(value, line);
    else if (key == "mean_degree") config.mean_degree = parse_real(value, line);
    else if (key == "n0") config.baseline.capture_size = parse_size(value, line);
    else if (key == "s") config.baseline.seeds = parse_size(value, line);
    else if (key == "c") config.baseline.coupons = parse_size(value, line);
    else if (key == "p") config.baseline.max_reports = parse_size(value, line);
    else if (key == "m") config.baseline.hash_space = parse_size(value, line);
    else if (key == "estimators") {
      config.options.estimators = {false, false, false};
      for (const auto& name : split_list(value)) {
        if (name == "n1") config.options.estimators.n1 = true;
        else if (name == "n3") config.options.estimators.n3 = true;
        else if (name == "n3-bootstrap") config.options.estimators.n3_bootstrap = true;
        else throw ParseError(line, "unknown estimator `" + name + "` (n1, n3, n3-bootstrap)");
      }
    } else if (key == "alpha") config.options.alpha = parse_real(value, line);
    else if (key == "kappa") config.options.kappa = parse_size(value, line);
    else if (key == "fm_method") {
      if (value == "mc") config.options.false_matches.method = FalseMatchMethod::kMonteCarlo;
      else if (value == "closed") config.options.false_matches.method = FalseMatchMethod::kClosedForm;
      else throw ParseError(line, "unknown fm_method `" + value + "` (mc, closed)");
    } else if (key == "fm_trials") config.options.false_matches.mc_trials = parse_size(value, line);
    else if (key == "bootstrap_mode") {
      if (value == "restrict") config.options.bootstrap_mode = BootstrapMode::kRestrict;
      else if (value == "resample") config.options.bootstrap_mode = BootstrapMode::kResample;
      else throw ParseError(line, "unknown bootstrap_mode `" + value + "` (restrict, resample)");
    } else if (key == "master_seed") config.master_seed = parse_size(value, line);
    else if (key == "threads") config.threads = parse_size(value, line);
    else if (key == "full_scale") full_scale = parse_bool(value, line);
    else throw ParseError(line, "unknown key `" + key + "`");
  }

  if (!sweep_block) throw ParseError(0, "config has no [sweep] block");
  if (!sweep_param) throw ParseError(0, "[sweep] block has no `param`");
  if (!sweep_values) throw ParseError(0, "[sweep] block has no `values`");
  config.sweep = *sweep_param;
  config.sweep_values = *sweep_values;

  // full_scale fills in whatever grid keys were left unset.
  if (full_scale) {
    const auto full = full_scale_config(config.sweep, config.sweep_values);
    if (!seen.count("population_sizes")) config.population_sizes = full.population_sizes;
    if (!seen.count("graphs_per_size")) config.graphs_per_size = full.graphs_per_size;
    if (!seen.count("trials_per_graph")) config.trials_per_graph = full.trials_per_graph;
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace hiddenpop
