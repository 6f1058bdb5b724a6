#include "hiddenpop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "hiddenpop/seeding.hpp"

namespace hiddenpop {

namespace {

struct VariantName {
  Variant variant;
  std::string_view name;
};

constexpr VariantName kVariantNames[] = {
    {Variant::kLincolnPetersen, "LP"}, {Variant::kChapman, "Chapman"},
    {Variant::kN1, "n1"},              {Variant::kN2, "n2"},
    {Variant::kN3, "n3"},              {Variant::kN3Bootstrap, "n3-bootstrap"},
};

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string_view variant_name(Variant variant) {
  for (const auto& entry : kVariantNames) {
    if (entry.variant == variant) return entry.name;
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& entry : kVariantNames) {
    if (entry.name == name) return entry.variant;
  }
  return std::nullopt;
}

bool EstimateFlags::any() const {
  return zero_match || negative_denominator || clamped_correction || exhausted_capture || fallback ||
         unrecoverable_denominator;
}

std::string EstimateFlags::to_string() const {
  std::string out;
  const auto append = [&](bool set, const char* name) {
    if (!set) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  append(zero_match, "zero-match");
  append(negative_denominator, "negative-denominator");
  append(clamped_correction, "clamped-correction");
  append(exhausted_capture, "exhausted-capture");
  append(fallback, "fallback");
  append(unrecoverable_denominator, "unrecoverable-denominator");
  return out.empty() ? "none" : out;
}

EstimateResult lincoln_petersen(std::size_t capture, std::size_t recapture, std::size_t overlap) {
  if (overlap > std::min(capture, recapture)) {
    throw std::invalid_argument("overlap exceeds a sample size");
  }
  EstimateResult result;
  result.variant = Variant::kLincolnPetersen;
  result.capture_size = static_cast<double>(capture);
  result.recapture_support = static_cast<double>(recapture);
  result.unique_support = result.recapture_support;
  result.match_support = static_cast<double>(overlap);
  result.raw_denominator = result.corrected_denominator = result.match_support;
  if (overlap == 0) {
    result.flags.zero_match = true;
    return result;
  }
  result.estimate = result.capture_size * result.recapture_support / result.match_support;
  return result;
}

EstimateResult chapman(std::size_t capture, std::size_t recapture, std::size_t overlap) {
  if (overlap > std::min(capture, recapture)) {
    throw std::invalid_argument("overlap exceeds a sample size");
  }
  EstimateResult result;
  result.variant = Variant::kChapman;
  result.capture_size = static_cast<double>(capture);
  result.recapture_support = static_cast<double>(recapture);
  result.unique_support = result.recapture_support;
  result.match_support = static_cast<double>(overlap);
  result.raw_denominator = result.corrected_denominator = result.match_support + 1.0;
  result.flags.zero_match = overlap == 0;
  result.estimate = (result.capture_size + 1.0) * (result.recapture_support + 1.0) /
                        result.corrected_denominator -
                    1.0;
  return result;
}

EstimateResult estimate_n1(const Multiset<Vertex>& capture, const Multiset<Vertex>& reports) {
  const auto matches = filter(reports, capture);
  EstimateResult result;
  result.variant = Variant::kN1;
  result.capture_size = static_cast<double>(capture.support_size());
  result.recapture_support = static_cast<double>(reports.support_size());
  result.recapture_mass = static_cast<double>(reports.mass());
  result.unique_support = result.recapture_support;
  result.match_support = static_cast<double>(matches.support_size());
  result.match_mass = static_cast<double>(matches.mass());
  result.raw_denominator = result.corrected_denominator = result.match_support;
  if (matches.empty()) {
    result.flags.zero_match = true;
    result.flags.fallback = true;
    result.fallback_estimate =
        result.capture_size * (result.recapture_support + 1.0) / (result.match_support + 1.0);
    return result;
  }
  result.estimate = result.capture_size * result.recapture_support / result.match_support;
  return result;
}

EstimateResult estimate_n1(const RdsForest& forest, const ReportMultiset& reports) {
  auto result = estimate_n1(Multiset<Vertex>::from_elements(forest.subjects), reports.reports);
  result.flags.exhausted_capture = forest.exhausted;
  return result;
}

EstimateResult estimate_n2(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports) {
  const auto matches = filter(psi_reports, psi_capture);
  EstimateResult result;
  result.variant = Variant::kN2;
  result.capture_size = static_cast<double>(psi_capture.mass());
  result.recapture_support = static_cast<double>(psi_reports.support_size());
  result.recapture_mass = static_cast<double>(psi_reports.mass());
  result.unique_support = result.recapture_mass;
  result.match_support = static_cast<double>(matches.support_size());
  result.match_mass = static_cast<double>(matches.mass());
  result.raw_denominator = result.corrected_denominator = result.match_mass;
  if (matches.empty()) {
    result.flags.zero_match = true;
    return result;
  }
  result.estimate = result.capture_size * result.recapture_mass / result.match_mass;
  return result;
}

double expected_false_matches_closed(double capture_support, double report_support, double report_mass,
                                     std::size_t hash_space) {
  if (hash_space == 0) throw std::invalid_argument("hash space must be non-empty");
  if (capture_support < 0 || report_support < 0 || report_mass < 0) {
    throw std::invalid_argument("false-match arguments must be non-negative");
  }
  if (capture_support == 0 || report_support == 0) return 0.0;

  const auto m = static_cast<double>(hash_space);
  const auto k_max = static_cast<std::size_t>(std::floor(std::min({capture_support, report_support, m})));
  double sum = 0.0;
  for (std::size_t step = 1; step <= k_max; ++step) {
    const auto k = static_cast<double>(step);
    double log_term = std::log(k) + log_binomial(capture_support, k) + log_binomial(report_support, k) +
                      2.0 * k * std::log(k / m);
    const double rest = capture_support + report_support - 2.0 * k;
    if (step == hash_space) {
      // ((m-k)/m)^rest with m == k is 0 unless the exponent vanishes (0^0 = 1).
      if (rest > 0.0) continue;
    } else {
      log_term += rest * std::log1p(-k / m);
    }
    sum += std::exp(log_term);
  }
  return report_mass / report_support * sum;
}

double expected_false_matches_mc(std::size_t capture_size, const std::vector<std::uint64_t>& report_profile,
                                 std::size_t hash_space, std::size_t trials, std::uint64_t seed) {
  if (hash_space == 0) throw std::invalid_argument("hash space must be non-empty");
  if (trials == 0) throw std::invalid_argument("Monte Carlo false matches need at least one trial");

  // Elements of equal multiplicity are exchangeable; group them so each draw
  // needs one binomial per multiplicity class.
  std::map<std::uint64_t, std::uint64_t> classes;
  for (const auto multiplicity : report_profile) {
    if (multiplicity > 0) ++classes[multiplicity];
  }

  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, hash_space - 1);

  // Occupancy of psi A is tracked with per-draw stamps when H is small enough
  // to index, and by sorting otherwise.
  constexpr std::size_t kStampLimit = std::size_t{1} << 24;
  std::vector<std::uint32_t> stamp(hash_space <= kStampLimit ? hash_space : 0, 0);
  std::vector<std::size_t> codes;

  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t occupied = 0;
    if (!stamp.empty()) {
      const auto mark = static_cast<std::uint32_t>(t + 1);
      for (std::size_t i = 0; i < capture_size; ++i) {
        auto& slot = stamp[pick(rng)];
        if (slot != mark) {
          slot = mark;
          ++occupied;
        }
      }
    } else {
      codes.clear();
      for (std::size_t i = 0; i < capture_size; ++i) codes.push_back(pick(rng));
      std::sort(codes.begin(), codes.end());
      occupied = static_cast<std::size_t>(std::unique(codes.begin(), codes.end()) - codes.begin());
    }
    const double hit = static_cast<double>(occupied) / static_cast<double>(hash_space);
    double false_mass = 0.0;
    for (const auto& [multiplicity, count] : classes) {
      std::binomial_distribution<std::uint64_t> hits(count, hit);
      false_mass += static_cast<double>(multiplicity) * static_cast<double>(hits(rng));
    }
    total += false_mass;
  }
  return total / static_cast<double>(trials);
}

UniqueCount unique_count_correction(std::size_t observed_support, std::size_t hash_space) {
  if (hash_space == 0) throw std::invalid_argument("hash space must be non-empty");
  if (observed_support > hash_space) throw std::invalid_argument("observed support exceeds hash space");
  if (observed_support == 0) return {0.0, false};
  if (hash_space == 1) return {static_cast<double>(observed_support), true};

  UniqueCount result;
  std::size_t observed = observed_support;
  if (observed == hash_space) {
    observed = hash_space - 1;
    result.clamped = true;
  }
  const auto m = static_cast<double>(hash_space);
  result.value = std::log1p(-static_cast<double>(observed) / m) / std::log1p(-1.0 / m);
  return result;
}

EstimateResult estimate_n3(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports,
                           double false_match_expectation, std::size_t hash_space) {
  if (!(false_match_expectation >= 0.0)) throw std::invalid_argument("false-match expectation must be >= 0");
  const auto matches = filter(psi_reports, psi_capture);
  const auto unique = unique_count_correction(psi_reports.support_size(), hash_space);

  EstimateResult result;
  result.variant = Variant::kN3;
  result.capture_size = static_cast<double>(psi_capture.mass());
  result.recapture_support = static_cast<double>(psi_reports.support_size());
  result.recapture_mass = static_cast<double>(psi_reports.mass());
  result.unique_support = unique.value;
  result.match_support = static_cast<double>(matches.support_size());
  result.match_mass = static_cast<double>(matches.mass());
  result.false_match_correction = false_match_expectation;
  result.raw_denominator = result.corrected_denominator = result.match_mass - false_match_expectation;
  result.flags.clamped_correction = unique.clamped;
  result.flags.zero_match = matches.empty();
  if (!(result.corrected_denominator > 0.0)) {
    result.flags.negative_denominator = true;
    return result;
  }
  result.estimate = result.capture_size / result.corrected_denominator * result.unique_support;
  return result;
}

double false_match_expectation(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports,
                               std::size_t hash_space, const FalseMatchOptions& options,
                               std::uint64_t seed) {
  if (options.method == FalseMatchMethod::kClosedForm) {
    const auto support = unique_count_correction(psi_reports.support_size(), hash_space).value;
    return expected_false_matches_closed(static_cast<double>(psi_capture.mass()), support,
                                         static_cast<double>(psi_reports.mass()), hash_space);
  }
  return expected_false_matches_mc(static_cast<std::size_t>(psi_capture.mass()),
                                   multiplicity_profile(psi_reports), hash_space, options.mc_trials, seed);
}

EstimateResult hashing_estimate(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports,
                                std::size_t hash_space, const FalseMatchOptions& options,
                                std::uint64_t seed) {
  const double expected = false_match_expectation(psi_capture, psi_reports, hash_space, options, seed);
  return estimate_n3(psi_capture, psi_reports, expected, hash_space);
}

namespace {

struct Replicate {
  Multiset<Code> psi_capture;
  Multiset<Code> psi_reports;
};

// Rows of `replay` index the original capture; the callback turns them into
// the hashed capture and report multisets of the replicate.
using ReplicateFn = std::function<Replicate(const RdsForest& replay, std::uint64_t seed)>;

EstimateResult bootstrap_core(const Graph& referral_graph, const Multiset<Code>& psi_capture,
                              const Multiset<Code>& psi_reports, std::size_t hash_space,
                              const BootstrapOptions& options, std::uint64_t seed,
                              const ReplicateFn& replicate) {
  if (!(options.alpha > 0.0 && options.alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
  if (options.kappa == 0) throw std::invalid_argument("kappa must be >= 1");
  if (options.seeds == 0 || options.coupons == 0) throw std::invalid_argument("bootstrap needs s >= 1 and c >= 1");
  const std::size_t rows = referral_graph.vertex_count();
  if (rows == 0) throw std::invalid_argument("bootstrap on an empty capture");

  EstimateResult result = hashing_estimate(psi_capture, psi_reports, hash_space, options.false_matches,
                                           derive_seed(seed, Stage::kFalseMatch));
  result.variant = Variant::kN3Bootstrap;
  result.estimate = kNoEstimate;

  RdsParams replay;
  replay.target = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(options.alpha * static_cast<double>(rows) - 1e-9)));
  replay.seeds = std::min(options.seeds, replay.target);
  replay.coupons = options.coupons;

  std::vector<double> accepted;
  const std::uint64_t replicate_root = derive_seed(seed, Stage::kTrial);
  for (std::size_t i = 0; i < options.kappa; ++i) {
    const std::uint64_t replicate_seed = derive_seed(replicate_root, i);
    const auto replay_forest = rds_capture(referral_graph, replay, derive_seed(replicate_seed, Stage::kCapture));
    const auto sample = replicate(replay_forest, derive_seed(replicate_seed, Stage::kRecapture));
    const double expected = false_match_expectation(sample.psi_capture, sample.psi_reports, hash_space,
                                                    options.false_matches,
                                                    derive_seed(replicate_seed, Stage::kFalseMatch));
    const double d = static_cast<double>(filter(sample.psi_reports, sample.psi_capture).mass()) - expected;
    if (d > 0.0) accepted.push_back(d);
  }

  result.bootstrap_iterations = options.kappa;
  result.bootstrap_accepted = accepted.size();
  if (accepted.empty()) {
    result.flags.unrecoverable_denominator = true;
    result.corrected_denominator = kNoEstimate;
    return result;
  }
  result.corrected_denominator =
      std::accumulate(accepted.begin(), accepted.end(), 0.0) / static_cast<double>(accepted.size());
  result.estimate = result.capture_size / result.corrected_denominator * result.unique_support;
  return result;
}

}  // namespace

EstimateResult bootstrapped_estimate(const HashedSurvey& survey, const BootstrapOptions& options,
                                     std::uint64_t seed) {
  const auto replicate = [&survey](const RdsForest& replay, std::uint64_t) {
    Replicate sample;
    for (const Vertex row : replay.subjects) {
      const auto& record = survey.records[row];
      sample.psi_capture.add(record.subject_code);
      for (const Code code : record.report_codes) sample.psi_reports.add(code);
    }
    return sample;
  };
  return bootstrap_core(survey.referral_graph(), survey.capture_codes(), survey.report_codes(),
                        survey.hash_space, options, seed, replicate);
}

EstimateResult bootstrapped_estimate(const RdsForest& forest, const ReportMultiset& reports,
                                     const HashAssignment& psi, const BootstrapOptions& options,
                                     std::uint64_t seed) {
  auto result = bootstrapped_estimate(make_hashed_survey(forest, reports, psi), options, seed);
  result.flags.exhausted_capture = forest.exhausted;
  return result;
}

EstimateResult bootstrapped_estimate_resampled(const Graph& graph, const RdsForest& forest,
                                               const ReportMultiset& reports, const HashAssignment& psi,
                                               std::size_t max_reports,
                                               const BootstrapOptions& options, std::uint64_t seed) {
  std::unordered_map<Vertex, Vertex> row_of;
  for (std::size_t row = 0; row < forest.subjects.size(); ++row) {
    row_of.emplace(forest.subjects[row], static_cast<Vertex>(row));
  }
  std::vector<Edge> tree_edges;
  for (const auto& [recruiter, recruit] : forest.referrals) {
    tree_edges.emplace_back(row_of.at(recruiter), row_of.at(recruit));
  }
  const Graph referral_graph = Graph::from_edges(forest.subjects.size(), tree_edges);

  const auto replicate = [&](const RdsForest& replay, std::uint64_t replicate_seed) {
    RdsForest sub;
    for (const Vertex row : replay.subjects) sub.subjects.push_back(forest.subjects[row]);
    for (const Vertex row : replay.seeds) sub.seeds.push_back(forest.subjects[row]);
    for (const auto& [from, to] : replay.referrals) {
      sub.referrals.push_back({forest.subjects[from], forest.subjects[to]});
    }
    const auto fresh = recapture(graph, sub, max_reports, replicate_seed);
    return Replicate{apply_hash(psi, sub.subjects), apply_hash(psi, fresh.reports)};
  };

  auto result = bootstrap_core(referral_graph, apply_hash(psi, forest.subjects), apply_hash(psi, reports.reports),
                               psi.hash_space(), options, seed, replicate);
  result.flags.exhausted_capture = forest.exhausted;
  return result;
}

}  // namespace hiddenpop
