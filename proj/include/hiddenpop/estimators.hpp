#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hiddenpop/graph.hpp"
#include "hiddenpop/hashing.hpp"
#include "hiddenpop/multiset.hpp"
#include "hiddenpop/rds.hpp"
#include "hiddenpop/survey.hpp"

namespace hiddenpop {

enum class Variant { kLincolnPetersen, kChapman, kN1, kN2, kN3, kN3Bootstrap };

// "LP", "Chapman", "n1", "n2", "n3", "n3-bootstrap"
std::string_view variant_name(Variant variant);
std::optional<Variant> parse_variant(std::string_view name);

struct EstimateFlags {
  bool zero_match = false;
  bool negative_denominator = false;
  bool clamped_correction = false;
  bool exhausted_capture = false;
  bool fallback = false;                   // n1 fell back to the +1 adjusted form
  bool unrecoverable_denominator = false;  // bootstrap collected no positive denominator

  bool any() const;
  // '|'-joined flag names, or "none".
  std::string to_string() const;
};

inline constexpr double kNoEstimate = std::numeric_limits<double>::quiet_NaN();

struct EstimateResult {
  Variant variant = Variant::kN1;
  double estimate = kNoEstimate;

  // Numerator side.
  double capture_size = 0.0;       // |S| (equals <psi S> for hashed variants)
  double recapture_support = 0.0;  // |(rS)*| or |(psi rS)*|
  double recapture_mass = 0.0;     // <rS> = <psi rS>
  double unique_support = 0.0;     // recapture support used in the numerator after correction

  // Denominator side.
  double match_support = 0.0;           // |M*|
  double match_mass = 0.0;              // <M>
  double false_match_correction = 0.0;  // E[<F>]
  double raw_denominator = 0.0;         // full-sample denominator before any bootstrap
  double corrected_denominator = 0.0;   // denominator actually divided by

  double fallback_estimate = kNoEstimate;
  std::size_t bootstrap_iterations = 0;
  std::size_t bootstrap_accepted = 0;  // |D|

  EstimateFlags flags;

  bool has_estimate() const { return std::isfinite(estimate) && estimate > 0.0; }
};

// |S| |R| / |S n R|. Zero overlap sets the zero-match flag and yields no
// estimate. Throws std::invalid_argument when overlap > min(capture, recapture).
EstimateResult lincoln_petersen(std::size_t capture, std::size_t recapture, std::size_t overlap);

// (|S|+1)(|R|+1)/(|S n R|+1) - 1, defined at zero overlap.
EstimateResult chapman(std::size_t capture, std::size_t recapture, std::size_t overlap);

// n1 = |S| |(rS)*| / |M(rS, S)*| on raw identities. Without any match the
// zero-match and fallback flags are set and fallback_estimate carries
// |S| (|(rS)*| + 1) / (|M*| + 1).
EstimateResult estimate_n1(const Multiset<Vertex>& capture, const Multiset<Vertex>& reports);
EstimateResult estimate_n1(const RdsForest& forest, const ReportMultiset& reports);

// n2 = <psi S> <psi rS> / <M(psi rS, psi S)>.
EstimateResult estimate_n2(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports);

// Closed-form expected false-match mass for a set A of size `capture_support`
// and a disjoint multiset B with the given support size and mass hashed
// uniformly into m codes:
//
//   <B>/|B*| * sum_{k=0}^{min(|A|,|B*|,m)} k C(|A|,k) C(|B*|,k) (k/m)^{2k} ((m-k)/m)^{|A|+|B*|-2k}
//
// Evaluated in log space (lgamma binomials), with 0^0 = 1. Real-valued
// support sizes are accepted so an estimated |B*| can be plugged in.
double expected_false_matches_closed(double capture_support, double report_support,
                                     double report_mass, std::size_t hash_space);

// Monte Carlo mean of the false-match mass <psi B | psi A> for a set A of
// `capture_size` elements and a disjoint multiset B whose multiplicities are
// `report_profile`, both hashed independently into m codes per draw.
double expected_false_matches_mc(std::size_t capture_size,
                                 const std::vector<std::uint64_t>& report_profile,
                                 std::size_t hash_space, std::size_t trials, std::uint64_t seed);

template <class T>
std::vector<std::uint64_t> multiplicity_profile(const Multiset<T>& multiset) {
  std::vector<std::uint64_t> profile;
  profile.reserve(multiset.support_size());
  for (const auto& entry : multiset) profile.push_back(entry.second);
  return profile;
}

// Balls-in-boxes inversion: the support size whose expected number of
// occupied codes equals the observed one,
//   log(1 - observed/m) / log(1 - 1/m).
// observed == m (and any observation with m == 1) has no finite solution;
// the input is clamped to m - 1 and `clamped` is set.
struct UniqueCount {
  double value = 0.0;
  bool clamped = false;
};
UniqueCount unique_count_correction(std::size_t observed_support, std::size_t hash_space);

// n3 = <psi S> / (<M(psi rS, psi S)> - E[<F>]) * unique_count_correction(|(psi rS)*|, m).
// A non-positive corrected denominator sets negative_denominator and yields
// no estimate; callers should fall back to the bootstrap.
EstimateResult estimate_n3(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports,
                           double false_match_expectation, std::size_t hash_space);

enum class FalseMatchMethod { kMonteCarlo, kClosedForm };

struct FalseMatchOptions {
  FalseMatchMethod method = FalseMatchMethod::kMonteCarlo;
  std::size_t mc_trials = 200;
};

// E[<F>] from hashed observables only. Monte Carlo uses the observed code
// multiplicities of psi rS as the report profile; the closed form uses the
// unique-count-corrected support of psi rS.
double false_match_expectation(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports,
                               std::size_t hash_space, const FalseMatchOptions& options,
                               std::uint64_t seed);

// n3 with E[<F>] computed by false_match_expectation.
EstimateResult hashing_estimate(const Multiset<Code>& psi_capture, const Multiset<Code>& psi_reports,
                                std::size_t hash_space, const FalseMatchOptions& options,
                                std::uint64_t seed);

struct BootstrapOptions {
  double alpha = 0.9;        // fraction of the capture replayed per replicate
  std::size_t kappa = 100;   // replicates
  std::size_t seeds = 6;     // s used when replaying the referral forest
  std::size_t coupons = 3;   // c used when replaying the referral forest
  FalseMatchOptions false_matches;
};

// Bootstrapped n3. Each replicate replays respondent-driven capture over the
// recorded referral forest with target ceil(alpha |S|), keeps the reports of
// the replayed subjects, and computes d = <M(psi rS', psi S')> - E[<F>].
// Positive d values form D, and the estimate is
//   <psi S> / mean(D) * unique_count_correction(|(psi rS)*|, m).
// Empty D sets unrecoverable_denominator. Throws std::invalid_argument for
// alpha outside (0, 1] or kappa == 0.
EstimateResult bootstrapped_estimate(const HashedSurvey& survey, const BootstrapOptions& options,
                                     std::uint64_t seed);

EstimateResult bootstrapped_estimate(const RdsForest& forest, const ReportMultiset& reports,
                                     const HashAssignment& psi, const BootstrapOptions& options,
                                     std::uint64_t seed);

// Simulation-only variant: replicate reports are drawn afresh with
// recapture(graph, replayed forest, p) instead of being restricted from the
// recorded ones. psi must cover every vertex the new reports can reach.
EstimateResult bootstrapped_estimate_resampled(const Graph& graph, const RdsForest& forest,
                                               const ReportMultiset& reports, const HashAssignment& psi,
                                               std::size_t max_reports,
                                               const BootstrapOptions& options, std::uint64_t seed);

}  // namespace hiddenpop
