#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hiddenpop/graph.hpp"
#include "hiddenpop/multiset.hpp"
#include "hiddenpop/seeding.hpp"

namespace hiddenpop {

struct RdsParams {
  std::size_t seeds = 6;     // s: initial seeds drawn uniformly
  std::size_t coupons = 3;   // c: recruits per subject at most
  std::size_t target = 500;  // n0: stop once this many subjects are in
};

struct Referral {
  Vertex recruiter;
  Vertex recruit;
  bool operator==(const Referral&) const = default;
};

// First-assay sample: subjects in interview order plus the referral forest.
struct RdsForest {
  std::vector<Vertex> subjects;     // S, in the order subjects entered
  std::vector<Referral> referrals;  // T, one inbound edge per non-seed subject
  std::vector<Vertex> seeds;        // initial seeds followed by any re-seeds
  bool exhausted = false;           // ran out of population before the target

  // Recruiter and recruits of v inside the forest, sorted.
  std::vector<Vertex> tree_neighbors(Vertex v) const;
};

// Respondent-driven capture. Seeds are s distinct uniform vertices; each round
// takes a uniform frontier member, hands coupons to up to c of its neighbors
// that were not yet discovered, and re-seeds from the undiscovered
// population whenever the frontier runs dry. Stops once |S| >= n0, so the
// final round may overshoot the target by up to c subjects.
//
// If n0 exceeds the population the whole graph is returned with
// `exhausted` set. Throws std::invalid_argument unless 1 <= s <= n0,
// s <= |V| and c >= 1.
RdsForest rds_capture(const Graph& graph, const RdsParams& params, std::uint64_t seed);

// Same procedure with the initial seeds fixed by the caller.
RdsForest rds_capture_from(const Graph& graph, std::span<const Vertex> initial_seeds,
                           std::size_t coupons, std::size_t target, Rng& rng);

// Second-assay peer reports.
struct ReportMultiset {
  Multiset<Vertex> reports;                        // rS = sum-union of all R_v
  std::map<Vertex, std::vector<Vertex>> per_subject;  // R_v, sorted, one entry per subject
};

// Each subject reports up to p of its graph neighbors, excluding its own
// recruiter and recruits. When more than p candidates exist a uniform
// size-p subset is taken.
ReportMultiset recapture(const Graph& graph, const RdsForest& forest, std::size_t max_reports,
                         std::uint64_t seed);
ReportMultiset recapture(const Graph& graph, const RdsForest& forest, std::size_t max_reports,
                         Rng& rng);

// Structural checks on a capture result. Returns one message per violated
// invariant; empty means the forest is well formed for (graph, coupons).
std::vector<std::string> forest_violations(const Graph& graph, const RdsForest& forest,
                                           std::size_t coupons);

}  // namespace hiddenpop
