#include "hiddenpop/rds.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace hiddenpop {

namespace {

// Uniform vertex outside the discovered set. Rejection sampling while the
// sample is sparse, explicit enumeration once it covers half the graph.
Vertex draw_undiscovered(const std::vector<char>& discovered, std::size_t discovered_count, Rng& rng) {
  const std::size_t n = discovered.size();
  if (discovered_count * 2 < n) {
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
    for (;;) {
      const Vertex v = pick(rng);
      if (!discovered[v]) return v;
    }
  }
  std::vector<Vertex> rest;
  rest.reserve(n - discovered_count);
  for (Vertex v = 0; v < n; ++v) {
    if (!discovered[v]) rest.push_back(v);
  }
  std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
  return rest[pick(rng)];
}

// Floyd's algorithm: k distinct uniform draws from [0, n).
std::vector<Vertex> distinct_uniform(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<Vertex> picked;
  std::unordered_set<Vertex> seen;
  picked.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    auto t = static_cast<Vertex>(pick(rng));
    if (seen.count(t)) t = static_cast<Vertex>(j);
    seen.insert(t);
    picked.push_back(t);
  }
  return picked;
}

}  // namespace

std::vector<Vertex> RdsForest::tree_neighbors(Vertex v) const {
  std::vector<Vertex> out;
  for (const auto& edge : referrals) {
    if (edge.recruiter == v) out.push_back(edge.recruit);
    if (edge.recruit == v) out.push_back(edge.recruiter);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RdsForest rds_capture(const Graph& graph, const RdsParams& params, std::uint64_t seed) {
  const std::size_t n = graph.vertex_count();
  if (params.seeds < 1 || params.seeds > params.target || params.seeds > n) {
    throw std::invalid_argument("capture requires 1 <= s <= n0 and s <= |V|");
  }
  if (params.coupons < 1) throw std::invalid_argument("capture requires c >= 1");
  Rng rng = make_rng(seed);
  const auto seeds = distinct_uniform(n, params.seeds, rng);
  return rds_capture_from(graph, seeds, params.coupons, params.target, rng);
}

RdsForest rds_capture_from(const Graph& graph, std::span<const Vertex> initial_seeds,
                           std::size_t coupons, std::size_t target, Rng& rng) {
  const std::size_t n = graph.vertex_count();
  if (coupons < 1) throw std::invalid_argument("capture requires c >= 1");
  if (n == 0) throw std::invalid_argument("capture on an empty graph");

  RdsForest forest;
  std::vector<char> discovered(n, 0);
  std::vector<Vertex> frontier;

  for (const Vertex v : initial_seeds) {
    if (v >= n) throw std::invalid_argument("seed vertex out of range");
    if (discovered[v]) throw std::invalid_argument("duplicate seed vertex");
    discovered[v] = 1;
    forest.subjects.push_back(v);
    forest.seeds.push_back(v);
    frontier.push_back(v);
  }

  std::vector<Vertex> candidates;
  std::vector<Vertex> chosen;
  do {
    if (frontier.empty()) {
      if (forest.subjects.size() == n) {
        forest.exhausted = true;
        break;
      }
      // Re-seed; the new seed joins S when it is drawn from the frontier.
      const Vertex fresh = draw_undiscovered(discovered, forest.subjects.size(), rng);
      forest.seeds.push_back(fresh);
      frontier.push_back(fresh);
    }

    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const std::size_t slot = pick(rng);
    const Vertex x = frontier[slot];
    frontier[slot] = frontier.back();
    frontier.pop_back();

    if (!discovered[x]) {
      discovered[x] = 1;
      forest.subjects.push_back(x);
    }

    candidates.clear();
    for (const Vertex v : graph.neighbors(x)) {
      if (!discovered[v]) candidates.push_back(v);
    }
    chosen.clear();
    if (candidates.size() <= coupons) {
      chosen = candidates;
    } else {
      std::sample(candidates.begin(), candidates.end(), std::back_inserter(chosen), coupons, rng);
    }
    for (const Vertex v : chosen) {
      discovered[v] = 1;
      forest.subjects.push_back(v);
      forest.referrals.push_back({x, v});
      frontier.push_back(v);
    }
  } while (forest.subjects.size() < target);

  return forest;
}

ReportMultiset recapture(const Graph& graph, const RdsForest& forest, std::size_t max_reports,
                         std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return recapture(graph, forest, max_reports, rng);
}

ReportMultiset recapture(const Graph& graph, const RdsForest& forest, std::size_t max_reports,
                         Rng& rng) {
  std::unordered_map<Vertex, std::vector<Vertex>> tree;
  for (const auto& edge : forest.referrals) {
    tree[edge.recruiter].push_back(edge.recruit);
    tree[edge.recruit].push_back(edge.recruiter);
  }

  ReportMultiset out;
  std::vector<Vertex> candidates;
  for (const Vertex v : forest.subjects) {
    std::vector<Vertex> tree_adjacent;
    if (const auto it = tree.find(v); it != tree.end()) {
      tree_adjacent = it->second;
      std::sort(tree_adjacent.begin(), tree_adjacent.end());
    }
    const auto neighbors = graph.neighbors(v);
    candidates.clear();
    std::set_difference(neighbors.begin(), neighbors.end(), tree_adjacent.begin(),
                        tree_adjacent.end(), std::back_inserter(candidates));

    std::vector<Vertex> reported;
    if (candidates.size() <= max_reports) {
      reported = candidates;
    } else {
      std::sample(candidates.begin(), candidates.end(), std::back_inserter(reported), max_reports,
                  rng);
    }
    for (const Vertex u : reported) out.reports.add(u);
    out.per_subject.emplace(v, std::move(reported));
  }
  return out;
}

std::vector<std::string> forest_violations(const Graph& graph, const RdsForest& forest,
                                           std::size_t coupons) {
  std::vector<std::string> problems;
  const std::size_t n = graph.vertex_count();
  std::unordered_map<Vertex, std::size_t> order;
  for (std::size_t i = 0; i < forest.subjects.size(); ++i) {
    const Vertex v = forest.subjects[i];
    if (v >= n) {
      problems.push_back("subject " + std::to_string(v) + " out of range");
      continue;
    }
    if (!order.emplace(v, i).second) problems.push_back("subject " + std::to_string(v) + " repeated");
  }

  std::unordered_map<Vertex, std::size_t> inbound;
  std::unordered_map<Vertex, std::size_t> outbound;
  for (const auto& [recruiter, recruit] : forest.referrals) {
    const auto label = std::to_string(recruiter) + "->" + std::to_string(recruit);
    const auto from = order.find(recruiter);
    const auto to = order.find(recruit);
    if (from == order.end() || to == order.end()) {
      problems.push_back("referral " + label + " leaves the sample");
      continue;
    }
    if (!graph.has_edge(recruiter, recruit)) problems.push_back("referral " + label + " not in graph");
    if (from->second >= to->second) problems.push_back("referral " + label + " recruits an earlier subject");
    ++inbound[recruit];
    ++outbound[recruiter];
  }
  for (const auto& [v, count] : inbound) {
    if (count > 1) problems.push_back("subject " + std::to_string(v) + " recruited more than once");
  }
  for (const auto& [v, count] : outbound) {
    if (count > coupons) problems.push_back("subject " + std::to_string(v) + " exceeded coupon limit");
  }
  for (const Vertex s : forest.seeds) {
    if (inbound.count(s)) problems.push_back("seed " + std::to_string(s) + " has a recruiter");
    if (!order.count(s)) problems.push_back("seed " + std::to_string(s) + " not in sample");
  }
  if (forest.referrals.size() + forest.seeds.size() != forest.subjects.size()) {
    problems.push_back("forest edge count " + std::to_string(forest.referrals.size()) +
                       " != subjects - seeds");
  }
  return problems;
}

}  // namespace hiddenpop
