#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "hiddenpop/rds.hpp"

using namespace hiddenpop;

namespace {

Graph cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v < n; ++v) edges.emplace_back(v, static_cast<Vertex>((v + 1) % n));
  return Graph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("capture reaches the target and respects the forest invariants") {
  const auto g = generate_ba(2000, 3, 5);
  const auto forest = rds_capture(g, {6, 3, 500}, 42);
  CHECK(forest.subjects.size() >= 500);
  CHECK(forest.subjects.size() <= 503);
  CHECK_FALSE(forest.exhausted);
  CHECK(forest.seeds.size() >= 6);
  CHECK(forest_violations(g, forest, 3).empty());
  CHECK(rds_capture(g, {6, 3, 500}, 42).subjects == forest.subjects);
}

TEST_CASE("capture parameter validation") {
  const auto g = cycle(10);
  CHECK_THROWS_AS(rds_capture(g, {0, 3, 5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(rds_capture(g, {6, 3, 5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(rds_capture(g, {11, 3, 20}, 1), std::invalid_argument);
  CHECK_THROWS_AS(rds_capture(g, {1, 0, 5}, 1), std::invalid_argument);
}

TEST_CASE("a target above the population exhausts it") {
  const auto g = cycle(12);
  const auto forest = rds_capture(g, {2, 1, 50}, 3);
  CHECK(forest.exhausted);
  CHECK(forest.subjects.size() == 12);
  CHECK(forest_violations(g, forest, 1).empty());
}

TEST_CASE("re-seeding when the frontier runs dry") {
  // Isolated vertices force a re-seed after every subject.
  const auto g = Graph::from_edges(30, std::vector<Edge>{});
  const auto forest = rds_capture(g, {1, 3, 10}, 8);
  CHECK(forest.subjects.size() == 10);
  CHECK(forest.seeds.size() == 10);
  CHECK(forest.referrals.empty());
  CHECK(forest_violations(g, forest, 3).empty());
}

TEST_CASE("the single seed is uniform over vertices (chi-square)") {
  constexpr std::size_t n = 20;
  constexpr int draws = 20000;
  const auto g = cycle(n);
  std::vector<int> hits(n, 0);
  for (int i = 0; i < draws; ++i) ++hits[rds_capture(g, {1, 1, 1}, static_cast<std::uint64_t>(i)).seeds[0]];
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / n;
  for (const int h : hits) chi2 += (h - expected) * (h - expected) / expected;
  CHECK(chi2 < 43.82);  // 19 degrees of freedom, p = 0.001
}

TEST_CASE("randomized capture and recapture invariants hold on 1000 instances") {
  std::mt19937_64 rng(2024);
  std::size_t violations = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(20, 200)(rng);
    const auto g = instance % 2 ? generate_ba(n, 1 + instance % 4, rng()) : generate_er(n, 3.0, rng());
    const std::size_t s = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const std::size_t c = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const std::size_t n0 = std::uniform_int_distribution<std::size_t>(s, n)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    const auto forest = rds_capture(g, {s, c, n0}, rng());
    const auto problems = forest_violations(g, forest, c);
    violations += problems.size();
    if (!forest.exhausted) {
      violations += forest.subjects.size() < n0;
      violations += forest.subjects.size() > n0 + c;
    }

    const auto reports = recapture(g, forest, p, rng());
    std::uint64_t mass = 0;
    for (const Vertex v : forest.subjects) {
      const auto& reported = reports.per_subject.at(v);
      mass += reported.size();
      const auto tree = forest.tree_neighbors(v);
      std::size_t candidates = 0;
      for (const Vertex u : g.neighbors(v)) candidates += !std::binary_search(tree.begin(), tree.end(), u);
      violations += reported.size() != std::min(p, candidates);
      violations += !std::is_sorted(reported.begin(), reported.end());
      for (const Vertex u : reported) {
        violations += !g.has_edge(v, u);
        violations += std::binary_search(tree.begin(), tree.end(), u);
      }
    }
    violations += reports.reports.mass() != mass;
    violations += reports.per_subject.size() != forest.subjects.size();
  }
  CHECK(violations == 0);
}

TEST_CASE("recapture on the worked example is forced when p exceeds every candidate list") {
  using namespace fixtures::fig1;
  const auto g = graph();
  const auto forest = fixtures::fig1::forest();
  CHECK(forest_violations(g, forest, 3).empty());
  const auto reports = recapture(g, forest, 5, 77);
  const auto& r = reports.per_subject;
  CHECK(r.at(s1) == std::vector<Vertex>{C, D});
  CHECK(r.at(s2) == std::vector<Vertex>{s5});
  CHECK(r.at(s3).empty());
  CHECK(r.at(s4) == std::vector<Vertex>{A});
  CHECK(r.at(s5) == std::vector<Vertex>{s2, A, B, C});
  CHECK(r.at(s6) == std::vector<Vertex>{s7});
  CHECK(r.at(s7) == std::vector<Vertex>{s6, E});
  CHECK(reports.reports == fixtures::fig1::reports());
}

TEST_CASE("recapture caps each report list at p") {
  using namespace fixtures::fig1;
  const auto reports = recapture(graph(), forest(), 1, 5);
  for (const auto& [v, list] : reports.per_subject) CHECK(list.size() <= 1);
  CHECK(reports.per_subject.at(s5).size() == 1);
}

TEST_CASE("forest_violations catches broken forests") {
  using namespace fixtures::fig1;
  const auto g = graph();
  auto bad = forest();
  bad.referrals.push_back({s6, s7});  // s7 recruited twice
  CHECK_FALSE(forest_violations(g, bad, 3).empty());

  auto over = forest();
  CHECK_FALSE(forest_violations(g, over, 1).empty());  // s1 and s3 each recruited two

  auto off_graph = forest();
  off_graph.referrals[0] = {s1, s5};
  CHECK_FALSE(forest_violations(g, off_graph, 3).empty());
}
