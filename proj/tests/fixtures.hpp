#pragma once

#include <random>
#include <vector>

#include "hiddenpop/graph.hpp"
#include "hiddenpop/multiset.hpp"
#include "hiddenpop/rds.hpp"

namespace fixtures {

using hiddenpop::Graph;
using hiddenpop::Multiset;
using hiddenpop::RdsForest;
using hiddenpop::Vertex;

// The seven-subject worked example. Subjects 1..7 are vertices 0..6, the
// unsampled individuals A..E are 7..11.
namespace fig1 {

inline constexpr Vertex s1 = 0, s2 = 1, s3 = 2, s4 = 3, s5 = 4, s6 = 5, s7 = 6;
inline constexpr Vertex A = 7, B = 8, C = 9, D = 10, E = 11;

inline Graph graph() {
  const std::vector<hiddenpop::Edge> edges{
      // referral tree
      {s1, s2}, {s1, s3}, {s2, s4}, {s4, s5}, {s3, s6}, {s3, s7},
      // the remaining acquaintances
      {s1, C}, {s1, D}, {s2, s5}, {s4, A}, {s5, A}, {s5, B}, {s5, C}, {s6, s7}, {s7, E},
  };
  return Graph::from_edges(12, edges);
}

inline RdsForest forest() {
  RdsForest f;
  f.subjects = {s1, s2, s3, s4, s5, s6, s7};
  f.referrals = {{s1, s2}, {s1, s3}, {s2, s4}, {s4, s5}, {s3, s6}, {s3, s7}};
  f.seeds = {s1};
  return f;
}

inline Multiset<Vertex> capture() { return Multiset<Vertex>::from_elements(forest().subjects); }

// rS = {C, D, 5, A, A, 2, B, C, 7, 6, E}
inline Multiset<Vertex> reports() {
  return Multiset<Vertex>::from_elements(std::vector<Vertex>{C, D, s5, A, A, s2, B, C, s7, s6, E});
}

}  // namespace fig1

// Connected graph with a little of everything: a BA core plus a pendant path.
inline Graph small_ba(std::size_t n, std::uint64_t seed) { return hiddenpop::generate_ba(n, 2, seed); }

inline Multiset<int> random_multiset(std::mt19937_64& rng, int universe, int max_count) {
  std::uniform_int_distribution<int> count(0, max_count);
  Multiset<int> out;
  for (int x = 0; x < universe; ++x) {
    const int c = count(rng);
    for (int i = 0; i < c; ++i) out.add(x);
  }
  return out;
}

}  // namespace fixtures
