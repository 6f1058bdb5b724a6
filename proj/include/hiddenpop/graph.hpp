#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace hiddenpop {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Immutable simple undirected graph on vertices 0..n-1 with sorted adjacency.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an undirected edge list. Duplicate edges (in either
  // orientation) collapse to one; self-loops and out-of-range endpoints throw
  // std::invalid_argument.
  static Graph from_edges(std::size_t vertex_count, std::span<const Edge> edges);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  // Sorted neighbor list; throws std::out_of_range for v >= n.
  std::span<const Vertex> neighbors(Vertex v) const;
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }
  bool has_edge(Vertex u, Vertex v) const;

  // Every edge once as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::size_t edge_count_ = 0;
};

// Barabasi-Albert preferential attachment. Starts from a complete graph on
// attach+1 vertices; every later vertex joins with exactly `attach` distinct
// neighbors drawn with probability proportional to current degree.
// Requires n > attach >= 1.
Graph generate_ba(std::size_t n, std::size_t attach, std::uint64_t seed);

// Erdos-Renyi G(n, p) with p = mean_degree / (n - 1).
// Requires 0 < mean_degree < n - 1.
Graph generate_er(std::size_t n, double mean_degree, std::uint64_t seed);

// Edge-list text: a `# hiddenpop-edges v1 n=<count>` header followed by one
// `u v` line per edge. Reading also accepts header-less files, in which case
// vertex ids are remapped densely in ascending id order. Errors throw
// ParseError with the offending line number.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& graph);
Graph load_edge_list(const std::filesystem::path& path);
void save_edge_list(const std::filesystem::path& path, const Graph& graph);

struct DegreeSummary {
  double mean = 0.0;
  std::size_t max = 0;
  std::size_t min = 0;
};
DegreeSummary degree_summary(const Graph& graph);

}  // namespace hiddenpop
