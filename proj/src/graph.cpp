#include "hiddenpop/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "hiddenpop/errors.hpp"
#include "hiddenpop/seeding.hpp"

namespace hiddenpop {

Graph Graph::from_edges(std::size_t vertex_count, std::span<const Edge> edges) {
  if (vertex_count > std::numeric_limits<Vertex>::max()) {
    throw std::invalid_argument("graph too large for 32-bit vertex ids");
  }
  Graph graph;
  graph.adjacency_.resize(vertex_count);
  for (const auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("self-loop on vertex " + std::to_string(u));
    if (u >= vertex_count || v >= vertex_count) {
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(u) + " " +
                                  std::to_string(v));
    }
    graph.adjacency_[u].push_back(v);
    graph.adjacency_[v].push_back(u);
  }
  std::size_t degree_sum = 0;
  for (auto& list : graph.adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    list.shrink_to_fit();
    degree_sum += list.size();
  }
  graph.edge_count_ = degree_sum / 2;
  return graph;
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
  if (v >= adjacency_.size()) {
    throw std::out_of_range("vertex " + std::to_string(v) + " out of range (n=" +
                            std::to_string(adjacency_.size()) + ")");
  }
  return adjacency_[v];
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto list = neighbors(u);
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < adjacency_.size(); ++u) {
    for (const Vertex v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph generate_ba(std::size_t n, std::size_t attach, std::uint64_t seed) {
  if (attach < 1 || n <= attach) {
    throw std::invalid_argument("Barabasi-Albert requires n > attach >= 1 (n=" + std::to_string(n) +
                                ", attach=" + std::to_string(attach) + ")");
  }
  Rng rng = make_rng(seed);
  std::vector<Edge> edges;
  edges.reserve((attach + 1) * attach / 2 + (n - attach - 1) * attach);

  // Each vertex appears here once per incident edge, so a uniform draw from
  // this list is a degree-proportional vertex draw.
  std::vector<Vertex> endpoint_pool;
  endpoint_pool.reserve(2 * edges.capacity());

  const auto core = static_cast<Vertex>(attach + 1);
  for (Vertex u = 0; u < core; ++u) {
    for (Vertex v = u + 1; v < core; ++v) {
      edges.emplace_back(u, v);
      endpoint_pool.push_back(u);
      endpoint_pool.push_back(v);
    }
  }

  std::vector<Vertex> targets;
  targets.reserve(attach);
  for (auto v = core; v < n; ++v) {
    targets.clear();
    std::uniform_int_distribution<std::size_t> pick(0, endpoint_pool.size() - 1);
    while (targets.size() < attach) {
      const Vertex candidate = endpoint_pool[pick(rng)];
      if (std::find(targets.begin(), targets.end(), candidate) == targets.end()) {
        targets.push_back(candidate);
      }
    }
    for (const Vertex target : targets) {
      edges.emplace_back(target, v);
      endpoint_pool.push_back(target);
      endpoint_pool.push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

Graph generate_er(std::size_t n, double mean_degree, std::uint64_t seed) {
  if (n < 2 || !(mean_degree > 0.0) || !(mean_degree < static_cast<double>(n - 1))) {
    throw std::invalid_argument("Erdos-Renyi requires 0 < mean_degree < n - 1");
  }
  const double p = mean_degree / static_cast<double>(n - 1);
  Rng rng = make_rng(seed);
  std::vector<Edge> edges;

  // Geometric skipping over the lower triangle (Batagelj & Brandes).
  std::geometric_distribution<std::int64_t> skip(p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto count = static_cast<std::int64_t>(n);
  while (v < count) {
    w += 1 + skip(rng);
    while (w >= v && v < count) {
      w -= v;
      ++v;
    }
    if (v < count) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
  }
  return Graph::from_edges(n, edges);
}

namespace {

bool parse_vertex_token(const std::string& token, std::uint64_t& out) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) return false;
  try {
    out = std::stoull(token);
  } catch (const std::exception&) {
    return false;
  }
  return out <= std::numeric_limits<Vertex>::max();
}

std::size_t header_vertex_count(const std::string& line) {
  std::istringstream tokens(line.substr(1));
  std::string token;
  while (tokens >> token) {
    if (token.rfind("n=", 0) == 0) {
      std::uint64_t n = 0;
      if (!parse_vertex_token(token.substr(2), n)) return std::string::npos;
      return static_cast<std::size_t>(n);
    }
  }
  return std::string::npos;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::size_t declared = std::string::npos;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (raw.empty() && declared == std::string::npos) declared = header_vertex_count(line.substr(first));
      continue;
    }
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a >> b) || (tokens >> extra)) {
      throw ParseError(line_number, "expected two vertex ids `u v`");
    }
    std::uint64_t u = 0, v = 0;
    if (!parse_vertex_token(a, u) || !parse_vertex_token(b, v)) {
      throw ParseError(line_number, "non-integer vertex id in `" + line + "`");
    }
    if (u == v) throw ParseError(line_number, "self-loop on vertex " + a);
    if (declared != std::string::npos && (u >= declared || v >= declared)) {
      throw ParseError(line_number, "vertex id exceeds declared n=" + std::to_string(declared));
    }
    raw.emplace_back(u, v);
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  if (declared != std::string::npos) {
    for (const auto& [u, v] : raw) edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    return Graph::from_edges(declared, edges);
  }

  std::map<std::uint64_t, Vertex> dense;
  for (const auto& [u, v] : raw) {
    dense.emplace(u, 0);
    dense.emplace(v, 0);
  }
  Vertex next = 0;
  for (auto& entry : dense) entry.second = next++;
  for (const auto& [u, v] : raw) edges.emplace_back(dense.at(u), dense.at(v));
  return Graph::from_edges(dense.size(), edges);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# hiddenpop-edges v1 n=" << graph.vertex_count() << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return read_edge_list(in);
}

void save_edge_list(const std::filesystem::path& path, const Graph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path.string());
  write_edge_list(out, graph);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

DegreeSummary degree_summary(const Graph& graph) {
  DegreeSummary summary;
  const auto n = graph.vertex_count();
  if (n == 0) return summary;
  summary.min = std::numeric_limits<std::size_t>::max();
  for (Vertex v = 0; v < n; ++v) {
    const auto d = graph.degree(v);
    summary.max = std::max(summary.max, d);
    summary.min = std::min(summary.min, d);
  }
  summary.mean = 2.0 * static_cast<double>(graph.edge_count()) / static_cast<double>(n);
  return summary;
}

}  // namespace hiddenpop
