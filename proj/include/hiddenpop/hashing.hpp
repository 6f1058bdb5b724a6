#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <unordered_map>

#include "hiddenpop/graph.hpp"
#include "hiddenpop/multiset.hpp"

namespace hiddenpop {

// Anonymized identity in the hash space H = {1..m}.
enum class Code : std::uint32_t {};

inline std::uint32_t code_value(Code code) { return static_cast<std::uint32_t>(code); }

std::ostream& operator<<(std::ostream& out, Code code);
std::istream& operator>>(std::istream& in, Code& code);

// A materialized random hash psi: V -> {1..m}.
class HashAssignment {
 public:
  HashAssignment(std::size_t hash_space, std::unordered_map<Vertex, Code> table)
      : hash_space_(hash_space), table_(std::move(table)) {}

  std::size_t hash_space() const { return hash_space_; }
  std::size_t size() const { return table_.size(); }
  bool covers(Vertex v) const { return table_.count(v) != 0; }

  // Throws std::out_of_range for a vertex outside the assignment's scope.
  Code code_of(Vertex v) const;

 private:
  std::size_t hash_space_;
  std::unordered_map<Vertex, Code> table_;
};

// Independent uniform code in [1, m] for every listed vertex. Codes are drawn
// in ascending vertex order, so the result depends only on the vertex set and
// the seed. Throws std::invalid_argument for m = 0.
HashAssignment draw_hash(std::span<const Vertex> vertices, std::size_t hash_space, std::uint64_t seed);

// Hash covering every vertex of the graph.
HashAssignment draw_hash(const Graph& graph, std::size_t hash_space, std::uint64_t seed);

// Image of a multiset under psi; multiplicities of colliding elements add up,
// so mass is preserved.
Multiset<Code> apply_hash(const HashAssignment& psi, const Multiset<Vertex>& elements);
Multiset<Code> apply_hash(const HashAssignment& psi, std::span<const Vertex> elements);

// Phone-digit code. For each of the last `digits` decimal digits, taken from
// the last digit backwards, emit a parity bit (odd = 1) then a magnitude bit
// (5-9 = 1). The bit string is read most-significant-first, so the final
// digit owns the two highest bits. Code space is 2^(2 * digits).
struct TelefunkenCode {
  unsigned digits = 0;
  std::uint32_t value = 0;

  std::uint64_t space_size() const { return std::uint64_t{1} << (2 * digits); }
  bool operator==(const TelefunkenCode&) const = default;
};

inline constexpr unsigned kMaxTelefunkenDigits = 15;

// Throws std::invalid_argument on non-digit characters, fewer than `digits`
// digits, or digits outside [1, 15].
TelefunkenCode telefunken_encode(std::string_view phone_digits, unsigned digits);

}  // namespace hiddenpop
