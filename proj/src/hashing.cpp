#include "hiddenpop/hashing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hiddenpop/seeding.hpp"

namespace hiddenpop {

std::ostream& operator<<(std::ostream& out, Code code) { return out << code_value(code); }

std::istream& operator>>(std::istream& in, Code& code) {
  std::uint32_t raw = 0;
  if (in >> raw) code = Code{raw};
  return in;
}

Code HashAssignment::code_of(Vertex v) const {
  const auto it = table_.find(v);
  if (it == table_.end()) throw std::out_of_range("vertex " + std::to_string(v) + " has no hash code");
  return it->second;
}

HashAssignment draw_hash(std::span<const Vertex> vertices, std::size_t hash_space, std::uint64_t seed) {
  if (hash_space == 0) throw std::invalid_argument("hash space must be non-empty");
  std::vector<Vertex> scope(vertices.begin(), vertices.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());

  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(1, static_cast<std::uint32_t>(hash_space));
  std::unordered_map<Vertex, Code> table;
  table.reserve(scope.size());
  for (const Vertex v : scope) table.emplace(v, Code{pick(rng)});
  return HashAssignment(hash_space, std::move(table));
}

HashAssignment draw_hash(const Graph& graph, std::size_t hash_space, std::uint64_t seed) {
  std::vector<Vertex> all(graph.vertex_count());
  std::iota(all.begin(), all.end(), Vertex{0});
  return draw_hash(all, hash_space, seed);
}

Multiset<Code> apply_hash(const HashAssignment& psi, const Multiset<Vertex>& elements) {
  Multiset<Code> image;
  for (const auto& [v, count] : elements) image.add(psi.code_of(v), count);
  return image;
}

Multiset<Code> apply_hash(const HashAssignment& psi, std::span<const Vertex> elements) {
  Multiset<Code> image;
  for (const Vertex v : elements) image.add(psi.code_of(v));
  return image;
}

TelefunkenCode telefunken_encode(std::string_view phone_digits, unsigned digits) {
  if (digits < 1 || digits > kMaxTelefunkenDigits) {
    throw std::invalid_argument("telefunken digit count must be in [1, 15]");
  }
  if (phone_digits.find_first_not_of("0123456789") != std::string_view::npos) {
    throw std::invalid_argument("phone number contains non-digit characters");
  }
  if (phone_digits.size() < digits) {
    throw std::invalid_argument("phone number has fewer than " + std::to_string(digits) + " digits");
  }
  TelefunkenCode code;
  code.digits = digits;
  for (unsigned i = 0; i < digits; ++i) {
    const int digit = phone_digits[phone_digits.size() - 1 - i] - '0';
    const std::uint32_t parity = digit % 2;
    const std::uint32_t high = digit >= 5 ? 1 : 0;
    code.value = (code.value << 2) | (parity << 1) | high;
  }
  return code;
}

}  // namespace hiddenpop
