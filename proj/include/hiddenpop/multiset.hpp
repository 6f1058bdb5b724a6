#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hiddenpop/errors.hpp"

namespace hiddenpop {

// Integer-multiplicity multiset (bag). Elements with multiplicity zero are
// never stored, and iteration visits the support in ascending element order
// so anything derived from a multiset is reproducible.
//
// Terminology used throughout the library:
//   support      A*   the set of elements with multiplicity > 0
//   support_size |A|  number of distinct elements
//   mass         <A>  sum of multiplicities
template <class T>
class Multiset {
 public:
  using value_type = T;
  using Count = std::uint64_t;
  using Storage = std::map<T, Count>;
  using const_iterator = typename Storage::const_iterator;

  Multiset() = default;

  Multiset(std::initializer_list<std::pair<const T, Count>> init) {
    for (const auto& [element, count] : init) add(element, count);
  }

  // Every element of the range counted once per occurrence.
  template <class Range>
  static Multiset from_elements(const Range& elements) {
    Multiset result;
    for (const auto& element : elements) result.add(element);
    return result;
  }

  void add(const T& element, Count times = 1) {
    if (times == 0) return;
    if (mass_ > std::numeric_limits<Count>::max() - times) {
      throw std::overflow_error("multiset multiplicity overflow");
    }
    counts_[element] += times;
    mass_ += times;
  }

  Count count(const T& element) const {
    const auto it = counts_.find(element);
    return it == counts_.end() ? 0 : it->second;
  }

  bool contains(const T& element) const { return counts_.count(element) != 0; }

  std::size_t support_size() const { return counts_.size(); }
  Count mass() const { return mass_; }
  bool empty() const { return counts_.empty(); }

  // True when every multiplicity is 1.
  bool is_set() const { return mass_ == counts_.size(); }

  std::vector<T> support() const {
    std::vector<T> out;
    out.reserve(counts_.size());
    for (const auto& entry : counts_) out.push_back(entry.first);
    return out;
  }

  const_iterator begin() const { return counts_.begin(); }
  const_iterator end() const { return counts_.end(); }

  bool operator==(const Multiset& other) const { return counts_ == other.counts_; }

 private:
  Storage counts_;
  Count mass_ = 0;
};

namespace detail {

// Walks the union of both supports in order, calling fn(element, a, b) with
// the two multiplicities (either may be zero).
template <class T, class Fn>
void merge_walk(const Multiset<T>& a, const Multiset<T>& b, Fn&& fn) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      fn(ia->first, ia->second, typename Multiset<T>::Count{0});
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      fn(ib->first, typename Multiset<T>::Count{0}, ib->second);
      ++ib;
    } else {
      fn(ia->first, ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
}

}  // namespace detail

// Elementwise max.
template <class T>
Multiset<T> multiset_union(const Multiset<T>& a, const Multiset<T>& b) {
  Multiset<T> out;
  detail::merge_walk(a, b, [&](const T& x, auto ca, auto cb) { out.add(x, std::max(ca, cb)); });
  return out;
}

// Elementwise min.
template <class T>
Multiset<T> intersect(const Multiset<T>& a, const Multiset<T>& b) {
  Multiset<T> out;
  detail::merge_walk(a, b, [&](const T& x, auto ca, auto cb) { out.add(x, std::min(ca, cb)); });
  return out;
}

// Elementwise sum; mass is additive.
template <class T>
Multiset<T> sum_union(const Multiset<T>& a, const Multiset<T>& b) {
  Multiset<T> out;
  detail::merge_walk(a, b, [&](const T& x, auto ca, auto cb) {
    out.add(x, ca);
    out.add(x, cb);
  });
  return out;
}

// Saturating elementwise subtraction.
template <class T>
Multiset<T> difference(const Multiset<T>& a, const Multiset<T>& b) {
  Multiset<T> out;
  for (const auto& [x, ca] : a) {
    const auto cb = b.count(x);
    if (ca > cb) out.add(x, ca - cb);
  }
  return out;
}

// Keeps a's multiplicity wherever b has the element at all. For two sets
// this is plain intersection. The match multiset M(A, B) is filter(A, B).
template <class T>
Multiset<T> filter(const Multiset<T>& a, const Multiset<T>& b) {
  Multiset<T> out;
  for (const auto& [x, ca] : a) {
    if (b.contains(x)) out.add(x, ca);
  }
  return out;
}

// Two-column text format: one `element,count` line per support element.
// Lines starting with '#' and blank lines are ignored on read.
template <class T>
void write_counts(std::ostream& out, const Multiset<T>& multiset) {
  for (const auto& [element, count] : multiset) out << element << ',' << count << '\n';
}

template <class T>
Multiset<T> read_counts(std::istream& in) {
  Multiset<T> result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ParseError(line_number, "expected `element,count`");
    std::istringstream element_stream(line.substr(0, comma));
    T element{};
    if (!(element_stream >> element) || !(element_stream >> std::ws).eof()) {
      throw ParseError(line_number, "bad element `" + line.substr(0, comma) + "`");
    }
    const std::string count_text = line.substr(comma + 1);
    std::size_t used = 0;
    unsigned long long count = 0;
    try {
      count = std::stoull(count_text, &used);
    } catch (const std::exception&) {
      throw ParseError(line_number, "bad count `" + count_text + "`");
    }
    if (used != count_text.size() || count == 0 || count_text.front() == '-') {
      throw ParseError(line_number, "bad count `" + count_text + "`");
    }
    result.add(element, count);
  }
  return result;
}

}  // namespace hiddenpop
