#pragma once

// Transformation tables over a finite carrier and the monoid machinery shared
// by algebras, automata and the equation engine.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vpl/error.hpp"

namespace vpl {

using Element = std::uint32_t;
using OpId = std::uint32_t;

inline constexpr Element kNoElement = static_cast<Element>(-1);

/// t[x] is the image of x.
using Transformation = std::vector<Element>;

struct TransformationHash {
  std::size_t operator()(Transformation const& t) const noexcept {
    std::size_t h = t.size();
    for (Element e : t) h = h * 1000003u ^ (e + 0x9e3779b9u + (h << 6) + (h >> 2));
    return h;
  }
};

inline Transformation identity_transformation(std::size_t n) {
  Transformation t(n);
  std::iota(t.begin(), t.end(), Element{0});
  return t;
}

inline Transformation constant_transformation(std::size_t n, Element value) {
  return Transformation(n, value);
}

/// (f o g)(x) = f(g(x)).
inline Transformation compose(Transformation const& f, Transformation const& g) {
  Transformation out(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) out[x] = f[g[x]];
  return out;
}

inline bool is_identity(Transformation const& t) {
  for (std::size_t x = 0; x < t.size(); ++x) {
    if (t[x] != x) return false;
  }
  return true;
}

/// Insertion-ordered set of distinct tables with O(1) lookup.
class TransformationSet {
 public:
  std::pair<std::size_t, bool> insert(Transformation t) {
    auto it = index_.find(t);
    if (it != index_.end()) return {it->second, false};
    std::size_t const id = tables_.size();
    index_.emplace(t, id);
    tables_.push_back(std::move(t));
    return {id, true};
  }

  std::optional<std::size_t> find(Transformation const& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(Transformation const& t) const { return index_.contains(t); }
  std::size_t size() const noexcept { return tables_.size(); }
  Transformation const& operator[](std::size_t i) const { return tables_[i]; }
  std::vector<Transformation> const& tables() const noexcept { return tables_; }
  std::vector<Transformation> release() && { return std::move(tables_); }

 private:
  std::vector<Transformation> tables_;
  std::unordered_map<Transformation, std::size_t, TransformationHash> index_;
};

/// Closes `set` under composition with itself. New tables are produced as
/// existing o generator, where the generators are the tables present on
/// entry; `on_new(id, left, right)` reports each addition as t_left o t_right.
template <class OnNew>
void close_under_composition(TransformationSet& set, std::size_t cap, OnNew&& on_new) {
  std::size_t const generators = set.size();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t g = 0; g < generators; ++g) {
      auto [id, inserted] = set.insert(compose(set[i], set[g]));
      if (inserted) {
        if (set.size() > cap) {
          throw SizeCapExceeded("operation monoid exceeds " + std::to_string(cap) + " tables");
        }
        on_new(id, i, g);
      }
    }
  }
}

/// As above, but only the tables at the indices in `generators` are used
/// on the right. Correct when every table in `set` is a product of those
/// generators (and the identity is present).
template <class OnNew>
void close_under_composition(TransformationSet& set, std::vector<std::size_t> const& generators, std::size_t cap,
                             OnNew&& on_new) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t g : generators) {
      auto [id, inserted] = set.insert(compose(set[i], set[g]));
      if (inserted) {
        if (set.size() > cap) {
          throw SizeCapExceeded("operation monoid exceeds " + std::to_string(cap) + " tables");
        }
        on_new(id, i, g);
      }
    }
  }
}

inline void close_under_composition(TransformationSet& set, std::size_t cap) {
  close_under_composition(set, cap, [](std::size_t, std::size_t, std::size_t) {});
}

/// Returns e^k for the least k >= 1 with e^k idempotent. `mul(a, b)` is the
/// monoid product; in a finite monoid this is the stationary value of e^(n!).
template <class T, class Mul>
T idempotent_power(T const& e, Mul&& mul, std::size_t step_limit = 1u << 20) {
  T power = e;
  for (std::size_t k = 1; k <= step_limit; ++k) {
    if (mul(power, power) == power) return power;
    power = mul(power, e);
  }
  throw SizeCapExceeded("no idempotent power within " + std::to_string(step_limit) + " steps");
}

/// Least k >= 1 with e^k idempotent.
template <class T, class Mul>
std::size_t idempotent_exponent(T const& e, Mul&& mul, std::size_t step_limit = 1u << 20) {
  T power = e;
  for (std::size_t k = 1; k <= step_limit; ++k) {
    if (mul(power, power) == power) return k;
    power = mul(power, e);
  }
  throw SizeCapExceeded("no idempotent power within " + std::to_string(step_limit) + " steps");
}

}  // namespace vpl
