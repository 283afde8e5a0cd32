#pragma once

// Isomorphism and division tests between finite Ext-algebras.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "vpl/algebra.hpp"

namespace vpl {

inline constexpr std::size_t kSearchCap = 64;

namespace detail {

/// Stable colouring of the carrier by invariants that any isomorphism
/// preserves: identity flag, idempotency, fixed-point counts, then repeated
/// refinement over the multiplication table.
inline std::vector<std::size_t> element_colours(ExtAlgebra const& r) {
  std::size_t const n = r.size();
  std::vector<std::vector<std::size_t>> sig(n);
  for (Element x = 0; x < n; ++x) {
    std::size_t fixed_by_ops = 0;
    for (OpId e = 0; e < r.op_count(); ++e) fixed_by_ops += r.apply(e, x) == x;
    std::size_t left_absorbed = 0;
    for (Element y = 0; y < n; ++y) left_absorbed += r.multiply(y, x) == x;
    sig[x] = {x == r.identity(), r.multiply(x, x) == x, fixed_by_ops, left_absorbed};
  }
  auto relabel = [&] {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    for (auto const& s : sig) ids.try_emplace(s, 0);
    std::size_t next = 0;
    for (auto& [key, id] : ids) id = next++;
    std::vector<std::size_t> out(n);
    for (Element x = 0; x < n; ++x) out[x] = ids[sig[x]];
    return out;
  };
  std::vector<std::size_t> colour = relabel();
  for (std::size_t round = 0; round < n; ++round) {
    for (Element x = 0; x < n; ++x) {
      std::vector<std::size_t> row;
      row.reserve(2 * n);
      for (Element y = 0; y < n; ++y) {
        row.push_back(colour[y] * 2 * n * n + colour[r.multiply(x, y)] * n + colour[r.multiply(y, x)]);
      }
      std::sort(row.begin(), row.end());
      sig[x] = {colour[x]};
      sig[x].insert(sig[x].end(), row.begin(), row.end());
    }
    std::vector<std::size_t> next = relabel();
    std::size_t const before = std::set<std::size_t>(colour.begin(), colour.end()).size();
    std::size_t const after = std::set<std::size_t>(next.begin(), next.end()).size();
    colour = std::move(next);
    if (after == before) break;
  }
  return colour;
}

}  // namespace detail

/// Bijection R -> S (index x of R maps to result[x] of S) when the algebras
/// are isomorphic.
inline std::optional<std::vector<Element>> find_isomorphism(ExtAlgebra const& r, ExtAlgebra const& s,
                                                            std::size_t cap = kSearchCap) {
  std::size_t const n = r.size();
  if (n > cap || s.size() > cap) {
    throw SizeCapExceeded("isomorphism search is capped at " + std::to_string(cap) + " elements");
  }
  if (n != s.size() || r.op_count() != s.op_count()) return std::nullopt;

  auto colours_of = [](ExtAlgebra const& a) { return detail::element_colours(a); };
  std::vector<std::size_t> cr = colours_of(r);
  std::vector<std::size_t> cs = colours_of(s);
  // Colour ids are ranks of signatures, so they correspond under any
  // isomorphism.
  auto invariant = [](ExtAlgebra const& a, Element x) {
    std::size_t fixed_by_ops = 0;
    for (OpId e = 0; e < a.op_count(); ++e) fixed_by_ops += a.apply(e, x) == x;
    std::size_t left_absorbed = 0;
    std::size_t right_absorbed = 0;
    for (Element y = 0; y < a.size(); ++y) {
      left_absorbed += a.multiply(y, x) == x;
      right_absorbed += a.multiply(x, y) == x;
    }
    std::set<Element> powers;
    Element p = x;
    while (powers.insert(p).second) p = a.multiply(p, x);
    return std::vector<std::size_t>{x == a.identity(), a.multiply(x, x) == x, fixed_by_ops,
                                    left_absorbed, right_absorbed, powers.size()};
  };
  std::vector<std::vector<std::size_t>> ir(n);
  std::vector<std::vector<std::size_t>> is(n);
  for (Element x = 0; x < n; ++x) {
    ir[x] = invariant(r, x);
    is[x] = invariant(s, x);
  }
  // Class sizes must agree.
  {
    std::map<std::size_t, std::size_t> a;
    std::map<std::size_t, std::size_t> b;
    for (Element x = 0; x < n; ++x) {
      ++a[cr[x]];
      ++b[cs[x]];
    }
    std::vector<std::size_t> sa;
    std::vector<std::size_t> sb;
    for (auto [k, v] : a) sa.push_back(v);
    for (auto [k, v] : b) sb.push_back(v);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }

  std::unordered_set<Transformation, TransformationHash> s_ops(s.ops().begin(), s.ops().end());

  // Order R's elements: rarest local invariant first.
  std::vector<Element> order(n);
  for (Element x = 0; x < n; ++x) order[x] = x;
  std::map<std::size_t, std::size_t> class_size;
  for (Element x = 0; x < n; ++x) ++class_size[cr[x]];
  std::stable_sort(order.begin(), order.end(), [&](Element a, Element b) {
    if (a == r.identity() || b == r.identity()) return a == r.identity() && b != r.identity();
    return class_size[cr[a]] < class_size[cr[b]];
  });

  std::vector<Element> f(n, kNoElement);
  std::vector<Element> g(n, kNoElement);  // inverse

  // Extends the partial map by forced products; returns false on conflict.
  // Every assignment made is recorded in `trail` for undoing.
  std::function<bool(Element, Element, std::vector<Element>&)> assign =
      [&](Element x, Element y, std::vector<Element>& trail) -> bool {
    if (f[x] != kNoElement) return f[x] == y;
    if (g[y] != kNoElement) return false;
    if (ir[x] != is[y] || cr[x] != cs[y]) return false;
    f[x] = y;
    g[y] = x;
    trail.push_back(x);
    for (std::size_t i = 0; i < trail.size(); ++i) {
      Element const a = trail[i];
      for (Element b = 0; b < n; ++b) {
        if (f[b] == kNoElement) continue;
        if (!assign(r.multiply(a, b), s.multiply(f[a], f[b]), trail)) return false;
        if (!assign(r.multiply(b, a), s.multiply(f[b], f[a]), trail)) return false;
      }
    }
    return true;
  };
  auto undo = [&](std::vector<Element> const& trail) {
    for (Element x : trail) {
      g[f[x]] = kNoElement;
      f[x] = kNoElement;
    }
  };
  auto ops_match = [&] {
    for (OpId e = 0; e < r.op_count(); ++e) {
      Transformation t(n);
      for (Element x = 0; x < n; ++x) t[f[x]] = f[r.apply(e, x)];
      if (!s_ops.contains(t)) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> search = [&](std::size_t pos) -> bool {
    while (pos < n && f[order[pos]] != kNoElement) ++pos;
    if (pos == n) return ops_match();
    Element const x = order[pos];
    for (Element y = 0; y < n; ++y) {
      if (g[y] != kNoElement || ir[x] != is[y] || cr[x] != cs[y]) continue;
      std::vector<Element> trail;
      if (assign(x, y, trail) && search(pos + 1)) return true;
      undo(trail);
    }
    return false;
  };

  std::vector<Element> trail;
  if (!assign(r.identity(), s.identity(), trail)) return std::nullopt;
  if (!search(0)) return std::nullopt;
  return f;
}

inline bool are_isomorphic(ExtAlgebra const& r, ExtAlgebra const& s, std::size_t cap = kSearchCap) {
  return find_isomorphism(r, s, cap).has_value();
}

// --- division ---------------------------------------------------------------

struct DivisionCaps {
  std::size_t max_generator_sets = 20000;
  std::size_t max_search_nodes = 200000;
  std::size_t size_cap = kSearchCap;
};

/// Outcome of a bounded search for R as a quotient of a sub of S.
struct DivisionResult {
  bool found = false;
  /// True when the absence of a witness is conclusive.
  bool exhaustive = false;
  std::vector<Element> element_gens;  // S elements generating the sub
  std::vector<OpId> op_gens;          // S ops generating the sub
  std::vector<Element> sub_elements;  // carrier of the sub, as S elements
  std::vector<Element> projection;    // sub element index -> R element
};

namespace detail {

/// Surjective Ext-algebra morphism T -> R whose induced operation set is
/// exactly O(R). Returns the element map or nothing; `nodes` is charged per
/// search node and the search gives up (sets `truncated`) at the budget.
inline std::optional<std::vector<Element>> surjective_morphism(ExtAlgebra const& t, ExtAlgebra const& r,
                                                               std::size_t& nodes, std::size_t budget,
                                                               bool& truncated) {
  std::size_t const n = t.size();
  std::size_t const k = r.size();
  if (n < k || t.op_count() < r.op_count()) return std::nullopt;
  std::vector<Element> phi(n, kNoElement);
  phi[t.identity()] = r.identity();

  auto consistent = [&](Element x) {
    for (Element y = 0; y < n; ++y) {
      if (phi[y] == kNoElement) continue;
      Element const xy = t.multiply(x, y);
      Element const yx = t.multiply(y, x);
      if (phi[xy] != kNoElement && phi[xy] != r.multiply(phi[x], phi[y])) return false;
      if (phi[yx] != kNoElement && phi[yx] != r.multiply(phi[y], phi[x])) return false;
    }
    for (OpId e = 0; e < t.op_count(); ++e) {
      Element const ex = t.apply(e, x);
      if (phi[ex] == kNoElement) continue;
      for (Element y = 0; y < n; ++y) {
        if (phi[y] != phi[x]) continue;
        Element const ey = t.apply(e, y);
        if (phi[ey] != kNoElement && phi[ey] != phi[ex]) return false;
      }
    }
    return true;
  };
  auto complete = [&]() -> bool {
    std::vector<char> hit(k, 0);
    for (Element x = 0; x < n; ++x) hit[phi[x]] = 1;
    if (std::find(hit.begin(), hit.end(), 0) != hit.end()) return false;
    for (Element x = 0; x < n; ++x)
      for (Element y = 0; y < n; ++y)
        if (phi[t.multiply(x, y)] != r.multiply(phi[x], phi[y])) return false;
    std::unordered_set<Transformation, TransformationHash> induced;
    for (OpId e = 0; e < t.op_count(); ++e) {
      Transformation tab(k, kNoElement);
      for (Element x = 0; x < n; ++x) {
        Element const v = phi[t.apply(e, x)];
        if (tab[phi[x]] != kNoElement && tab[phi[x]] != v) return false;
        tab[phi[x]] = v;
      }
      if (!r.find_op(tab)) return false;
      induced.insert(std::move(tab));
    }
    return induced.size() == r.op_count();
  };

  std::function<bool(Element)> rec = [&](Element x) -> bool {
    if (++nodes > budget) {
      truncated = true;
      return false;
    }
    while (x < n && phi[x] != kNoElement) ++x;
    if (x == n) return complete();
    for (Element v = 0; v < k; ++v) {
      phi[x] = v;
      if (consistent(x) && rec(x + 1)) return true;
      if (truncated) break;
    }
    phi[x] = kNoElement;
    return false;
  };
  if (rec(0)) return phi;
  return std::nullopt;
}

/// Calls `visit` on every k-subset of {0..n-1} in lexicographic order until
/// it returns false.
template <class Visit>
bool for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(idx)) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Bounded search for a sub of S and a congruence on it whose quotient is
/// isomorphic to R. Generator sets are tried by increasing total size;
/// distinct generator sets producing the same sub are tried once.
inline DivisionResult divides(ExtAlgebra const& r, ExtAlgebra const& s, DivisionCaps const& caps = {}) {
  if (r.size() > caps.size_cap || s.size() > caps.size_cap) {
    throw SizeCapExceeded("division search is capped at " + std::to_string(caps.size_cap) + " elements");
  }
  DivisionResult result;
  if (r.size() > s.size()) {
    result.exhaustive = true;
    return result;
  }
  std::size_t const ne = s.size();
  std::size_t const no = s.op_count();
  std::set<std::pair<std::vector<Element>, std::vector<Transformation>>> seen;
  std::size_t sets_tried = 0;
  std::size_t nodes = 0;
  bool truncated = false;

  for (std::size_t total = 0; total <= ne + no; ++total) {
    for (std::size_t ke = 0; ke <= std::min(total, ne); ++ke) {
      std::size_t const ko = total - ke;
      if (ko > no) continue;
      bool stop = false;
      detail::for_each_subset(ne, ke, [&](std::vector<std::size_t> const& es) {
        return detail::for_each_subset(no, ko, [&](std::vector<std::size_t> const& os) {
          if (++sets_tried > caps.max_generator_sets) {
            truncated = true;
            stop = true;
            return false;
          }
          std::vector<Element> egens(es.begin(), es.end());
          std::vector<OpId> ogens(os.begin(), os.end());
          Subalgebra sub = generated_subalgebra(s, egens, ogens);
          auto key = std::make_pair(sub.element_embedding, sub.algebra.ops());
          std::sort(key.second.begin(), key.second.end());
          if (!seen.insert(std::move(key)).second) return true;
          std::size_t local_nodes = 0;
          bool local_truncated = false;
          auto phi = detail::surjective_morphism(sub.algebra, r, local_nodes, caps.max_search_nodes,
                                                 local_truncated);
          nodes += local_nodes;
          truncated = truncated || local_truncated;
          if (phi) {
            result.found = true;
            result.element_gens = std::move(egens);
            result.op_gens = std::move(ogens);
            result.sub_elements = sub.element_embedding;
            result.projection = std::move(*phi);
            stop = true;
            return false;
          }
          return true;
        });
      });
      if (stop) {
        result.exhaustive = !result.found && !truncated;
        return result;
      }
    }
  }
  result.exhaustive = !truncated;
  return result;
}

}  // namespace vpl
