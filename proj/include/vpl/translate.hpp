#pragma once

// Translations between automata, monoids and Ext-algebra recognizers.

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vpl/algebra.hpp"
#include "vpl/automata.hpp"

namespace vpl {

/// A finite monoid with a letter-to-element map, standing for the morphism
/// A* -> M obtained by free extension.
struct FiniteMonoid {
  std::vector<std::string> element_names;
  Element identity = 0;
  std::vector<Element> mult;  // n * n
  PushdownAlphabet alphabet;
  std::vector<Element> letter_image;  // by alphabet rank

  std::size_t size() const noexcept { return element_names.size(); }
  Element multiply(Element x, Element y) const { return mult[x * size() + y]; }
  Element image(Letter c) const { return letter_image[alphabet.rank(c)]; }

  void validate() const {
    std::size_t const n = size();
    if (n == 0 || identity >= n || mult.size() != n * n) throw MalformedTables("malformed monoid tables");
    for (Element e : mult) {
      if (e >= n) throw MalformedTables("monoid product out of range");
    }
    if (letter_image.size() != alphabet.size()) throw MalformedTables("letter image does not cover the alphabet");
    for (Element e : letter_image) {
      if (e >= n) throw MalformedTables("letter image out of range");
    }
    for (Element x = 0; x < n; ++x) {
      if (multiply(identity, x) != x || multiply(x, identity) != x) {
        throw ValidationError("monoid identity is not neutral for " + element_names[x]);
      }
      for (Element y = 0; y < n; ++y)
        for (Element z = 0; z < n; ++z)
          if (multiply(multiply(x, y), z) != multiply(x, multiply(y, z))) {
            throw ValidationError("monoid product is not associative at (" + element_names[x] + "," +
                                  element_names[y] + "," + element_names[z] + ")");
          }
    }
  }
};

namespace detail {

/// Reachable stack symbols: bottom plus everything a call can push on top of
/// a reachable symbol.
inline std::vector<StackSymbol> reachable_stack(VPA const& m) {
  std::vector<char> seen(m.stack_size(), 0);
  std::vector<StackSymbol> order{kBottom};
  seen[kBottom] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Letter a : m.alphabet().calls()) {
      for (State q = 0; q < m.state_count(); ++q) {
        StackSymbol const g = m.call(a, q, order[i]).push;
        if (!seen[g]) {
          seen[g] = 1;
          order.push_back(g);
        }
      }
    }
  }
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

/// Behaviour monoid of a VPA with the pair operations ext_ab only; the op
/// list is not closed (see vpa_to_ext_algebra). An element is the family of
/// state maps f_{w,G} over the reachable stack symbols G, stored as a flat
/// table indexed by (position of G) * |Q| + q.
inline RecognizerSpec vpa_behaviours(VPA const& m, std::size_t cap = kClosureCap) {
  m.validate();
  auto const& alphabet = m.alphabet();
  std::vector<StackSymbol> const gamma = detail::reachable_stack(m);
  std::vector<std::size_t> slot(m.stack_size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < gamma.size(); ++i) slot[gamma[i]] = i;
  std::size_t const nq = m.state_count();
  std::size_t const width = gamma.size() * nq;

  using Behaviour = std::vector<State>;
  TransformationSet elements;  // behaviours reuse the table set
  std::vector<std::string> names;
  auto intern = [&](Behaviour b, std::string name) -> std::pair<Element, bool> {
    auto [id, inserted] = elements.insert(std::move(b));
    if (inserted) {
      if (elements.size() > cap) {
        throw SizeCapExceeded("behaviour algebra exceeds " + std::to_string(cap) + " elements");
      }
      names.push_back(std::move(name));
    }
    return {static_cast<Element>(id), inserted};
  };
  auto concat = [&](Behaviour const& first, Behaviour const& second) {
    Behaviour out(width);
    for (std::size_t g = 0; g < gamma.size(); ++g)
      for (State q = 0; q < nq; ++q) out[g * nq + q] = second[g * nq + first[g * nq + q]];
    return out;
  };
  std::vector<std::pair<Letter, Letter>> pairs;
  for (Letter a : alphabet.calls())
    for (Letter b : alphabet.returns()) pairs.emplace_back(a, b);
  auto wrap = [&](Letter a, Letter b, Behaviour const& inner) {
    Behaviour out(width);
    for (std::size_t g = 0; g < gamma.size(); ++g) {
      for (State q = 0; q < nq; ++q) {
        auto const move = m.call(a, q, gamma[g]);
        State const mid = inner[slot[move.push] * nq + move.to];
        out[g * nq + q] = m.ret(b, mid, move.push);
      }
    }
    return out;
  };
  auto word_name = [](std::string const& name) { return name == "1" ? std::string{} : name; };
  auto as_name = [](std::string w) { return w.empty() ? std::string("1") : w; };

  Behaviour identity(width);
  for (std::size_t g = 0; g < gamma.size(); ++g)
    for (State q = 0; q < nq; ++q) identity[g * nq + q] = q;
  intern(identity, "1");
  std::vector<Element> letter_elements;
  for (Letter c : alphabet.internals()) {
    Behaviour b(width);
    for (std::size_t g = 0; g < gamma.size(); ++g)
      for (State q = 0; q < nq; ++q) b[g * nq + q] = m.internal(c, q, gamma[g]);
    letter_elements.push_back(intern(std::move(b), std::string(1, c)).first);
  }

  // Breadth-first closure under products and the wrap maps; names are the
  // first representative word found.
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (auto [a, b] : pairs) {
      Behaviour w = wrap(a, b, elements[i]);
      intern(std::move(w), std::string(1, a) + word_name(names[i]) + b);
    }
    for (std::size_t j = 0; j <= i; ++j) {
      Behaviour ij = concat(elements[i], elements[j]);
      Behaviour ji = concat(elements[j], elements[i]);
      std::string const ni = word_name(names[i]);
      std::string const nj = word_name(names[j]);
      intern(std::move(ij), as_name(ni + nj));
      intern(std::move(ji), as_name(nj + ni));
    }
  }

  std::size_t const n = elements.size();
  std::vector<Element> mult(n * n);
  for (Element x = 0; x < n; ++x)
    for (Element y = 0; y < n; ++y) mult[x * n + y] = static_cast<Element>(*elements.find(concat(elements[x], elements[y])));

  TransformationSet ops;
  std::vector<std::string> op_names;
  std::vector<OpId> pair_op;
  for (auto [a, b] : pairs) {
    Transformation t(n);
    for (Element x = 0; x < n; ++x) t[x] = static_cast<Element>(*elements.find(wrap(a, b, elements[x])));
    auto [id, inserted] = ops.insert(std::move(t));
    if (inserted) op_names.push_back(std::string("ext_") + a + b);
    pair_op.push_back(static_cast<OpId>(id));
  }
  std::vector<Element> accepting;
  for (Element x = 0; x < n; ++x) {
    if (m.is_final(elements[x][slot[kBottom] * nq + m.initial()])) accepting.push_back(x);
  }

  ExtAlgebra algebra(std::move(names), 0, std::move(mult), std::move(ops).release(), std::move(op_names));
  Morphism morphism = Morphism::blank(alphabet);
  morphism.internal_image = std::move(letter_elements);
  morphism.ext_image = std::move(pair_op);
  return {std::move(algebra), std::move(morphism), std::move(accepting)};
}

/// Behaviour algebra of a VPA: the behaviours with the pair operations,
/// the translations and all compositions. The closure can be large; use
/// vpa_syntactic_algebra when only the minimal recognizer is needed.
inline RecognizerSpec vpa_to_ext_algebra(VPA const& m, std::size_t cap = kClosureCap,
                                         std::size_t op_cap = kOpClosureCap) {
  RecognizerSpec spec = vpa_behaviours(m, cap);
  spec.algebra = complete_algebra(spec.algebra, op_cap).algebra;
  return spec;
}

/// Syntactic algebra of the VPA's language, minimised before any
/// operation closure is taken.
inline RecognizerSpec vpa_syntactic_algebra(VPA const& m, std::size_t cap = kClosureCap,
                                            std::size_t op_cap = kOpClosureCap) {
  return minimal_recognizer(vpa_behaviours(m, cap), op_cap).spec;
}

/// VPA simulating evaluation: states are algebra elements, calls push
/// (current element, call letter) and restart at the identity, returns
/// apply the matching operation and multiply onto the saved element.
inline VPA ext_algebra_to_vpa(RecognizerSpec const& spec) {
  check_spec(spec);
  auto const& r = spec.algebra;
  auto const& alphabet = spec.alphabet();
  std::size_t const nc = alphabet.calls().size();
  std::vector<std::string> stack{"#"};
  for (Element q = 0; q < r.size(); ++q)
    for (Letter a : alphabet.calls()) stack.push_back(r.element_name(q) + "/" + a);
  auto symbol = [&](Element q, Letter a) {
    return static_cast<StackSymbol>(1 + q * nc + alphabet.group_index(a));
  };
  VPA out(alphabet, r.element_names(), std::move(stack), r.identity(), spec.accepting);
  for (Element q = 0; q < r.size(); ++q) {
    for (StackSymbol g = 0; g < out.stack_size(); ++g) {
      for (Letter a : alphabet.calls()) out.set_call(a, q, g, r.identity(), symbol(q, a));
      for (Letter c : alphabet.internals()) out.set_internal(c, q, g, r.multiply(q, spec.morphism.internal(c)));
      if (g == kBottom) continue;
      Element const saved = (g - 1) / static_cast<StackSymbol>(nc);
      Letter const pending = alphabet.calls()[(g - 1) % nc];
      for (Letter b : alphabet.returns()) {
        out.set_return(b, q, g, r.multiply(saved, r.apply(spec.morphism.ext(pending, b), q)));
      }
    }
  }
  return out;
}

/// Ext-algebra derived from a monoid: the image of the well-matched words
/// with operations x -> m x m' for every context image (m, m').
inline RecognizerSpec monoid_to_ext_algebra(FiniteMonoid const& monoid, std::vector<Element> const& accepting_subset,
                                            std::size_t cap = kClosureCap) {
  monoid.validate();
  auto const& alphabet = monoid.alphabet;
  std::size_t const nm = monoid.size();

  std::vector<char> member(nm, 0);
  std::vector<Element> carrier;
  auto add = [&](Element x) {
    if (!member[x]) {
      member[x] = 1;
      carrier.push_back(x);
    }
  };
  add(monoid.identity);
  for (std::size_t i = 0; i < carrier.size(); ++i) {
    Element const x = carrier[i];
    for (Letter c : alphabet.internals()) add(monoid.multiply(x, monoid.image(c)));
    for (Letter a : alphabet.calls())
      for (Letter b : alphabet.returns()) add(monoid.multiply(monoid.multiply(monoid.image(a), x), monoid.image(b)));
    for (std::size_t j = 0; j <= i; ++j) {
      add(monoid.multiply(x, carrier[j]));
      add(monoid.multiply(carrier[j], x));
    }
  }
  if (carrier.size() > cap) throw SizeCapExceeded("monoid image exceeds the size cap");
  std::sort(carrier.begin(), carrier.end());
  std::vector<Element> index(nm, kNoElement);
  for (std::size_t i = 0; i < carrier.size(); ++i) index[carrier[i]] = static_cast<Element>(i);
  std::size_t const n = carrier.size();

  // Context images (m, m'), closed under growing the context inwards.
  std::vector<char> seen(nm * nm, 0);
  std::vector<std::pair<Element, Element>> contexts;
  auto add_pair = [&](Element l, Element r) {
    if (!seen[l * nm + r]) {
      seen[l * nm + r] = 1;
      contexts.emplace_back(l, r);
    }
  };
  add_pair(monoid.identity, monoid.identity);
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    auto const [l, r] = contexts[i];
    for (Letter c : alphabet.internals()) {
      add_pair(monoid.multiply(l, monoid.image(c)), r);
      add_pair(l, monoid.multiply(monoid.image(c), r));
    }
    for (Letter a : alphabet.calls())
      for (Letter b : alphabet.returns()) add_pair(monoid.multiply(l, monoid.image(a)), monoid.multiply(monoid.image(b), r));
    for (Element x : carrier) {
      add_pair(monoid.multiply(l, x), r);
      add_pair(l, monoid.multiply(x, r));
    }
  }

  auto table_of = [&](Element l, Element r) {
    Transformation t(n);
    for (std::size_t i = 0; i < n; ++i) {
      Element const v = monoid.multiply(monoid.multiply(l, carrier[i]), r);
      if (index[v] == kNoElement) throw ClosureViolation("context image leaves the well-matched image");
      t[i] = index[v];
    }
    return t;
  };
  TransformationSet ops;
  std::vector<std::string> op_names;
  for (auto [l, r] : contexts) {
    if (ops.insert(table_of(l, r)).second) {
      op_names.push_back("ctx[" + monoid.element_names[l] + "," + monoid.element_names[r] + "]");
    }
  }

  std::vector<std::string> names;
  for (Element x : carrier) names.push_back(monoid.element_names[x]);
  std::vector<Element> mult(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mult[i * n + j] = index[monoid.multiply(carrier[i], carrier[j])];

  ExtAlgebra algebra(std::move(names), index[monoid.identity], std::move(mult), std::move(ops).release(),
                     std::move(op_names));
  Morphism morphism = Morphism::blank(alphabet);
  for (Letter c : alphabet.internals()) morphism.internal_image[alphabet.group_index(c)] = index[monoid.image(c)];
  for (Letter a : alphabet.calls())
    for (Letter b : alphabet.returns()) morphism.ext(a, b) = *algebra.find_op(table_of(monoid.image(a), monoid.image(b)));
  std::vector<Element> accepting;
  for (Element x : accepting_subset) {
    if (x >= nm) throw MalformedTables("accepting monoid element out of range");
    if (index[x] != kNoElement) accepting.push_back(index[x]);
  }
  return {std::move(algebra), std::move(morphism), normalize_subset(std::move(accepting))};
}

}  // namespace vpl
