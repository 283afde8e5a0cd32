#pragma once

// Shared helpers for the test suites: fixture access, random instances and
// brute-force oracles written without the library's own evaluators.

#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vpl/vpl.hpp"

namespace vpl::testing {

inline std::string fixture(std::string const& name) { return std::string(VPL_FIXTURES) + "/" + name; }

inline RecognizerSpec load_fixture(std::string const& name) { return load_recognizer(fixture(name)).spec; }

inline PushdownAlphabet abc_alphabet() { return PushdownAlphabet({'a'}, {'b'}, {'c'}); }
inline PushdownAlphabet ab_alphabet() { return PushdownAlphabet({'a'}, {'b'}, {}); }

// --- oracles ---------------------------------------------------------------

/// Well-matchedness straight from the definition: every prefix has at
/// least as many calls as returns and the totals agree.
inline bool oracle_well_matched(PushdownAlphabet const& al, std::string_view w) {
  long calls = 0;
  long rets = 0;
  for (char c : w) {
    if (al.kind(c) == LetterKind::call) ++calls;
    if (al.kind(c) == LetterKind::ret) ++rets;
    if (rets > calls) return false;
  }
  return calls == rets;
}

/// All words over the alphabet up to `max_len`, in length-lex order.
inline std::vector<std::string> all_words(PushdownAlphabet const& al, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t const end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char c : al.letters()) out.push_back(out[i] + c);
    begin = end;
  }
  return out;
}

inline bool oracle_anbn(std::string_view w) {
  std::size_t const n = w.size() / 2;
  if (w.size() % 2) return false;
  return w == std::string(n, 'a') + std::string(n, 'b');
}

/// H+ over {a,b}: a well-matched word read as a Boolean expression where
/// juxtaposition is conjunction, a..b negates its inside and the empty word
/// is true. H+ is the set of words evaluating to true.
inline bool oracle_hplus(std::string_view w) {
  std::vector<bool> stack{true};
  for (char c : w) {
    if (c == 'a') {
      stack.push_back(true);
    } else {
      if (stack.size() < 2) return false;
      bool const inner = stack.back();
      stack.pop_back();
      stack.back() = stack.back() && !inner;
    }
  }
  return stack.size() == 1 && stack.back();
}

/// L_ML over calls a, returns b, internal c: S -> aScb | acSb | empty.
inline bool oracle_lml(std::string_view w) {
  if (w.empty()) return true;
  if (w.size() < 3 || w.front() != 'a' || w.back() != 'b') return false;
  if (w[w.size() - 2] == 'c' && oracle_lml(w.substr(1, w.size() - 3))) return true;
  return w[1] == 'c' && oracle_lml(w.substr(2, w.size() - 3));
}

/// a^n b^n c^m d^m for n, m >= 0.
inline bool oracle_anbncmdm(std::string_view w) {
  std::size_t i = 0;
  auto run = [&](char c) {
    std::size_t k = 0;
    while (i < w.size() && w[i] == c) ++i, ++k;
    return k;
  };
  std::size_t const a = run('a');
  std::size_t const b = run('b');
  std::size_t const c = run('c');
  std::size_t const d = run('d');
  return i == w.size() && a == b && c == d;
}

/// Reference VCA run: the counter is tracked explicitly and the move at
/// counter value k uses level min(k, m).
inline bool oracle_vca_accepts(VCA const& m, std::string_view w) {
  State q = m.initial();
  long k = 0;
  for (char c : w) {
    std::size_t const level = static_cast<std::size_t>(std::min<long>(k, static_cast<long>(m.threshold())));
    q = m.delta(level, c, q);
    auto const kind = m.alphabet().kind(c);
    if (kind == LetterKind::call) ++k;
    if (kind == LetterKind::ret) --k;
  }
  return k == 0 && m.is_final(q);
}

// --- random instances ------------------------------------------------------

/// A random well-matched word of length at most `max_len` over the alphabet.
inline std::string random_well_matched(std::mt19937& rng, PushdownAlphabet const& al, std::size_t max_len) {
  std::string w;
  int open = 0;
  std::size_t const len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  while (w.size() < len || open > 0) {
    std::size_t const left = len > w.size() ? len - w.size() : 0;
    std::uniform_int_distribution<int> pick(0, 2);
    int choice = pick(rng);
    if (static_cast<std::size_t>(open) >= left) choice = 1;
    if (choice == 0 && !al.calls().empty() && left >= static_cast<std::size_t>(open) + 2) {
      w += al.calls()[rng() % al.calls().size()];
      ++open;
    } else if (choice == 1 && open > 0) {
      w += al.returns()[rng() % al.returns().size()];
      --open;
    } else if (!al.internals().empty() && left > static_cast<std::size_t>(open)) {
      w += al.internals()[rng() % al.internals().size()];
    } else if (open > 0) {
      w += al.returns()[rng() % al.returns().size()];
      --open;
    } else {
      break;
    }
  }
  return w;
}

/// A random word (not necessarily well-matched) of the given length.
inline std::string random_word(std::mt19937& rng, PushdownAlphabet const& al, std::size_t len) {
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += al.letters()[rng() % al.size()];
  return w;
}

inline std::vector<State> random_finals(std::mt19937& rng, std::size_t n) {
  std::vector<State> f;
  for (State q = 0; q < n; ++q)
    if (rng() % 2) f.push_back(q);
  return f;
}

inline VCA random_vca(std::mt19937& rng, PushdownAlphabet const& al, std::size_t max_states,
                      std::size_t max_threshold) {
  std::size_t const n = 1 + rng() % max_states;
  std::size_t const m = rng() % (max_threshold + 1);
  std::vector<std::string> names;
  for (std::size_t q = 0; q < n; ++q) names.push_back("q" + std::to_string(q));
  VCA out(al, names, 0, random_finals(rng, n), m);
  for (std::size_t level = 0; level <= m; ++level)
    for (char c : al.letters())
      for (State q = 0; q < n; ++q) out.set(level, c, q, static_cast<State>(rng() % n));
  out.validate();
  return out;
}

inline VPA random_vpa(std::mt19937& rng, PushdownAlphabet const& al, std::size_t max_states,
                      std::size_t max_stack) {
  std::size_t const n = 1 + rng() % max_states;
  std::size_t const g = 2 + rng() % max_stack;  // bottom plus at least one pushable symbol
  std::vector<std::string> names;
  for (std::size_t q = 0; q < n; ++q) names.push_back("q" + std::to_string(q));
  std::vector<std::string> stack{"#"};
  for (std::size_t s = 1; s < g; ++s) stack.push_back("G" + std::to_string(s));
  VPA out(al, names, stack, 0, random_finals(rng, n));
  for (State q = 0; q < n; ++q)
    for (StackSymbol top = 0; top < g; ++top) {
      for (char a : al.calls()) {
        out.set_call(a, q, top, static_cast<State>(rng() % n), static_cast<StackSymbol>(1 + rng() % (g - 1)));
      }
      for (char c : al.internals()) out.set_internal(c, q, top, static_cast<State>(rng() % n));
      if (top == kBottom) continue;
      for (char b : al.returns()) out.set_return(b, q, top, static_cast<State>(rng() % n));
    }
  out.validate();
  return out;
}

struct RandomMonoid {
  FiniteMonoid monoid;
  std::vector<Element> accepting;
};

/// The transition monoid of a random DFA, kept only when it has at most
/// `max_size` elements. Elements are state maps; the letter images are the
/// DFA's letter actions.
inline RandomMonoid random_transition_monoid(std::mt19937& rng, PushdownAlphabet const& al, std::size_t max_size) {
  while (true) {
    std::size_t const states = 1 + rng() % 3;
    std::vector<std::vector<std::size_t>> letters;
    for (std::size_t i = 0; i < al.size(); ++i) {
      std::vector<std::size_t> f(states);
      for (auto& x : f) x = rng() % states;
      letters.push_back(f);
    }
    std::vector<std::vector<std::size_t>> elems;
    std::vector<std::size_t> id(states);
    for (std::size_t i = 0; i < states; ++i) id[i] = i;
    elems.push_back(id);
    auto index_of = [&](std::vector<std::size_t> const& f) {
      for (std::size_t i = 0; i < elems.size(); ++i)
        if (elems[i] == f) return i;
      elems.push_back(f);
      return elems.size() - 1;
    };
    // f then g: apply f first.
    auto then = [](std::vector<std::size_t> const& f, std::vector<std::size_t> const& g) {
      std::vector<std::size_t> h(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) h[i] = g[f[i]];
      return h;
    };
    for (std::size_t i = 0; i < elems.size() && elems.size() <= max_size; ++i)
      for (auto const& l : letters) index_of(then(elems[i], l));
    if (elems.size() > max_size) continue;
    std::size_t const n = elems.size();
    FiniteMonoid mon;
    mon.alphabet = al;
    mon.identity = 0;
    for (std::size_t i = 0; i < n; ++i) mon.element_names.push_back("m" + std::to_string(i));
    mon.mult.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) mon.mult[i * n + j] = static_cast<Element>(index_of(then(elems[i], elems[j])));
    for (auto const& l : letters) mon.letter_image.push_back(static_cast<Element>(index_of(l)));
    mon.validate();
    std::vector<Element> acc;
    for (Element x = 0; x < n; ++x)
      if (rng() % 2) acc.push_back(x);
    return {std::move(mon), std::move(acc)};
  }
}

/// Product of a monoid over a whole word, computed letter by letter.
inline Element monoid_value(FiniteMonoid const& m, std::string_view w) {
  Element v = m.identity;
  for (char c : w) v = m.multiply(v, m.image(c));
  return v;
}

}  // namespace vpl::testing
