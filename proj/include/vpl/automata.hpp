#pragma once

// Deterministic visibly pushdown automata and threshold visibly counter
// automata over well-matched input.

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vpl/core.hpp"
#include "vpl/error.hpp"

namespace vpl {

using State = std::uint32_t;
using StackSymbol = std::uint32_t;

inline constexpr State kNoState = static_cast<State>(-1);
/// Index of the bottom-of-stack marker '#'.
inline constexpr StackSymbol kBottom = 0;

/// A state map Q -> Q as a table.
using StateMap = std::vector<State>;

class VPA {
 public:
  struct CallMove {
    State to = kNoState;
    StackSymbol push = kBottom;
  };

  VPA() = default;

  /// `stack_names[0]` is the bottom marker.
  VPA(PushdownAlphabet alphabet, std::vector<std::string> state_names,
      std::vector<std::string> stack_names, State initial, std::vector<State> final_states)
      : alphabet_(std::move(alphabet)),
        states_(std::move(state_names)),
        stack_(std::move(stack_names)),
        initial_(initial),
        final_(states_.size(), 0) {
    if (states_.empty()) throw MalformedAutomaton("automaton has no states");
    if (stack_.empty()) throw MalformedAutomaton("stack alphabet must contain the bottom marker");
    if (initial_ >= states_.size()) throw MalformedAutomaton("initial state out of range");
    for (State q : final_states) {
      if (q >= states_.size()) throw MalformedAutomaton("final state out of range");
      final_[q] = 1;
    }
    std::size_t const cells = states_.size() * stack_.size();
    calls_.assign(alphabet_.calls().size() * cells, CallMove{});
    returns_.assign(alphabet_.returns().size() * cells, kNoState);
    internals_.assign(alphabet_.internals().size() * cells, kNoState);
  }

  PushdownAlphabet const& alphabet() const noexcept { return alphabet_; }
  std::size_t state_count() const noexcept { return states_.size(); }
  std::size_t stack_size() const noexcept { return stack_.size(); }
  State initial() const noexcept { return initial_; }
  bool is_final(State q) const { return final_[q] != 0; }
  std::string const& state_name(State q) const { return states_[q]; }
  std::string const& stack_name(StackSymbol g) const { return stack_[g]; }
  std::vector<std::string> const& state_names() const noexcept { return states_; }
  std::vector<std::string> const& stack_names() const noexcept { return stack_; }

  void set_call(Letter a, State q, StackSymbol top, State to, StackSymbol push) {
    check(q, top, to);
    if (push == kBottom || push >= stack_.size()) {
      throw MalformedAutomaton(std::string("call on '") + a + "' must push a non-bottom stack symbol");
    }
    calls_.at(cell(a, LetterKind::call, q, top)) = {to, push};
  }
  void set_return(Letter b, State q, StackSymbol top, State to) {
    check(q, top, to);
    if (top == kBottom) throw MalformedAutomaton("return transitions cannot pop the bottom marker");
    returns_.at(cell(b, LetterKind::ret, q, top)) = to;
  }
  void set_internal(Letter c, State q, StackSymbol top, State to) {
    check(q, top, to);
    internals_.at(cell(c, LetterKind::internal, q, top)) = to;
  }

  CallMove call(Letter a, State q, StackSymbol top) const {
    return calls_[cell(a, LetterKind::call, q, top)];
  }
  State ret(Letter b, State q, StackSymbol top) const {
    if (top == kBottom) {
      throw MalformedAutomaton(std::string("return '") + b + "' would pop the bottom marker");
    }
    return returns_[cell(b, LetterKind::ret, q, top)];
  }
  State internal(Letter c, State q, StackSymbol top) const {
    return internals_[cell(c, LetterKind::internal, q, top)];
  }

  /// Checks totality: calls and internals on every (state, symbol), returns
  /// on every (state, non-bottom symbol).
  void validate() const {
    for (State q = 0; q < states_.size(); ++q) {
      for (StackSymbol g = 0; g < stack_.size(); ++g) {
        for (Letter a : alphabet_.calls()) {
          if (call(a, q, g).to == kNoState) missing(a, q, g);
        }
        for (Letter c : alphabet_.internals()) {
          if (internal(c, q, g) == kNoState) missing(c, q, g);
        }
        if (g == kBottom) continue;
        for (Letter b : alphabet_.returns()) {
          if (ret(b, q, g) == kNoState) missing(b, q, g);
        }
      }
    }
  }

 private:
  std::size_t cell(Letter c, LetterKind expected, State q, StackSymbol top) const {
    if (alphabet_.kind(c) != expected) {
      throw MalformedAutomaton(std::string("letter '") + c + "' used with the wrong transition kind");
    }
    return (alphabet_.group_index(c) * states_.size() + q) * stack_.size() + top;
  }
  void check(State q, StackSymbol top, State to) const {
    if (q >= states_.size() || to >= states_.size()) throw MalformedAutomaton("state out of range");
    if (top >= stack_.size()) throw MalformedAutomaton("stack symbol out of range");
  }
  [[noreturn]] void missing(Letter c, State q, StackSymbol g) const {
    throw MalformedAutomaton(std::string("no transition on '") + c + "' from state " + states_[q] +
                             " with top " + stack_[g]);
  }

  PushdownAlphabet alphabet_;
  std::vector<std::string> states_;
  std::vector<std::string> stack_;
  State initial_ = 0;
  std::vector<char> final_;
  std::vector<CallMove> calls_;
  std::vector<State> returns_;
  std::vector<State> internals_;
};

struct VpaConfig {
  State state;
  std::vector<StackSymbol> stack;  // bottom first
};

/// Extended transition function on an arbitrary word from an arbitrary
/// configuration.
inline VpaConfig vpa_run(VPA const& m, std::string_view w, VpaConfig config) {
  for (Letter c : w) {
    StackSymbol const top = config.stack.empty() ? kBottom : config.stack.back();
    switch (m.alphabet().kind(c)) {
      case LetterKind::call: {
        auto const move = m.call(c, config.state, top);
        config.state = move.to;
        config.stack.push_back(move.push);
        break;
      }
      case LetterKind::ret:
        if (config.stack.size() <= 1) {
          throw MalformedAutomaton(std::string("return '") + c + "' would pop the bottom marker");
        }
        config.state = m.ret(c, config.state, top);
        config.stack.pop_back();
        break;
      case LetterKind::internal: config.state = m.internal(c, config.state, top); break;
    }
    if (config.state == kNoState) throw MalformedAutomaton(std::string("undefined move on '") + c + "'");
  }
  return config;
}

/// State reached from (q, G) after the well-matched word w; the stack is
/// checked to end at exactly G.
inline State vpa_state_after(VPA const& m, std::string_view w, State q, StackSymbol g) {
  VpaConfig out = vpa_run(m, w, {q, {g}});
  if (out.stack.size() != 1 || out.stack.front() != g) {
    throw MalformedAutomaton("run on a well-matched word did not restore the stack");
  }
  return out.state;
}

inline bool vpa_accepts(VPA const& m, std::string_view w) {
  if (!is_well_matched(m.alphabet(), w)) {
    throw NotWellMatched("'" + Context::display(w) + "' is not well-matched");
  }
  return m.is_final(vpa_state_after(m, w, m.initial(), kBottom));
}

// --- visibly counter automata -----------------------------------------------

class VCA {
 public:
  VCA() = default;

  VCA(PushdownAlphabet alphabet, std::vector<std::string> state_names, State initial,
      std::vector<State> final_states, std::size_t threshold)
      : alphabet_(std::move(alphabet)),
        states_(std::move(state_names)),
        initial_(initial),
        final_(states_.size(), 0),
        threshold_(threshold) {
    if (states_.empty()) throw MalformedAutomaton("automaton has no states");
    if (initial_ >= states_.size()) throw MalformedAutomaton("initial state out of range");
    for (State q : final_states) {
      if (q >= states_.size()) throw MalformedAutomaton("final state out of range");
      final_[q] = 1;
    }
    delta_.assign((threshold_ + 1) * alphabet_.size() * states_.size(), kNoState);
  }

  PushdownAlphabet const& alphabet() const noexcept { return alphabet_; }
  std::size_t state_count() const noexcept { return states_.size(); }
  std::size_t threshold() const noexcept { return threshold_; }
  State initial() const noexcept { return initial_; }
  bool is_final(State q) const { return final_[q] != 0; }
  std::string const& state_name(State q) const { return states_[q]; }
  std::vector<std::string> const& state_names() const noexcept { return states_; }

  void set(std::size_t level, Letter c, State q, State to) {
    if (level > threshold_) throw MalformedAutomaton("level above threshold");
    if (q >= states_.size() || to >= states_.size()) throw MalformedAutomaton("state out of range");
    delta_[index(level, c, q)] = to;
  }

  /// delta_level(c, q) for level <= threshold.
  State delta(std::size_t level, Letter c, State q) const { return delta_[index(level, c, q)]; }
  /// The move used at counter value i: delta_min(i, m).
  State step(std::size_t counter, Letter c, State q) const {
    return delta(std::min(counter, threshold_), c, q);
  }

  void validate() const {
    for (std::size_t level = 0; level <= threshold_; ++level) {
      for (Letter c : alphabet_.letters()) {
        for (State q = 0; q < states_.size(); ++q) {
          if (delta(level, c, q) == kNoState) {
            throw MalformedAutomaton(std::string("no transition on '") + c + "' from state " +
                                     states_[q] + " at level " + std::to_string(level));
          }
        }
      }
    }
  }

 private:
  std::size_t index(std::size_t level, Letter c, State q) const {
    return (level * alphabet_.size() + alphabet_.rank(c)) * states_.size() + q;
  }

  PushdownAlphabet alphabet_;
  std::vector<std::string> states_;
  State initial_ = 0;
  std::vector<char> final_;
  std::size_t threshold_ = 0;
  std::vector<State> delta_;
};

struct VcaConfig {
  State state;
  std::size_t counter;
};

/// Run of w from (q, i); UndefinedRun when the counter would go negative.
inline VcaConfig vca_run(VCA const& m, std::string_view w, VcaConfig config) {
  for (Letter c : w) {
    int const h = m.alphabet().height_of(c);
    if (h < 0 && config.counter == 0) {
      throw UndefinedRun("counter would drop below zero on '" + Context::display(w) + "'");
    }
    config.state = m.step(config.counter, c, config.state);
    config.counter = static_cast<std::size_t>(static_cast<long long>(config.counter) + h);
  }
  return config;
}

inline bool vca_accepts(VCA const& m, std::string_view w) {
  if (!is_well_matched(m.alphabet(), w)) {
    throw NotWellMatched("'" + Context::display(w) + "' is not well-matched");
  }
  VcaConfig const out = vca_run(m, w, {m.initial(), 0});
  if (out.counter != 0) throw UndefinedRun("counter did not return to zero");
  return m.is_final(out.state);
}

/// r_{u,i}: q -> p iff (q, i) reaches (p, i + height(u)) on u.
inline StateMap vca_level_function(VCA const& m, std::string_view u, std::size_t level) {
  m.alphabet().check_word(u);
  if (static_cast<long long>(level) + min_prefix_height(m.alphabet(), u) < 0) {
    throw UndefinedRun("run of '" + Context::display(u) + "' from level " + std::to_string(level) +
                       " drives the counter negative");
  }
  StateMap r(m.state_count());
  for (State q = 0; q < m.state_count(); ++q) r[q] = vca_run(m, u, {q, level}).state;
  return r;
}

inline std::string repeat_word(std::string_view w, std::size_t times) {
  std::string out;
  out.reserve(w.size() * times);
  for (std::size_t i = 0; i < times; ++i) out += w;
  return out;
}

/// Least s >= 1 with r_{x^s, i} = r_{x^{2s}, i} for every x in `words` and
/// every level i in 0..m + |x|*2s at which both runs are defined.
inline std::size_t vca_stabilizing_exponent(VCA const& m, std::vector<Word> const& words,
                                            std::size_t limit = 5040) {
  for (Word const& x : words) m.alphabet().check_word(x);
  for (std::size_t s = 1; s <= limit; ++s) {
    bool ok = true;
    for (Word const& x : words) {
      std::string const xs = repeat_word(x, s);
      std::string const x2s = repeat_word(x, 2 * s);
      int const low_s = min_prefix_height(m.alphabet(), xs);
      int const low_2s = min_prefix_height(m.alphabet(), x2s);
      std::size_t const top = m.threshold() + x.size() * 2 * s;
      for (std::size_t i = 0; i <= top && ok; ++i) {
        auto const li = static_cast<long long>(i);
        if (li + low_s < 0 || li + low_2s < 0) continue;
        if (vca_level_function(m, xs, i) != vca_level_function(m, x2s, i)) ok = false;
      }
      if (!ok) break;
    }
    if (ok) return s;
  }
  throw SizeCapExceeded("no stabilizing exponent up to " + std::to_string(limit));
}

/// Equivalent VPA: the state records (q, min(counter, m)); the stack holds
/// L for calls made below the threshold and H for calls made at or above it.
inline VPA vca_to_vpa(VCA const& m) {
  std::size_t const levels = m.threshold() + 1;
  std::size_t const t = m.threshold();
  std::vector<std::string> names;
  for (State q = 0; q < m.state_count(); ++q) {
    for (std::size_t c = 0; c < levels; ++c) names.push_back(m.state_name(q) + "@" + std::to_string(c));
  }
  auto id = [levels](State q, std::size_t c) { return static_cast<State>(q * levels + c); };
  std::vector<State> finals;
  for (State q = 0; q < m.state_count(); ++q) {
    if (m.is_final(q)) finals.push_back(id(q, 0));
  }
  StackSymbol const low = 1;
  StackSymbol const high = 2;
  VPA out(m.alphabet(), std::move(names), {"#", "L", "H"}, id(m.initial(), 0), std::move(finals));
  for (State q = 0; q < m.state_count(); ++q) {
    for (std::size_t c = 0; c < levels; ++c) {
      for (StackSymbol g = 0; g < 3; ++g) {
        for (Letter a : m.alphabet().calls()) {
          State const p = m.delta(c, a, q);
          if (c < t) {
            out.set_call(a, id(q, c), g, id(p, c + 1), low);
          } else {
            out.set_call(a, id(q, c), g, id(p, t), high);
          }
        }
        for (Letter i : m.alphabet().internals()) out.set_internal(i, id(q, c), g, id(m.delta(c, i, q), c));
        if (g == kBottom) continue;
        for (Letter b : m.alphabet().returns()) {
          State const p = m.delta(c, b, q);
          // Popping L at level 0 cannot happen on a real run; it is mapped
          // to level 0 only to keep the table total.
          std::size_t const next = g == high ? t : (c == 0 ? 0 : c - 1);
          out.set_return(b, id(q, c), g, id(p, next));
        }
      }
    }
  }
  return out;
}

}  // namespace vpl
