#pragma once

// Line-oriented text formats for recognizers, automata, monoids and
// alphabets. A line whose first non-blank character is '#' is a comment.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vpl/algebra.hpp"
#include "vpl/automata.hpp"
#include "vpl/translate.hpp"

namespace vpl {

namespace detail {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    std::istringstream in{std::string(raw)};
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
    if (tokens.empty() || tokens.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    lines.push_back({number, std::move(tokens)});
    if (end == text.size()) break;
  }
  return lines;
}

inline std::string read_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<Letter> parse_letters(std::size_t line, std::string_view list) {
  std::vector<Letter> out;
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view item = list.substr(pos, comma - pos);
    if (item.size() != 1) throw ParseError(line, "letters are single characters, got '" + std::string(item) + "'");
    out.push_back(item.front());
    pos = comma + 1;
  }
  return out;
}

inline PushdownAlphabet parse_alphabet_line(Line const& l) {
  std::optional<std::vector<Letter>> calls;
  std::optional<std::vector<Letter>> returns;
  std::optional<std::vector<Letter>> internals;
  for (std::size_t i = 1; i < l.tokens.size(); ++i) {
    std::string const& tok = l.tokens[i];
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError(l.number, "expected key=letters, got '" + tok + "'");
    std::string const key = tok.substr(0, eq);
    auto letters = parse_letters(l.number, std::string_view(tok).substr(eq + 1));
    std::optional<std::vector<Letter>>* slot = nullptr;
    if (key == "calls") slot = &calls;
    else if (key == "returns") slot = &returns;
    else if (key == "internals") slot = &internals;
    else throw ParseError(l.number, "unknown alphabet key '" + key + "'");
    if (slot->has_value()) throw ParseError(l.number, "alphabet key '" + key + "' given twice");
    *slot = std::move(letters);
  }
  try {
    return PushdownAlphabet(calls.value_or(std::vector<Letter>{}), returns.value_or(std::vector<Letter>{}),
                            internals.value_or(std::vector<Letter>{}));
  } catch (InvalidLetter const& e) {
    throw ParseError(l.number, e.what());
  }
}

inline Letter single_letter(Line const& l, std::string const& tok) {
  if (tok.size() != 1) throw ParseError(l.number, "expected a single letter, got '" + tok + "'");
  return tok.front();
}

inline bool is_name_token(std::string_view s) {
  return !s.empty() && s.front() != '#' && s != "=" && s != "->" &&
         std::none_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

/// Names, identity and multiplication table shared by algebra and monoid files.
struct TableSection {
  std::vector<std::string> names;
  std::map<std::string, Element> index;
  std::optional<Element> identity;
  std::vector<Element> mult;
  std::size_t elements_line = 0;
};

inline Element lookup(TableSection const& s, Line const& l, std::string const& name) {
  if (s.names.empty()) throw ParseError(l.number, "elements must be declared before use");
  auto it = s.index.find(name);
  if (it == s.index.end()) throw ParseError(l.number, "undeclared element '" + name + "'");
  return it->second;
}

/// Handles `elements`, `identity` and `mult`; returns false for other keywords.
inline bool parse_table_line(TableSection& s, std::vector<Line> const& lines, std::size_t& i) {
  Line const& l = lines[i];
  std::string const& kw = l.tokens.front();
  if (kw == "elements") {
    if (!s.names.empty()) throw ParseError(l.number, "elements declared twice");
    if (l.tokens.size() < 2) throw ParseError(l.number, "at least one element is required");
    for (std::size_t k = 1; k < l.tokens.size(); ++k) {
      std::string const& name = l.tokens[k];
      if (!is_name_token(name)) throw ParseError(l.number, "invalid element name '" + name + "'");
      if (!s.index.try_emplace(name, static_cast<Element>(s.names.size())).second) {
        throw ParseError(l.number, "element '" + name + "' declared twice");
      }
      s.names.push_back(name);
    }
    s.elements_line = l.number;
    return true;
  }
  if (kw == "identity") {
    if (l.tokens.size() != 2) throw ParseError(l.number, "identity takes one element");
    s.identity = lookup(s, l, l.tokens[1]);
    return true;
  }
  if (kw == "mult") {
    if (l.tokens.size() != 1) throw ParseError(l.number, "mult is followed by one row per line");
    if (s.names.empty()) throw ParseError(l.number, "elements must be declared before mult");
    if (!s.mult.empty()) throw ParseError(l.number, "mult given twice");
    std::size_t const n = s.names.size();
    for (std::size_t row = 0; row < n; ++row) {
      if (i + 1 >= lines.size()) throw ParseError(l.number, "mult needs " + std::to_string(n) + " rows");
      Line const& r = lines[++i];
      if (r.tokens.size() != n) {
        throw ParseError(r.number, "mult row has " + std::to_string(r.tokens.size()) + " entries, expected " +
                                       std::to_string(n));
      }
      for (auto const& tok : r.tokens) s.mult.push_back(lookup(s, r, tok));
    }
    return true;
  }
  return false;
}

inline void require_tables(TableSection const& s, std::size_t last_line) {
  if (s.names.empty()) throw ParseError(last_line, "missing elements");
  if (!s.identity) throw ParseError(last_line, "missing identity");
  if (s.mult.empty()) throw ParseError(last_line, "missing mult");
}

inline std::size_t last_line_of(std::vector<Line> const& lines) {
  return lines.empty() ? 1 : lines.back().number;
}

}  // namespace detail

enum class FileKind { algebra, vpa, vca, monoid, alphabet };

/// Classifies a document by its first keyword.
inline FileKind detect_kind(std::string_view text) {
  auto const lines = detail::tokenize(text);
  if (lines.empty()) throw ParseError(1, "empty document");
  std::string const& kw = lines.front().tokens.front();
  if (kw == "vpa") return FileKind::vpa;
  if (kw == "vca") return FileKind::vca;
  if (kw == "monoid") return FileKind::monoid;
  if (kw == "alphabet" && lines.size() == 1) return FileKind::alphabet;
  return FileKind::algebra;
}

// --- alphabets --------------------------------------------------------------

inline PushdownAlphabet parse_alphabet(std::string_view text) {
  auto const lines = detail::tokenize(text);
  if (lines.size() != 1 || lines.front().tokens.front() != "alphabet") {
    throw ParseError(lines.empty() ? 1 : lines.front().number, "expected a single alphabet line");
  }
  return detail::parse_alphabet_line(lines.front());
}

inline std::string format_alphabet(PushdownAlphabet const& a) {
  auto join = [](std::vector<Letter> const& ls) {
    std::string out;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (i) out += ',';
      out += ls[i];
    }
    return out;
  };
  return "alphabet calls=" + join(a.calls()) + " returns=" + join(a.returns()) + " internals=" + join(a.internals());
}

// --- recognizers ------------------------------------------------------------

struct LoadOptions {
  /// Add the identity, translations and compositions missing from the file.
  bool complete = true;
};

struct LoadedRecognizer {
  RecognizerSpec spec;
  std::vector<AddedOp> added;
};

inline LoadedRecognizer parse_recognizer(std::string_view text, LoadOptions options = {}) {
  auto const lines = detail::tokenize(text);
  std::size_t const last = detail::last_line_of(lines);
  std::optional<PushdownAlphabet> alphabet;
  detail::TableSection tables;
  std::vector<Transformation> ops;
  std::vector<std::string> op_names;
  std::map<std::string, OpId> op_index;
  std::map<std::pair<Letter, Letter>, std::pair<std::string, std::size_t>> extmap;
  std::map<Letter, Element> letter_map;
  std::optional<std::vector<Element>> accepting;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    detail::Line const& l = lines[i];
    std::string const& kw = l.tokens.front();
    if (kw == "alphabet") {
      if (alphabet) throw ParseError(l.number, "alphabet declared twice");
      alphabet = detail::parse_alphabet_line(l);
    } else if (detail::parse_table_line(tables, lines, i)) {
    } else if (kw == "op") {
      if (l.tokens.size() < 3 || l.tokens[2] != "=") throw ParseError(l.number, "expected: op NAME = row");
      std::string const& name = l.tokens[1];
      if (!detail::is_name_token(name)) throw ParseError(l.number, "invalid operation name '" + name + "'");
      if (tables.names.empty()) throw ParseError(l.number, "elements must be declared before operations");
      std::size_t const n = tables.names.size();
      if (l.tokens.size() != n + 3) {
        throw ParseError(l.number, "operation row has " + std::to_string(l.tokens.size() - 3) +
                                       " entries, expected " + std::to_string(n));
      }
      Transformation t;
      for (std::size_t k = 3; k < l.tokens.size(); ++k) t.push_back(detail::lookup(tables, l, l.tokens[k]));
      if (!op_index.try_emplace(name, static_cast<OpId>(ops.size())).second) {
        throw ParseError(l.number, "operation '" + name + "' declared twice");
      }
      ops.push_back(std::move(t));
      op_names.push_back(name);
    } else if (kw == "extmap") {
      if (!alphabet) throw ParseError(l.number, "alphabet must be declared before extmap");
      if (l.tokens.size() != 5 || l.tokens[3] != "->") throw ParseError(l.number, "expected: extmap CALL RETURN -> OP");
      Letter const a = detail::single_letter(l, l.tokens[1]);
      Letter const b = detail::single_letter(l, l.tokens[2]);
      if (!alphabet->contains(a) || alphabet->kind(a) != LetterKind::call) {
        throw ParseError(l.number, std::string("'") + a + "' is not a call letter");
      }
      if (!alphabet->contains(b) || alphabet->kind(b) != LetterKind::ret) {
        throw ParseError(l.number, std::string("'") + b + "' is not a return letter");
      }
      if (!op_index.contains(l.tokens[4])) throw ParseError(l.number, "undeclared operation '" + l.tokens[4] + "'");
      if (!extmap.try_emplace({a, b}, l.tokens[4], l.number).second) {
        throw ParseError(l.number, std::string("pair (") + a + "," + b + ") mapped twice");
      }
    } else if (kw == "letter") {
      if (!alphabet) throw ParseError(l.number, "alphabet must be declared before letter");
      if (l.tokens.size() != 4 || l.tokens[2] != "->") throw ParseError(l.number, "expected: letter C -> ELEMENT");
      Letter const c = detail::single_letter(l, l.tokens[1]);
      if (!alphabet->contains(c) || alphabet->kind(c) != LetterKind::internal) {
        throw ParseError(l.number, std::string("'") + c + "' is not an internal letter");
      }
      if (!letter_map.try_emplace(c, detail::lookup(tables, l, l.tokens[3])).second) {
        throw ParseError(l.number, std::string("letter '") + c + "' mapped twice");
      }
    } else if (kw == "accept") {
      if (accepting) throw ParseError(l.number, "accept given twice");
      std::vector<Element> acc;
      for (std::size_t k = 1; k < l.tokens.size(); ++k) acc.push_back(detail::lookup(tables, l, l.tokens[k]));
      accepting = std::move(acc);
    } else {
      throw ParseError(l.number, "unknown keyword '" + kw + "'");
    }
  }

  if (!alphabet) throw ParseError(last, "missing alphabet");
  detail::require_tables(tables, last);
  if (!accepting) throw ParseError(last, "missing accept");

  ExtAlgebra declared(tables.names, *tables.identity, tables.mult, ops, op_names);
  LoadedRecognizer out;
  if (options.complete) {
    Completion c = complete_algebra(declared);
    out.spec.algebra = std::move(c.algebra);
    out.added = std::move(c.added);
  } else {
    out.spec.algebra = std::move(declared);
  }

  Morphism m = Morphism::blank(*alphabet);
  for (Letter a : alphabet->calls()) {
    for (Letter b : alphabet->returns()) {
      auto it = extmap.find({a, b});
      if (it == extmap.end()) throw ParseError(last, std::string("pair (") + a + "," + b + ") has no extmap");
      m.ext(a, b) = op_index.at(it->second.first);
    }
  }
  for (Letter c : alphabet->internals()) {
    auto it = letter_map.find(c);
    if (it == letter_map.end()) throw ParseError(last, std::string("internal letter '") + c + "' has no image");
    m.internal_image[alphabet->group_index(c)] = it->second;
  }
  out.spec.morphism = std::move(m);
  out.spec.accepting = normalize_subset(std::move(*accepting));

  auto const report = validate_algebra(out.spec.algebra);
  if (!report.ok()) {
    std::string msg = "invalid algebra:";
    for (auto const& v : report.violations) msg += " " + v.message + ";";
    msg.pop_back();
    throw ValidationError(msg);
  }
  return out;
}

inline LoadedRecognizer load_recognizer(std::string const& path, LoadOptions options = {}) {
  return parse_recognizer(detail::read_file(path), options);
}

namespace detail {

/// Operation names usable as file tokens, made unique by suffixing.
inline std::vector<std::string> printable_op_names(ExtAlgebra const& r) {
  std::vector<std::string> out;
  std::map<std::string, std::size_t> used;
  for (OpId e = 0; e < r.op_count(); ++e) {
    std::string name = r.op_name(e);
    if (!is_name_token(name)) name = "op" + std::to_string(e);
    if (used[name]++ > 0) name += "~" + std::to_string(e);
    out.push_back(std::move(name));
  }
  return out;
}

}  // namespace detail

/// Writes every operation, so the file loads back without completion.
inline std::string format_recognizer(RecognizerSpec const& spec) {
  auto const& r = spec.algebra;
  std::ostringstream out;
  out << format_alphabet(spec.alphabet()) << "\n";
  out << "elements";
  for (auto const& name : r.element_names()) out << ' ' << name;
  out << "\nidentity " << r.element_name(r.identity()) << "\nmult\n";
  for (Element x = 0; x < r.size(); ++x) {
    for (Element y = 0; y < r.size(); ++y) out << (y ? " " : "") << r.element_name(r.multiply(x, y));
    out << "\n";
  }
  auto const names = detail::printable_op_names(r);
  for (OpId e = 0; e < r.op_count(); ++e) {
    out << "op " << names[e] << " =";
    for (Element x = 0; x < r.size(); ++x) out << ' ' << r.element_name(r.apply(e, x));
    out << "\n";
  }
  auto const& a = spec.alphabet();
  for (Letter c : a.calls())
    for (Letter b : a.returns()) out << "extmap " << c << ' ' << b << " -> " << names[spec.morphism.ext(c, b)] << "\n";
  for (Letter c : a.internals()) out << "letter " << c << " -> " << r.element_name(spec.morphism.internal(c)) << "\n";
  out << "accept";
  for (Element x : spec.accepting) out << ' ' << r.element_name(x);
  out << "\n";
  return out.str();
}

// --- automata -----------------------------------------------------------------

namespace detail {

struct AutomatonHeader {
  std::optional<PushdownAlphabet> alphabet;
  std::vector<std::string> states;
  std::map<std::string, State> index;
  std::optional<State> initial;
  std::optional<std::vector<State>> finals;
  std::optional<State> sink;
};

inline State state_of(AutomatonHeader const& h, Line const& l, std::string const& name) {
  if (h.states.empty()) throw ParseError(l.number, "states must be declared before use");
  auto it = h.index.find(name);
  if (it == h.index.end()) throw ParseError(l.number, "undeclared state '" + name + "'");
  return it->second;
}

inline std::vector<State> states_matching(AutomatonHeader const& h, Line const& l, std::string const& tok) {
  if (tok == "*") {
    std::vector<State> all(h.states.size());
    for (State q = 0; q < all.size(); ++q) all[q] = q;
    return all;
  }
  return {state_of(h, l, tok)};
}

inline std::vector<Letter> letters_matching(AutomatonHeader const& h, Line const& l, std::string const& tok,
                                            std::optional<LetterKind> kind) {
  if (!h.alphabet) throw ParseError(l.number, "alphabet must be declared before transitions");
  auto const& a = *h.alphabet;
  if (tok == "*") {
    if (!kind) return a.letters();
    switch (*kind) {
      case LetterKind::call: return a.calls();
      case LetterKind::ret: return a.returns();
      case LetterKind::internal: return a.internals();
    }
  }
  Letter const c = single_letter(l, tok);
  if (!a.contains(c)) throw ParseError(l.number, std::string("letter '") + c + "' is not in the alphabet");
  if (kind && a.kind(c) != *kind) throw ParseError(l.number, std::string("letter '") + c + "' has the wrong kind");
  return {c};
}

/// Handles alphabet, states, initial, final and sink.
inline bool parse_header_line(AutomatonHeader& h, Line const& l) {
  std::string const& kw = l.tokens.front();
  if (kw == "alphabet") {
    if (h.alphabet) throw ParseError(l.number, "alphabet declared twice");
    h.alphabet = parse_alphabet_line(l);
  } else if (kw == "states") {
    if (!h.states.empty()) throw ParseError(l.number, "states declared twice");
    if (l.tokens.size() < 2) throw ParseError(l.number, "at least one state is required");
    for (std::size_t k = 1; k < l.tokens.size(); ++k) {
      if (!is_name_token(l.tokens[k]) || l.tokens[k] == "*") {
        throw ParseError(l.number, "invalid state name '" + l.tokens[k] + "'");
      }
      if (!h.index.try_emplace(l.tokens[k], static_cast<State>(h.states.size())).second) {
        throw ParseError(l.number, "state '" + l.tokens[k] + "' declared twice");
      }
      h.states.push_back(l.tokens[k]);
    }
  } else if (kw == "initial") {
    if (l.tokens.size() != 2) throw ParseError(l.number, "initial takes one state");
    h.initial = state_of(h, l, l.tokens[1]);
  } else if (kw == "final") {
    std::vector<State> f;
    for (std::size_t k = 1; k < l.tokens.size(); ++k) f.push_back(state_of(h, l, l.tokens[k]));
    h.finals = std::move(f);
  } else if (kw == "sink") {
    if (l.tokens.size() != 2) throw ParseError(l.number, "sink takes one state");
    h.sink = state_of(h, l, l.tokens[1]);
  } else {
    return false;
  }
  return true;
}

inline void require_header(AutomatonHeader const& h, std::size_t last) {
  if (!h.alphabet) throw ParseError(last, "missing alphabet");
  if (h.states.empty()) throw ParseError(last, "missing states");
  if (!h.initial) throw ParseError(last, "missing initial");
  if (!h.finals) throw ParseError(last, "missing final");
}

}  // namespace detail

/// VPA document. `*` in a transition matches every letter of the right kind,
/// every state, or every stack symbol (every non-bottom symbol for returns);
/// later lines override earlier ones. `sink S` sends every unspecified move
/// to S, calls pushing the first non-bottom symbol.
inline VPA parse_vpa(std::string_view text) {
  auto const lines = detail::tokenize(text);
  std::size_t const last = detail::last_line_of(lines);
  if (lines.empty() || lines.front().tokens != std::vector<std::string>{"vpa"}) {
    throw ParseError(lines.empty() ? 1 : lines.front().number, "expected 'vpa'");
  }
  detail::AutomatonHeader h;
  std::vector<std::string> stack;
  std::map<std::string, StackSymbol> stack_index;
  std::vector<detail::Line> rules;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::Line const& l = lines[i];
    std::string const& kw = l.tokens.front();
    if (detail::parse_header_line(h, l)) continue;
    if (kw == "stack") {
      if (!stack.empty()) throw ParseError(l.number, "stack declared twice");
      if (l.tokens.size() < 2 || l.tokens[1] != "#") throw ParseError(l.number, "the stack alphabet starts with #");
      for (std::size_t k = 1; k < l.tokens.size(); ++k) {
        if (l.tokens[k] == "*" || (k > 1 && !detail::is_name_token(l.tokens[k]))) {
          throw ParseError(l.number, "invalid stack symbol '" + l.tokens[k] + "'");
        }
        if (!stack_index.try_emplace(l.tokens[k], static_cast<StackSymbol>(stack.size())).second) {
          throw ParseError(l.number, "stack symbol '" + l.tokens[k] + "' declared twice");
        }
        stack.push_back(l.tokens[k]);
      }
    } else if (kw == "call" || kw == "return" || kw == "internal") {
      rules.push_back(l);
    } else {
      throw ParseError(l.number, "unknown keyword '" + kw + "'");
    }
  }
  detail::require_header(h, last);
  if (stack.empty()) stack.push_back("#");

  VPA m(*h.alphabet, h.states, stack, *h.initial, *h.finals);
  auto symbols = [&](detail::Line const& l, std::string const& tok, bool skip_bottom) {
    std::vector<StackSymbol> out;
    if (tok == "*") {
      for (StackSymbol g = skip_bottom ? 1 : 0; g < stack.size(); ++g) out.push_back(g);
      return out;
    }
    auto it = stack_index.find(tok);
    if (it == stack_index.end()) throw ParseError(l.number, "undeclared stack symbol '" + tok + "'");
    return std::vector<StackSymbol>{it->second};
  };
  for (detail::Line const& l : rules) {
    std::string const& kw = l.tokens.front();
    bool const is_call = kw == "call";
    std::size_t const expected = is_call ? 7 : 6;
    if (l.tokens.size() != expected || l.tokens[4] != "->") {
      throw ParseError(l.number, is_call ? "expected: call A STATE TOP -> STATE PUSH"
                                         : "expected: " + kw + " LETTER STATE TOP -> STATE");
    }
    LetterKind const kind = is_call ? LetterKind::call : (kw == "return" ? LetterKind::ret : LetterKind::internal);
    auto const letters = detail::letters_matching(h, l, l.tokens[1], kind);
    auto const from = detail::states_matching(h, l, l.tokens[2]);
    auto const tops = symbols(l, l.tokens[3], kind == LetterKind::ret);
    State const to = detail::state_of(h, l, l.tokens[5]);
    try {
      for (Letter c : letters)
        for (State q : from)
          for (StackSymbol g : tops) {
            if (kind == LetterKind::call) {
              auto pushed = symbols(l, l.tokens[6], false);
              m.set_call(c, q, g, to, pushed.front());
            } else if (kind == LetterKind::ret) {
              m.set_return(c, q, g, to);
            } else {
              m.set_internal(c, q, g, to);
            }
          }
    } catch (MalformedAutomaton const& e) {
      throw ParseError(l.number, e.what());
    }
  }
  if (h.sink) {
    auto const& a = m.alphabet();
    for (State q = 0; q < m.state_count(); ++q)
      for (StackSymbol g = 0; g < m.stack_size(); ++g) {
        for (Letter c : a.calls()) {
          if (m.call(c, q, g).to != kNoState) continue;
          if (m.stack_size() < 2) throw ParseError(last, "sink needs a non-bottom stack symbol for calls");
          m.set_call(c, q, g, *h.sink, 1);
        }
        for (Letter c : a.internals())
          if (m.internal(c, q, g) == kNoState) m.set_internal(c, q, g, *h.sink);
        if (g == kBottom) continue;
        for (Letter c : a.returns())
          if (m.ret(c, q, g) == kNoState) m.set_return(c, q, g, *h.sink);
      }
  }
  try {
    m.validate();
  } catch (MalformedAutomaton const& e) {
    throw ValidationError(e.what());
  }
  return m;
}

inline std::string format_vpa(VPA const& m) {
  std::ostringstream out;
  auto const& a = m.alphabet();
  out << "vpa\n" << format_alphabet(a) << "\nstates";
  for (auto const& s : m.state_names()) out << ' ' << s;
  out << "\ninitial " << m.state_name(m.initial()) << "\nfinal";
  for (State q = 0; q < m.state_count(); ++q)
    if (m.is_final(q)) out << ' ' << m.state_name(q);
  out << "\nstack";
  for (auto const& g : m.stack_names()) out << ' ' << g;
  out << "\n";
  for (State q = 0; q < m.state_count(); ++q)
    for (StackSymbol g = 0; g < m.stack_size(); ++g) {
      for (Letter c : a.calls()) {
        auto const mv = m.call(c, q, g);
        out << "call " << c << ' ' << m.state_name(q) << ' ' << m.stack_name(g) << " -> " << m.state_name(mv.to)
            << ' ' << m.stack_name(mv.push) << "\n";
      }
      for (Letter c : a.internals())
        out << "internal " << c << ' ' << m.state_name(q) << ' ' << m.stack_name(g) << " -> "
            << m.state_name(m.internal(c, q, g)) << "\n";
      if (g == kBottom) continue;
      for (Letter c : a.returns())
        out << "return " << c << ' ' << m.state_name(q) << ' ' << m.stack_name(g) << " -> "
            << m.state_name(m.ret(c, q, g)) << "\n";
    }
  return out.str();
}

/// VCA document: `threshold m` and `delta LEVEL LETTER STATE -> STATE`,
/// with `*` wildcards for the level, letter and source state.
inline VCA parse_vca(std::string_view text) {
  auto const lines = detail::tokenize(text);
  std::size_t const last = detail::last_line_of(lines);
  if (lines.empty() || lines.front().tokens != std::vector<std::string>{"vca"}) {
    throw ParseError(lines.empty() ? 1 : lines.front().number, "expected 'vca'");
  }
  detail::AutomatonHeader h;
  std::optional<std::size_t> threshold;
  std::vector<detail::Line> rules;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::Line const& l = lines[i];
    std::string const& kw = l.tokens.front();
    if (detail::parse_header_line(h, l)) continue;
    if (kw == "threshold") {
      if (l.tokens.size() != 2) throw ParseError(l.number, "threshold takes one number");
      try {
        std::size_t used = 0;
        threshold = std::stoul(l.tokens[1], &used);
        if (used != l.tokens[1].size()) throw std::invalid_argument("trailing");
      } catch (std::exception const&) {
        throw ParseError(l.number, "invalid threshold '" + l.tokens[1] + "'");
      }
    } else if (kw == "delta") {
      rules.push_back(l);
    } else {
      throw ParseError(l.number, "unknown keyword '" + kw + "'");
    }
  }
  detail::require_header(h, last);
  if (!threshold) throw ParseError(last, "missing threshold");
  VCA m(*h.alphabet, h.states, *h.initial, *h.finals, *threshold);
  for (detail::Line const& l : rules) {
    if (l.tokens.size() != 6 || l.tokens[4] != "->") throw ParseError(l.number, "expected: delta LEVEL LETTER STATE -> STATE");
    std::vector<std::size_t> levels;
    if (l.tokens[1] == "*") {
      for (std::size_t k = 0; k <= *threshold; ++k) levels.push_back(k);
    } else {
      std::size_t level = 0;
      try {
        std::size_t used = 0;
        level = std::stoul(l.tokens[1], &used);
        if (used != l.tokens[1].size()) throw std::invalid_argument("trailing");
      } catch (std::exception const&) {
        throw ParseError(l.number, "invalid level '" + l.tokens[1] + "'");
      }
      if (level > *threshold) throw ParseError(l.number, "level above threshold");
      levels.push_back(level);
    }
    auto const letters = detail::letters_matching(h, l, l.tokens[2], std::nullopt);
    auto const from = detail::states_matching(h, l, l.tokens[3]);
    State const to = detail::state_of(h, l, l.tokens[5]);
    for (std::size_t level : levels)
      for (Letter c : letters)
        for (State q : from) m.set(level, c, q, to);
  }
  if (h.sink) {
    for (std::size_t level = 0; level <= *threshold; ++level)
      for (Letter c : m.alphabet().letters())
        for (State q = 0; q < m.state_count(); ++q)
          if (m.delta(level, c, q) == kNoState) m.set(level, c, q, *h.sink);
  }
  try {
    m.validate();
  } catch (MalformedAutomaton const& e) {
    throw ValidationError(e.what());
  }
  return m;
}

// --- monoids ------------------------------------------------------------------

struct LoadedMonoid {
  FiniteMonoid monoid;
  std::vector<Element> accepting;
};

/// Monoid document: alphabet, elements, identity, mult, `image LETTER -> EL`
/// for every letter, and `accept`.
inline LoadedMonoid parse_monoid(std::string_view text) {
  auto const lines = detail::tokenize(text);
  std::size_t const last = detail::last_line_of(lines);
  if (lines.empty() || lines.front().tokens != std::vector<std::string>{"monoid"}) {
    throw ParseError(lines.empty() ? 1 : lines.front().number, "expected 'monoid'");
  }
  std::optional<PushdownAlphabet> alphabet;
  detail::TableSection tables;
  std::map<Letter, Element> images;
  std::optional<std::vector<Element>> accepting;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::Line const& l = lines[i];
    std::string const& kw = l.tokens.front();
    if (kw == "alphabet") {
      if (alphabet) throw ParseError(l.number, "alphabet declared twice");
      alphabet = detail::parse_alphabet_line(l);
    } else if (detail::parse_table_line(tables, lines, i)) {
    } else if (kw == "image") {
      if (!alphabet) throw ParseError(l.number, "alphabet must be declared before image");
      if (l.tokens.size() != 4 || l.tokens[2] != "->") throw ParseError(l.number, "expected: image LETTER -> ELEMENT");
      Letter const c = detail::single_letter(l, l.tokens[1]);
      if (!alphabet->contains(c)) throw ParseError(l.number, std::string("letter '") + c + "' is not in the alphabet");
      if (!images.try_emplace(c, detail::lookup(tables, l, l.tokens[3])).second) {
        throw ParseError(l.number, std::string("letter '") + c + "' mapped twice");
      }
    } else if (kw == "accept") {
      if (accepting) throw ParseError(l.number, "accept given twice");
      std::vector<Element> acc;
      for (std::size_t k = 1; k < l.tokens.size(); ++k) acc.push_back(detail::lookup(tables, l, l.tokens[k]));
      accepting = std::move(acc);
    } else {
      throw ParseError(l.number, "unknown keyword '" + kw + "'");
    }
  }
  if (!alphabet) throw ParseError(last, "missing alphabet");
  detail::require_tables(tables, last);
  if (!accepting) throw ParseError(last, "missing accept");
  LoadedMonoid out;
  out.monoid.element_names = tables.names;
  out.monoid.identity = *tables.identity;
  out.monoid.mult = tables.mult;
  out.monoid.alphabet = *alphabet;
  for (Letter c : alphabet->letters()) {
    auto it = images.find(c);
    if (it == images.end()) throw ParseError(last, std::string("letter '") + c + "' has no image");
    out.monoid.letter_image.push_back(it->second);
  }
  out.accepting = std::move(*accepting);
  out.monoid.validate();
  return out;
}

}  // namespace vpl
