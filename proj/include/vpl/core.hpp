#pragma once

// Visibly pushdown alphabets, words, contexts and bounded enumeration.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vpl/error.hpp"

namespace vpl {

using Letter = char;
using Word = std::string;

enum class LetterKind { call, ret, internal };

/// Characters that the file formats use as separators or markers.
inline constexpr std::string_view kReservedLetters = ",=-#*;";

inline bool is_valid_letter(Letter c) {
  auto const u = static_cast<unsigned char>(c);
  return u < 128 && std::isgraph(u) != 0 && kReservedLetters.find(c) == std::string_view::npos;
}

/// A finite alphabet partitioned into call, return and internal letters.
///
/// Letters are single printable ASCII characters. Declaration order (calls,
/// then returns, then internals) is the letter order used by every
/// enumerator.
class PushdownAlphabet {
 public:
  PushdownAlphabet() { slots_.fill(kAbsent); }

  PushdownAlphabet(std::vector<Letter> calls, std::vector<Letter> returns,
                   std::vector<Letter> internals)
      : calls_(std::move(calls)), returns_(std::move(returns)), internals_(std::move(internals)) {
    slots_.fill(kAbsent);
    auto add = [this](std::vector<Letter> const& group, LetterKind kind) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        Letter const c = group[i];
        if (!is_valid_letter(c)) {
          throw InvalidLetter(std::string("'") + c + "' cannot be used as a letter");
        }
        auto& slot = slots_[static_cast<unsigned char>(c)];
        if (slot != kAbsent) {
          throw InvalidLetter(std::string("letter '") + c + "' is declared twice");
        }
        slot = static_cast<int>(order_.size());
        order_.push_back(c);
        kinds_.push_back(kind);
        group_index_.push_back(i);
      }
    };
    add(calls_, LetterKind::call);
    add(returns_, LetterKind::ret);
    add(internals_, LetterKind::internal);
  }

  std::vector<Letter> const& calls() const noexcept { return calls_; }
  std::vector<Letter> const& returns() const noexcept { return returns_; }
  std::vector<Letter> const& internals() const noexcept { return internals_; }
  /// All letters in declaration order.
  std::vector<Letter> const& letters() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }

  bool contains(Letter c) const noexcept {
    return slots_[static_cast<unsigned char>(c)] != kAbsent;
  }

  /// Position in declaration order.
  std::size_t rank(Letter c) const {
    int const s = slots_[static_cast<unsigned char>(c)];
    if (s == kAbsent) throw InvalidLetter(c);
    return static_cast<std::size_t>(s);
  }

  LetterKind kind(Letter c) const { return kinds_[rank(c)]; }

  /// Index of the letter within its own group (calls, returns or internals).
  std::size_t group_index(Letter c) const { return group_index_[rank(c)]; }

  int height_of(Letter c) const {
    switch (kind(c)) {
      case LetterKind::call: return 1;
      case LetterKind::ret: return -1;
      case LetterKind::internal: return 0;
    }
    return 0;
  }

  void check_word(std::string_view w) const {
    for (Letter c : w) {
      if (!contains(c)) throw InvalidLetter(c);
    }
  }

  /// Strict weak order on words: lexicographic under declaration order.
  bool lex_less(std::string_view x, std::string_view y) const {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                        [this](Letter a, Letter b) { return rank(a) < rank(b); });
  }

  friend bool operator==(PushdownAlphabet const& a, PushdownAlphabet const& b) {
    return a.calls_ == b.calls_ && a.returns_ == b.returns_ && a.internals_ == b.internals_;
  }

 private:
  static constexpr int kAbsent = -1;
  std::vector<Letter> calls_;
  std::vector<Letter> returns_;
  std::vector<Letter> internals_;
  std::vector<Letter> order_;
  std::vector<LetterKind> kinds_;
  std::vector<std::size_t> group_index_;
  std::array<int, 256> slots_{};
};

/// Sum of letter heights: calls +1, returns -1, internals 0.
inline int stack_height(PushdownAlphabet const& alphabet, std::string_view w) {
  int h = 0;
  for (Letter c : w) h += alphabet.height_of(c);
  return h;
}

/// Lowest running height over all prefixes of w (0 for the empty word).
inline int min_prefix_height(PushdownAlphabet const& alphabet, std::string_view w) {
  int h = 0;
  int low = 0;
  for (Letter c : w) {
    h += alphabet.height_of(c);
    low = std::min(low, h);
  }
  return low;
}

inline bool is_well_matched(PushdownAlphabet const& alphabet, std::string_view w) {
  int h = 0;
  // Every letter is checked, so an invalid letter after a negative prefix still throws.
  bool ok = true;
  for (Letter c : w) {
    h += alphabet.height_of(c);
    if (h < 0) ok = false;
  }
  return ok && h == 0;
}

/// A pair (u, v) whose concatenation is well-matched; denotes x -> u x v.
class Context {
 public:
  /// Throws NotWellMatched when left + right is not well-matched.
  static Context make(PushdownAlphabet const& alphabet, Word left, Word right) {
    if (!is_well_matched(alphabet, left + right)) {
      throw NotWellMatched("context (" + display(left) + ", " + display(right) +
                           ") does not concatenate to a well-matched word");
    }
    int const h = stack_height(alphabet, left);
    return Context(std::move(left), std::move(right), h);
  }

  static Context identity() { return Context({}, {}, 0); }

  Word const& left() const noexcept { return left_; }
  Word const& right() const noexcept { return right_; }
  /// Height signature: the stack height of the left part.
  int height() const noexcept { return height_; }
  std::size_t length() const noexcept { return left_.size() + right_.size(); }

  friend bool operator==(Context const& a, Context const& b) {
    return a.left_ == b.left_ && a.right_ == b.right_;
  }

  /// Human-readable word, with the empty word shown as "-".
  static std::string display(std::string_view w) { return w.empty() ? std::string("-") : std::string(w); }

 private:
  Context(Word left, Word right, int height)
      : left_(std::move(left)), right_(std::move(right)), height_(height) {}

  Word left_;
  Word right_;
  int height_ = 0;
};

/// (u, v) . (u', v') = (u u', v' v).
inline Context compose_contexts(PushdownAlphabet const& alphabet, Context const& outer,
                                Context const& inner) {
  return Context::make(alphabet, outer.left() + inner.left(), inner.right() + outer.right());
}

inline Word apply_context(PushdownAlphabet const& alphabet, Context const& ctx, std::string_view x) {
  if (!is_well_matched(alphabet, x)) {
    throw NotWellMatched("cannot apply a context to the non-well-matched word '" +
                         Context::display(x) + "'");
  }
  Word out;
  out.reserve(ctx.length() + x.size());
  out += ctx.left();
  out += x;
  out += ctx.right();
  if (!is_well_matched(alphabet, out)) {
    throw NotWellMatched("context application produced a non-well-matched word");
  }
  return out;
}

/// A context split at its unmatched letters:
///   u = w_0 a_1 w_1 ... a_k w_k   and   v = w'_k b_k ... b_1 w'_0
/// where every w_i, w'_i is well-matched and a_i is matched with b_i.
struct ContextShape {
  std::vector<Word> left_blocks;   // w_0 .. w_k
  std::vector<Letter> calls;       // a_1 .. a_k
  std::vector<Word> right_blocks;  // w'_0 .. w'_k
  std::vector<Letter> returns;     // b_1 .. b_k
};

inline ContextShape decompose(PushdownAlphabet const& alphabet, Context const& ctx) {
  ContextShape shape;
  Word const& u = ctx.left();
  Word const& v = ctx.right();

  // Calls of u still open at the end of u are the unmatched ones.
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (alphabet.kind(u[i])) {
      case LetterKind::call: open.push_back(i); break;
      case LetterKind::ret: open.pop_back(); break;
      case LetterKind::internal: break;
    }
  }
  std::size_t start = 0;
  for (std::size_t pos : open) {
    shape.left_blocks.push_back(u.substr(start, pos - start));
    shape.calls.push_back(u[pos]);
    start = pos + 1;
  }
  shape.left_blocks.push_back(u.substr(start));

  // Returns of v that drop below v's starting height are the unmatched ones;
  // the first found closes a_k.
  std::vector<std::size_t> closing;
  int depth = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (alphabet.kind(v[i])) {
      case LetterKind::call: ++depth; break;
      case LetterKind::ret:
        if (depth == 0) {
          closing.push_back(i);
        } else {
          --depth;
        }
        break;
      case LetterKind::internal: break;
    }
  }
  std::size_t const k = shape.calls.size();
  shape.right_blocks.assign(k + 1, Word{});
  shape.returns.assign(k, Letter{});
  start = 0;
  for (std::size_t j = 0; j < closing.size(); ++j) {
    std::size_t const level = k - j;  // closing[j] is b_level
    shape.right_blocks[level] = v.substr(start, closing[j] - start);
    shape.returns[level - 1] = v[closing[j]];
    start = closing[j] + 1;
  }
  shape.right_blocks[0] = v.substr(start);
  return shape;
}

/// All well-matched words of length <= max_len, ordered by length and then
/// lexicographically under the declared letter order.
inline std::vector<Word> enumerate_well_matched(PushdownAlphabet const& alphabet, std::size_t max_len) {
  std::vector<Word> out;
  auto const& letters = alphabet.letters();
  Word current;
  for (std::size_t len = 0; len <= max_len; ++len) {
    // Depth-first in letter order yields lexicographic order for a fixed length.
    auto rec = [&](auto&& self, int height) -> void {
      std::size_t const remaining = len - current.size();
      if (remaining == 0) {
        if (height == 0) out.push_back(current);
        return;
      }
      for (Letter c : letters) {
        int const h = height + alphabet.height_of(c);
        if (h < 0 || static_cast<std::size_t>(h) > remaining - 1) continue;
        current.push_back(c);
        self(self, h);
        current.pop_back();
      }
    };
    rec(rec, 0);
  }
  return out;
}

/// All contexts (u, v) with |u| + |v| <= max_total_len. Order: total length,
/// then height signature (descending), then |u| (descending), then u and v
/// lexicographically.
inline std::vector<Context> enumerate_contexts(PushdownAlphabet const& alphabet,
                                               std::size_t max_total_len) {
  struct Entry {
    std::size_t length;
    int height;
    std::size_t left_len;
    Context ctx;
  };
  std::vector<Entry> entries;
  for (Word const& w : enumerate_well_matched(alphabet, max_total_len)) {
    for (std::size_t split = 0; split <= w.size(); ++split) {
      Context ctx = Context::make(alphabet, w.substr(0, split), w.substr(split));
      entries.push_back({w.size(), ctx.height(), split, std::move(ctx)});
    }
  }
  // Words arrive in length-lex order, so ties keep (u, v) lexicographic.
  std::stable_sort(entries.begin(), entries.end(), [](Entry const& a, Entry const& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.height != b.height) return a.height > b.height;
    return a.left_len > b.left_len;
  });
  std::vector<Context> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.ctx));
  return out;
}

}  // namespace vpl
