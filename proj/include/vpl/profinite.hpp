#pragma once

// Omega-power semantics, profinite terms, separation, and bounded checkers
// for the two equation schemas characterising VCL and threshold-zero VCL.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vpl/algebra.hpp"
#include "vpl/core.hpp"
#include "vpl/transformation.hpp"

namespace vpl {

// --- omega powers -----------------------------------------------------------

inline Element omega_element(ExtAlgebra const& r, Element x) {
  return idempotent_power(x, [&r](Element a, Element b) { return r.multiply(a, b); });
}

inline Transformation omega_table(Transformation const& t) {
  return idempotent_power(t, [](Transformation const& f, Transformation const& g) { return compose(f, g); });
}

/// Index of the idempotent power of an operation; it is in O(R) by closure.
inline OpId omega_op(ExtAlgebra const& r, OpId op) {
  auto id = r.find_op(omega_table(r.op(op)));
  if (!id) throw ClosureViolation("idempotent power of '" + r.op_name(op) + "' is not an operation");
  return *id;
}

// --- terms ------------------------------------------------------------------

enum class TermKind { var, empty, letter, concat, ext, ext_omega };

struct TermNode;
using ProfiniteTerm = std::shared_ptr<TermNode const>;

struct TermNode {
  TermKind kind;
  std::string name;                 // var
  Letter letter = 0;                // letter
  std::optional<Context> context;   // ext, ext_omega
  ProfiniteTerm first;              // concat left, ext argument
  ProfiniteTerm second;             // concat right
};

namespace term {

inline ProfiniteTerm var(std::string name) {
  return std::make_shared<TermNode const>(TermNode{TermKind::var, std::move(name), 0, std::nullopt, nullptr, nullptr});
}
inline ProfiniteTerm empty() {
  return std::make_shared<TermNode const>(TermNode{TermKind::empty, {}, 0, std::nullopt, nullptr, nullptr});
}
inline ProfiniteTerm letter(Letter c) {
  return std::make_shared<TermNode const>(TermNode{TermKind::letter, {}, c, std::nullopt, nullptr, nullptr});
}
inline ProfiniteTerm concat(ProfiniteTerm x, ProfiniteTerm y) {
  return std::make_shared<TermNode const>(
      TermNode{TermKind::concat, {}, 0, std::nullopt, std::move(x), std::move(y)});
}
inline ProfiniteTerm ext(Context ctx, ProfiniteTerm x) {
  return std::make_shared<TermNode const>(TermNode{TermKind::ext, {}, 0, std::move(ctx), std::move(x), nullptr});
}
inline ProfiniteTerm ext_omega(Context ctx, ProfiniteTerm x) {
  return std::make_shared<TermNode const>(
      TermNode{TermKind::ext_omega, {}, 0, std::move(ctx), std::move(x), nullptr});
}

}  // namespace term

inline std::string to_string(ProfiniteTerm const& t) {
  switch (t->kind) {
    case TermKind::var: return t->name;
    case TermKind::empty: return "-";
    case TermKind::letter: return std::string(1, t->letter);
    case TermKind::concat: return to_string(t->first) + " " + to_string(t->second);
    case TermKind::ext:
    case TermKind::ext_omega: {
      std::string const head = t->kind == TermKind::ext ? "ext" : "ext^w";
      return head + "[" + Context::display(t->context->left()) + "," + Context::display(t->context->right()) +
             "](" + to_string(t->first) + ")";
    }
  }
  return {};
}

/// The omega-free term spelling out a well-matched word: internal letters
/// as letters, each matched pair a..b as ext[a,b] of its inside.
inline ProfiniteTerm term_of_word(PushdownAlphabet const& alphabet, std::string_view w) {
  if (!is_well_matched(alphabet, w)) throw NotWellMatched("'" + Context::display(w) + "' is not well-matched");
  std::vector<std::pair<Letter, ProfiniteTerm>> stack;
  ProfiniteTerm current = term::empty();
  auto append = [](ProfiniteTerm acc, ProfiniteTerm next) {
    return acc->kind == TermKind::empty ? next : term::concat(std::move(acc), std::move(next));
  };
  for (Letter c : w) {
    switch (alphabet.kind(c)) {
      case LetterKind::internal: current = append(current, term::letter(c)); break;
      case LetterKind::call:
        stack.emplace_back(c, current);
        current = term::empty();
        break;
      case LetterKind::ret: {
        auto [a, saved] = stack.back();
        stack.pop_back();
        current = append(saved, term::ext(Context::make(alphabet, std::string(1, a), std::string(1, c)), current));
        break;
      }
    }
  }
  return current;
}

using Assignment = std::map<std::string, Element>;

inline Element eval_profinite_term(ExtAlgebra const& r, Morphism const& m, ProfiniteTerm const& t,
                                   Assignment const& assignment) {
  switch (t->kind) {
    case TermKind::var: {
      auto it = assignment.find(t->name);
      if (it == assignment.end()) throw UnboundVariable("variable '" + t->name + "' is not assigned");
      if (it->second >= r.size()) throw MalformedTables("variable '" + t->name + "' assigned out of range");
      return it->second;
    }
    case TermKind::empty: return r.identity();
    case TermKind::letter:
      if (m.alphabet.kind(t->letter) != LetterKind::internal) {
        throw InvalidLetter(std::string("term letter '") + t->letter + "' is not an internal letter");
      }
      return m.internal(t->letter);
    case TermKind::concat:
      return r.multiply(eval_profinite_term(r, m, t->first, assignment),
                        eval_profinite_term(r, m, t->second, assignment));
    case TermKind::ext:
      return r.apply(context_op(r, m, *t->context), eval_profinite_term(r, m, t->first, assignment));
    case TermKind::ext_omega:
      return r.apply(omega_op(r, context_op(r, m, *t->context)), eval_profinite_term(r, m, t->first, assignment));
  }
  return r.identity();
}

inline Element eval_profinite_term(RecognizerSpec const& spec, ProfiniteTerm const& t,
                                   Assignment const& assignment = {}) {
  return eval_profinite_term(spec.algebra, spec.morphism, t, assignment);
}

// --- morphism enumeration ---------------------------------------------------

/// Number of morphisms from the well-matched words over `alphabet` into R,
/// saturating at SIZE_MAX.
inline std::size_t morphism_count(ExtAlgebra const& r, PushdownAlphabet const& alphabet) {
  std::size_t count = 1;
  auto times = [&count](std::size_t k) {
    if (k != 0 && count > static_cast<std::size_t>(-1) / k) {
      count = static_cast<std::size_t>(-1);
    } else {
      count *= k;
    }
  };
  for (std::size_t i = 0; i < alphabet.internals().size(); ++i) times(r.size());
  for (std::size_t i = 0; i < alphabet.calls().size() * alphabet.returns().size(); ++i) times(r.op_count());
  return count;
}

/// Visits every morphism in odometer order (internal images first, then
/// pairs in call-major order; the last generator varies fastest) until
/// `visit` returns false. Returns false when stopped early.
template <class Visit>
bool for_each_morphism(ExtAlgebra const& r, PushdownAlphabet const& alphabet, std::size_t cap, Visit&& visit) {
  std::size_t const total = morphism_count(r, alphabet);
  if (total > cap) {
    throw SizeCapExceeded(std::to_string(total) + " morphisms exceed the cap of " + std::to_string(cap));
  }
  Morphism m = Morphism::blank(alphabet);
  std::size_t const ni = m.internal_image.size();
  std::size_t const slots = ni + m.ext_image.size();
  std::vector<std::size_t> digit(slots, 0);
  auto radix = [&](std::size_t i) { return i < ni ? r.size() : r.op_count(); };
  while (true) {
    for (std::size_t i = 0; i < slots; ++i) {
      if (i < ni) {
        m.internal_image[i] = static_cast<Element>(digit[i]);
      } else {
        m.ext_image[i - ni] = static_cast<OpId>(digit[i]);
      }
    }
    if (!visit(m)) return false;
    std::size_t i = slots;
    while (i > 0) {
      --i;
      if (++digit[i] < radix(i)) break;
      digit[i] = 0;
      if (i == 0) return true;
    }
    if (slots == 0) return true;
  }
}

inline constexpr std::size_t kMorphismCap = 1000000;

struct SeparationResult {
  bool separated = false;
  std::optional<Morphism> witness;
  Element x_value = kNoElement;
  Element y_value = kNoElement;
  std::size_t morphisms_tried = 0;
};

/// Searches for a morphism into R that tells x and y apart. A `preferred`
/// morphism is tried before the exhaustive enumeration.
inline SeparationResult separates(ExtAlgebra const& r, PushdownAlphabet const& alphabet, std::string_view x,
                                  std::string_view y, std::size_t cap = kMorphismCap,
                                  std::optional<Morphism> const& preferred = std::nullopt) {
  for (std::string_view w : {x, y}) {
    if (!is_well_matched(alphabet, w)) throw NotWellMatched("'" + Context::display(w) + "' is not well-matched");
  }
  SeparationResult result;
  if (preferred) {
    check_morphism(r, *preferred);
    ++result.morphisms_tried;
    Element const vx = evaluate(r, *preferred, x);
    Element const vy = evaluate(r, *preferred, y);
    if (vx != vy) {
      result.separated = true;
      result.witness = preferred;
      result.x_value = vx;
      result.y_value = vy;
      return result;
    }
  }
  for_each_morphism(r, alphabet, cap, [&](Morphism const& m) {
    ++result.morphisms_tried;
    Element const vx = evaluate(r, m, x);
    Element const vy = evaluate(r, m, y);
    if (vx == vy) return true;
    result.separated = true;
    result.witness = m;
    result.x_value = vx;
    result.y_value = vy;
    return false;
  });
  return result;
}

// --- equation checking ------------------------------------------------------

enum class EquationClass { vcl, zero_vcl };
enum class MorphismMode { canonical, all };

struct Counterexample {
  Context outer;   // (u, v)
  Context inner;   // (u', v')
  std::vector<Element> assignment;  // x, or x y z
  Element left = kNoElement;
  Element right = kNoElement;
  /// For the VCL schema: 1 when ext^w[u,v'] breaks the chain, 2 when
  /// ext^w[u',v] does. Always 1 for the threshold-zero schema.
  int chain = 1;
  Morphism morphism;
};

struct EquationCheckResult {
  EquationClass equation = EquationClass::vcl;
  MorphismMode mode = MorphismMode::canonical;
  std::size_t max_context_len = 0;
  std::size_t contexts = 0;         // enumerated contexts
  std::size_t context_classes = 0;  // after collapsing equal decompositions
  std::size_t domain = 0;           // size of the element quantification domain
  std::size_t morphisms = 0;
  std::size_t instances = 0;        // evaluated equation instances
  std::optional<Counterexample> counterexample;

  bool satisfied() const noexcept { return !counterexample.has_value(); }
};

struct EquationCaps {
  std::size_t morphism_cap = 4096;
};

namespace detail {

/// Contexts grouped by the images of their decomposition. The image of
/// ext[u,v'] depends only on the left part of (u,v) and the right part of
/// (u',v'), so each class records its left and right key ids separately.
struct ContextClasses {
  std::vector<Context> representative;
  std::vector<int> height;
  std::vector<std::size_t> left_key;
  std::vector<std::size_t> right_key;
  std::vector<std::vector<Element>> left_blocks;   // by left key
  std::vector<std::vector<Letter>> left_calls;     // by left key
  std::vector<std::vector<Element>> right_blocks;  // by right key
  std::vector<std::vector<Letter>> right_returns;  // by right key
};

inline ContextClasses classify_contexts(ExtAlgebra const& r, Morphism const& m,
                                        std::vector<Context> const& contexts) {
  ContextClasses out;
  std::map<std::pair<std::vector<Element>, std::vector<Letter>>, std::size_t> lkeys;
  std::map<std::pair<std::vector<Element>, std::vector<Letter>>, std::size_t> rkeys;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  for (Context const& ctx : contexts) {
    ContextShape const shape = decompose(m.alphabet, ctx);
    std::vector<Element> lb;
    std::vector<Element> rb;
    for (auto const& w : shape.left_blocks) lb.push_back(evaluate(r, m, w));
    for (auto const& w : shape.right_blocks) rb.push_back(evaluate(r, m, w));
    auto [li, lnew] = lkeys.try_emplace({lb, shape.calls}, lkeys.size());
    if (lnew) {
      out.left_blocks.push_back(lb);
      out.left_calls.push_back(shape.calls);
    }
    auto [ri, rnew] = rkeys.try_emplace({rb, shape.returns}, rkeys.size());
    if (rnew) {
      out.right_blocks.push_back(rb);
      out.right_returns.push_back(shape.returns);
    }
    if (seen.try_emplace({li->second, ri->second}, out.representative.size()).second) {
      out.representative.push_back(ctx);
      out.height.push_back(ctx.height());
      out.left_key.push_back(li->second);
      out.right_key.push_back(ri->second);
    }
  }
  return out;
}

/// Lazily computed omega tables for (left key, right key) combinations.
class OmegaCache {
 public:
  OmegaCache(ExtAlgebra const& r, Morphism const& m, ContextClasses const& classes)
      : r_(r), m_(m), c_(classes) {}

  Transformation const& get(std::size_t lk, std::size_t rk) {
    auto it = cache_.find({lk, rk});
    if (it != cache_.end()) return it->second;
    Transformation t = context_table_from_parts(r_, m_, c_.left_blocks[lk], c_.left_calls[lk],
                                                c_.right_blocks[rk], c_.right_returns[rk]);
    if (!r_.find_op(t)) {
      throw ClosureViolation("a context image is not an operation of the algebra");
    }
    return cache_.emplace(std::make_pair(lk, rk), omega_table(t)).first->second;
  }

 private:
  ExtAlgebra const& r_;
  Morphism const& m_;
  ContextClasses const& c_;
  std::map<std::pair<std::size_t, std::size_t>, Transformation> cache_;
};

/// One morphism. Loop order: assignment, then the outer class, then the
/// inner class of the same height, so the first hit is the least instance.
inline std::optional<Counterexample> check_one(ExtAlgebra const& r, Morphism const& m, EquationClass eq,
                                               std::vector<Context> const& contexts, EquationCheckResult& stats) {
  ContextClasses const classes = classify_contexts(r, m, contexts);
  std::vector<Element> const domain = morphism_image(r, m);
  stats.context_classes = std::max(stats.context_classes, classes.representative.size());
  stats.domain = std::max(stats.domain, domain.size());
  OmegaCache omega(r, m, classes);
  std::size_t const k = classes.representative.size();

  auto report = [&](std::size_t i, std::size_t j, std::vector<Element> assignment, Element left, Element right,
                    int chain) {
    return Counterexample{classes.representative[i], classes.representative[j], std::move(assignment),
                          left, right, chain, m};
  };

  if (eq == EquationClass::vcl) {
    for (Element x : domain) {
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t const li = classes.left_key[i];
        std::size_t const ri = classes.right_key[i];
        for (std::size_t j = 0; j < k; ++j) {
          if (classes.height[j] != classes.height[i]) continue;
          std::size_t const lj = classes.left_key[j];
          std::size_t const rj = classes.right_key[j];
          ++stats.instances;
          Element const inner = omega.get(lj, rj)[x];
          Transformation const& outer = omega.get(li, ri);
          Element const chain0 = outer[inner];
          Element const chain1 = outer[omega.get(li, rj)[inner]];
          if (chain0 != chain1) return report(i, j, {x}, chain0, chain1, 1);
          Element const chain2 = outer[omega.get(lj, ri)[inner]];
          if (chain0 != chain2) return report(i, j, {x}, chain0, chain2, 2);
        }
      }
    }
    return std::nullopt;
  }

  for (Element x : domain) {
    for (Element y : domain) {
      for (Element z : domain) {
        for (std::size_t i = 0; i < k; ++i) {
          std::size_t const li = classes.left_key[i];
          std::size_t const ri = classes.right_key[i];
          for (std::size_t j = 0; j < k; ++j) {
            if (classes.height[j] != classes.height[i]) continue;
            std::size_t const lj = classes.left_key[j];
            std::size_t const rj = classes.right_key[j];
            ++stats.instances;
            Element const middle = r.multiply(r.multiply(omega.get(li, rj)[x], y), omega.get(lj, ri)[z]);
            Element const left = omega.get(li, ri)[middle];
            if (left != middle) return report(i, j, {x, y, z}, left, middle, 1);
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Bounded search for an instance of the chosen schema on which the two
/// sides differ, over all context pairs (u,v), (u',v') with |u|+|v| and
/// |u'|+|v'| at most `max_context_len` and equal height. A counterexample
/// proves non-membership; its absence proves nothing.
inline EquationCheckResult check_equation(RecognizerSpec const& spec, EquationClass eq, std::size_t max_context_len,
                                          MorphismMode mode = MorphismMode::canonical, EquationCaps caps = {}) {
  check_spec(spec);
  EquationCheckResult result;
  result.equation = eq;
  result.mode = mode;
  result.max_context_len = max_context_len;
  std::vector<Context> const contexts = enumerate_contexts(spec.alphabet(), max_context_len);
  result.contexts = contexts.size();
  if (mode == MorphismMode::canonical) {
    result.morphisms = 1;
    result.counterexample = detail::check_one(spec.algebra, spec.morphism, eq, contexts, result);
    return result;
  }
  for_each_morphism(spec.algebra, spec.alphabet(), caps.morphism_cap, [&](Morphism const& m) {
    ++result.morphisms;
    result.counterexample = detail::check_one(spec.algebra, m, eq, contexts, result);
    return !result.counterexample.has_value();
  });
  return result;
}

inline EquationCheckResult check_vcl_equation(RecognizerSpec const& spec, std::size_t max_context_len,
                                              MorphismMode mode = MorphismMode::canonical, EquationCaps caps = {}) {
  return check_equation(spec, EquationClass::vcl, max_context_len, mode, caps);
}

inline EquationCheckResult check_zero_vcl_equation(RecognizerSpec const& spec, std::size_t max_context_len,
                                                   MorphismMode mode = MorphismMode::canonical,
                                                   EquationCaps caps = {}) {
  return check_equation(spec, EquationClass::zero_vcl, max_context_len, mode, caps);
}

/// The two sides of a counterexample as terms over variables x (y, z).
inline std::pair<ProfiniteTerm, ProfiniteTerm> certificate_terms(PushdownAlphabet const& alphabet,
                                                                 EquationClass eq, Counterexample const& cx) {
  Context const& uv = cx.outer;
  Context const& uv2 = cx.inner;
  Context const cross_uv = Context::make(alphabet, uv.left(), uv2.right());   // (u, v')
  Context const cross_vu = Context::make(alphabet, uv2.left(), uv.right());   // (u', v)
  using namespace term;
  if (eq == EquationClass::vcl) {
    ProfiniteTerm const inner = ext_omega(uv2, var("x"));
    ProfiniteTerm const left = ext_omega(uv, inner);
    ProfiniteTerm const right = ext_omega(uv, ext_omega(cx.chain == 1 ? cross_uv : cross_vu, inner));
    return {left, right};
  }
  ProfiniteTerm const middle = concat(concat(ext_omega(cross_uv, var("x")), var("y")), ext_omega(cross_vu, var("z")));
  return {ext_omega(uv, middle), middle};
}

inline Assignment certificate_assignment(Counterexample const& cx) {
  Assignment a;
  char const* names[] = {"x", "y", "z"};
  for (std::size_t i = 0; i < cx.assignment.size() && i < 3; ++i) a[names[i]] = cx.assignment[i];
  return a;
}

/// Re-evaluates a counterexample's terms; true when they reproduce the
/// recorded, distinct values.
inline bool verify_counterexample(ExtAlgebra const& r, EquationClass eq, Counterexample const& cx) {
  auto const [left, right] = certificate_terms(cx.morphism.alphabet, eq, cx);
  Assignment const a = certificate_assignment(cx);
  Element const l = eval_profinite_term(r, cx.morphism, left, a);
  Element const rv = eval_profinite_term(r, cx.morphism, right, a);
  return l == cx.left && rv == cx.right && l != rv;
}

}  // namespace vpl
