#pragma once

// Finite Ext-algebras: a finite monoid together with a composition-closed set
// of unary maps on it that contains every left and right translation.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vpl/core.hpp"
#include "vpl/error.hpp"
#include "vpl/transformation.hpp"

namespace vpl {

inline constexpr OpId kNoOp = static_cast<OpId>(-1);

/// Default cap on carrier sizes during closure computations.
inline constexpr std::size_t kClosureCap = 4096;
/// Default cap on the number of operation tables during closure computations.
inline constexpr std::size_t kOpClosureCap = 1u << 16;

/// Explicit tables for an Ext-algebra.
///
/// Construction only checks that the tables are dimensionally consistent
/// (MalformedTables otherwise). The algebraic laws are checked separately by
/// validate_algebra, so ill-formed algebras can be represented and reported.
class ExtAlgebra {
 public:
  ExtAlgebra() = default;

  ExtAlgebra(std::vector<std::string> element_names, Element identity, std::vector<Element> mult,
             std::vector<Transformation> ops, std::vector<std::string> op_names)
      : names_(std::move(element_names)),
        identity_(identity),
        mult_(std::move(mult)),
        ops_(std::move(ops)),
        op_names_(std::move(op_names)) {
    std::size_t const n = names_.size();
    if (n == 0) throw MalformedTables("an algebra needs at least one element");
    if (identity_ >= n) throw MalformedTables("identity index out of range");
    if (mult_.size() != n * n) {
      throw MalformedTables("multiplication table has " + std::to_string(mult_.size()) +
                            " entries, expected " + std::to_string(n * n));
    }
    for (Element e : mult_) {
      if (e >= n) throw MalformedTables("multiplication table entry out of range");
    }
    if (op_names_.size() != ops_.size()) {
      throw MalformedTables("operation names and tables differ in number");
    }
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (ops_[i].size() != n) {
        throw MalformedTables("operation '" + op_names_[i] + "' has " +
                              std::to_string(ops_[i].size()) + " entries, expected " +
                              std::to_string(n));
      }
      for (Element e : ops_[i]) {
        if (e >= n) throw MalformedTables("operation '" + op_names_[i] + "' entry out of range");
      }
      op_index_.try_emplace(ops_[i], static_cast<OpId>(i));
    }
    if (auto id = find_op(identity_transformation(n))) identity_op_ = *id;
  }

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t op_count() const noexcept { return ops_.size(); }
  Element identity() const noexcept { return identity_; }
  /// kNoOp when the identity map is not among the operations.
  OpId identity_op() const noexcept { return identity_op_; }

  Element multiply(Element x, Element y) const { return mult_[x * size() + y]; }
  Element apply(OpId op, Element x) const { return ops_[op][x]; }
  Transformation const& op(OpId id) const { return ops_[id]; }
  std::vector<Transformation> const& ops() const noexcept { return ops_; }
  std::vector<Element> const& mult_table() const noexcept { return mult_; }

  std::string const& element_name(Element x) const { return names_[x]; }
  std::vector<std::string> const& element_names() const noexcept { return names_; }
  std::string const& op_name(OpId id) const { return op_names_[id]; }
  std::vector<std::string> const& op_names() const noexcept { return op_names_; }

  std::optional<Element> find_element(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<Element>(i);
    }
    return std::nullopt;
  }

  std::optional<OpId> find_op(Transformation const& table) const {
    auto it = op_index_.find(table);
    if (it == op_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<OpId> find_op_by_name(std::string_view name) const {
    for (std::size_t i = 0; i < op_names_.size(); ++i) {
      if (op_names_[i] == name) return static_cast<OpId>(i);
    }
    return std::nullopt;
  }

  Transformation left_translation(Element r) const {
    Transformation t(size());
    for (Element x = 0; x < size(); ++x) t[x] = multiply(r, x);
    return t;
  }

  Transformation right_translation(Element r) const {
    Transformation t(size());
    for (Element x = 0; x < size(); ++x) t[x] = multiply(x, r);
    return t;
  }

 private:
  std::vector<std::string> names_;
  Element identity_ = 0;
  std::vector<Element> mult_;
  std::vector<Transformation> ops_;
  std::vector<std::string> op_names_;
  std::unordered_map<Transformation, OpId, TransformationHash> op_index_;
  OpId identity_op_ = kNoOp;
};

// --- validation -------------------------------------------------------------

enum class ViolationKind {
  identity_not_neutral,
  non_associative,
  missing_identity_op,
  duplicate_op,
  not_composition_closed,
  missing_left_translation,
  missing_right_translation,
};

struct Violation {
  ViolationKind kind;
  std::string message;
  std::vector<std::size_t> witness;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](Violation const& v) { return v.kind == kind; });
  }
};

/// Checks every Ext-algebra law; each violated law is reported once, with
/// the first witness found in index order.
inline ValidationReport validate_algebra(ExtAlgebra const& r) {
  ValidationReport report;
  std::size_t const n = r.size();
  auto const& nm = r.element_names();

  for (Element x = 0; x < n; ++x) {
    if (r.multiply(r.identity(), x) != x || r.multiply(x, r.identity()) != x) {
      report.violations.push_back({ViolationKind::identity_not_neutral,
                                   "identity " + nm[r.identity()] + " is not neutral for " + nm[x],
                                   {x}});
      break;
    }
  }

  [&] {
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        Element const xy = r.multiply(x, y);
        for (Element z = 0; z < n; ++z) {
          if (r.multiply(xy, z) != r.multiply(x, r.multiply(y, z))) {
            report.violations.push_back(
                {ViolationKind::non_associative,
                 "(" + nm[x] + "*" + nm[y] + ")*" + nm[z] + " = " + nm[r.multiply(xy, z)] +
                     " but " + nm[x] + "*(" + nm[y] + "*" + nm[z] + ") = " +
                     nm[r.multiply(x, r.multiply(y, z))],
                 {x, y, z}});
            return;
          }
        }
      }
    }
  }();

  if (r.identity_op() == kNoOp) {
    report.violations.push_back(
        {ViolationKind::missing_identity_op, "the identity map is not an operation", {}});
  }

  [&] {
    for (OpId i = 0; i < r.op_count(); ++i) {
      auto first = r.find_op(r.op(i));
      if (first && *first != i) {
        report.violations.push_back({ViolationKind::duplicate_op,
                                     "operations '" + r.op_name(*first) + "' and '" +
                                         r.op_name(i) + "' have the same table",
                                     {*first, i}});
        return;
      }
    }
  }();

  [&] {
    for (OpId i = 0; i < r.op_count(); ++i) {
      for (OpId j = 0; j < r.op_count(); ++j) {
        if (!r.find_op(compose(r.op(i), r.op(j)))) {
          report.violations.push_back({ViolationKind::not_composition_closed,
                                       "'" + r.op_name(i) + "' o '" + r.op_name(j) +
                                           "' is not an operation",
                                       {i, j}});
          return;
        }
      }
    }
  }();

  for (Element x = 0; x < n; ++x) {
    if (!r.find_op(r.left_translation(x))) {
      report.violations.push_back({ViolationKind::missing_left_translation,
                                   "left translation by " + nm[x] + " is not an operation",
                                   {x}});
      break;
    }
  }
  for (Element x = 0; x < n; ++x) {
    if (!r.find_op(r.right_translation(x))) {
      report.violations.push_back({ViolationKind::missing_right_translation,
                                   "right translation by " + nm[x] + " is not an operation",
                                   {x}});
      break;
    }
  }
  return report;
}

inline void require_valid(ExtAlgebra const& r) {
  auto const report = validate_algebra(r);
  if (!report.ok()) throw ValidationError(report.violations.front().message);
}

// --- completion -------------------------------------------------------------

enum class AddedOpKind { left_translation, right_translation, composition };

struct AddedOp {
  OpId id;
  AddedOpKind kind;
  std::string name;
};

struct Completion {
  ExtAlgebra algebra;
  std::vector<AddedOp> added;
};

/// A generating set of the monoid (R, *), chosen greedily in index order:
/// an element is kept when the elements kept so far do not generate it.
inline std::vector<Element> multiplicative_generators(ExtAlgebra const& r) {
  std::size_t const n = r.size();
  std::vector<char> reached(n, 0);
  std::vector<Element> members{r.identity()};
  reached[r.identity()] = 1;
  std::vector<Element> gens;
  for (Element x = 0; x < n; ++x) {
    if (reached[x]) continue;
    gens.push_back(x);
    // New words contain x; their prefix before the first x is old.
    std::vector<Element> work;
    auto reach = [&](Element y) {
      if (!reached[y]) {
        reached[y] = 1;
        members.push_back(y);
        work.push_back(y);
      }
    };
    for (std::size_t i = 0, k = members.size(); i < k; ++i) reach(r.multiply(members[i], x));
    while (!work.empty()) {
      Element const y = work.back();
      work.pop_back();
      for (Element g : gens) reach(r.multiply(y, g));
    }
  }
  return gens;
}

/// Appends every missing translation (the identity map is the left
/// translation by 1 and is named "id") and every missing composition.
/// Declared tables keep their indices and contents.
inline Completion complete_algebra(ExtAlgebra const& r, std::size_t op_cap = kOpClosureCap) {
  TransformationSet set;
  std::vector<std::string> names = r.op_names();
  std::vector<Transformation> tables = r.ops();
  std::vector<AddedOp> added;
  for (auto const& t : tables) set.insert(t);

  auto add = [&](Transformation t, AddedOpKind kind, std::string name) {
    if (set.contains(t)) return;
    set.insert(t);
    OpId const id = static_cast<OpId>(tables.size());
    tables.push_back(std::move(t));
    names.push_back(name);
    added.push_back({id, kind, std::move(name)});
  };
  add(r.left_translation(r.identity()), AddedOpKind::left_translation, "id");
  for (Element x = 0; x < r.size(); ++x) {
    add(r.left_translation(x), AddedOpKind::left_translation, "L[" + r.element_name(x) + "]");
    add(r.right_translation(x), AddedOpKind::right_translation, "R[" + r.element_name(x) + "]");
  }

  // The set may hold fewer entries than `tables` when declared rows repeat.
  std::vector<std::size_t> set_to_table(set.size());
  for (std::size_t i = tables.size(); i-- > 0;) set_to_table[*set.find(tables[i])] = i;
  // L[xy] = L[x] L[y] and R[xy] = R[y] R[x], so translations by monoid
  // generators suffice on the right of the closure.
  std::vector<std::size_t> generators;
  for (auto const& t : r.ops()) generators.push_back(*set.find(t));
  for (Element g : multiplicative_generators(r)) {
    generators.push_back(*set.find(r.left_translation(g)));
    generators.push_back(*set.find(r.right_translation(g)));
  }
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  close_under_composition(set, generators, op_cap, [&](std::size_t id, std::size_t left, std::size_t right) {
    std::string name = names[set_to_table[left]] + "." + names[set_to_table[right]];
    OpId const op = static_cast<OpId>(tables.size());
    tables.push_back(set[id]);
    names.push_back(name);
    set_to_table.push_back(op);
    added.push_back({op, AddedOpKind::composition, std::move(name)});
  });

  std::vector<std::string> elements = r.element_names();
  return {ExtAlgebra(std::move(elements), r.identity(), r.mult_table(), std::move(tables),
                     std::move(names)),
          std::move(added)};
}

// --- morphisms and recognizers ---------------------------------------------

/// A morphism from the well-matched words into an algebra, given by its
/// values on the generators: internal letters and (call, return) pairs.
struct Morphism {
  PushdownAlphabet alphabet;
  std::vector<Element> internal_image;  // by internal-letter index
  std::vector<OpId> ext_image;          // by call index * |returns| + return index

  Element internal(Letter c) const { return internal_image[alphabet.group_index(c)]; }
  OpId ext(Letter a, Letter b) const {
    return ext_image[alphabet.group_index(a) * alphabet.returns().size() + alphabet.group_index(b)];
  }
  OpId& ext(Letter a, Letter b) {
    return ext_image[alphabet.group_index(a) * alphabet.returns().size() + alphabet.group_index(b)];
  }

  static Morphism blank(PushdownAlphabet alphabet) {
    Morphism m;
    m.internal_image.assign(alphabet.internals().size(), kNoElement);
    m.ext_image.assign(alphabet.calls().size() * alphabet.returns().size(), kNoOp);
    m.alphabet = std::move(alphabet);
    return m;
  }
};

inline void check_morphism(ExtAlgebra const& r, Morphism const& m) {
  auto const& a = m.alphabet;
  if (m.internal_image.size() != a.internals().size() ||
      m.ext_image.size() != a.calls().size() * a.returns().size()) {
    throw MalformedTables("morphism does not cover the alphabet");
  }
  for (std::size_t i = 0; i < m.internal_image.size(); ++i) {
    if (m.internal_image[i] >= r.size()) {
      throw MalformedTables(std::string("internal letter '") + a.internals()[i] + "' is unmapped");
    }
  }
  for (std::size_t i = 0; i < m.ext_image.size(); ++i) {
    if (m.ext_image[i] >= r.op_count()) {
      throw MalformedTables(std::string("pair (") + a.calls()[i / a.returns().size()] + "," +
                            a.returns()[i % a.returns().size()] + ") is unmapped");
    }
  }
}

/// A language recognizer: algebra, morphism and accepting subset P; the
/// recognized language is the preimage of P.
struct RecognizerSpec {
  ExtAlgebra algebra;
  Morphism morphism;
  std::vector<Element> accepting;  // sorted, distinct

  PushdownAlphabet const& alphabet() const noexcept { return morphism.alphabet; }
  bool accepts_element(Element x) const {
    return std::binary_search(accepting.begin(), accepting.end(), x);
  }
};

inline std::vector<Element> normalize_subset(std::vector<Element> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline void check_spec(RecognizerSpec const& spec) {
  check_morphism(spec.algebra, spec.morphism);
  for (Element x : spec.accepting) {
    if (x >= spec.algebra.size()) throw MalformedTables("accepting element out of range");
  }
}

/// psi(w), by a single left-to-right scan with a stack of saved prefixes.
inline Element evaluate(ExtAlgebra const& r, Morphism const& m, std::string_view w) {
  auto const& alphabet = m.alphabet;
  if (!is_well_matched(alphabet, w)) {
    throw NotWellMatched("'" + Context::display(w) + "' is not well-matched");
  }
  struct Frame {
    Element saved;
    Letter call;
  };
  std::vector<Frame> stack;
  Element current = r.identity();
  for (Letter c : w) {
    switch (alphabet.kind(c)) {
      case LetterKind::internal: current = r.multiply(current, m.internal(c)); break;
      case LetterKind::call:
        stack.push_back({current, c});
        current = r.identity();
        break;
      case LetterKind::ret: {
        Frame const f = stack.back();
        stack.pop_back();
        current = r.multiply(f.saved, r.apply(m.ext(f.call, c), current));
        break;
      }
    }
  }
  return current;
}

inline Element evaluate(RecognizerSpec const& spec, std::string_view w) {
  return evaluate(spec.algebra, spec.morphism, w);
}

inline bool accepts(RecognizerSpec const& spec, std::string_view w) {
  return spec.accepts_element(evaluate(spec, w));
}

/// Table of x -> w_0 a_1 w_1 ... a_k w_k x w'_k b_k ... b_1 w'_0 given the
/// images of the well-matched blocks.
inline Transformation context_table_from_parts(ExtAlgebra const& r, Morphism const& m,
                                               std::span<Element const> left_blocks,
                                               std::span<Letter const> calls,
                                               std::span<Element const> right_blocks,
                                               std::span<Letter const> returns) {
  std::size_t const k = calls.size();
  std::vector<OpId> exts(k);
  for (std::size_t i = 0; i < k; ++i) exts[i] = m.ext(calls[i], returns[i]);
  Transformation t(r.size());
  for (Element x = 0; x < r.size(); ++x) {
    Element y = r.multiply(r.multiply(left_blocks[k], x), right_blocks[k]);
    for (std::size_t i = k; i-- > 0;) {
      y = r.apply(exts[i], y);
      y = r.multiply(r.multiply(left_blocks[i], y), right_blocks[i]);
    }
    t[x] = y;
  }
  return t;
}

inline Transformation context_table(ExtAlgebra const& r, Morphism const& m, Context const& ctx) {
  ContextShape const shape = decompose(m.alphabet, ctx);
  std::vector<Element> left;
  std::vector<Element> right;
  for (auto const& w : shape.left_blocks) left.push_back(evaluate(r, m, w));
  for (auto const& w : shape.right_blocks) right.push_back(evaluate(r, m, w));
  return context_table_from_parts(r, m, left, shape.calls, right, shape.returns);
}

/// Index of psi(ext_{u,v}) among the algebra's operations.
inline OpId context_op(ExtAlgebra const& r, Morphism const& m, Context const& ctx) {
  auto const id = r.find_op(context_table(r, m, ctx));
  if (!id) {
    throw ClosureViolation("the image of context (" + Context::display(ctx.left()) + ", " +
                           Context::display(ctx.right()) + ") is not an operation of the algebra");
  }
  return *id;
}

inline OpId context_op(RecognizerSpec const& spec, Context const& ctx) {
  return context_op(spec.algebra, spec.morphism, ctx);
}

// --- direct products --------------------------------------------------------

/// Carrier R x S with pair (r, s) at index r * |S| + s; operations generated
/// by e_R x id and id x e_S.
inline ExtAlgebra direct_product(ExtAlgebra const& r, ExtAlgebra const& s,
                                 std::size_t op_cap = kOpClosureCap) {
  std::size_t const ns = s.size();
  std::size_t const n = r.size() * ns;
  if (n > kClosureCap) throw SizeCapExceeded("product carrier exceeds " + std::to_string(kClosureCap));
  auto pair = [ns](Element a, Element b) { return static_cast<Element>(a * ns + b); };

  std::vector<std::string> names;
  for (Element a = 0; a < r.size(); ++a) {
    for (Element b = 0; b < ns; ++b) names.push_back("(" + r.element_name(a) + "," + s.element_name(b) + ")");
  }
  std::vector<Element> mult(n * n);
  for (Element a = 0; a < r.size(); ++a)
    for (Element b = 0; b < ns; ++b)
      for (Element c = 0; c < r.size(); ++c)
        for (Element d = 0; d < ns; ++d)
          mult[pair(a, b) * n + pair(c, d)] = pair(r.multiply(a, c), s.multiply(b, d));

  TransformationSet set;
  std::vector<std::string> op_names;
  for (OpId i = 0; i < r.op_count(); ++i) {
    Transformation t(n);
    for (Element a = 0; a < r.size(); ++a)
      for (Element b = 0; b < ns; ++b) t[pair(a, b)] = pair(r.apply(i, a), b);
    if (set.insert(std::move(t)).second) op_names.push_back("(" + r.op_name(i) + ",id)");
  }
  for (OpId j = 0; j < s.op_count(); ++j) {
    Transformation t(n);
    for (Element a = 0; a < r.size(); ++a)
      for (Element b = 0; b < ns; ++b) t[pair(a, b)] = pair(a, s.apply(j, b));
    if (set.insert(std::move(t)).second) op_names.push_back("(id," + s.op_name(j) + ")");
  }
  close_under_composition(set, op_cap, [&](std::size_t, std::size_t left, std::size_t right) {
    op_names.push_back(op_names[left] + "." + op_names[right]);
  });
  return ExtAlgebra(std::move(names), pair(r.identity(), s.identity()), std::move(mult),
                    std::move(set).release(), std::move(op_names));
}

/// Product recognizer for the intersection of two languages over one alphabet.
inline RecognizerSpec product_spec(RecognizerSpec const& x, RecognizerSpec const& y) {
  if (!(x.alphabet() == y.alphabet())) {
    throw MalformedTables("product recognizers must share one alphabet");
  }
  ExtAlgebra prod = direct_product(x.algebra, y.algebra);
  std::size_t const ns = y.algebra.size();
  auto pair = [ns](Element a, Element b) { return static_cast<Element>(a * ns + b); };
  Morphism m = Morphism::blank(x.alphabet());
  for (Letter c : m.alphabet.internals()) {
    m.internal_image[m.alphabet.group_index(c)] = pair(x.morphism.internal(c), y.morphism.internal(c));
  }
  for (Letter a : m.alphabet.calls()) {
    for (Letter b : m.alphabet.returns()) {
      Transformation t(prod.size());
      OpId const ex = x.morphism.ext(a, b);
      OpId const ey = y.morphism.ext(a, b);
      for (Element p = 0; p < x.algebra.size(); ++p)
        for (Element q = 0; q < ns; ++q) t[pair(p, q)] = pair(x.algebra.apply(ex, p), y.algebra.apply(ey, q));
      m.ext(a, b) = *prod.find_op(t);
    }
  }
  std::vector<Element> acc;
  for (Element p : x.accepting)
    for (Element q : y.accepting) acc.push_back(pair(p, q));
  return {std::move(prod), std::move(m), normalize_subset(std::move(acc))};
}

// --- subalgebras ------------------------------------------------------------

struct Subalgebra {
  ExtAlgebra algebra;
  std::vector<Element> element_embedding;  // sub element -> parent element
  std::vector<OpId> op_embedding;           // sub op -> a parent op restricting to it
};

/// Smallest sub-Ext-algebra containing the identity, the given elements and
/// the given operations: closed under products and the generated operations,
/// with all translations by its own elements.
inline Subalgebra generated_subalgebra(ExtAlgebra const& r, std::span<Element const> element_gens,
                                       std::span<OpId const> op_gens,
                                       std::size_t op_cap = kOpClosureCap) {
  std::size_t const n = r.size();
  std::vector<char> member(n, 0);
  std::vector<Element> elems;
  std::vector<Element> work;
  auto add = [&](Element x) {
    if (!member[x]) {
      member[x] = 1;
      elems.push_back(x);
      work.push_back(x);
    }
  };
  add(r.identity());
  for (Element x : element_gens) add(x);
  while (!work.empty()) {
    Element const x = work.back();
    work.pop_back();
    for (OpId g : op_gens) add(r.apply(g, x));
    for (std::size_t i = 0; i < elems.size(); ++i) {
      Element const y = elems[i];
      add(r.multiply(x, y));
      add(r.multiply(y, x));
    }
  }
  std::sort(elems.begin(), elems.end());

  TransformationSet full;
  std::vector<std::string> names;
  std::vector<OpId> origin;  // parent op for generators, kNoOp for derived tables
  for (OpId g : op_gens) {
    if (full.insert(r.op(g)).second) {
      names.push_back(r.op_name(g));
      origin.push_back(g);
    }
  }
  for (Element x : elems) {
    if (full.insert(r.left_translation(x)).second) {
      names.push_back("L[" + r.element_name(x) + "]");
      origin.push_back(kNoOp);
    }
    if (full.insert(r.right_translation(x)).second) {
      names.push_back("R[" + r.element_name(x) + "]");
      origin.push_back(kNoOp);
    }
  }
  close_under_composition(full, op_cap, [&](std::size_t, std::size_t left, std::size_t right) {
    names.push_back(names[left] + "." + names[right]);
    origin.push_back(kNoOp);
  });

  std::vector<Element> to_sub(n, kNoElement);
  for (std::size_t i = 0; i < elems.size(); ++i) to_sub[elems[i]] = static_cast<Element>(i);

  Subalgebra out;
  out.element_embedding = elems;
  std::vector<std::string> sub_names;
  for (Element x : elems) sub_names.push_back(r.element_name(x));
  std::size_t const m = elems.size();
  std::vector<Element> mult(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) mult[i * m + j] = to_sub[r.multiply(elems[i], elems[j])];

  TransformationSet restricted;
  std::vector<std::string> sub_op_names;
  for (std::size_t i = 0; i < full.size(); ++i) {
    Transformation t(m);
    for (std::size_t j = 0; j < m; ++j) t[j] = to_sub[full[i][elems[j]]];
    if (restricted.insert(std::move(t)).second) {
      sub_op_names.push_back(names[i]);
      OpId parent = origin[i];
      if (parent == kNoOp) {
        auto found = r.find_op(full[i]);
        if (!found) {
          throw ClosureViolation("operation '" + names[i] + "' of the subalgebra is not an operation of the parent");
        }
        parent = *found;
      }
      out.op_embedding.push_back(parent);
    }
  }
  out.algebra = ExtAlgebra(std::move(sub_names), to_sub[r.identity()], std::move(mult),
                           std::move(restricted).release(), std::move(sub_op_names));
  return out;
}

/// Restriction of a recognizer to the image of its morphism.
struct RestrictedSpec {
  RecognizerSpec spec;
  std::vector<Element> element_embedding;
};

inline RestrictedSpec restrict_to_image(RecognizerSpec const& spec) {
  Morphism const& m = spec.morphism;
  std::vector<Element> egens = m.internal_image;
  std::vector<OpId> ogens = m.ext_image;
  std::sort(ogens.begin(), ogens.end());
  ogens.erase(std::unique(ogens.begin(), ogens.end()), ogens.end());
  Subalgebra sub = generated_subalgebra(spec.algebra, egens, ogens);

  std::vector<Element> to_sub(spec.algebra.size(), kNoElement);
  for (std::size_t i = 0; i < sub.element_embedding.size(); ++i) {
    to_sub[sub.element_embedding[i]] = static_cast<Element>(i);
  }
  Morphism out = Morphism::blank(m.alphabet);
  for (std::size_t i = 0; i < m.internal_image.size(); ++i) out.internal_image[i] = to_sub[m.internal_image[i]];
  for (std::size_t i = 0; i < m.ext_image.size(); ++i) {
    Transformation const& full = spec.algebra.op(m.ext_image[i]);
    Transformation t(sub.element_embedding.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = to_sub[full[sub.element_embedding[j]]];
    out.ext_image[i] = *sub.algebra.find_op(t);
  }
  std::vector<Element> acc;
  for (Element x : spec.accepting) {
    if (to_sub[x] != kNoElement) acc.push_back(to_sub[x]);
  }
  return {{std::move(sub.algebra), std::move(out), normalize_subset(std::move(acc))},
          std::move(sub.element_embedding)};
}

// --- quotients --------------------------------------------------------------

struct Quotient {
  ExtAlgebra algebra;
  std::vector<Element> projection;  // parent element -> block
};

/// Renumbers an arbitrary block labelling so blocks are numbered by their
/// lowest member.
inline std::vector<Element> canonical_blocks(std::span<std::size_t const> block_of) {
  std::map<std::size_t, Element> label;
  std::vector<Element> out(block_of.size());
  for (std::size_t x = 0; x < block_of.size(); ++x) {
    auto [it, inserted] = label.try_emplace(block_of[x], static_cast<Element>(label.size()));
    out[x] = it->second;
  }
  return out;
}

/// Quotient by a partition given as a block label per element. Throws
/// NotACongruence when some operation or translation separates two
/// elements of one block.
inline Quotient quotient(ExtAlgebra const& r, std::span<std::size_t const> block_of) {
  std::size_t const n = r.size();
  if (block_of.size() != n) throw MalformedTables("partition does not cover the carrier");
  std::vector<Element> const block = canonical_blocks(block_of);
  std::size_t const k = block.empty() ? 0 : *std::max_element(block.begin(), block.end()) + 1;
  std::vector<Element> rep(k, kNoElement);
  for (Element x = 0; x < n; ++x) {
    if (rep[block[x]] == kNoElement) rep[block[x]] = x;
  }
  auto const& nm = r.element_names();

  for (Element x = 0; x < n; ++x) {
    Element const y = rep[block[x]];
    if (x == y) continue;
    for (Element z = 0; z < n; ++z) {
      if (block[r.multiply(x, z)] != block[r.multiply(y, z)] ||
          block[r.multiply(z, x)] != block[r.multiply(z, y)]) {
        throw NotACongruence("multiplication by " + nm[z] + " separates " + nm[y] + " and " + nm[x],
                             kNoOp, y, x);
      }
    }
    for (OpId e = 0; e < r.op_count(); ++e) {
      if (block[r.apply(e, x)] != block[r.apply(e, y)]) {
        throw NotACongruence("operation '" + r.op_name(e) + "' separates " + nm[y] + " and " + nm[x],
                             e, y, x);
      }
    }
  }

  std::vector<std::string> names;
  for (Element b = 0; b < k; ++b) names.push_back(nm[rep[b]]);
  std::vector<Element> mult(k * k);
  for (Element a = 0; a < k; ++a)
    for (Element b = 0; b < k; ++b) mult[a * k + b] = block[r.multiply(rep[a], rep[b])];
  TransformationSet ops;
  std::vector<std::string> op_names;
  for (OpId e = 0; e < r.op_count(); ++e) {
    Transformation t(k);
    for (Element b = 0; b < k; ++b) t[b] = block[r.apply(e, rep[b])];
    if (ops.insert(std::move(t)).second) op_names.push_back(r.op_name(e));
  }
  return {ExtAlgebra(std::move(names), block[r.identity()], std::move(mult), std::move(ops).release(),
                     std::move(op_names)),
          block};
}

inline Transformation induced_table(ExtAlgebra const& parent, Quotient const& q, OpId op) {
  Transformation t(q.algebra.size(), kNoElement);
  for (Element x = 0; x < parent.size(); ++x) t[q.projection[x]] = q.projection[parent.apply(op, x)];
  return t;
}

struct QuotientSpec {
  RecognizerSpec spec;
  std::vector<Element> projection;
};

/// Quotient of a recognizer: the morphism is composed with the projection
/// and the accepting set is projected.
inline QuotientSpec quotient_spec(RecognizerSpec const& spec, std::span<std::size_t const> block_of) {
  Quotient q = quotient(spec.algebra, block_of);
  Morphism m = Morphism::blank(spec.alphabet());
  for (std::size_t i = 0; i < m.internal_image.size(); ++i) {
    m.internal_image[i] = q.projection[spec.morphism.internal_image[i]];
  }
  for (std::size_t i = 0; i < m.ext_image.size(); ++i) {
    m.ext_image[i] = *q.algebra.find_op(induced_table(spec.algebra, q, spec.morphism.ext_image[i]));
  }
  std::vector<Element> acc;
  for (Element x : spec.accepting) acc.push_back(q.projection[x]);
  return {{std::move(q.algebra), std::move(m), normalize_subset(std::move(acc))}, std::move(q.projection)};
}

/// Coarsest partition in which x ~ y iff every operation sends x and y both
/// into or both out of the accepting set.
inline std::vector<std::size_t> syntactic_partition(ExtAlgebra const& r,
                                                    std::span<Element const> accepting) {
  std::vector<char> acc(r.size(), 0);
  for (Element x : accepting) acc[x] = 1;
  std::map<std::vector<char>, std::size_t> classes;
  std::vector<std::size_t> block(r.size());
  for (Element x = 0; x < r.size(); ++x) {
    std::vector<char> signature(r.op_count());
    for (OpId e = 0; e < r.op_count(); ++e) signature[e] = acc[r.apply(e, x)];
    auto [it, inserted] = classes.try_emplace(std::move(signature), classes.size());
    block[x] = it->second;
  }
  return block;
}

struct SyntacticResult {
  RecognizerSpec spec;
  /// Parent element -> syntactic element; kNoElement outside the image.
  std::vector<Element> projection;
};

/// Minimal recognizer: restrict to the morphism's image, then merge elements
/// that no operation separates relative to the accepting set.
inline SyntacticResult syntactic_quotient(RecognizerSpec const& spec) {
  check_spec(spec);
  RestrictedSpec image = restrict_to_image(spec);
  std::vector<std::size_t> const partition = syntactic_partition(image.spec.algebra, image.spec.accepting);
  QuotientSpec q;
  try {
    q = quotient_spec(image.spec, partition);
  } catch (NotACongruence const& e) {
    throw ClosureViolation(std::string("syntactic relation is not a congruence: ") + e.what());
  }
  std::vector<Element> projection(spec.algebra.size(), kNoElement);
  for (std::size_t i = 0; i < image.element_embedding.size(); ++i) {
    projection[image.element_embedding[i]] = q.projection[i];
  }
  return {std::move(q.spec), std::move(projection)};
}

/// Elements psi(w) reachable from the morphism's generators, ascending.
inline std::vector<Element> morphism_image(ExtAlgebra const& r, Morphism const& m) {
  std::vector<char> member(r.size(), 0);
  std::vector<Element> elems;
  std::vector<Element> work;
  auto add = [&](Element x) {
    if (!member[x]) {
      member[x] = 1;
      elems.push_back(x);
      work.push_back(x);
    }
  };
  std::vector<OpId> exts = m.ext_image;
  std::sort(exts.begin(), exts.end());
  exts.erase(std::unique(exts.begin(), exts.end()), exts.end());
  add(r.identity());
  for (Element x : m.internal_image) add(x);
  while (!work.empty()) {
    Element const x = work.back();
    work.pop_back();
    for (OpId g : exts) add(r.apply(g, x));
    for (std::size_t i = 0; i < elems.size(); ++i) {
      add(r.multiply(x, elems[i]));
      add(r.multiply(elems[i], x));
    }
  }
  std::sort(elems.begin(), elems.end());
  return elems;
}

/// Coarsest refinement of `initial` that is stable under every map in
/// `maps` (each a table over 0..n-1).
inline std::vector<std::size_t> refine_partition(std::vector<std::size_t> initial,
                                                 std::vector<Transformation> const& maps) {
  std::size_t const n = initial.size();
  std::vector<std::size_t> block = std::move(initial);
  std::size_t count = std::set<std::size_t>(block.begin(), block.end()).size();
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> next(n);
    for (Element x = 0; x < n; ++x) {
      std::vector<std::size_t> sig;
      sig.reserve(maps.size() + 1);
      sig.push_back(block[x]);
      for (auto const& f : maps) sig.push_back(block[f[x]]);
      next[x] = ids.try_emplace(std::move(sig), ids.size()).first->second;
    }
    block = std::move(next);
    if (ids.size() == count) return block;
    count = ids.size();
  }
}

/// Same recognizer as syntactic_quotient, computed without the operation
/// closure of the input: only the morphism's images and the translations
/// are consulted, so the input's op list may be any superset of the
/// morphism's generators. A partition stable under the generators is
/// stable under their compositions, and the closure is then taken in the
/// (small) quotient.
inline SyntacticResult minimal_recognizer(RecognizerSpec const& spec, std::size_t op_cap = kOpClosureCap) {
  check_spec(spec);
  ExtAlgebra const& r = spec.algebra;
  Morphism const& m = spec.morphism;
  std::vector<Element> const image = morphism_image(r, m);
  std::size_t const n = image.size();
  std::vector<Element> local(r.size(), kNoElement);
  for (std::size_t i = 0; i < n; ++i) local[image[i]] = static_cast<Element>(i);

  std::vector<OpId> gens = m.ext_image;
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  std::vector<Transformation> maps;
  for (OpId g : gens) {
    Transformation t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = local[r.apply(g, image[i])];
    maps.push_back(std::move(t));
  }
  for (std::size_t a = 0; a < n; ++a) {
    Transformation left(n);
    Transformation right(n);
    for (std::size_t i = 0; i < n; ++i) {
      left[i] = local[r.multiply(image[a], image[i])];
      right[i] = local[r.multiply(image[i], image[a])];
    }
    maps.push_back(std::move(left));
    maps.push_back(std::move(right));
  }
  std::vector<std::size_t> initial(n, 0);
  for (Element x : spec.accepting) {
    if (local[x] != kNoElement) initial[local[x]] = 1;
  }
  std::vector<Element> const block = canonical_blocks(refine_partition(std::move(initial), maps));
  std::size_t const k = n == 0 ? 0 : *std::max_element(block.begin(), block.end()) + 1;
  std::vector<std::size_t> rep(k, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rep[block[i]] == n) rep[block[i]] = i;
  }

  std::vector<std::string> names;
  for (std::size_t b = 0; b < k; ++b) names.push_back(r.element_name(image[rep[b]]));
  std::vector<Element> mult(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) mult[a * k + b] = block[local[r.multiply(image[rep[a]], image[rep[b]])]];
  TransformationSet tables;
  std::vector<std::string> op_names;
  auto induced = [&](std::size_t g) {
    Transformation t(k);
    for (std::size_t b = 0; b < k; ++b) t[b] = block[maps[g][rep[b]]];
    return t;
  };
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (tables.insert(induced(g)).second) op_names.push_back(r.op_name(gens[g]));
  }
  ExtAlgebra generated(std::move(names), block[local[r.identity()]], std::move(mult), std::move(tables).release(),
                       std::move(op_names));
  ExtAlgebra algebra = complete_algebra(generated, op_cap).algebra;

  Morphism out = Morphism::blank(spec.alphabet());
  for (std::size_t i = 0; i < out.internal_image.size(); ++i) out.internal_image[i] = block[local[m.internal_image[i]]];
  for (std::size_t i = 0; i < out.ext_image.size(); ++i) {
    auto const g = std::lower_bound(gens.begin(), gens.end(), m.ext_image[i]) - gens.begin();
    out.ext_image[i] = *algebra.find_op(induced(static_cast<std::size_t>(g)));
  }
  std::vector<Element> acc;
  for (Element x : spec.accepting) {
    if (local[x] != kNoElement) acc.push_back(block[local[x]]);
  }
  std::vector<Element> projection(r.size(), kNoElement);
  for (std::size_t i = 0; i < n; ++i) projection[image[i]] = block[i];
  return {{std::move(algebra), std::move(out), normalize_subset(std::move(acc))}, std::move(projection)};
}

}  // namespace vpl
