#pragma once

// Command dispatch for the vpl tool. Exit status: 0 completed, 1 usage or
// input error, 2 equation counterexample found.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vpl/algebra.hpp"
#include "vpl/automata.hpp"
#include "vpl/io.hpp"
#include "vpl/isomorphism.hpp"
#include "vpl/profinite.hpp"
#include "vpl/translate.hpp"

namespace vpl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCounterexample = 2;

namespace cli {

/// A word argument; "-" stands for the empty word.
inline std::string word_argument(std::string const& arg) { return arg == "-" ? std::string{} : arg; }

/// Any recognizer source: algebra files directly, automata through the
/// behaviour algebra and its syntactic quotient, monoids through the
/// derived algebra.
struct Source {
  FileKind kind;
  std::string text;
};

inline Source read_source(std::string const& path) {
  Source s;
  s.text = detail::read_file(path);
  s.kind = detect_kind(s.text);
  return s;
}

inline VPA automaton_of(Source const& s) {
  if (s.kind == FileKind::vpa) return parse_vpa(s.text);
  return vca_to_vpa(parse_vca(s.text));
}

inline RecognizerSpec recognizer_of(Source const& s, LoadOptions options) {
  switch (s.kind) {
    case FileKind::algebra: return parse_recognizer(s.text, options).spec;
    case FileKind::vpa:
    case FileKind::vca: return vpa_syntactic_algebra(automaton_of(s));
    case FileKind::monoid: {
      LoadedMonoid m = parse_monoid(s.text);
      return monoid_to_ext_algebra(m.monoid, m.accepting);
    }
    case FileKind::alphabet: break;
  }
  throw Error("an alphabet file does not describe a recognizer");
}

inline void emit(std::string const& text, std::string const& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write '" + path + "'");
  file << text;
}

inline char const* kind_name(AddedOpKind k) {
  switch (k) {
    case AddedOpKind::left_translation: return "left-translation";
    case AddedOpKind::right_translation: return "right-translation";
    case AddedOpKind::composition: return "composition";
  }
  return "";
}

inline std::string morphism_text(ExtAlgebra const& r, Morphism const& m, bool porcelain) {
  std::ostringstream out;
  auto const& a = m.alphabet;
  for (Letter c : a.internals()) {
    if (porcelain) {
      out << "psi." << c << '=' << r.element_name(m.internal(c)) << "\n";
    } else {
      out << "  psi(" << c << ") = " << r.element_name(m.internal(c)) << "\n";
    }
  }
  for (Letter c : a.calls())
    for (Letter b : a.returns()) {
      OpId const e = m.ext(c, b);
      std::string row;
      for (Element x = 0; x < r.size(); ++x) row += (x ? " " : "") + r.element_name(r.apply(e, x));
      if (porcelain) {
        out << "psi." << c << b << '=' << row << "\n";
      } else {
        out << "  psi(ext[" << c << "," << b << "]) = " << r.op_name(e) << " (" << row << ")\n";
      }
    }
  return out.str();
}

}  // namespace cli

/// Runs one invocation; args[0] is the program name.
inline int run_command(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic toolkit for visibly pushdown languages", "vpl"};
  app.require_subcommand(1);
  bool porcelain = false;
  app.add_flag("--porcelain", porcelain, "Print key=value lines for scripts");

  std::string file;
  std::string file2;
  std::string output;
  std::string word;
  std::string word2;
  bool strict = false;
  bool minimize = false;
  std::size_t max_len = 0;
  std::size_t max_context = 0;
  std::string eq_class;
  std::string morphisms = "canonical";
  std::size_t morphism_cap = 4096;

  auto* validate = app.add_subcommand("validate", "Load and validate a recognizer, automaton or monoid");
  validate->add_option("FILE", file)->required();
  validate->add_flag("--strict", strict, "Do not add missing translations or compositions");

  auto* minimize_cmd = app.add_subcommand("minimize", "Syntactic quotient of a recognizer");
  minimize_cmd->add_option("FILE", file)->required();
  minimize_cmd->add_option("-o,--output", output, "Output file");

  auto* from_vpa = app.add_subcommand("from-vpa", "Behaviour algebra of a VPA or VCA");
  from_vpa->add_option("FILE", file)->required();
  from_vpa->add_option("-o,--output", output, "Output file");
  from_vpa->add_flag("--minimize", minimize, "Emit the syntactic quotient instead of the raw algebra");

  auto* to_vpa = app.add_subcommand("to-vpa", "VPA simulating a recognizer");
  to_vpa->add_option("FILE", file)->required();
  to_vpa->add_option("-o,--output", output, "Output file");

  auto* from_monoid = app.add_subcommand("from-monoid", "Ext-algebra derived from a monoid");
  from_monoid->add_option("FILE", file)->required();
  from_monoid->add_option("-o,--output", output, "Output file");

  auto* accepts_cmd = app.add_subcommand("accepts", "Membership of a well-matched word");
  accepts_cmd->add_option("FILE", file)->required();
  accepts_cmd->add_option("WORD", word, "Word, or - for the empty word")->required();

  auto* enumerate = app.add_subcommand("enumerate", "List well-matched words");
  enumerate->add_option("ALPHABETFILE", file)->required();
  enumerate->add_option("--max-len", max_len, "Maximum length")->required();

  auto* product = app.add_subcommand("product", "Product recognizer of two recognizers (intersection)");
  product->add_option("FILE", file)->required();
  product->add_option("FILE2", file2)->required();
  product->add_option("-o,--output", output, "Output file");

  auto* check = app.add_subcommand("check", "Search for a counterexample to a class equation");
  check->add_option("FILE", file)->required();
  check->add_option("--class", eq_class, "vcl or vcl0")->required()->check(CLI::IsMember({"vcl", "vcl0"}));
  check->add_option("--max-context", max_context, "Maximum |u|+|v| of each context")->required();
  check->add_option("--morphisms", morphisms, "canonical or all")->check(CLI::IsMember({"canonical", "all"}));
  check->add_option("--morphism-cap", morphism_cap, "Largest number of morphisms tried in all mode");

  auto* separate = app.add_subcommand("separate", "Search for a morphism separating two words");
  separate->add_option("FILE", file)->required();
  separate->add_option("WORD", word)->required();
  separate->add_option("WORD2", word2)->required();

  std::vector<char const*> argv;
  for (auto const& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  LoadOptions const options{!strict};
  try {
    if (validate->parsed()) {
      cli::Source const src = cli::read_source(file);
      switch (src.kind) {
        case FileKind::algebra: {
          LoadedRecognizer const loaded = parse_recognizer(src.text, options);
          auto const& r = loaded.spec.algebra;
          if (porcelain) {
            out << "result=valid\nelements=" << r.size() << "\noperations=" << r.op_count()
                << "\nadded=" << loaded.added.size() << "\n";
            for (auto const& a : loaded.added) out << "added." << cli::kind_name(a.kind) << '=' << a.name << "\n";
          } else {
            out << "valid: " << r.size() << " elements, " << r.op_count() << " operations\n";
            if (!loaded.added.empty()) out << "completion added " << loaded.added.size() << " operations:\n";
            for (auto const& a : loaded.added) out << "  " << cli::kind_name(a.kind) << " " << a.name << "\n";
          }
          break;
        }
        case FileKind::vpa: {
          VPA const m = parse_vpa(src.text);
          out << (porcelain ? "result=valid\nstates=" : "valid VPA: ") << m.state_count()
              << (porcelain ? "\n" : " states\n");
          break;
        }
        case FileKind::vca: {
          VCA const m = parse_vca(src.text);
          out << (porcelain ? "result=valid\nstates=" : "valid VCA: ") << m.state_count()
              << (porcelain ? "\n" : " states\n");
          break;
        }
        case FileKind::monoid: {
          LoadedMonoid const m = parse_monoid(src.text);
          out << (porcelain ? "result=valid\nelements=" : "valid monoid: ") << m.monoid.size()
              << (porcelain ? "\n" : " elements\n");
          break;
        }
        case FileKind::alphabet: {
          PushdownAlphabet const a = parse_alphabet(src.text);
          out << (porcelain ? "result=valid\nletters=" : "valid alphabet: ") << a.size()
              << (porcelain ? "\n" : " letters\n");
          break;
        }
      }
      return kExitOk;
    }

    if (minimize_cmd->parsed()) {
      RecognizerSpec const spec = cli::recognizer_of(cli::read_source(file), options);
      cli::emit(format_recognizer(syntactic_quotient(spec).spec), output, out);
      return kExitOk;
    }

    if (from_vpa->parsed()) {
      cli::Source const src = cli::read_source(file);
      if (src.kind != FileKind::vpa && src.kind != FileKind::vca) throw Error("'" + file + "' is not an automaton file");
      VPA const m = cli::automaton_of(src);
      cli::emit(format_recognizer(minimize ? vpa_syntactic_algebra(m) : vpa_to_ext_algebra(m)), output, out);
      return kExitOk;
    }

    if (to_vpa->parsed()) {
      cli::Source const src = cli::read_source(file);
      VPA const m = src.kind == FileKind::vpa || src.kind == FileKind::vca
                        ? cli::automaton_of(src)
                        : ext_algebra_to_vpa(cli::recognizer_of(src, options));
      cli::emit(format_vpa(m), output, out);
      return kExitOk;
    }

    if (from_monoid->parsed()) {
      LoadedMonoid const m = parse_monoid(detail::read_file(file));
      cli::emit(format_recognizer(monoid_to_ext_algebra(m.monoid, m.accepting)), output, out);
      return kExitOk;
    }

    if (accepts_cmd->parsed()) {
      cli::Source const src = cli::read_source(file);
      std::string const w = cli::word_argument(word);
      bool verdict = false;
      switch (src.kind) {
        case FileKind::vpa: verdict = vpa_accepts(parse_vpa(src.text), w); break;
        case FileKind::vca: verdict = vca_accepts(parse_vca(src.text), w); break;
        default: verdict = accepts(cli::recognizer_of(src, options), w); break;
      }
      out << (porcelain ? "result=" : "") << (verdict ? "accept" : "reject") << "\n";
      return kExitOk;
    }

    if (enumerate->parsed()) {
      std::string const text = detail::read_file(file);
      PushdownAlphabet const a =
          detect_kind(text) == FileKind::alphabet ? parse_alphabet(text) : parse_recognizer(text, options).spec.alphabet();
      auto const words = enumerate_well_matched(a, max_len);
      for (auto const& w : words) out << (porcelain ? "word=" : "") << Context::display(w) << "\n";
      if (porcelain) out << "count=" << words.size() << "\n";
      return kExitOk;
    }

    if (product->parsed()) {
      RecognizerSpec const x = cli::recognizer_of(cli::read_source(file), options);
      RecognizerSpec const y = cli::recognizer_of(cli::read_source(file2), options);
      cli::emit(format_recognizer(product_spec(x, y)), output, out);
      return kExitOk;
    }

    if (check->parsed()) {
      RecognizerSpec const spec = cli::recognizer_of(cli::read_source(file), options);
      EquationClass const eq = eq_class == "vcl" ? EquationClass::vcl : EquationClass::zero_vcl;
      MorphismMode const mode = morphisms == "all" ? MorphismMode::all : MorphismMode::canonical;
      EquationCheckResult const res = check_equation(spec, eq, max_context, mode, {morphism_cap});
      auto const& r = spec.algebra;
      if (!res.counterexample) {
        if (porcelain) {
          out << "result=satisfied\nclass=" << eq_class << "\nmode=" << morphisms << "\nmax_context=" << max_context
              << "\ncontexts=" << res.contexts << "\ncontext_classes=" << res.context_classes
              << "\ndomain=" << res.domain << "\nmorphisms=" << res.morphisms << "\ninstances=" << res.instances
              << "\n";
        } else {
          out << "no counterexample within bounds (NOT a membership proof)\n"
              << "  class " << eq_class << ", " << morphisms << " morphisms (" << res.morphisms << " checked)"
              << ", contexts up to length " << max_context << " (" << res.contexts << " contexts, "
              << res.context_classes << " classes), " << res.domain << " elements quantified, " << res.instances
              << " instances\n";
        }
        return kExitOk;
      }
      Counterexample const& cx = *res.counterexample;
      auto const [left_term, right_term] = certificate_terms(spec.alphabet(), eq, cx);
      char const* vars[] = {"x", "y", "z"};
      if (porcelain) {
        out << "result=counterexample\nclass=" << eq_class << "\nmode=" << morphisms << "\nmax_context=" << max_context
            << "\nu=" << Context::display(cx.outer.left()) << "\nv=" << Context::display(cx.outer.right())
            << "\nu2=" << Context::display(cx.inner.left()) << "\nv2=" << Context::display(cx.inner.right()) << "\n";
        for (std::size_t i = 0; i < cx.assignment.size(); ++i) out << vars[i] << '=' << r.element_name(cx.assignment[i]) << "\n";
        out << "left=" << r.element_name(cx.left) << "\nright=" << r.element_name(cx.right) << "\nchain=" << cx.chain
            << "\nleft_term=" << to_string(left_term) << "\nright_term=" << to_string(right_term) << "\n";
        if (mode == MorphismMode::all) out << cli::morphism_text(r, cx.morphism, true);
      } else {
        out << "counterexample found (" << (eq == EquationClass::vcl ? "VCL" : "threshold-zero VCL")
            << " equation): the language is not in the class\n"
            << "  u  = " << Context::display(cx.outer.left()) << "\n"
            << "  v  = " << Context::display(cx.outer.right()) << "\n"
            << "  u' = " << Context::display(cx.inner.left()) << "\n"
            << "  v' = " << Context::display(cx.inner.right()) << "\n";
        for (std::size_t i = 0; i < cx.assignment.size(); ++i) {
          out << "  " << vars[i] << "  = " << r.element_name(cx.assignment[i]) << "\n";
        }
        out << "  left  " << to_string(left_term) << " = " << r.element_name(cx.left) << "\n"
            << "  right " << to_string(right_term) << " = " << r.element_name(cx.right) << "\n";
        if (mode == MorphismMode::all) out << "  under the morphism\n" << cli::morphism_text(r, cx.morphism, false);
      }
      return kExitCounterexample;
    }

    if (separate->parsed()) {
      LoadedRecognizer const loaded = parse_recognizer(detail::read_file(file), options);
      auto const& r = loaded.spec.algebra;
      std::string const x = cli::word_argument(word);
      std::string const y = cli::word_argument(word2);
      SeparationResult const res = separates(r, loaded.spec.alphabet(), x, y, kMorphismCap, loaded.spec.morphism);
      if (!res.separated) {
        out << (porcelain ? "result=not-separated\nmorphisms=" : "not separated: all ")
            << res.morphisms_tried << (porcelain ? "\n" : " morphisms agree\n");
        return kExitOk;
      }
      if (porcelain) {
        out << "result=separated\nx=" << r.element_name(res.x_value) << "\ny=" << r.element_name(res.y_value) << "\n"
            << cli::morphism_text(r, *res.witness, true);
      } else {
        out << "separated: " << Context::display(x) << " -> " << r.element_name(res.x_value) << ", "
            << Context::display(y) << " -> " << r.element_name(res.y_value) << "\n  witness morphism\n"
            << cli::morphism_text(r, *res.witness, false);
      }
      return kExitOk;
    }
  } catch (Error const& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace vpl
