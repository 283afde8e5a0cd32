#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

using namespace vpl;
using namespace vpl::testing;

namespace {

VPA load_vpa(std::string const& name) { return parse_vpa(detail::read_file(fixture(name))); }

}  // namespace

TEST(BehaviourAlgebra, AnbnIsExampleAlgebraAfterMinimising) {
  VPA const m = load_vpa("anbn.vpa");
  RecognizerSpec const beh = vpa_to_ext_algebra(m);
  EXPECT_TRUE(validate_algebra(beh.algebra).ok());
  RecognizerSpec const golden = load_fixture("anbn.alg");
  EXPECT_TRUE(are_isomorphic(syntactic_quotient(beh).spec.algebra, golden.algebra));
  EXPECT_TRUE(are_isomorphic(vpa_syntactic_algebra(m).algebra, golden.algebra));
}

TEST(BehaviourAlgebra, LmlMatchesFixtureAlgebra) {
  VPA const m = load_vpa("lml.vpa");
  RecognizerSpec const syn = vpa_syntactic_algebra(m);
  EXPECT_TRUE(are_isomorphic(syn.algebra, load_fixture("lml.alg").algebra));
  for (auto const& w : enumerate_well_matched(m.alphabet(), 10)) EXPECT_EQ(accepts(syn, w), oracle_lml(w)) << w;
}

TEST(BehaviourAlgebra, RecognisesTheAutomatonLanguage) {
  std::mt19937 rng(43);
  auto const al = abc_alphabet();
  auto const words = enumerate_well_matched(al, 8);
  for (int i = 0; i < 30; ++i) {
    VPA const m = random_vpa(rng, al, 2, 1);
    RecognizerSpec const beh = vpa_to_ext_algebra(m);
    EXPECT_TRUE(validate_algebra(beh.algebra).ok());
    RecognizerSpec const syn = vpa_syntactic_algebra(m);
    EXPECT_TRUE(validate_algebra(syn.algebra).ok());
    EXPECT_LE(syn.algebra.size(), beh.algebra.size());
    for (auto const& w : words) {
      bool const expected = vpa_accepts(m, w);
      EXPECT_EQ(accepts(beh, w), expected) << w;
      EXPECT_EQ(accepts(syn, w), expected) << w;
    }
    EXPECT_TRUE(are_isomorphic(syn.algebra, syntactic_quotient(beh).spec.algebra));
  }
}

TEST(BehaviourAlgebra, ElementsAreNamedByRepresentatives) {
  VPA const m = load_vpa("anbn.vpa");
  RecognizerSpec const beh = vpa_to_ext_algebra(m);
  for (Element x = 0; x < beh.algebra.size(); ++x) {
    std::string const name = beh.algebra.element_name(x);
    std::string const w = name == "1" ? "" : name;
    EXPECT_EQ(evaluate(beh, w), x) << name;
  }
}

TEST(BehaviourAlgebra, SizeCap) {
  VPA const m = load_vpa("lml.vpa");
  EXPECT_THROW(vpa_to_ext_algebra(m, 3), SizeCapExceeded);
  EXPECT_THROW(vpa_to_ext_algebra(m, kClosureCap, 5), SizeCapExceeded);
}

TEST(AlgebraToVpa, FixtureLanguagesPreserved) {
  for (std::string name : {"anbn.alg", "hplus.alg", "lml.alg", "anbncmdm.alg", "separation.alg"}) {
    RecognizerSpec const spec = load_fixture(name);
    VPA const m = ext_algebra_to_vpa(spec);
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.state_count(), spec.algebra.size());
    for (auto const& w : enumerate_well_matched(spec.alphabet(), 8)) {
      EXPECT_EQ(vpa_accepts(m, w), accepts(spec, w)) << name << " " << w;
      EXPECT_EQ(vpa_state_after(m, w, m.initial(), kBottom), evaluate(spec, w));
    }
  }
}

TEST(AlgebraToVpa, RoundTripGivesIsomorphicSyntacticAlgebra) {
  for (std::string name : {"anbn.alg", "hplus.alg", "lml.alg", "anbncmdm.alg"}) {
    RecognizerSpec const spec = load_fixture(name);
    RecognizerSpec const back = vpa_syntactic_algebra(ext_algebra_to_vpa(spec));
    EXPECT_TRUE(are_isomorphic(back.algebra, syntactic_quotient(spec).spec.algebra)) << name;
  }
}

TEST(MonoidAlgebra, RecognisesPreimageOnWellMatchedWords) {
  std::mt19937 rng(47);
  auto const al = PushdownAlphabet({'a'}, {'b'}, {'c'});
  auto const words = enumerate_well_matched(al, 8);
  for (int i = 0; i < 40; ++i) {
    RandomMonoid const rm = random_transition_monoid(rng, al, 6);
    RecognizerSpec const spec = monoid_to_ext_algebra(rm.monoid, rm.accepting);
    EXPECT_TRUE(validate_algebra(spec.algebra).ok());
    for (auto const& w : words) {
      Element const v = monoid_value(rm.monoid, w);
      bool const expected = std::find(rm.accepting.begin(), rm.accepting.end(), v) != rm.accepting.end();
      EXPECT_EQ(accepts(spec, w), expected) << w;
    }
  }
}

TEST(MonoidAlgebra, OperationsAreTwoSidedMultiplications) {
  std::mt19937 rng(53);
  auto const al = PushdownAlphabet({'a', 'c'}, {'b'}, {});
  for (int i = 0; i < 20; ++i) {
    RandomMonoid const rm = random_transition_monoid(rng, al, 6);
    RecognizerSpec const spec = monoid_to_ext_algebra(rm.monoid, rm.accepting);
    ExtAlgebra const& r = spec.algebra;
    // Every op is x -> m x m' for some monoid elements m, m'.
    FiniteMonoid const& mon = rm.monoid;
    std::vector<Element> in_monoid(r.size());
    for (Element x = 0; x < r.size(); ++x) {
      auto it = std::find(mon.element_names.begin(), mon.element_names.end(), r.element_name(x));
      ASSERT_NE(it, mon.element_names.end());
      in_monoid[x] = static_cast<Element>(it - mon.element_names.begin());
    }
    for (OpId e = 0; e < r.op_count(); ++e) {
      bool found = false;
      for (Element p = 0; p < mon.size() && !found; ++p)
        for (Element q = 0; q < mon.size() && !found; ++q) {
          bool all = true;
          for (Element x = 0; x < r.size() && all; ++x) {
            all = in_monoid[r.apply(e, x)] == mon.multiply(mon.multiply(p, in_monoid[x]), q);
          }
          found = all;
        }
      EXPECT_TRUE(found) << r.op_name(e);
    }
    // The pair images are h(a) x h(b).
    for (Letter a : al.calls())
      for (Letter b : al.returns()) {
        OpId const e = spec.morphism.ext(a, b);
        EXPECT_EQ(evaluate(spec, std::string(1, a) + b), r.apply(e, r.identity()));
      }
  }
}
