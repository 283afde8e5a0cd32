#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"

using namespace vpl;
using namespace vpl::testing;

TEST(Alphabet, KindsAndRanks) {
  PushdownAlphabet const al({'a', 'c'}, {'b', 'd'}, {'x'});
  EXPECT_EQ(al.size(), 5u);
  EXPECT_EQ(al.kind('a'), LetterKind::call);
  EXPECT_EQ(al.kind('d'), LetterKind::ret);
  EXPECT_EQ(al.kind('x'), LetterKind::internal);
  EXPECT_EQ(al.rank('a'), 0u);
  EXPECT_EQ(al.rank('x'), 4u);
  EXPECT_EQ(al.group_index('c'), 1u);
  EXPECT_EQ(al.height_of('a'), 1);
  EXPECT_EQ(al.height_of('b'), -1);
  EXPECT_EQ(al.height_of('x'), 0);
  EXPECT_FALSE(al.contains('q'));
}

TEST(Alphabet, RejectsDuplicatesAndReserved) {
  EXPECT_THROW(PushdownAlphabet({'a'}, {'a'}, {}), InvalidLetter);
  EXPECT_THROW(PushdownAlphabet({'#'}, {'b'}, {}), InvalidLetter);
  EXPECT_THROW(PushdownAlphabet({'a'}, {'-'}, {}), InvalidLetter);
  EXPECT_THROW(PushdownAlphabet({'a'}, {'b'}, {' '}), InvalidLetter);
}

TEST(Alphabet, UnknownLetterInWord) {
  auto const al = ab_alphabet();
  EXPECT_THROW(al.check_word("abq"), InvalidLetter);
  EXPECT_THROW(stack_height(al, "az"), InvalidLetter);
}

TEST(Heights, Examples) {
  auto const al = abc_alphabet();
  EXPECT_EQ(stack_height(al, ""), 0);
  EXPECT_EQ(stack_height(al, "aacb"), 1);
  EXPECT_EQ(stack_height(al, "bba"), -1);
  EXPECT_EQ(min_prefix_height(al, "bba"), -2);
  EXPECT_EQ(min_prefix_height(al, "aab"), 0);
  EXPECT_TRUE(is_well_matched(al, ""));
  EXPECT_TRUE(is_well_matched(al, "acbc"));
  EXPECT_FALSE(is_well_matched(al, "ba"));
  EXPECT_FALSE(is_well_matched(al, "aab"));
}

TEST(Heights, WellMatchedAgreesWithOracle) {
  auto const al = abc_alphabet();
  for (auto const& w : all_words(al, 7)) EXPECT_EQ(is_well_matched(al, w), oracle_well_matched(al, w)) << w;
}

TEST(WellMatched, ConcatenationIsClosed) {
  auto const al = abc_alphabet();
  auto const words = enumerate_well_matched(al, 4);
  for (auto const& u : words)
    for (auto const& v : words) EXPECT_TRUE(is_well_matched(al, u + v));
}

TEST(WellMatched, EnumerationMatchesBruteForce) {
  auto const al = abc_alphabet();
  std::vector<std::string> expected;
  for (auto const& w : all_words(al, 6))
    if (oracle_well_matched(al, w)) expected.push_back(w);
  EXPECT_EQ(enumerate_well_matched(al, 6), expected);
}

TEST(WellMatched, SmallEnumeration) {
  auto const words = enumerate_well_matched(ab_alphabet(), 4);
  EXPECT_EQ(words, (std::vector<std::string>{"", "ab", "aabb", "abab"}));
}

TEST(Contexts, MakeRequiresWellMatchedConcatenation) {
  auto const al = abc_alphabet();
  EXPECT_NO_THROW(Context::make(al, "aac", "bb"));
  EXPECT_THROW(Context::make(al, "a", "bb"), NotWellMatched);
  EXPECT_THROW(Context::make(al, "b", "a"), NotWellMatched);
  EXPECT_EQ(Context::make(al, "aac", "bb").height(), 2);
  EXPECT_EQ(Context::identity().length(), 0u);
}

TEST(Contexts, ApplicationStaysWellMatched) {
  auto const al = abc_alphabet();
  auto const xs = enumerate_well_matched(al, 4);
  for (auto const& ctx : enumerate_contexts(al, 4)) {
    EXPECT_TRUE(is_well_matched(al, ctx.left() + ctx.right()));
    for (auto const& x : xs) EXPECT_TRUE(oracle_well_matched(al, apply_context(al, ctx, x)));
  }
  EXPECT_THROW(apply_context(al, Context::identity(), "a"), NotWellMatched);
}

TEST(Contexts, CompositionActsAsNesting) {
  auto const al = abc_alphabet();
  std::mt19937 rng(7);
  auto const ctxs = enumerate_contexts(al, 5);
  for (int i = 0; i < 300; ++i) {
    Context const& c1 = ctxs[rng() % ctxs.size()];
    Context const& c2 = ctxs[rng() % ctxs.size()];
    std::string const x = random_well_matched(rng, al, 6);
    Context const both = compose_contexts(al, c1, c2);
    EXPECT_EQ(apply_context(al, both, x), apply_context(al, c1, apply_context(al, c2, x)));
    EXPECT_EQ(both.height(), c1.height() + c2.height());
  }
}

TEST(Contexts, EnumerationIsCompleteAndOrdered) {
  auto const al = abc_alphabet();
  auto const ctxs = enumerate_contexts(al, 5);
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t expected = 0;
  for (auto const& w : enumerate_well_matched(al, 5)) expected += w.size() + 1;
  for (std::size_t i = 0; i < ctxs.size(); ++i) {
    EXPECT_LE(ctxs[i].length(), 5u);
    EXPECT_TRUE(seen.emplace(ctxs[i].left(), ctxs[i].right()).second);
    if (i > 0) {
      EXPECT_LE(ctxs[i - 1].length(), ctxs[i].length());
      if (ctxs[i - 1].length() == ctxs[i].length()) EXPECT_GE(ctxs[i - 1].height(), ctxs[i].height());
    }
  }
  EXPECT_EQ(ctxs.size(), expected);
}

TEST(Contexts, DecompositionRebuildsTheContext) {
  auto const al = PushdownAlphabet({'a', 'c'}, {'b', 'd'}, {'x'});
  for (auto const& ctx : enumerate_contexts(al, 6)) {
    ContextShape const s = decompose(al, ctx);
    std::size_t const k = s.calls.size();
    ASSERT_EQ(s.left_blocks.size(), k + 1);
    ASSERT_EQ(s.right_blocks.size(), k + 1);
    ASSERT_EQ(s.returns.size(), k);
    EXPECT_EQ(static_cast<int>(k), ctx.height());
    std::string u = s.left_blocks[0];
    for (std::size_t i = 0; i < k; ++i) u += std::string(1, s.calls[i]) + s.left_blocks[i + 1];
    std::string v = s.right_blocks[k];
    for (std::size_t i = k; i-- > 0;) v += std::string(1, s.returns[i]) + s.right_blocks[i];
    EXPECT_EQ(u, ctx.left());
    EXPECT_EQ(v, ctx.right());
    for (auto const& b : s.left_blocks) EXPECT_TRUE(oracle_well_matched(al, b));
    for (auto const& b : s.right_blocks) EXPECT_TRUE(oracle_well_matched(al, b));
  }
}

TEST(Contexts, DecompositionExample) {
  auto const al = abc_alphabet();
  ContextShape const s = decompose(al, Context::make(al, "cabac", "cbcab"));
  EXPECT_EQ(s.calls, (std::vector<Letter>{'a'}));
  EXPECT_EQ(s.left_blocks, (std::vector<Word>{"cab", "c"}));
  EXPECT_EQ(s.returns, (std::vector<Letter>{'b'}));
  EXPECT_EQ(s.right_blocks, (std::vector<Word>{"cab", "c"}));
}
