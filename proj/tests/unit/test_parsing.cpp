#include <gtest/gtest.h>

#include "anticipate/error.hpp"
#include "anticipate/parsing.hpp"
#include "anticipate/prompting.hpp"
#include "helpers/support.hpp"

using namespace anticipate;
using testing_support::kitchen_taxonomy;

namespace {

// take=0 put=1 turn=2 "turn on"=3 "turn off"=4 open=5 close=6 wash=7 cut=8 measure=9
// tape=0 "tape measure"=1 knife=2 board=3 cup=4 door=5 tap=6 light=7 drawer=8 plate=9 ...
class ParseTest : public ::testing::Test {
 protected:
  Taxonomy tax = kitchen_taxonomy();

  ActionSequence parse(std::string_view text, std::size_t z, ActionLabel fallback = {7, 9}) {
    return parse_output(text, ParseContext{&tax, fallback, z});
  }
};

}  // namespace

TEST(ParsingHelpers, TruncateAndSplit) {
  EXPECT_EQ(truncate_first_period("(a, b). Example 2: (c, d)."), "(a, b)");
  EXPECT_EQ(truncate_first_period("no period"), "no period");
  EXPECT_EQ(split_items(" (take, cup),(put ,  knife) "), (std::vector<std::string>{"take", "cup", "put", "knife"}));
  EXPECT_EQ(split_items(",,()"), std::vector<std::string>{});
}

TEST_F(ParseTest, LongestMatchGoldens) {
  EXPECT_EQ(parse("(turn on, tape measure), (turn, tape).", 2), (ActionSequence{{3, 1}, {2, 0}}));
  EXPECT_EQ(parse("Turn On the Tape Measure", 1), (ActionSequence{{3, 1}}));
  EXPECT_EQ(parse("(turn off, tape), (measure, tape measure)", 2), (ActionSequence{{4, 0}, {9, 1}}));
}

TEST_F(ParseTest, BlankBorrowsPreviousVerbOrNoun) {
  EXPECT_EQ(parse("(take, cup), (___, knife), (put, ___), (___, ___)", 4),
            (ActionSequence{{0, 4}, {0, 2}, {1, 2}, {1, 2}}));
  // Nothing emitted yet: the last observed action supplies the missing half.
  EXPECT_EQ(parse("(___, cup)", 1), (ActionSequence{{7, 4}}));
  EXPECT_EQ(parse("(open, ___)", 1), (ActionSequence{{5, 9}}));
}

TEST_F(ParseTest, ItemsWithOneHalf) {
  EXPECT_EQ(parse("(take, cup), knife", 2), (ActionSequence{{0, 4}, {0, 2}}));
  EXPECT_EQ(parse("(take, put, cup)", 2), (ActionSequence{{0, 9}, {1, 4}}));
  EXPECT_EQ(parse("(stir, soup), (wash, plate)", 2), (ActionSequence{{7, 9}, {7, 9}}));
  EXPECT_EQ(parse("(open, door), (open)", 2), (ActionSequence{{5, 5}, {5, 5}}));
}

TEST_F(ParseTest, PaddingAndTruncation) {
  EXPECT_EQ(parse("(take, cup). (put, knife)", 3), (ActionSequence{{0, 4}, {0, 4}, {0, 4}}));
  EXPECT_EQ(parse("", 2), (ActionSequence{{7, 9}, {7, 9}}));
  EXPECT_EQ(parse("I cannot help with that", 1), (ActionSequence{{7, 9}}));
  std::string many;
  for (int i = 0; i < 30; ++i) many += i % 2 ? "(put, cup), " : "(take, knife), ";
  const auto out = parse(many, 20);
  ASSERT_EQ(out.size(), 20u);
  EXPECT_EQ(out.front(), (ActionLabel{0, 2}));
  EXPECT_EQ(out.back(), (ActionLabel{1, 4}));
}

TEST(Parsing, OverlappingMatchesFollowPosition) {
  const Taxonomy tax({"take", "light"}, {"light", "cup"});
  const ParseContext ctx{&tax, {0, 1}, 2};
  EXPECT_EQ(parse_output("(light, light), (take, light)", ctx), (ActionSequence{{1, 0}, {0, 0}}));
}

TEST(Parsing, PadErrorsAndContextChecks) {
  EXPECT_THROW(pad_to_horizon({}, 3), Error);
  EXPECT_EQ(pad_to_horizon({{1, 1}, {2, 2}}, 1), (ActionSequence{{1, 1}}));
  const Taxonomy tax = kitchen_taxonomy();
  EXPECT_THROW(parse_output("x", ParseContext{nullptr, {0, 0}, 3}), Error);
  EXPECT_THROW(parse_output("x", ParseContext{&tax, {99, 0}, 3}), Error);
  EXPECT_THROW(parse_output("x", ParseContext{&tax, {0, 0}, 0}), Error);
}

TEST(Parsing, RandomBytesAlwaysYieldHorizonValidLabels) {
  const Taxonomy tax = kitchen_taxonomy();
  SplitMix64 rng(404);
  const std::string alphabet = "(),. _\n\ttakecupturnontapemeasure";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const std::size_t len = rng.next_below(120);
    for (std::size_t j = 0; j < len; ++j) {
      s.push_back(i % 2 ? static_cast<char>(rng.next_below(256)) : alphabet[rng.next_below(alphabet.size())]);
    }
    const std::size_t z = 1 + rng.next_below(30);
    const auto out = parse_output(s, ParseContext{&tax, {1, 2}, z});
    ASSERT_EQ(out.size(), z);
    for (const auto& a : out) ASSERT_TRUE(tax.valid(a));
  }
}
