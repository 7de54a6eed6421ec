#include "bayesgate/lexicon.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace bayesgate;

TEST(Defaults, StopwordListMatchesShippedSet) {
  const Lexicon stop = default_stopwords();
  EXPECT_EQ(stop.size(), 32u);
  EXPECT_TRUE(stop.contains("was"));
  EXPECT_TRUE(stop.contains("were"));
  EXPECT_TRUE(stop.contains("their"));
  // "not" is deliberately absent; negated phrases stay scoreable.
  EXPECT_FALSE(stop.contains("not"));
}

TEST(Defaults, SpamwordListMatchesShippedSet) {
  const Lexicon spam = default_spamwords();
  EXPECT_EQ(spam.size(), 11u);
  EXPECT_TRUE(spam.contains("disgusting"));
  EXPECT_TRUE(spam.contains("idiot"));
  EXPECT_TRUE(spam.contains("ugly"));
  EXPECT_FALSE(spam.contains("restaurant"));
}

TEST(Defaults, StopAndSpamSetsAreDisjoint) {
  const Lexicon stop = default_stopwords();
  for (const auto& term : default_spamwords().terms)
    EXPECT_FALSE(stop.contains(term)) << term;
}

TEST(Defaults, EveryTermIsANormalizeFixedPoint) {
  for (const Lexicon& lex : {default_stopwords(), default_spamwords()})
    for (const auto& term : lex.terms)
      EXPECT_EQ(normalize(term), TokenSequence{term});
}

TEST(AddTerm, NormalizesBeforeInsert) {
  const Lexicon lex = add_term(default_spamwords(), "VIAGRA!!");
  EXPECT_TRUE(lex.contains("viagra"));
  EXPECT_EQ(lex.revision, default_spamwords().revision + 1);
}

TEST(AddTerm, ExistingTermIsNoOp) {
  const Lexicon before = default_spamwords();
  const Lexicon after = add_term(before, "bad");
  EXPECT_EQ(after.terms, before.terms);
  EXPECT_EQ(after.revision, before.revision);
}

TEST(AddTerm, MultiTokenInputRejected) {
  EXPECT_THROW(add_term(default_spamwords(), "two words"), MultiTokenTerm);
  EXPECT_THROW(add_term(default_spamwords(), "!!!"), MultiTokenTerm);
  EXPECT_THROW(add_term(default_spamwords(), ""), MultiTokenTerm);
}

TEST(RemoveTerm, RemovesAndBumpsRevision) {
  const Lexicon lex = remove_term(default_spamwords(), "bad");
  EXPECT_EQ(lex.size(), 10u);
  EXPECT_FALSE(lex.contains("bad"));
  EXPECT_EQ(lex.revision, default_spamwords().revision + 1);
}

TEST(RemoveTerm, MissingTermIsNoOp) {
  const Lexicon before = default_spamwords();
  const Lexicon after = remove_term(before, "zebra");
  EXPECT_EQ(after.terms, before.terms);
  EXPECT_EQ(after.revision, before.revision);
}

TEST(RemoveTerm, RoundTripRestoresMembership) {
  Lexicon lex = remove_term(default_spamwords(), "bad");
  lex = add_term(lex, "bad");
  EXPECT_TRUE(lex.contains("bad"));
}

TEST(AddTerms, BulkInsertIsOneRevisionStep) {
  const Lexicon before = default_spamwords();
  const Lexicon after = add_terms(before, {"garbage", "junk", "bad"});
  EXPECT_TRUE(after.contains("garbage"));
  EXPECT_TRUE(after.contains("junk"));
  EXPECT_EQ(after.revision, before.revision + 1);
  // nothing new -> no revision movement
  EXPECT_EQ(add_terms(after, {"garbage"}).revision, after.revision);
}

TEST(ReplaceTerms, SwapsTheWholeSet) {
  const Lexicon before = default_spamwords();
  const Lexicon after = replace_terms(before, {"Alpha", "beta", "beta"});
  EXPECT_EQ(after.size(), 2u);
  EXPECT_TRUE(after.contains("alpha"));
  EXPECT_EQ(after.revision, before.revision + 1);
  const Lexicon same = replace_terms(after, {"alpha", "beta"});
  EXPECT_EQ(same.revision, after.revision);
}

TEST(LineFormat, ParsesOneTermPerLine) {
  std::istringstream in("viagra\nCASINO!\n\n  \ncheap\n");
  const auto terms = parse_lexicon_lines(in);
  EXPECT_EQ(terms, (std::vector<std::string>{"viagra", "casino", "cheap"}));
}

TEST(LineFormat, ReportsOffendingLineNumber) {
  std::istringstream in("fine\nalso fine\n");
  try {
    parse_lexicon_lines(in);
    FAIL() << "expected LexiconParseError";
  } catch (const LexiconParseError& e) {
    EXPECT_EQ(e.line_number, 2u);
  }
}

TEST(LineFormat, SerializeListsSortedTerms) {
  Lexicon lex;
  lex.terms = {"b", "a"};
  EXPECT_EQ(serialize_lexicon_lines(lex), "a\nb\n");
}
