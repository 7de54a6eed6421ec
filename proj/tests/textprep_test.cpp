#include "bayesgate/textprep.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bayesgate/lexicon.hpp"
#include "test_util.hpp"

using namespace bayesgate;

TEST(Normalize, EmptyInput) { EXPECT_TRUE(normalize("").empty()); }

TEST(Normalize, LowercasesAndSplitsOnNonAlnum) {
  EXPECT_EQ(normalize("FrEe!!! $$$CaSh,now"),
            (TokenSequence{"free", "cash", "now"}));
}

TEST(Normalize, DigitsStayInTokens) {
  EXPECT_EQ(normalize("v1agra 100%FREE"), (TokenSequence{"v1agra", "100", "free"}));
}

TEST(Normalize, ApostropheSplits) {
  EXPECT_EQ(normalize("don't"), (TokenSequence{"don", "t"}));
}

TEST(Normalize, SampleComment) {
  const TokenSequence tokens = normalize(testutil::kSampleComment);
  ASSERT_EQ(tokens.size(), 25u);
  EXPECT_EQ(tokens[0], "yesterday");
  EXPECT_EQ(tokens[1], "i");
  EXPECT_EQ(tokens[2], "went");
  EXPECT_EQ(tokens[3], "to");
  EXPECT_EQ(tokens[4], "a");
  EXPECT_EQ(std::count(tokens.begin(), tokens.end(), "bad"), 2);
}

TEST(Normalize, UnicodeLettersSurvive) {
  EXPECT_EQ(normalize("Grüße, ПРИВЕТ!"), (TokenSequence{"grüße", "привет"}));
  EXPECT_EQ(normalize("中文 comment"), (TokenSequence{"中文", "comment"}));
}

TEST(Normalize, MalformedBytesActAsSeparators) {
  std::string input = "ab";
  input += '\xFF';
  input += "cd";
  EXPECT_EQ(normalize(input), (TokenSequence{"ab", "cd"}));
  std::string truncated = "ok ";
  truncated += '\xE4';  // first byte of a 3-byte sequence, then nothing
  EXPECT_EQ(normalize(truncated), (TokenSequence{"ok"}));
}

TEST(Normalize, IdempotentOnRandomInput) {
  std::mt19937 rng(42);
  for (int i = 0; i < 3000; ++i) {
    const std::string text = testutil::random_text(rng);
    const TokenSequence once = normalize(text);
    EXPECT_EQ(normalize(join_tokens(once)), once) << "input: " << text;
  }
}

TEST(RemoveStopwords, SampleCommentKeepsTwelveContentTokens) {
  const Lexicon stop = default_stopwords();
  const TokenSequence content =
      remove_stopwords(normalize(testutil::kSampleComment), stop);
  ASSERT_EQ(content.size(), 12u);
  EXPECT_EQ(std::count(content.begin(), content.end(), "bad"), 2);
}

TEST(RemoveStopwords, AllStopwordsGivesEmpty) {
  EXPECT_TRUE(
      remove_stopwords(TokenSequence{"the", "a", "is"}, default_stopwords())
          .empty());
}

TEST(RemoveStopwords, DisjointInputUnchanged) {
  const TokenSequence tokens{"viagra", "cheap"};
  EXPECT_EQ(remove_stopwords(tokens, default_stopwords()), tokens);
}

TEST(RemoveStopwords, OutputNeverContainsStopwords) {
  std::mt19937 rng(7);
  const Lexicon stop = default_stopwords();
  for (int i = 0; i < 2000; ++i) {
    for (const auto& tok :
         remove_stopwords(normalize(testutil::random_text(rng)), stop))
      EXPECT_FALSE(stop.contains(tok)) << tok;
  }
}

TEST(FrequencyMap, Empty) { EXPECT_TRUE(frequency_map({}).empty()); }

TEST(FrequencyMap, CountsOccurrences) {
  const FrequencyMap freq = frequency_map({"bad", "bad", "view"});
  EXPECT_EQ(freq, (FrequencyMap{{"bad", 2}, {"view", 1}}));
}

TEST(FrequencyMap, SampleCommentHasElevenKeysSummingToTwelve) {
  const TokenSequence content = remove_stopwords(
      normalize(testutil::kSampleComment), default_stopwords());
  const FrequencyMap freq = frequency_map(content);
  EXPECT_EQ(freq.size(), 11u);
  std::uint64_t sum = 0;
  for (const auto& [tok, count] : freq) sum += count;
  EXPECT_EQ(sum, 12u);
  EXPECT_EQ(freq.at("bad"), 2u);
}

TEST(FrequencyMap, CountsSumToInputLength) {
  std::mt19937 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto tokens = testutil::random_tokens(rng);
    std::uint64_t sum = 0;
    for (const auto& [tok, count] : frequency_map(tokens)) sum += count;
    EXPECT_EQ(sum, tokens.size());
  }
}

TEST(CountSpamTokens, SampleCommentHasFour) {
  const TokenSequence content = remove_stopwords(
      normalize(testutil::kSampleComment), default_stopwords());
  EXPECT_EQ(count_spam_tokens(content, default_spamwords()), 4u);
}

TEST(CountSpamTokens, EmptyLexiconCountsNothing) {
  Lexicon empty;
  empty.terms.clear();
  EXPECT_EQ(count_spam_tokens({"bad", "awful"}, empty), 0u);
}

TEST(CountSpamTokens, CountsWithMultiplicity) {
  EXPECT_EQ(count_spam_tokens({"bad", "bad", "bad"}, default_spamwords()), 3u);
}

TEST(CountSpamTokens, NeverExceedsTokenCount) {
  std::mt19937 rng(13);
  const Lexicon spam = default_spamwords();
  for (int i = 0; i < 2000; ++i) {
    const auto tokens = testutil::random_tokens(rng);
    EXPECT_LE(count_spam_tokens(tokens, spam), tokens.size());
  }
}
