#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace bayesgate {

class CountInversion : public std::invalid_argument {
 public:
  CountInversion(std::uint64_t spam, std::uint64_t content)
      : std::invalid_argument("spam token count " + std::to_string(spam) +
                              " exceeds content token count " +
                              std::to_string(content)) {}
};

// Running counters over every ingested comment. `with_spam_words` counts
// comments that contained at least one spam-lexicon token when they arrived;
// it is fixed at ingest time and does not move when the lexicon later does.
struct CorpusStats {
  std::uint64_t total_comments = 0;
  std::uint64_t spam_labeled = 0;
  std::uint64_t with_spam_words = 0;
  std::uint64_t total_content_tokens = 0;

  bool operator==(const CorpusStats&) const = default;
};

struct ScoreBreakdown {
  double likelihood = 0.0;  // Pr(words | comment spam)
  double prior = 0.0;       // Pr(comment spam)
  double evidence = 1.0;    // Pr(words)
  double score = 0.0;       // posterior, clamped into [0, 1]
  std::uint64_t spam_token_count = 0;
  std::uint64_t content_token_count = 0;
};

struct FilterConfig {
  double threshold = 0.35;
  bool autolearn_enabled = false;
  double autolearn_threshold = 0.70;
};

enum class Verdict { Ham, Spam };

// The stored label a comment carries; it starts out equal to the verdict and
// can be flipped by a moderator later.
enum class Label { Ham, Spam };

inline Label label_for(Verdict v) {
  return v == Verdict::Spam ? Label::Spam : Label::Ham;
}

// Pr(words | comment spam): spam-token occurrences over content tokens of the
// submitted comment. Zero content tokens give zero, not a division error.
inline double likelihood(std::uint64_t spam_token_count,
                         std::uint64_t content_token_count) {
  if (spam_token_count > content_token_count)
    throw CountInversion(spam_token_count, content_token_count);
  if (content_token_count == 0) return 0.0;
  return static_cast<double>(spam_token_count) /
         static_cast<double>(content_token_count);
}

// Pr(comment spam): spam-labeled comments over all comments. An empty corpus
// bootstraps at 1/2 so the likelihood term alone drives early scores.
inline double prior(const CorpusStats& stats) noexcept {
  if (stats.total_comments == 0) return 0.5;
  return static_cast<double>(stats.spam_labeled) /
         static_cast<double>(stats.total_comments);
}

// Pr(words): comments containing at least one spam token over all comments.
// Falls back to the neutral 1 whenever the ratio would be zero or undefined,
// which also rules division by zero out of the posterior.
inline double evidence(const CorpusStats& stats) noexcept {
  if (stats.total_comments == 0 || stats.with_spam_words == 0) return 1.0;
  return static_cast<double>(stats.with_spam_words) /
         static_cast<double>(stats.total_comments);
}

// Posterior spam probability: likelihood * prior / evidence, clamped into
// [0, 1] (relabeling can push spam_labeled past with_spam_words, making the
// raw ratio exceed one). The total-comment count cancels between prior and
// evidence, so the value reduces to a single division of exact integer
// products and every printed digit is meaningful.
inline ScoreBreakdown score(std::uint64_t spam_token_count,
                            std::uint64_t content_token_count,
                            const CorpusStats& stats) {
  ScoreBreakdown b;
  b.spam_token_count = spam_token_count;
  b.content_token_count = content_token_count;
  b.likelihood = likelihood(spam_token_count, content_token_count);
  b.prior = prior(stats);
  b.evidence = evidence(stats);
  if (spam_token_count == 0 || content_token_count == 0) {
    b.score = 0.0;
    return b;
  }
  double num, den;
  if (stats.total_comments == 0) {
    num = static_cast<double>(spam_token_count);
    den = 2.0 * static_cast<double>(content_token_count);
  } else if (stats.with_spam_words == 0) {
    num = static_cast<double>(spam_token_count) *
          static_cast<double>(stats.spam_labeled);
    den = static_cast<double>(content_token_count) *
          static_cast<double>(stats.total_comments);
  } else {
    num = static_cast<double>(spam_token_count) *
          static_cast<double>(stats.spam_labeled);
    den = static_cast<double>(content_token_count) *
          static_cast<double>(stats.with_spam_words);
  }
  b.score = std::clamp(num / den, 0.0, 1.0);
  return b;
}

// The threshold gate is inclusive: a score exactly at the threshold is spam.
inline Verdict classify(const ScoreBreakdown& breakdown,
                        const FilterConfig& config) noexcept {
  return breakdown.score >= config.threshold ? Verdict::Spam : Verdict::Ham;
}

inline bool should_autolearn(const ScoreBreakdown& breakdown,
                             const FilterConfig& config) noexcept {
  return config.autolearn_enabled &&
         breakdown.score >= config.autolearn_threshold;
}

// Fixed-point rendering with 12 fractional digits, the precision scores are
// reported at everywhere (CLI, API responses).
inline std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12f", value);
  return buf;
}

}  // namespace bayesgate
