#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bayesgate/classifier.hpp"
#include "bayesgate/json_io.hpp"
#include "bayesgate/lexicon.hpp"
#include "bayesgate/textprep.hpp"

namespace bayesgate {

class EmptyCorpus : public std::runtime_error {
 public:
  EmptyCorpus() : std::runtime_error("empty corpus") {}
};

class CorpusParseError : public std::runtime_error {
 public:
  CorpusParseError(std::size_t line, const std::string& what)
      : std::runtime_error("corpus line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

struct LabeledEntry {
  std::string text;
  Label label = Label::Ham;
};

struct LabeledCorpus {
  std::vector<LabeledEntry> entries;
};

// One sweep row, kept as raw counts so the percentage identities hold without
// rounding slop. "Flagged" means classified Spam at the row's threshold.
struct EvalRow {
  double threshold = 0.0;
  std::uint64_t spam_total = 0;
  std::uint64_t spam_flagged = 0;
  std::uint64_t ham_total = 0;
  std::uint64_t ham_flagged = 0;

  // Recall over the Spam-labeled entries. An absent class counts as fully
  // identified, mirroring the usual convention for empty denominators.
  double spam_identified_pct() const {
    if (spam_total == 0) return 100.0;
    return 100.0 * static_cast<double>(spam_flagged) /
           static_cast<double>(spam_total);
  }

  double false_negative_pct() const {
    if (spam_total == 0) return 0.0;
    return 100.0 * static_cast<double>(spam_total - spam_flagged) /
           static_cast<double>(spam_total);
  }

  double false_positive_pct() const {
    if (ham_total == 0) return 0.0;
    return 100.0 * static_cast<double>(ham_flagged) /
           static_cast<double>(ham_total);
  }
};

// Full pipeline score for one text against fixed stats and lexicons.
inline double entry_score(const std::string& text, const CorpusStats& stats,
                          const Lexicon& stopword_lexicon,
                          const Lexicon& spam_lexicon) {
  const TokenSequence content =
      remove_stopwords(normalize(text), stopword_lexicon);
  return score(count_spam_tokens(content, spam_lexicon), content.size(), stats)
      .score;
}

namespace detail {

inline void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("threshold must lie in (0, 1)");
}

inline EvalRow tally(const LabeledCorpus& corpus,
                     const std::vector<double>& scores, double threshold) {
  EvalRow row;
  row.threshold = threshold;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const bool flagged = scores[i] >= threshold;
    if (corpus.entries[i].label == Label::Spam) {
      ++row.spam_total;
      if (flagged) ++row.spam_flagged;
    } else {
      ++row.ham_total;
      if (flagged) ++row.ham_flagged;
    }
  }
  return row;
}

inline std::vector<double> score_corpus(const LabeledCorpus& corpus,
                                        const CorpusStats& stats,
                                        const Lexicon& stopword_lexicon,
                                        const Lexicon& spam_lexicon) {
  std::vector<double> scores;
  scores.reserve(corpus.entries.size());
  for (const auto& entry : corpus.entries)
    scores.push_back(
        entry_score(entry.text, stats, stopword_lexicon, spam_lexicon));
  return scores;
}

}  // namespace detail

// Scores every entry against the FIXED supplied stats (nothing learns during
// evaluation) and classifies at the threshold.
inline EvalRow evaluate(const LabeledCorpus& corpus, double threshold,
                        const CorpusStats& stats,
                        const Lexicon& stopword_lexicon,
                        const Lexicon& spam_lexicon) {
  if (corpus.entries.empty()) throw EmptyCorpus();
  detail::check_threshold(threshold);
  return detail::tally(
      corpus, detail::score_corpus(corpus, stats, stopword_lexicon, spam_lexicon),
      threshold);
}

inline std::vector<EvalRow> sweep(const LabeledCorpus& corpus,
                                  const std::vector<double>& thresholds,
                                  const CorpusStats& stats,
                                  const Lexicon& stopword_lexicon,
                                  const Lexicon& spam_lexicon) {
  if (corpus.entries.empty()) throw EmptyCorpus();
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    detail::check_threshold(thresholds[i]);
    if (i > 0 && thresholds[i] <= thresholds[i - 1])
      throw std::invalid_argument("thresholds must be strictly increasing");
  }
  const auto scores =
      detail::score_corpus(corpus, stats, stopword_lexicon, spam_lexicon);
  std::vector<EvalRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) rows.push_back(detail::tally(corpus, scores, t));
  return rows;
}

// JSON lines, one {"text": ..., "label": "ham"|"spam"} object per line.
// Blank lines are skipped.
inline LabeledCorpus load_corpus_jsonl(std::istream& in) {
  LabeledCorpus corpus;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') blank = false;
    if (blank) continue;
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw CorpusParseError(line_number, "not a JSON object");
    LabeledEntry entry;
    try {
      entry.text = j.at("text").get<std::string>();
      entry.label = label_from_name(j.at("label").get<std::string>());
    } catch (const std::exception& e) {
      throw CorpusParseError(line_number, e.what());
    }
    corpus.entries.push_back(std::move(entry));
  }
  return corpus;
}

inline std::string render_table(const std::vector<EvalRow>& rows) {
  std::string out =
      "threshold  spam_identified(%)  false_positive(%)  false_negative(%)\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%9.2f  %18.2f  %17.2f  %17.2f\n",
                  row.threshold, row.spam_identified_pct(),
                  row.false_positive_pct(), row.false_negative_pct());
    out += buf;
  }
  return out;
}

inline void write_csv(const std::vector<EvalRow>& rows, std::ostream& out) {
  out << "threshold,spam_identified_pct,false_positive_pct,false_negative_pct\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%g,%.6f,%.6f,%.6f\n", row.threshold,
                  row.spam_identified_pct(), row.false_positive_pct(),
                  row.false_negative_pct());
    out << buf;
  }
}

}  // namespace bayesgate
