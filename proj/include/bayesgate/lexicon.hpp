#pragma once

#include <cstdint>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bayesgate/textprep.hpp"

namespace bayesgate {

enum class LexiconKind { Stopwords, Spamwords };

inline const char* lexicon_kind_name(LexiconKind k) {
  return k == LexiconKind::Stopwords ? "stopwords" : "spamwords";
}

class MultiTokenTerm : public std::invalid_argument {
 public:
  explicit MultiTokenTerm(std::string_view raw)
      : std::invalid_argument("term does not normalize to a single token: \"" +
                              std::string(raw) + "\"") {}
};

class LexiconParseError : public std::runtime_error {
 public:
  LexiconParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

// An admin-managed set of normalized single-token terms. Values are immutable
// snapshots: mutations return a new lexicon whose revision moved by exactly
// one when something actually changed.
struct Lexicon {
  LexiconKind kind = LexiconKind::Spamwords;
  std::set<std::string, std::less<>> terms;
  std::uint64_t revision = 1;

  bool contains(std::string_view term) const { return terms.contains(term); }
  std::size_t size() const { return terms.size(); }
};

inline Lexicon default_stopwords() {
  Lexicon lex;
  lex.kind = LexiconKind::Stopwords;
  lex.terms = {"am",   "is",   "are",  "he",   "she",  "it",   "you",  "we",
               "they", "i",    "have", "has",  "had",  "and",  "us",   "do",
               "does", "did",  "was",  "were", "a",    "an",   "in",   "on",
               "the",  "to",   "but",  "of",   "from", "them", "also", "their"};
  return lex;
}

inline Lexicon default_spamwords() {
  Lexicon lex;
  lex.kind = LexiconKind::Spamwords;
  lex.terms = {"idiot",      "stupid", "bad",   "awful", "terrible",
               "disgusting", "silly",  "freak", "fool",  "rubbish",
               "ugly"};
  return lex;
}

namespace detail {

// Normalizes a raw term and insists on exactly one token coming out.
inline std::string single_token(std::string_view raw) {
  TokenSequence tokens = normalize(raw);
  if (tokens.size() != 1) throw MultiTokenTerm(raw);
  return std::move(tokens.front());
}

}  // namespace detail

inline Lexicon add_term(Lexicon lex, std::string_view raw_term) {
  std::string term = detail::single_token(raw_term);
  if (lex.terms.insert(std::move(term)).second) ++lex.revision;
  return lex;
}

// Removing a missing term is a no-op with an unchanged revision. The input is
// normalized when that yields a single token, so "BAD!" removes "bad".
inline Lexicon remove_term(Lexicon lex, std::string_view term) {
  TokenSequence tokens = normalize(term);
  const std::string key =
      tokens.size() == 1 ? std::move(tokens.front()) : std::string(term);
  if (lex.terms.erase(key) > 0) ++lex.revision;
  return lex;
}

// Bulk insert counting as a single mutation (one revision step). This backs
// auto-learning, which feeds a whole comment's tokens in at once.
inline Lexicon add_terms(Lexicon lex, const std::vector<std::string>& raw_terms) {
  bool changed = false;
  for (const auto& raw : raw_terms)
    changed |= lex.terms.insert(detail::single_token(raw)).second;
  if (changed) ++lex.revision;
  return lex;
}

inline Lexicon replace_terms(Lexicon lex, const std::vector<std::string>& raw_terms) {
  std::set<std::string, std::less<>> next;
  for (const auto& raw : raw_terms) next.insert(detail::single_token(raw));
  if (next != lex.terms) {
    lex.terms = std::move(next);
    ++lex.revision;
  }
  return lex;
}

// Import format: one term per line, UTF-8. Blank lines are skipped; any other
// line that does not normalize to exactly one token fails with its line
// number.
inline std::vector<std::string> parse_lexicon_lines(std::istream& in) {
  std::vector<std::string> terms;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    TokenSequence tokens = normalize(line);
    if (tokens.empty()) {
      bool blank = true;
      for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') blank = false;
      if (blank) continue;
      throw LexiconParseError(line_number, "no token in \"" + line + "\"");
    }
    if (tokens.size() > 1)
      throw LexiconParseError(line_number,
                              "more than one token in \"" + line + "\"");
    terms.push_back(std::move(tokens.front()));
  }
  return terms;
}

inline std::string serialize_lexicon_lines(const Lexicon& lex) {
  std::string out;
  for (const auto& term : lex.terms) {
    out += term;
    out.push_back('\n');
  }
  return out;
}

}  // namespace bayesgate
