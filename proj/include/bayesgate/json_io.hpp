#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bayesgate/classifier.hpp"
#include "bayesgate/lexicon.hpp"
#include "bayesgate/policy.hpp"

// JSON bindings for the domain types that cross a file or wire boundary.
// Floating-point fields round-trip exactly (nlohmann emits shortest
// representations that parse back to the same double).

namespace bayesgate {

namespace detail {

template <typename T>
void opt_to(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> opt_from(const nlohmann::json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null())
    return it->get<T>();
  return std::nullopt;
}

}  // namespace detail

inline const char* label_name(Label label) {
  return label == Label::Spam ? "spam" : "ham";
}

inline Label label_from_name(const std::string& name) {
  if (name == "ham") return Label::Ham;
  if (name == "spam") return Label::Spam;
  throw std::invalid_argument("unknown label: " + name);
}

inline void to_json(nlohmann::json& j, const CorpusStats& s) {
  j = {{"total_comments", s.total_comments},
       {"spam_labeled", s.spam_labeled},
       {"with_spam_words", s.with_spam_words},
       {"total_content_tokens", s.total_content_tokens}};
}

inline void from_json(const nlohmann::json& j, CorpusStats& s) {
  j.at("total_comments").get_to(s.total_comments);
  j.at("spam_labeled").get_to(s.spam_labeled);
  j.at("with_spam_words").get_to(s.with_spam_words);
  s.total_content_tokens = j.value("total_content_tokens", std::uint64_t{0});
}

inline void to_json(nlohmann::json& j, const ScoreBreakdown& b) {
  j = {{"likelihood", b.likelihood},
       {"prior", b.prior},
       {"evidence", b.evidence},
       {"score", b.score},
       {"spam_token_count", b.spam_token_count},
       {"content_token_count", b.content_token_count}};
}

inline void from_json(const nlohmann::json& j, ScoreBreakdown& b) {
  j.at("likelihood").get_to(b.likelihood);
  j.at("prior").get_to(b.prior);
  j.at("evidence").get_to(b.evidence);
  j.at("score").get_to(b.score);
  j.at("spam_token_count").get_to(b.spam_token_count);
  j.at("content_token_count").get_to(b.content_token_count);
}

inline void to_json(nlohmann::json& j, const FilterConfig& c) {
  j = {{"threshold", c.threshold},
       {"autolearn_enabled", c.autolearn_enabled},
       {"autolearn_threshold", c.autolearn_threshold}};
}

inline void from_json(const nlohmann::json& j, FilterConfig& c) {
  c.threshold = j.value("threshold", c.threshold);
  c.autolearn_enabled = j.value("autolearn_enabled", c.autolearn_enabled);
  c.autolearn_threshold = j.value("autolearn_threshold", c.autolearn_threshold);
}

inline void to_json(nlohmann::json& j, const PolicyConfig& c) {
  j = {{"min_interval_seconds", c.min_interval_seconds},
       {"block_after_spam_count", c.block_after_spam_count},
       {"spam_window_hours", c.spam_window_hours},
       {"block_duration_hours", c.block_duration_hours}};
}

inline void from_json(const nlohmann::json& j, PolicyConfig& c) {
  c.min_interval_seconds = j.value("min_interval_seconds", c.min_interval_seconds);
  c.block_after_spam_count = j.value("block_after_spam_count", c.block_after_spam_count);
  c.spam_window_hours = j.value("spam_window_hours", c.spam_window_hours);
  c.block_duration_hours = j.value("block_duration_hours", c.block_duration_hours);
}

inline void to_json(nlohmann::json& j, const Identity& id) {
  j = {{"name", id.name}, {"email", id.email}};
  detail::opt_to(j, "surname", id.surname);
  detail::opt_to(j, "age", id.age);
}

inline void from_json(const nlohmann::json& j, Identity& id) {
  j.at("name").get_to(id.name);
  j.at("email").get_to(id.email);
  id.surname = detail::opt_from<std::string>(j, "surname");
  id.age = detail::opt_from<int>(j, "age");
}

inline void to_json(nlohmann::json& j, const IpRecord& r) {
  j = {{"ip", r.ip}, {"spam_events", r.spam_events}};
  detail::opt_to(j, "last_submission", r.last_submission);
  detail::opt_to(j, "blocked_until", r.blocked_until);
}

inline void from_json(const nlohmann::json& j, IpRecord& r) {
  j.at("ip").get_to(r.ip);
  j.at("spam_events").get_to(r.spam_events);
  r.last_submission = detail::opt_from<Timestamp>(j, "last_submission");
  r.blocked_until = detail::opt_from<Timestamp>(j, "blocked_until");
}

inline void to_json(nlohmann::json& j, const Lexicon& lex) {
  j = {{"kind", lexicon_kind_name(lex.kind)},
       {"revision", lex.revision},
       {"terms", lex.terms}};
}

inline void from_json(const nlohmann::json& j, Lexicon& lex) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "stopwords")
    lex.kind = LexiconKind::Stopwords;
  else if (kind == "spamwords")
    lex.kind = LexiconKind::Spamwords;
  else
    throw std::invalid_argument("unknown lexicon kind: " + kind);
  j.at("revision").get_to(lex.revision);
  lex.terms.clear();
  for (const auto& t : j.at("terms")) lex.terms.insert(t.get<std::string>());
}

}  // namespace bayesgate
