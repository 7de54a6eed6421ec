#pragma once

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "bayesgate/classifier.hpp"
#include "bayesgate/config.hpp"
#include "bayesgate/json_io.hpp"
#include "bayesgate/lexicon.hpp"
#include "bayesgate/policy.hpp"
#include "bayesgate/textprep.hpp"

namespace bayesgate {

class StorageFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptLog : public std::runtime_error {
 public:
  CorruptLog(std::size_t line, const std::string& what)
      : std::runtime_error("event log line " + std::to_string(line) + ": " +
                           what),
        line_number(line) {}
  std::size_t line_number;
};

class UnknownComment : public std::runtime_error {
 public:
  explicit UnknownComment(std::uint64_t id)
      : std::runtime_error("no comment with id " + std::to_string(id)) {}
};

enum class CommentStatus { Posted, Quarantined, Rejected, ApprovedFromQuarantine };

inline const char* status_name(CommentStatus s) {
  switch (s) {
    case CommentStatus::Posted: return "posted";
    case CommentStatus::Quarantined: return "quarantined";
    case CommentStatus::Rejected: return "rejected";
    case CommentStatus::ApprovedFromQuarantine: return "approved_from_quarantine";
  }
  return "posted";
}

inline std::optional<CommentStatus> status_from_name(const std::string& name) {
  if (name == "posted") return CommentStatus::Posted;
  if (name == "quarantined") return CommentStatus::Quarantined;
  if (name == "rejected") return CommentStatus::Rejected;
  if (name == "approved_from_quarantine") return CommentStatus::ApprovedFromQuarantine;
  return std::nullopt;
}

// Posted and approved comments are the only ones the public read path shows.
inline bool publicly_visible(CommentStatus s) {
  return s == CommentStatus::Posted || s == CommentStatus::ApprovedFromQuarantine;
}

struct StoredComment {
  std::uint64_t id = 0;
  Identity identity;
  std::string ip;
  Timestamp submitted_at = 0;
  std::string raw_text;
  TokenSequence content_tokens;
  FrequencyMap frequency;
  ScoreBreakdown breakdown;
  CommentStatus status = CommentStatus::Posted;
  Label label = Label::Ham;
};

inline void to_json(nlohmann::json& j, const StoredComment& c) {
  j = {{"id", c.id},
       {"identity", c.identity},
       {"ip", c.ip},
       {"submitted_at", c.submitted_at},
       {"raw_text", c.raw_text},
       {"content_tokens", c.content_tokens},
       {"frequency", c.frequency},
       {"breakdown", c.breakdown},
       {"status", status_name(c.status)},
       {"label", label_name(c.label)}};
}

inline void from_json(const nlohmann::json& j, StoredComment& c) {
  j.at("id").get_to(c.id);
  j.at("identity").get_to(c.identity);
  j.at("ip").get_to(c.ip);
  j.at("submitted_at").get_to(c.submitted_at);
  j.at("raw_text").get_to(c.raw_text);
  j.at("content_tokens").get_to(c.content_tokens);
  c.frequency.clear();
  for (const auto& [k, v] : j.at("frequency").items())
    c.frequency[k] = v.get<std::uint64_t>();
  j.at("breakdown").get_to(c.breakdown);
  const auto status = status_from_name(j.at("status").get<std::string>());
  if (!status) throw std::invalid_argument("unknown comment status");
  c.status = *status;
  c.label = label_from_name(j.at("label").get<std::string>());
}

inline std::string to_iso8601(Timestamp t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

inline std::optional<Timestamp> from_iso8601(const std::string& s) {
  std::tm tm{};
  int y, mo, d, h, mi, sec;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi,
                  &sec) != 6)
    return std::nullopt;
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = sec;
  return static_cast<Timestamp>(timegm(&tm));
}

enum class EventKind { CommentIngested, LabelChanged, LexiconChanged, ConfigChanged, IpEvent };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::CommentIngested: return "CommentIngested";
    case EventKind::LabelChanged: return "LabelChanged";
    case EventKind::LexiconChanged: return "LexiconChanged";
    case EventKind::ConfigChanged: return "ConfigChanged";
    case EventKind::IpEvent: return "IpEvent";
  }
  return "CommentIngested";
}

inline std::optional<EventKind> event_kind_from_name(const std::string& name) {
  if (name == "CommentIngested") return EventKind::CommentIngested;
  if (name == "LabelChanged") return EventKind::LabelChanged;
  if (name == "LexiconChanged") return EventKind::LexiconChanged;
  if (name == "ConfigChanged") return EventKind::ConfigChanged;
  if (name == "IpEvent") return EventKind::IpEvent;
  return std::nullopt;
}

// Durable system of record: an append-only JSONL event log (events.bgl) plus
// an atomically written snapshot (snapshot.json). All state is reproducible
// by replaying the log; the snapshot only short-circuits that. One writer per
// deployment; readers get copies taken under a shared lock.
class Store {
 public:
  explicit Store(const std::filesystem::path& dir,
                 FilterConfig boot_filter = {}, PolicyConfig boot_policy = {})
      : dir_(dir), boot_filter_(boot_filter), boot_policy_(boot_policy) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
      throw StorageFailure("cannot create storage directory " + dir_.string() +
                           ": " + ec.message());
    reset_state();
    load_snapshot();
    replay_log();
    log_ = std::fopen(log_path().c_str(), "ab");
    if (!log_)
      throw StorageFailure("cannot open event log " + log_path().string() +
                           ": " + std::strerror(errno));
  }

  ~Store() {
    if (log_) std::fclose(log_);
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  std::filesystem::path log_path() const { return dir_ / "events.bgl"; }
  std::filesystem::path snapshot_path() const { return dir_ / "snapshot.json"; }

  // ---- mutations (serialized by the exclusive lock) ----

  std::uint64_t ingest_comment(const Identity& identity, const std::string& ip,
                               Timestamp at, const std::string& raw_text,
                               TokenSequence content_tokens,
                               FrequencyMap frequency,
                               const ScoreBreakdown& breakdown,
                               Verdict verdict) {
    std::unique_lock lock(mu_);
    StoredComment c;
    c.id = st_.next_comment_id;
    c.identity = identity;
    c.ip = ip;
    c.submitted_at = at;
    c.raw_text = raw_text;
    c.content_tokens = std::move(content_tokens);
    c.frequency = std::move(frequency);
    c.breakdown = breakdown;
    c.label = label_for(verdict);
    c.status = verdict == Verdict::Spam ? CommentStatus::Quarantined
                                        : CommentStatus::Posted;
    append_event(EventKind::CommentIngested, c, at);
    apply_ingest(st_, c);
    return c.id;
  }

  CorpusStats relabel(std::uint64_t comment_id, Label new_label, Timestamp at) {
    std::unique_lock lock(mu_);
    if (!st_.comments.contains(comment_id)) throw UnknownComment(comment_id);
    append_event(EventKind::LabelChanged,
                 {{"comment_id", comment_id}, {"label", label_name(new_label)}},
                 at);
    apply_relabel(st_, comment_id, new_label);
    return st_.stats;
  }

  bool lexicon_add(LexiconKind kind, std::string_view raw_term, Timestamp at) {
    std::unique_lock lock(mu_);
    const std::string term = detail::single_token(raw_term);  // may throw
    if (target(kind).contains(term)) return false;
    append_event(EventKind::LexiconChanged,
                 {{"lexicon", lexicon_kind_name(kind)},
                  {"op", "add"},
                  {"terms", std::vector<std::string>{term}}},
                 at);
    target(kind) = add_term(std::move(target(kind)), term);
    return true;
  }

  bool lexicon_remove(LexiconKind kind, std::string_view term, Timestamp at) {
    std::unique_lock lock(mu_);
    TokenSequence toks = normalize(term);
    const std::string key =
        toks.size() == 1 ? std::move(toks.front()) : std::string(term);
    if (!target(kind).contains(key)) return false;
    append_event(EventKind::LexiconChanged,
                 {{"lexicon", lexicon_kind_name(kind)},
                  {"op", "remove"},
                  {"terms", std::vector<std::string>{key}}},
                 at);
    target(kind) = remove_term(std::move(target(kind)), key);
    return true;
  }

  // Bulk insert, one revision step. Backs auto-learning.
  bool lexicon_add_many(LexiconKind kind, const std::vector<std::string>& terms,
                        Timestamp at) {
    std::unique_lock lock(mu_);
    Lexicon next = add_terms(target(kind), terms);
    if (next.revision == target(kind).revision) return false;
    std::vector<std::string> fresh;
    for (const auto& t : next.terms)
      if (!target(kind).contains(t)) fresh.push_back(t);
    append_event(EventKind::LexiconChanged,
                 {{"lexicon", lexicon_kind_name(kind)},
                  {"op", "add_many"},
                  {"terms", fresh}},
                 at);
    target(kind) = std::move(next);
    return true;
  }

  bool lexicon_replace(LexiconKind kind, const std::vector<std::string>& terms,
                       Timestamp at) {
    std::unique_lock lock(mu_);
    Lexicon next = replace_terms(target(kind), terms);
    if (next.revision == target(kind).revision) return false;
    append_event(EventKind::LexiconChanged,
                 {{"lexicon", lexicon_kind_name(kind)},
                  {"op", "replace"},
                  {"terms", std::vector<std::string>(next.terms.begin(),
                                                     next.terms.end())}},
                 at);
    target(kind) = std::move(next);
    return true;
  }

  void put_ip(const IpRecord& record, Timestamp at) {
    std::unique_lock lock(mu_);
    append_event(EventKind::IpEvent, record, at);
    st_.ips[record.ip] = record;
  }

  void update_config(const FilterConfig& filter, const PolicyConfig& policy,
                     Timestamp at) {
    std::unique_lock lock(mu_);
    append_event(EventKind::ConfigChanged,
                 {{"filter", filter}, {"policy", policy}}, at);
    st_.filter = filter;
    st_.policy = policy;
    st_.config_overridden = true;
  }

  // ---- reads (shared lock, copies out) ----

  CorpusStats stats() const {
    std::shared_lock lock(mu_);
    return st_.stats;
  }

  Lexicon lexicon(LexiconKind kind) const {
    std::shared_lock lock(mu_);
    return kind == LexiconKind::Stopwords ? st_.stopwords : st_.spamwords;
  }

  Lexicon stopwords() const { return lexicon(LexiconKind::Stopwords); }
  Lexicon spamwords() const { return lexicon(LexiconKind::Spamwords); }

  FilterConfig filter_config() const {
    std::shared_lock lock(mu_);
    return st_.filter;
  }

  PolicyConfig policy_config() const {
    std::shared_lock lock(mu_);
    return st_.policy;
  }

  IpRecord ip_record(const std::string& ip) const {
    std::shared_lock lock(mu_);
    if (auto it = st_.ips.find(ip); it != st_.ips.end()) return it->second;
    IpRecord fresh;
    fresh.ip = ip;
    return fresh;
  }

  std::optional<StoredComment> comment(std::uint64_t id) const {
    std::shared_lock lock(mu_);
    if (auto it = st_.comments.find(id); it != st_.comments.end())
      return it->second;
    return std::nullopt;
  }

  // Newest first. `total_out` receives the filtered count before paging.
  std::vector<StoredComment> list_comments(std::optional<CommentStatus> status,
                                           bool public_only, std::size_t offset,
                                           std::size_t limit,
                                           std::size_t* total_out = nullptr) const {
    std::shared_lock lock(mu_);
    std::vector<StoredComment> page;
    std::size_t matched = 0;
    for (auto it = st_.comments.rbegin(); it != st_.comments.rend(); ++it) {
      const StoredComment& c = it->second;
      if (public_only && !publicly_visible(c.status)) continue;
      if (status && c.status != *status) continue;
      if (matched >= offset && page.size() < limit) page.push_back(c);
      ++matched;
    }
    if (total_out) *total_out = matched;
    return page;
  }

  std::uint64_t last_seq() const {
    std::shared_lock lock(mu_);
    return last_seq_;
  }

  // Full state as one JSON document, the exact shape snapshot.json uses.
  nlohmann::json state_json() const {
    std::shared_lock lock(mu_);
    return build_state_json();
  }

  void save_snapshot() {
    std::unique_lock lock(mu_);
    const std::string body = build_state_json().dump(2);
    const auto tmp = dir_ / "snapshot.json.tmp";
    FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f)
      throw StorageFailure("cannot write snapshot: " + std::string(std::strerror(errno)));
    const bool ok = std::fwrite(body.data(), 1, body.size(), f) == body.size() &&
                    std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
    std::fclose(f);
    if (!ok) throw StorageFailure("snapshot write failed");
    std::error_code ec;
    std::filesystem::rename(tmp, snapshot_path(), ec);
    if (ec) throw StorageFailure("snapshot rename failed: " + ec.message());
  }

 private:
  struct State {
    CorpusStats stats;
    Lexicon stopwords;
    Lexicon spamwords;
    FilterConfig filter;
    PolicyConfig policy;
    bool config_overridden = false;
    std::map<std::uint64_t, StoredComment> comments;
    std::map<std::string, IpRecord> ips;
    std::uint64_t next_comment_id = 1;
  };

  Lexicon& target(LexiconKind kind) {
    return kind == LexiconKind::Stopwords ? st_.stopwords : st_.spamwords;
  }

  void reset_state() {
    st_ = State{};
    st_.stopwords = default_stopwords();
    st_.spamwords = default_spamwords();
    st_.filter = boot_filter_;
    st_.policy = boot_policy_;
    last_seq_ = 0;
    snapshot_seq_ = 0;
  }

  static void apply_ingest(State& st, const StoredComment& c) {
    st.comments[c.id] = c;
    st.stats.total_comments += 1;
    if (c.label == Label::Spam) st.stats.spam_labeled += 1;
    if (c.breakdown.spam_token_count > 0) st.stats.with_spam_words += 1;
    st.stats.total_content_tokens += c.breakdown.content_token_count;
    if (c.id >= st.next_comment_id) st.next_comment_id = c.id + 1;
  }

  static void apply_relabel(State& st, std::uint64_t id, Label new_label) {
    StoredComment& c = st.comments.at(id);
    if (c.label == new_label) return;
    if (new_label == Label::Ham) {
      st.stats.spam_labeled -= 1;
      c.status = CommentStatus::ApprovedFromQuarantine;
    } else {
      st.stats.spam_labeled += 1;
      c.status = CommentStatus::Rejected;
    }
    c.label = new_label;
  }

  static void apply_lexicon_change(State& st, const nlohmann::json& payload) {
    const auto name = payload.at("lexicon").get<std::string>();
    Lexicon& lex = name == "stopwords" ? st.stopwords : st.spamwords;
    const auto op = payload.at("op").get<std::string>();
    const auto terms = payload.at("terms").get<std::vector<std::string>>();
    if (op == "add") {
      lex = add_term(std::move(lex), terms.at(0));
    } else if (op == "remove") {
      lex = remove_term(std::move(lex), terms.at(0));
    } else if (op == "add_many") {
      lex = add_terms(std::move(lex), terms);
    } else if (op == "replace") {
      lex = replace_terms(std::move(lex), terms);
    } else {
      throw std::invalid_argument("unknown lexicon op: " + op);
    }
  }

  void apply_event(EventKind kind, const nlohmann::json& payload,
                   std::size_t line) {
    try {
      switch (kind) {
        case EventKind::CommentIngested:
          apply_ingest(st_, payload.get<StoredComment>());
          break;
        case EventKind::LabelChanged: {
          const auto id = payload.at("comment_id").get<std::uint64_t>();
          if (!st_.comments.contains(id))
            throw std::invalid_argument("label change for unknown comment " +
                                        std::to_string(id));
          apply_relabel(st_, id,
                        label_from_name(payload.at("label").get<std::string>()));
          break;
        }
        case EventKind::LexiconChanged:
          apply_lexicon_change(st_, payload);
          break;
        case EventKind::ConfigChanged:
          payload.at("filter").get_to(st_.filter);
          payload.at("policy").get_to(st_.policy);
          st_.config_overridden = true;
          break;
        case EventKind::IpEvent: {
          auto rec = payload.get<IpRecord>();
          st_.ips[rec.ip] = std::move(rec);
          break;
        }
      }
    } catch (const CorruptLog&) {
      throw;
    } catch (const std::exception& e) {
      throw CorruptLog(line, e.what());
    }
  }

  void load_snapshot() {
    std::ifstream in(snapshot_path());
    if (!in) return;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
      throw StorageFailure("snapshot is not valid JSON: " +
                           snapshot_path().string());
    try {
      snapshot_seq_ = j.at("last_seq").get<std::uint64_t>();
      st_.next_comment_id = j.at("next_comment_id").get<std::uint64_t>();
      j.at("stats").get_to(st_.stats);
      j.at("lexicons").at("stopwords").get_to(st_.stopwords);
      j.at("lexicons").at("spamwords").get_to(st_.spamwords);
      st_.config_overridden = j.at("config_overridden").get<bool>();
      if (st_.config_overridden) {
        j.at("filter").get_to(st_.filter);
        j.at("policy").get_to(st_.policy);
      }
      st_.comments.clear();
      for (const auto& cj : j.at("comments")) {
        auto c = cj.get<StoredComment>();
        st_.comments[c.id] = std::move(c);
      }
      st_.ips.clear();
      for (const auto& rj : j.at("ips")) {
        auto r = rj.get<IpRecord>();
        st_.ips[r.ip] = std::move(r);
      }
    } catch (const std::exception& e) {
      throw StorageFailure("snapshot unreadable: " + std::string(e.what()));
    }
    last_seq_ = snapshot_seq_;
  }

  void replay_log() {
    std::ifstream in(log_path());
    if (!in) {
      // a snapshot without its log has lost the source of truth
      if (snapshot_seq_ > 0)
        throw StorageFailure("snapshot is ahead of the event log");
      return;
    }
    std::string line;
    std::size_t line_number = 0;
    std::uint64_t expected_seq = 1;
    while (std::getline(in, line)) {
      ++line_number;
      const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw CorruptLog(line_number, "not a JSON object");
      std::uint64_t seq = 0;
      std::string kind_name;
      try {
        seq = j.at("seq").get<std::uint64_t>();
        kind_name = j.at("kind").get<std::string>();
        if (!from_iso8601(j.at("at").get<std::string>()))
          throw std::invalid_argument("bad timestamp");
        if (!j.contains("payload")) throw std::invalid_argument("no payload");
      } catch (const std::exception& e) {
        throw CorruptLog(line_number, e.what());
      }
      if (seq != expected_seq)
        throw CorruptLog(line_number,
                         "sequence " + std::to_string(seq) + ", expected " +
                             std::to_string(expected_seq));
      const auto kind = event_kind_from_name(kind_name);
      if (!kind) throw CorruptLog(line_number, "unknown kind: " + kind_name);
      if (seq > snapshot_seq_) apply_event(*kind, j.at("payload"), line_number);
      ++expected_seq;
    }
    const std::uint64_t log_last = expected_seq - 1;
    if (snapshot_seq_ > log_last)
      throw StorageFailure("snapshot is ahead of the event log");
    last_seq_ = log_last;
  }

  // Durably appends one event. A failed write truncates back to the previous
  // boundary so the log never holds a half-written line.
  std::uint64_t append_event(EventKind kind, const nlohmann::json& payload,
                             Timestamp at) {
    nlohmann::json j = {{"seq", last_seq_ + 1},
                        {"kind", event_kind_name(kind)},
                        {"at", to_iso8601(at)},
                        {"payload", payload}};
    std::string line = j.dump();
    line.push_back('\n');
    std::fseek(log_, 0, SEEK_END);
    const long old_size = std::ftell(log_);
    if (std::fwrite(line.data(), 1, line.size(), log_) != line.size() ||
        std::fflush(log_) != 0) {
      std::fflush(log_);
      if (old_size >= 0) {
        if (::ftruncate(fileno(log_), old_size) != 0)
          std::perror("bayesgate: log truncate after failed append");
        std::fseek(log_, 0, SEEK_END);
      }
      throw StorageFailure("event append failed: " +
                           std::string(std::strerror(errno)));
    }
    ::fsync(fileno(log_));
    return ++last_seq_;
  }

  nlohmann::json build_state_json() const {
    nlohmann::json comments = nlohmann::json::array();
    for (const auto& [id, c] : st_.comments) comments.push_back(c);
    nlohmann::json ips = nlohmann::json::array();
    for (const auto& [ip, rec] : st_.ips) ips.push_back(rec);
    return {{"last_seq", last_seq_},
            {"next_comment_id", st_.next_comment_id},
            {"stats", st_.stats},
            {"lexicons",
             {{"stopwords", st_.stopwords}, {"spamwords", st_.spamwords}}},
            {"filter", st_.filter},
            {"policy", st_.policy},
            {"config_overridden", st_.config_overridden},
            {"comments", comments},
            {"ips", ips}};
  }

  mutable std::shared_mutex mu_;
  State st_;
  std::uint64_t last_seq_ = 0;
  std::uint64_t snapshot_seq_ = 0;
  std::filesystem::path dir_;
  FilterConfig boot_filter_;
  PolicyConfig boot_policy_;
  FILE* log_ = nullptr;
};

}  // namespace bayesgate
