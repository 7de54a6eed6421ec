#pragma once

#include <cstdint>
#include <ctime>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "bayesgate/classifier.hpp"
#include "bayesgate/config.hpp"
#include "bayesgate/json_io.hpp"
#include "bayesgate/policy.hpp"
#include "bayesgate/store.hpp"
#include "bayesgate/textprep.hpp"

namespace bayesgate {

// Breakdown for the wire: scores travel as fixed 12-fractional-digit decimal
// strings, never as floats.
inline nlohmann::json wire_breakdown(const ScoreBreakdown& b) {
  return {{"likelihood", format_score(b.likelihood)},
          {"prior", format_score(b.prior)},
          {"evidence", format_score(b.evidence)},
          {"score", format_score(b.score)},
          {"spam_token_count", b.spam_token_count},
          {"content_token_count", b.content_token_count}};
}

// HTTP moderation API over a Store. Submissions run the whole pipeline:
// identity check, IP block and rate gates, text preparation, scoring against
// the pre-ingest stats snapshot, persistence, IP bookkeeping, optional
// auto-learning. Admin routes (bearer token) cover moderation, lexicons,
// config and stats.
class ModerationService {
 public:
  ModerationService(Store& store, AppConfig config,
                    std::function<Timestamp()> clock = nullptr)
      : store_(store),
        cfg_(std::move(config)),
        clock_(clock ? std::move(clock)
                     : [] { return static_cast<Timestamp>(std::time(nullptr)); }) {
    install_routes();
  }

  // Binds the configured listen address. False on failure (port in use, bad
  // host or address), so callers can map it to their own exit code.
  bool bind() {
    std::string host;
    int port = 0;
    try {
      std::tie(host, port) = split_listen_address(cfg_.listen_address);
    } catch (const ConfigError&) {
      return false;
    }
    if (!server_.bind_to_port(host, port)) return false;
    host_ = host;
    port_ = port;
    return true;
  }

  // Binds an ephemeral port; returns it (or -1). Test entry point.
  int bind_any(const std::string& host = "127.0.0.1") {
    port_ = server_.bind_to_any_port(host);
    host_ = host;
    return port_;
  }

  bool run() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  bool is_running() const { return server_.is_running(); }
  int port() const { return port_; }
  const std::string& host() const { return host_; }

 private:
  static void respond(httplib::Response& res, int status,
                      const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static nlohmann::json error_body(const char* code, const std::string& message) {
    return {{"error", code}, {"message", message}};
  }

  std::string source_ip(const httplib::Request& req) const {
    if (!cfg_.trusted_forward_header.empty()) {
      if (auto value = req.get_header_value(cfg_.trusted_forward_header);
          !value.empty()) {
        const auto comma = value.find(',');
        if (comma != std::string::npos) value.resize(comma);
        return std::string(detail::trim(value));
      }
    }
    return req.remote_addr;
  }

  bool admin_authorized(const httplib::Request& req) const {
    if (cfg_.admin_token.empty()) return false;
    return req.get_header_value("Authorization") == "Bearer " + cfg_.admin_token;
  }

  bool require_admin(const httplib::Request& req, httplib::Response& res) const {
    if (admin_authorized(req)) return true;
    respond(res, 401, error_body("Unauthorized", "admin token required"));
    return false;
  }

  // page/per_page -> (offset, limit); nullopt renders a 400 itself.
  std::optional<std::pair<std::size_t, std::size_t>> pagination(
      const httplib::Request& req, httplib::Response& res) const {
    long page = 1, per_page = 20;
    try {
      if (req.has_param("page")) page = std::stol(req.get_param_value("page"));
      if (req.has_param("per_page"))
        per_page = std::stol(req.get_param_value("per_page"));
    } catch (const std::exception&) {
      respond(res, 400, error_body("BadPagination", "page and per_page must be integers"));
      return std::nullopt;
    }
    if (page < 1 || per_page < 1 || per_page > 100) {
      respond(res, 400,
              error_body("BadPagination",
                         "page must be >= 1 and per_page in [1, 100]"));
      return std::nullopt;
    }
    return std::make_pair(static_cast<std::size_t>(page - 1) *
                              static_cast<std::size_t>(per_page),
                          static_cast<std::size_t>(per_page));
  }

  // The public view never includes the email address or the score.
  static nlohmann::json public_comment_json(const StoredComment& c) {
    nlohmann::json j = {{"id", c.id},
                        {"name", c.identity.name},
                        {"text", c.raw_text},
                        {"submitted_at", to_iso8601(c.submitted_at)},
                        {"status", status_name(c.status)}};
    if (c.identity.surname) j["surname"] = *c.identity.surname;
    return j;
  }

  static nlohmann::json admin_comment_json(const StoredComment& c) {
    return {{"id", c.id},
            {"identity", c.identity},
            {"ip", c.ip},
            {"submitted_at", to_iso8601(c.submitted_at)},
            {"text", c.raw_text},
            {"status", status_name(c.status)},
            {"label", label_name(c.label)},
            {"score", format_score(c.breakdown.score)},
            {"breakdown", wire_breakdown(c.breakdown)}};
  }

  void handle_submission(const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
      return respond(res, 400, error_body("BadRequest", "body must be a JSON object"));

    std::string text;
    std::string name, email;
    std::optional<std::string> surname;
    std::optional<int> age;
    try {
      text = body.value("text", "");
      name = body.value("name", "");
      email = body.value("email", "");
      surname = detail::opt_from<std::string>(body, "surname");
      age = detail::opt_from<int>(body, "age");
    } catch (const nlohmann::json::exception& e) {
      return respond(res, 400, error_body("BadRequest", e.what()));
    }
    if (detail::trim(text).empty())
      return respond(res, 400, error_body("EmptyText", "text must not be empty"));

    Identity identity;
    try {
      identity = validate_identity(
          name,
          surname ? std::optional<std::string_view>(*surname) : std::nullopt,
          age, email);
    } catch (const EmptyName& e) {
      return respond(res, 422, error_body("EmptyName", e.what()));
    } catch (const MalformedEmail& e) {
      return respond(res, 422, error_body("MalformedEmail", e.what()));
    } catch (const InvalidAge& e) {
      return respond(res, 422, error_body("InvalidAge", e.what()));
    }

    const std::string ip = source_ip(req);

    // One consistent snapshot per request; scoring sees the corpus as it was
    // before this comment is counted.
    std::scoped_lock pipeline(pipeline_mu_);
    const Timestamp now = clock_();
    const IpRecord record = store_.ip_record(ip);
    if (is_blocked(record, now)) {
      return respond(res, 403,
                     error_body("IpBlocked",
                                "blocked until " + to_iso8601(*record.blocked_until)));
    }
    const PolicyConfig policy = store_.policy_config();
    if (auto wait = check_rate(record, now, policy)) {
      res.set_header("Retry-After", std::to_string(*wait));
      nlohmann::json err = error_body("TooSoon", "submission interval not met");
      err["retry_after_seconds"] = *wait;
      return respond(res, 429, err);
    }

    const CorpusStats stats = store_.stats();
    const FilterConfig filter = store_.filter_config();
    const Lexicon stopword_lexicon = store_.stopwords();
    const Lexicon spam_lexicon = store_.spamwords();

    TokenSequence content = remove_stopwords(normalize(text), stopword_lexicon);
    FrequencyMap frequency = frequency_map(content);
    const std::uint64_t spam_tokens = count_spam_tokens(content, spam_lexicon);
    const ScoreBreakdown breakdown = score(spam_tokens, content.size(), stats);
    const Verdict verdict = classify(breakdown, filter);

    std::uint64_t id = 0;
    try {
      id = store_.ingest_comment(identity, ip, now, text, content, frequency,
                                 breakdown, verdict);
      store_.put_ip(record_verdict(record, verdict, now, policy), now);
      if (should_autolearn(breakdown, filter))
        store_.lexicon_add_many(LexiconKind::Spamwords, content, now);
    } catch (const StorageFailure& e) {
      return respond(res, 500, error_body("StorageFailure", e.what()));
    }

    const bool spam = verdict == Verdict::Spam;
    respond(res, spam ? 202 : 201,
            {{"comment_id", id},
             {"verdict", spam ? "quarantined" : "posted"},
             {"score", format_score(breakdown.score)}});
  }

  void handle_list(const httplib::Request& req, httplib::Response& res,
                   bool admin) {
    std::optional<CommentStatus> status;
    if (req.has_param("status")) {
      const std::string wanted = req.get_param_value("status");
      status = status_from_name(wanted);
      if (!status)
        return respond(res, 400, error_body("BadStatus", "unknown status: " + wanted));
      if (!admin && !publicly_visible(*status))
        return respond(res, 400,
                       error_body("BadStatus", "status not listable here: " + wanted));
    }
    const auto page = pagination(req, res);
    if (!page) return;
    std::size_t total = 0;
    const auto comments =
        store_.list_comments(status, !admin, page->first, page->second, &total);
    nlohmann::json items = nlohmann::json::array();
    for (const auto& c : comments)
      items.push_back(admin ? admin_comment_json(c) : public_comment_json(c));
    respond(res, 200, {{"total", total}, {"items", items}});
  }

  void handle_moderate(const httplib::Request& req, httplib::Response& res,
                       bool approve) {
    if (!require_admin(req, res)) return;
    std::uint64_t id = 0;
    try {
      id = std::stoull(req.matches[1].str());
    } catch (const std::exception&) {
      return respond(res, 404, error_body("UnknownComment", "id out of range"));
    }
    const auto existing = store_.comment(id);
    if (!existing)
      return respond(res, 404, error_body("UnknownComment", "no comment " + std::to_string(id)));
    const CommentStatus status = existing->status;
    const bool valid =
        approve ? status == CommentStatus::Quarantined
                : (status == CommentStatus::Posted ||
                   status == CommentStatus::ApprovedFromQuarantine);
    if (!valid)
      return respond(res, 409,
                     error_body("InvalidTransition",
                                std::string(approve ? "approve" : "reject") +
                                    " not valid from status " +
                                    status_name(status)));
    try {
      store_.relabel(id, approve ? Label::Ham : Label::Spam, clock_());
    } catch (const StorageFailure& e) {
      return respond(res, 500, error_body("StorageFailure", e.what()));
    }
    respond(res, 200, admin_comment_json(*store_.comment(id)));
  }

  void handle_lexicon_get(const httplib::Request& req, httplib::Response& res,
                          LexiconKind kind) {
    if (!require_admin(req, res)) return;
    respond(res, 200, nlohmann::json(store_.lexicon(kind)));
  }

  void handle_lexicon_put(const httplib::Request& req, httplib::Response& res,
                          LexiconKind kind) {
    if (!require_admin(req, res)) return;
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("terms") ||
        !body.at("terms").is_array())
      return respond(res, 400,
                     error_body("BadRequest", "body must carry a terms array"));
    std::vector<std::string> terms;
    for (const auto& t : body.at("terms")) {
      if (!t.is_string())
        return respond(res, 400, error_body("BadRequest", "terms must be strings"));
      terms.push_back(t.get<std::string>());
    }
    try {
      store_.lexicon_replace(kind, terms, clock_());
    } catch (const MultiTokenTerm& e) {
      return respond(res, 400, error_body("MultiTokenTerm", e.what()));
    } catch (const StorageFailure& e) {
      return respond(res, 500, error_body("StorageFailure", e.what()));
    }
    respond(res, 200, nlohmann::json(store_.lexicon(kind)));
  }

  void handle_config_get(const httplib::Request& req, httplib::Response& res) {
    if (!require_admin(req, res)) return;
    respond(res, 200,
            {{"filter", store_.filter_config()}, {"policy", store_.policy_config()}});
  }

  void handle_config_put(const httplib::Request& req, httplib::Response& res) {
    if (!require_admin(req, res)) return;
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
      return respond(res, 400, error_body("BadRequest", "body must be a JSON object"));
    FilterConfig filter = store_.filter_config();
    PolicyConfig policy = store_.policy_config();
    try {
      if (body.contains("filter")) body.at("filter").get_to(filter);
      if (body.contains("policy")) body.at("policy").get_to(policy);
    } catch (const nlohmann::json::exception& e) {
      return respond(res, 400, error_body("BadRequest", e.what()));
    }
    if (auto err = validate(filter))
      return respond(res, 400, error_body("BadConfig", *err));
    if (auto err = validate(policy))
      return respond(res, 400, error_body("BadConfig", *err));
    try {
      store_.update_config(filter, policy, clock_());
    } catch (const StorageFailure& e) {
      return respond(res, 500, error_body("StorageFailure", e.what()));
    }
    respond(res, 200, {{"filter", filter}, {"policy", policy}});
  }

  void install_routes() {
    server_.Post("/api/v1/comments",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle_submission(req, res);
                 });
    server_.Get("/api/v1/comments",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_list(req, res, /*admin=*/false);
                });
    server_.Get("/api/v1/admin/comments",
                [this](const httplib::Request& req, httplib::Response& res) {
                  if (!require_admin(req, res)) return;
                  handle_list(req, res, /*admin=*/true);
                });
    server_.Post(R"(/api/v1/admin/comments/(\d+)/approve)",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle_moderate(req, res, /*approve=*/true);
                 });
    server_.Post(R"(/api/v1/admin/comments/(\d+)/reject)",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle_moderate(req, res, /*approve=*/false);
                 });
    server_.Get("/api/v1/admin/lexicons/stopwords",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_lexicon_get(req, res, LexiconKind::Stopwords);
                });
    server_.Get("/api/v1/admin/lexicons/spamwords",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_lexicon_get(req, res, LexiconKind::Spamwords);
                });
    server_.Put("/api/v1/admin/lexicons/stopwords",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_lexicon_put(req, res, LexiconKind::Stopwords);
                });
    server_.Put("/api/v1/admin/lexicons/spamwords",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_lexicon_put(req, res, LexiconKind::Spamwords);
                });
    server_.Get("/api/v1/admin/config",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_config_get(req, res);
                });
    server_.Put("/api/v1/admin/config",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_config_put(req, res);
                });
    server_.Get("/api/v1/admin/stats",
                [this](const httplib::Request& req, httplib::Response& res) {
                  if (!require_admin(req, res)) return;
                  respond(res, 200, nlohmann::json(store_.stats()));
                });
  }

  Store& store_;
  AppConfig cfg_;
  std::function<Timestamp()> clock_;
  httplib::Server server_;
  std::mutex pipeline_mu_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
};

}  // namespace bayesgate
