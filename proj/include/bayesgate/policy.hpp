#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bayesgate/classifier.hpp"

namespace bayesgate {

// Seconds since the Unix epoch, UTC. Time is always passed in explicitly so
// window and expiry logic is testable.
using Timestamp = std::int64_t;

class EmptyName : public std::invalid_argument {
 public:
  EmptyName() : std::invalid_argument("name must not be empty") {}
};

class MalformedEmail : public std::invalid_argument {
 public:
  explicit MalformedEmail(std::string_view email)
      : std::invalid_argument("not a mailbox address: \"" +
                              std::string(email) + "\"") {}
};

class InvalidAge : public std::invalid_argument {
 public:
  explicit InvalidAge(int age)
      : std::invalid_argument("age out of range: " + std::to_string(age)) {}
};

struct Identity {
  std::string name;
  std::optional<std::string> surname;
  std::optional<int> age;
  std::string email;
};

struct PolicyConfig {
  std::int64_t min_interval_seconds = 30;
  std::int64_t block_after_spam_count = 3;
  std::int64_t spam_window_hours = 24;
  std::int64_t block_duration_hours = 24;
};

struct IpRecord {
  std::string ip;
  std::optional<Timestamp> last_submission;
  std::vector<Timestamp> spam_events;  // time-ordered
  std::optional<Timestamp> blocked_until;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

// local-part@domain with a dotted domain. Purely syntactic; no DNS.
inline bool mailbox_syntax_ok(std::string_view email) {
  const auto at = email.find('@');
  if (at == std::string_view::npos || at == 0 || at + 1 >= email.size())
    return false;
  if (email.find('@', at + 1) != std::string_view::npos) return false;
  for (char c : email)
    if (static_cast<unsigned char>(c) <= 0x20) return false;
  const std::string_view domain = email.substr(at + 1);
  bool has_dot = false;
  std::size_t label_length = 0;
  for (char c : domain) {
    if (c == '.') {
      if (label_length == 0) return false;  // leading dot or ".."
      has_dot = true;
      label_length = 0;
    } else {
      ++label_length;
    }
  }
  return has_dot && label_length > 0;
}

}  // namespace detail

// Step-one gate: posting needs a plausible name and mailbox, nothing more --
// no account, no login. Age, when supplied, must land in (0, 150].
inline Identity validate_identity(std::string_view name,
                                  std::optional<std::string_view> surname,
                                  std::optional<int> age,
                                  std::string_view email) {
  if (detail::trim(name).empty()) throw EmptyName();
  if (!detail::mailbox_syntax_ok(email)) throw MalformedEmail(email);
  if (age && (*age <= 0 || *age > 150)) throw InvalidAge(*age);
  Identity id;
  id.name = std::string(name);
  if (surname) id.surname = std::string(*surname);
  id.age = age;
  id.email = std::string(email);
  return id;
}

// nullopt allows the submission; otherwise the seconds left until the
// minimum interval has passed.
inline std::optional<std::int64_t> check_rate(const IpRecord& record,
                                              Timestamp now,
                                              const PolicyConfig& config) {
  if (!record.last_submission) return std::nullopt;
  const std::int64_t elapsed = now - *record.last_submission;
  if (elapsed >= config.min_interval_seconds) return std::nullopt;
  return config.min_interval_seconds - elapsed;
}

inline bool is_blocked(const IpRecord& record, Timestamp now) {
  return record.blocked_until && now < *record.blocked_until;
}

// Marks a submission on the record: stamps last_submission, and on a Spam
// verdict tracks the event inside the trailing window. Once the window holds
// block_after_spam_count events the IP is blocked for block_duration_hours.
// Blocks have a fixed expiry; further attempts do not extend them.
inline IpRecord record_verdict(IpRecord record, Verdict verdict, Timestamp now,
                               const PolicyConfig& config) {
  record.last_submission = now;
  if (verdict != Verdict::Spam) return record;
  record.spam_events.push_back(now);
  const Timestamp window_start = now - config.spam_window_hours * 3600;
  std::erase_if(record.spam_events,
                [&](Timestamp t) { return t < window_start; });
  if (static_cast<std::int64_t>(record.spam_events.size()) >=
      config.block_after_spam_count)
    record.blocked_until = now + config.block_duration_hours * 3600;
  return record;
}

}  // namespace bayesgate
