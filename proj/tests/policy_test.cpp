#include "bayesgate/policy.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bayesgate;

namespace {
constexpr Timestamp kNow = 1700000000;
}

TEST(ValidateIdentity, AcceptsSampleFields) {
  const Identity id = validate_identity("Test", "Test", 15, "test@test.com");
  EXPECT_EQ(id.name, "Test");
  EXPECT_EQ(id.surname, "Test");
  EXPECT_EQ(id.age, 15);
  EXPECT_EQ(id.email, "test@test.com");
}

TEST(ValidateIdentity, SurnameAndAgeOptional) {
  EXPECT_NO_THROW(validate_identity("Ann", std::nullopt, std::nullopt, "a@b.com"));
}

TEST(ValidateIdentity, EmptyNameRejected) {
  EXPECT_THROW(validate_identity("", std::nullopt, std::nullopt, "a@b.com"),
               EmptyName);
  EXPECT_THROW(validate_identity("   ", std::nullopt, std::nullopt, "a@b.com"),
               EmptyName);
}

TEST(ValidateIdentity, MalformedEmailRejected) {
  for (const char* email :
       {"not-an-email", "a@b", "@b.com", "a@", "a b@c.com", "a@@b.com",
        "a@.com", "a@b..com", "a@b.com.", ""})
    EXPECT_THROW(
        validate_identity("Ann", std::nullopt, std::nullopt, email),
        MalformedEmail)
        << email;
}

TEST(ValidateIdentity, AgeRangeEnforced) {
  EXPECT_THROW(validate_identity("Ann", std::nullopt, 0, "a@b.com"), InvalidAge);
  EXPECT_THROW(validate_identity("Ann", std::nullopt, -3, "a@b.com"), InvalidAge);
  EXPECT_THROW(validate_identity("Ann", std::nullopt, 151, "a@b.com"), InvalidAge);
  EXPECT_NO_THROW(validate_identity("Ann", std::nullopt, 150, "a@b.com"));
}

TEST(CheckRate, TooSoonReportsRemainingWait) {
  IpRecord rec;
  rec.last_submission = kNow - 10;
  const auto wait = check_rate(rec, kNow, PolicyConfig{});
  ASSERT_TRUE(wait.has_value());
  EXPECT_EQ(*wait, 20);
}

TEST(CheckRate, FirstSubmissionAllowed) {
  EXPECT_FALSE(check_rate(IpRecord{}, kNow, PolicyConfig{}).has_value());
}

TEST(CheckRate, IntervalElapsedAllows) {
  IpRecord rec;
  rec.last_submission = kNow - 31;
  EXPECT_FALSE(check_rate(rec, kNow, PolicyConfig{}).has_value());
  rec.last_submission = kNow - 30;
  EXPECT_FALSE(check_rate(rec, kNow, PolicyConfig{}).has_value());
  rec.last_submission = kNow - 29;
  EXPECT_TRUE(check_rate(rec, kNow, PolicyConfig{}).has_value());
}

TEST(RecordVerdict, ThirdSpamInWindowBlocks) {
  const PolicyConfig cfg;
  IpRecord rec;
  rec.spam_events = {kNow - 3600, kNow - 60};
  rec = record_verdict(rec, Verdict::Spam, kNow, cfg);
  ASSERT_TRUE(rec.blocked_until.has_value());
  EXPECT_EQ(*rec.blocked_until, kNow + 24 * 3600);
  EXPECT_EQ(rec.last_submission, kNow);
}

TEST(RecordVerdict, HamLeavesSpamEventsAlone) {
  IpRecord rec;
  rec.spam_events = {kNow - 60};
  rec = record_verdict(rec, Verdict::Ham, kNow, PolicyConfig{});
  EXPECT_EQ(rec.spam_events.size(), 1u);
  EXPECT_EQ(rec.last_submission, kNow);
  EXPECT_FALSE(rec.blocked_until.has_value());
}

TEST(RecordVerdict, StaleEventsFallOutOfWindow) {
  IpRecord rec;
  rec.spam_events = {kNow - 30 * 3600, kNow - 26 * 3600, kNow - 25 * 3600};
  rec = record_verdict(rec, Verdict::Spam, kNow, PolicyConfig{});
  EXPECT_FALSE(rec.blocked_until.has_value());
  EXPECT_EQ(rec.spam_events.size(), 1u);  // only the new one survives
}

TEST(IsBlocked, RespectsExpiry) {
  IpRecord rec;
  EXPECT_FALSE(is_blocked(rec, kNow));
  rec.blocked_until = kNow + 3600;
  EXPECT_TRUE(is_blocked(rec, kNow));
  rec.blocked_until = kNow - 1;
  EXPECT_FALSE(is_blocked(rec, kNow));
  rec.blocked_until = kNow;
  EXPECT_FALSE(is_blocked(rec, kNow));
}

TEST(BlockLifecycle, BlocksOnlyAfterConfiguredCountAndExpires) {
  std::mt19937 rng(17);
  const PolicyConfig cfg;
  for (int round = 0; round < 300; ++round) {
    IpRecord rec;
    Timestamp t = kNow;
    int spam_in_window = 0;
    std::uniform_int_distribution<int> gap(1, 4 * 3600);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int step = 0; step < 20; ++step) {
      t += gap(rng);
      const bool spam = coin(rng) == 1;
      const bool was_blocked = is_blocked(rec, t);
      rec = record_verdict(rec, spam ? Verdict::Spam : Verdict::Ham, t, cfg);
      const Timestamp window_start = t - cfg.spam_window_hours * 3600;
      spam_in_window = 0;
      for (Timestamp e : rec.spam_events)
        if (e >= window_start) ++spam_in_window;
      if (spam && spam_in_window >= cfg.block_after_spam_count) {
        EXPECT_TRUE(is_blocked(rec, t + 1));
      }
      if (!was_blocked && spam_in_window < cfg.block_after_spam_count &&
          !rec.blocked_until) {
        EXPECT_FALSE(is_blocked(rec, t));
      }
    }
    // a block always lapses once the duration passes with no new spam
    if (rec.blocked_until) {
      EXPECT_FALSE(is_blocked(rec, *rec.blocked_until + 1));
    }
  }
}

TEST(RateGate, SecondCallWithinIntervalDenied) {
  const PolicyConfig cfg;
  IpRecord rec;
  EXPECT_FALSE(check_rate(rec, kNow, cfg).has_value());
  rec = record_verdict(rec, Verdict::Ham, kNow, cfg);
  EXPECT_TRUE(check_rate(rec, kNow + cfg.min_interval_seconds - 1, cfg).has_value());
  EXPECT_FALSE(check_rate(rec, kNow + cfg.min_interval_seconds, cfg).has_value());
}
