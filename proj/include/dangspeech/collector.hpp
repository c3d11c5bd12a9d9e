#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dangspeech/corpus.hpp"
#include "dangspeech/matcher.hpp"

namespace dangspeech {

// Inclusive range of ISO-8601 timestamps compared as strings. An empty
// bound is open.
struct TimeWindow {
  std::string from;
  std::string to;
  bool contains(const std::string& created_at) const;
};

// A transient failure of the tweet source; retried by the collector.
class SourceError : public Error {
 public:
  explicit SourceError(const std::string& message) : Error("source_error", message) {}
};

class TweetSource {
 public:
  virtual ~TweetSource() = default;
  virtual std::vector<Tweet> search(const std::string& query, const TimeWindow& window) = 0;
  virtual std::vector<Tweet> timeline(const std::string& user_id) = 0;
};

// Deterministic in-memory source. search() returns tweets whose normalized
// text contains the normalized query as a substring, which over-matches on
// purpose (the collector must re-check). Failures can be injected.
class SyntheticSource : public TweetSource {
 public:
  explicit SyntheticSource(std::vector<Tweet> tweets);

  std::vector<Tweet> search(const std::string& query, const TimeWindow& window) override;
  std::vector<Tweet> timeline(const std::string& user_id) override;

  // The next `n` search calls throw SourceError.
  void fail_next_searches(std::size_t n);
  // The next `n` timeline calls for `user_id` throw SourceError.
  void fail_timeline(const std::string& user_id, std::size_t n);

  std::size_t search_calls() const;
  std::size_t timeline_calls() const;
  const std::vector<Tweet>& tweets() const { return tweets_; }

 private:
  std::vector<Tweet> tweets_;
  std::vector<std::string> normalized_;
  std::map<std::string, std::vector<std::size_t>> by_author_;
  mutable std::mutex mu_;
  std::size_t search_failures_ = 0;
  std::map<std::string, std::size_t> timeline_failures_;
  std::size_t search_calls_ = 0;
  std::size_t timeline_calls_ = 0;
};

// Seconds since job start. Sleeping advances time instantly.
class SimulatedClock {
 public:
  double now() const;
  void sleep(double seconds);
  void advance_to(double t);  // never moves backwards

 private:
  mutable std::mutex mu_;
  double now_ = 0;
};

// Token bucket with capacity one: consecutive requests are at least
// 1/rate seconds apart, and the first one goes out immediately.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, SimulatedClock& clock);
  // Waits (on the simulated clock) for a slot; returns the slot time.
  double acquire();

 private:
  double interval_;
  SimulatedClock& clock_;
  std::mutex mu_;
  double next_free_ = 0;
  bool first_ = true;
};

struct RetryPolicy {
  std::size_t max_attempts = 5;
  double base_delay = 1.0;  // seconds before the second attempt; doubles after
  double max_delay = 60.0;

  double delay_before(std::size_t attempt) const;  // attempt >= 2
};

struct CollectorConfig {
  TimeWindow window;
  double requests_per_second = 2.0;  // <= 0 disables rate limiting
  std::size_t parallelism = 1;       // concurrent timeline fetches
  RetryPolicy retry;
};

enum class JobState { kSearching, kCrawlingTimelines, kDone };
std::string_view to_string(JobState s);

struct CollectionCounters {
  std::size_t tweets_searched = 0;               // returned by search requests
  std::size_t search_hits = 0;                   // of those, verified seed-bearing
  std::size_t users_found = 0;
  std::size_t timeline_tweets = 0;               // returned by timeline requests
  std::size_t seed_bearing_timeline_tweets = 0;  // of those, verified seed-bearing
  std::size_t requests = 0;                      // including retries
  std::size_t retries = 0;
  std::size_t failed_users = 0;

  friend bool operator==(const CollectionCounters&, const CollectionCounters&) = default;
};

nlohmann::json to_json(const CollectionCounters& c);

// Two-phase collection: search every query, keep verified seed-bearing
// tweets and their authors, then crawl each author's timeline and keep the
// seed-bearing tweets. Deduplicated by tweet id across both phases.
class CollectionJob {
 public:
  CollectionJob(TweetSource& source, const SeedMatcher& matcher, std::vector<std::string> queries,
                CollectorConfig config, SimulatedClock& clock);

  // Processes at most `max_units` queries/users (all remaining when unset).
  // Returns true once the job is done. Search failures that exhaust the
  // retry budget propagate; timeline failures skip the user.
  bool run(std::optional<std::size_t> max_units = std::nullopt);

  JobState state() const { return state_; }
  const CollectionCounters& counters() const { return counters_; }
  const std::set<std::string>& users() const { return users_; }
  const std::vector<std::string>& log() const { return log_; }

  // Sorted by (author_id, id); numeric ids compare numerically.
  Corpus results() const;

  // state.json, seen_ids.txt and collected.jsonl in `dir`.
  void save_checkpoint(const std::filesystem::path& dir) const;
  void load_checkpoint(const std::filesystem::path& dir);

 private:
  template <typename F>
  auto with_retry(const std::string& what, F&& call);
  void keep(const Tweet& t);
  void run_search(std::size_t& budget);
  void run_timelines(std::size_t& budget);

  TweetSource& source_;
  const SeedMatcher& matcher_;
  std::vector<std::string> queries_;
  CollectorConfig config_;
  SimulatedClock& clock_;
  RateLimiter limiter_;

  std::mutex mu_;  // guards counters_ and log_ during parallel fetches
  JobState state_ = JobState::kSearching;
  std::size_t next_query_ = 0;
  std::size_t next_user_ = 0;
  CollectionCounters counters_;
  std::set<std::string> users_;
  std::vector<std::string> user_order_;  // frozen when the timeline phase starts
  std::set<std::string> seen_ids_;
  std::vector<Tweet> collected_;
  std::vector<std::string> log_;
};

// Less-than on ids: all-digit ids by numeric value, otherwise bytewise.
bool id_less(const std::string& a, const std::string& b);

}  // namespace dangspeech
