#include "dangspeech/collector.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "util.hpp"

namespace dangspeech {

bool TimeWindow::contains(const std::string& created_at) const {
  if (!from.empty() && created_at < from) return false;
  if (!to.empty() && created_at > to) return false;
  return true;
}

SyntheticSource::SyntheticSource(std::vector<Tweet> tweets) : tweets_(std::move(tweets)) {
  normalized_.reserve(tweets_.size());
  for (std::size_t i = 0; i < tweets_.size(); ++i) {
    normalized_.push_back(normalize_string(tweets_[i].text));
    by_author_[tweets_[i].author_id].push_back(i);
  }
  for (auto& [author, idx] : by_author_)
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return id_less(tweets_[a].id, tweets_[b].id); });
}

std::vector<Tweet> SyntheticSource::search(const std::string& query, const TimeWindow& window) {
  {
    std::lock_guard lock(mu_);
    ++search_calls_;
    if (search_failures_ > 0) {
      --search_failures_;
      throw SourceError("search temporarily unavailable");
    }
  }
  const std::string q = normalize_string(query);
  std::vector<Tweet> out;
  if (q.empty()) return out;
  for (std::size_t i = 0; i < tweets_.size(); ++i)
    if (window.contains(tweets_[i].created_at) && normalized_[i].find(q) != std::string::npos)
      out.push_back(tweets_[i]);
  return out;
}

std::vector<Tweet> SyntheticSource::timeline(const std::string& user_id) {
  {
    std::lock_guard lock(mu_);
    ++timeline_calls_;
    auto it = timeline_failures_.find(user_id);
    if (it != timeline_failures_.end() && it->second > 0) {
      --it->second;
      throw SourceError("timeline of " + user_id + " temporarily unavailable");
    }
  }
  std::vector<Tweet> out;
  auto it = by_author_.find(user_id);
  if (it != by_author_.end())
    for (std::size_t i : it->second) out.push_back(tweets_[i]);
  return out;
}

void SyntheticSource::fail_next_searches(std::size_t n) {
  std::lock_guard lock(mu_);
  search_failures_ = n;
}

void SyntheticSource::fail_timeline(const std::string& user_id, std::size_t n) {
  std::lock_guard lock(mu_);
  timeline_failures_[user_id] = n;
}

std::size_t SyntheticSource::search_calls() const {
  std::lock_guard lock(mu_);
  return search_calls_;
}

std::size_t SyntheticSource::timeline_calls() const {
  std::lock_guard lock(mu_);
  return timeline_calls_;
}

double SimulatedClock::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

void SimulatedClock::sleep(double seconds) {
  std::lock_guard lock(mu_);
  if (seconds > 0) now_ += seconds;
}

void SimulatedClock::advance_to(double t) {
  std::lock_guard lock(mu_);
  now_ = std::max(now_, t);
}

RateLimiter::RateLimiter(double requests_per_second, SimulatedClock& clock)
    : interval_(requests_per_second > 0 ? 1.0 / requests_per_second : 0.0), clock_(clock) {}

double RateLimiter::acquire() {
  std::lock_guard lock(mu_);
  double t = clock_.now();
  if (!first_) t = std::max(t, next_free_);
  first_ = false;
  clock_.advance_to(t);
  next_free_ = t + interval_;
  return t;
}

double RetryPolicy::delay_before(std::size_t attempt) const {
  const double d = base_delay * std::pow(2.0, static_cast<double>(attempt) - 2.0);
  return std::min(d, max_delay);
}

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::kSearching:
      return "searching";
    case JobState::kCrawlingTimelines:
      return "crawling_timelines";
    case JobState::kDone:
      return "done";
  }
  return "done";
}

namespace {

JobState parse_job_state(const std::string& s) {
  for (JobState st : {JobState::kSearching, JobState::kCrawlingTimelines, JobState::kDone})
    if (to_string(st) == s) return st;
  throw Error("invalid_checkpoint", "unknown job state '" + s + "'");
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

bool id_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b) && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

nlohmann::json to_json(const CollectionCounters& c) {
  return {{"tweets_searched", c.tweets_searched},
          {"search_hits", c.search_hits},
          {"users_found", c.users_found},
          {"timeline_tweets", c.timeline_tweets},
          {"seed_bearing_timeline_tweets", c.seed_bearing_timeline_tweets},
          {"requests", c.requests},
          {"retries", c.retries},
          {"failed_users", c.failed_users}};
}

CollectionJob::CollectionJob(TweetSource& source, const SeedMatcher& matcher, std::vector<std::string> queries,
                             CollectorConfig config, SimulatedClock& clock)
    : source_(source),
      matcher_(matcher),
      queries_(std::move(queries)),
      config_(std::move(config)),
      clock_(clock),
      limiter_(config_.requests_per_second, clock) {
  if (queries_.empty()) throw Error("empty_seed_set", "collection needs at least one query");
  if (config_.parallelism == 0) config_.parallelism = 1;
  if (config_.retry.max_attempts == 0) config_.retry.max_attempts = 1;
}

template <typename F>
auto CollectionJob::with_retry(const std::string& what, F&& call) {
  for (std::size_t attempt = 1;; ++attempt) {
    if (config_.requests_per_second > 0) limiter_.acquire();
    {
      std::lock_guard lock(mu_);
      ++counters_.requests;
      if (attempt > 1) ++counters_.retries;
    }
    try {
      return call();
    } catch (const SourceError& e) {
      if (attempt >= config_.retry.max_attempts)
        throw SourceError(what + " failed after " + std::to_string(attempt) + " attempts: " + e.what());
      clock_.sleep(config_.retry.delay_before(attempt + 1));
    }
  }
}

void CollectionJob::keep(const Tweet& t) {
  if (seen_ids_.insert(t.id).second) collected_.push_back(t);
}

void CollectionJob::run_search(std::size_t& budget) {
  while (next_query_ < queries_.size() && budget > 0) {
    const std::string& q = queries_[next_query_];
    const auto found = with_retry("search '" + q + "'", [&] { return source_.search(q, config_.window); });
    for (const auto& t : found) {
      ++counters_.tweets_searched;
      if (!config_.window.contains(t.created_at) || matcher_.find(t.text).empty()) continue;
      ++counters_.search_hits;
      keep(t);
      users_.insert(t.author_id);
    }
    counters_.users_found = users_.size();
    ++next_query_;
    --budget;
  }
  if (next_query_ == queries_.size()) {
    state_ = JobState::kCrawlingTimelines;
    user_order_.assign(users_.begin(), users_.end());
    std::sort(user_order_.begin(), user_order_.end(), id_less);
  }
}

void CollectionJob::run_timelines(std::size_t& budget) {
  while (next_user_ < user_order_.size() && budget > 0) {
    const std::size_t batch = std::min({config_.parallelism, budget, user_order_.size() - next_user_});
    std::vector<std::optional<std::vector<Tweet>>> fetched(batch);
    auto fetch = [&](std::size_t k) {
      const std::string& user = user_order_[next_user_ + k];
      try {
        fetched[k] = with_retry("timeline of " + user, [&] { return source_.timeline(user); });
      } catch (const SourceError& e) {
        std::lock_guard lock(mu_);
        log_.push_back(e.what());
      }
    };
    if (batch == 1) {
      fetch(0);
    } else {
      std::vector<std::thread> workers;
      for (std::size_t k = 0; k < batch; ++k) workers.emplace_back(fetch, k);
      for (auto& w : workers) w.join();
    }
    // Merge in user order so the outcome does not depend on thread timing.
    for (std::size_t k = 0; k < batch; ++k) {
      if (!fetched[k]) {
        ++counters_.failed_users;
        continue;
      }
      for (const auto& t : *fetched[k]) {
        ++counters_.timeline_tweets;
        if (matcher_.find(t.text).empty()) continue;
        ++counters_.seed_bearing_timeline_tweets;
        keep(t);
      }
    }
    // Failed-user messages are appended from worker threads; order them.
    std::sort(log_.begin(), log_.end());
    next_user_ += batch;
    budget -= batch;
  }
  if (next_user_ == user_order_.size()) state_ = JobState::kDone;
}

bool CollectionJob::run(std::optional<std::size_t> max_units) {
  std::size_t budget = max_units.value_or(static_cast<std::size_t>(-1));
  if (state_ == JobState::kSearching) run_search(budget);
  if (state_ == JobState::kCrawlingTimelines) run_timelines(budget);
  return state_ == JobState::kDone;
}

Corpus CollectionJob::results() const {
  std::vector<Tweet> sorted = collected_;
  std::sort(sorted.begin(), sorted.end(), [](const Tweet& a, const Tweet& b) {
    if (a.author_id != b.author_id) return id_less(a.author_id, b.author_id);
    return id_less(a.id, b.id);
  });
  Corpus c;
  for (auto& t : sorted) c.add(std::move(t));
  return c;
}

void CollectionJob::save_checkpoint(const std::filesystem::path& dir) const {
  nlohmann::json state{{"state", to_string(state_)},
                       {"next_query", next_query_},
                       {"next_user", next_user_},
                       {"queries", queries_.size()},
                       {"counters", to_json(counters_)},
                       {"users", users_},
                       {"user_order", user_order_},
                       {"clock", clock_.now()},
                       {"log", log_}};
  util::write_file(dir / "state.json", state.dump(2) + "\n");
  std::string ids;
  for (const auto& id : seen_ids_) ids += id + "\n";
  util::write_file(dir / "seen_ids.txt", ids);
  std::string tweets;
  for (const auto& t : collected_) tweets += to_json(t).dump() + "\n";
  util::write_file(dir / "collected.jsonl", tweets);
}

void CollectionJob::load_checkpoint(const std::filesystem::path& dir) {
  nlohmann::json s;
  try {
    s = nlohmann::json::parse(util::read_file(dir / "state.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((dir / "state.json").string(), 0, e.what());
  }
  if (s.at("queries").get<std::size_t>() != queries_.size())
    throw Error("invalid_checkpoint", "checkpoint was written for a different query list");
  state_ = parse_job_state(s.at("state").get<std::string>());
  next_query_ = s.at("next_query").get<std::size_t>();
  next_user_ = s.at("next_user").get<std::size_t>();
  const auto& c = s.at("counters");
  counters_.tweets_searched = c.at("tweets_searched").get<std::size_t>();
  counters_.search_hits = c.at("search_hits").get<std::size_t>();
  counters_.users_found = c.at("users_found").get<std::size_t>();
  counters_.timeline_tweets = c.at("timeline_tweets").get<std::size_t>();
  counters_.seed_bearing_timeline_tweets = c.at("seed_bearing_timeline_tweets").get<std::size_t>();
  counters_.requests = c.at("requests").get<std::size_t>();
  counters_.retries = c.at("retries").get<std::size_t>();
  counters_.failed_users = c.at("failed_users").get<std::size_t>();
  users_ = s.at("users").get<std::set<std::string>>();
  user_order_ = s.at("user_order").get<std::vector<std::string>>();
  log_ = s.at("log").get<std::vector<std::string>>();
  clock_.advance_to(s.at("clock").get<double>());

  seen_ids_.clear();
  const std::string seen = util::read_file(dir / "seen_ids.txt");
  for (const auto& line : util::split_lines(seen)) {
    const auto id = util::trim(line);
    if (!id.empty()) seen_ids_.emplace(id);
  }
  collected_ = ingest(dir / "collected.jsonl").corpus.tweets();
  if (collected_.size() != seen_ids_.size())
    throw Error("invalid_checkpoint", "seen-id set and collected tweets disagree");
}

}  // namespace dangspeech
