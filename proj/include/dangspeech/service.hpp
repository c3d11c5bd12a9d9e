#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dangspeech/agreement.hpp"
#include "dangspeech/corpus.hpp"
#include "dangspeech/features.hpp"
#include "dangspeech/heuristics.hpp"
#include "dangspeech/resources.hpp"
#include "dangspeech/stats.hpp"

namespace dangspeech {

// An error with the HTTP status it maps to.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string kind, const std::string& message)
      : Error(std::move(kind), message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// UTC now as 2020-01-31T12:00:00Z.
std::string utc_timestamp();

// Dual annotation over a fixed corpus. Every registered annotator labels
// every tweet once; the first two annotators form the agreement pair.
// Reports are pure functions of the label store. Thread-safe.
class AnnotationService {
 public:
  using TimestampFn = std::function<std::string()>;

  AnnotationService(Corpus corpus, const Resources& resources, LabelStore& store,
                    std::vector<std::string> annotators, TimestampFn now = utc_timestamp);

  // {"task": {...}} or {"task": null} when this annotator is finished.
  nlohmann::json next_task(const std::string& annotator) const;
  // {"ok": true, "agreement": {...}, "disagreements": n}
  nlohmann::json submit_label(const std::string& annotator, const std::string& tweet_id, const std::string& label);
  nlohmann::json agreement() const;
  nlohmann::json disagreements() const;
  // Writes a gold label; annotator labels stay in the store.
  nlohmann::json adjudicate(const std::string& adjudicator, const std::string& tweet_id, const std::string& label);
  nlohmann::json stats() const;
  nlohmann::json explain(const std::string& tweet_id) const;
  nlohmann::json status() const;

  // Gold label per tweet in corpus order: adjudication, else the label all
  // annotators agree on, else the corpus gold label.
  std::vector<std::optional<Label>> effective_labels() const;
  // The corpus with annotator labels from the store attached.
  Corpus labeled_corpus() const;

  const Corpus& corpus() const { return corpus_; }
  const std::vector<FeatureVector>& features() const { return features_; }
  const std::vector<std::string>& annotators() const { return annotators_; }

 private:
  struct Analysis {
    TweetAnalysis analysis;
    std::optional<RuleVerdict> suggestion;
  };

  void require_annotator(const std::string& annotator) const;
  std::size_t require_tweet(const std::string& tweet_id) const;
  nlohmann::json task_json(std::size_t i, const std::string& annotator) const;
  nlohmann::json agreement_locked() const;
  std::vector<std::string> disagreement_ids_locked() const;
  std::vector<std::optional<Label>> effective_labels_locked() const;

  Corpus corpus_;
  const Resources& resources_;
  LabelStore& store_;
  std::vector<std::string> annotators_;
  TimestampFn now_;
  std::vector<Analysis> analyses_;
  std::vector<FeatureVector> features_;
  mutable std::mutex mu_;
};

// HTTP+JSON front end, every route under /v1:
//   GET  /v1/tasks/next?annotator=ID
//   POST /v1/labels        {"tweet_id", "label"[, "annotator"]}
//   GET  /v1/agreement
//   GET  /v1/disagreements
//   POST /v1/adjudicate    {"tweet_id", "label"[, "annotator"]}
//   GET  /v1/stats
//   GET  /v1/tweets/{id}/explain
//   GET  /v1/status
// The annotator id comes from the X-Annotator header or the query/body
// field. CORS headers allow `cors_origin`.
class HttpServer {
 public:
  explicit HttpServer(AnnotationService& service, std::string cors_origin = "*",
                      std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  // Binds to an ephemeral port and returns it (-1 on failure).
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dangspeech
