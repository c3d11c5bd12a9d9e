#include "dangspeech/service.hpp"

#include <algorithm>
#include <ctime>

#include <httplib.h>

namespace dangspeech {

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AnnotationService::AnnotationService(Corpus corpus, const Resources& resources, LabelStore& store,
                                     std::vector<std::string> annotators, TimestampFn now)
    : corpus_(std::move(corpus)),
      resources_(resources),
      store_(store),
      annotators_(std::move(annotators)),
      now_(std::move(now)) {
  if (annotators_.empty()) throw Error("no_annotators", "the service needs at least one annotator");
  for (const auto& t : corpus_) {
    Analysis a{resources_.analyze(t.text), std::nullopt};
    if (!a.analysis.matches.empty())
      a.suggestion = resources_.engine().judge(a.analysis.features, a.analysis.matches,
                                               detect_sports_context(resources_.engine().sports(), a.analysis.tokens));
    features_.push_back(a.analysis.features);
    analyses_.push_back(std::move(a));
  }
}

void AnnotationService::require_annotator(const std::string& annotator) const {
  if (annotator.empty()) throw ServiceError(400, "missing_annotator", "no annotator id given");
  if (std::find(annotators_.begin(), annotators_.end(), annotator) == annotators_.end())
    throw ServiceError(403, "unknown_annotator", "annotator '" + annotator + "' is not registered");
}

std::size_t AnnotationService::require_tweet(const std::string& tweet_id) const {
  const Tweet* t = corpus_.find(tweet_id);
  if (!t) throw ServiceError(404, "unknown_tweet", "no tweet with id '" + tweet_id + "'");
  return static_cast<std::size_t>(t - corpus_.tweets().data());
}

nlohmann::json AnnotationService::task_json(std::size_t i, const std::string& annotator) const {
  const Tweet& t = corpus_.tweets()[i];
  const Analysis& a = analyses_[i];
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& m : a.analysis.matches)
    spans.push_back({{"seed", m.seed}, {"begin", m.char_span.begin}, {"end", m.char_span.end}});
  nlohmann::json features = to_json(a.analysis.features);
  features.erase("tokens");

  const auto labels = store_.labels_by_tweet();
  std::string status = "pending";
  if (auto it = labels.find(t.id); it != labels.end() && it->second.count(annotator)) status = "labeled";
  const auto queue = disagreement_ids_locked();
  if (std::find(queue.begin(), queue.end(), t.id) != queue.end()) status = "adjudication";

  return {{"tweet_id", t.id},
          {"text", t.text},
          {"seed_spans", spans},
          {"features", features},
          {"suggestion", a.suggestion ? to_json(*a.suggestion) : nlohmann::json(nullptr)},
          {"assignment", annotator},
          {"status", status}};
}

nlohmann::json AnnotationService::next_task(const std::string& annotator) const {
  std::lock_guard lock(mu_);
  require_annotator(annotator);
  const auto labels = store_.labels_by_tweet();
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    auto it = labels.find(corpus_.tweets()[i].id);
    if (it == labels.end() || !it->second.count(annotator)) return {{"task", task_json(i, annotator)}};
  }
  return {{"task", nullptr}};
}

nlohmann::json AnnotationService::submit_label(const std::string& annotator, const std::string& tweet_id,
                                               const std::string& label) {
  std::lock_guard lock(mu_);
  require_annotator(annotator);
  require_tweet(tweet_id);
  const auto parsed = try_parse_label(label);
  if (!parsed) throw ServiceError(400, "invalid_label", "label must be 'dangerous' or 'safe'");
  const auto labels = store_.labels_by_tweet();
  if (auto it = labels.find(tweet_id); it != labels.end() && it->second.count(annotator))
    throw ServiceError(409, "conflict", "annotator '" + annotator + "' already labelled tweet '" + tweet_id + "'");
  store_.append({tweet_id, annotator, *parsed, now_(), RecordKind::kLabel});
  return {{"ok", true}, {"agreement", agreement_locked()}, {"disagreements", disagreement_ids_locked().size()}};
}

nlohmann::json AnnotationService::agreement_locked() const {
  nlohmann::json j;
  if (annotators_.size() < 2) {
    j["annotators"] = annotators_;
    j["n"] = 0;
    j["kappa"] = nullptr;
    j["reason"] = "fewer than two annotators registered";
    return j;
  }
  const auto& a = annotators_[0];
  const auto& b = annotators_[1];
  ConfusionMatrix2x2 m;
  for (const auto& [tweet, by] : store_.labels_by_tweet()) {
    auto la = by.find(a);
    auto lb = by.find(b);
    if (la != by.end() && lb != by.end()) m.add(la->second, lb->second);
  }
  j["annotators"] = {a, b};
  j["n"] = m.total();
  j["matrix"] = to_json(m);
  try {
    const KappaParts k = kappa_parts(m);
    j["kappa"] = k.kappa;
    j["p_o"] = k.p_o;
    j["p_e"] = k.p_e;
  } catch (const UndefinedKappaError& e) {
    j["kappa"] = nullptr;
    j["reason"] = e.what();
  }
  return j;
}

nlohmann::json AnnotationService::agreement() const {
  std::lock_guard lock(mu_);
  return agreement_locked();
}

std::vector<std::string> AnnotationService::disagreement_ids_locked() const {
  const auto labels = store_.labels_by_tweet();
  const auto adjudicated = store_.adjudications();
  std::vector<std::string> out;
  for (const auto& t : corpus_) {
    auto it = labels.find(t.id);
    if (it == labels.end() || it->second.size() < 2 || adjudicated.count(t.id)) continue;
    const Label first = it->second.begin()->second;
    if (std::any_of(it->second.begin(), it->second.end(), [&](const auto& kv) { return kv.second != first; }))
      out.push_back(t.id);
  }
  return out;
}

nlohmann::json AnnotationService::disagreements() const {
  std::lock_guard lock(mu_);
  const auto labels = store_.labels_by_tweet();
  nlohmann::json items = nlohmann::json::array();
  for (const auto& id : disagreement_ids_locked()) {
    nlohmann::json by = nlohmann::json::object();
    for (const auto& [annotator, label] : labels.at(id)) by[annotator] = to_string(label);
    items.push_back({{"tweet_id", id}, {"text", corpus_.find(id)->text}, {"labels", by}});
  }
  return {{"count", items.size()}, {"items", items}};
}

nlohmann::json AnnotationService::adjudicate(const std::string& adjudicator, const std::string& tweet_id,
                                             const std::string& label) {
  std::lock_guard lock(mu_);
  if (adjudicator.empty()) throw ServiceError(400, "missing_annotator", "no adjudicator id given");
  require_tweet(tweet_id);
  const auto parsed = try_parse_label(label);
  if (!parsed) throw ServiceError(400, "invalid_label", "label must be 'dangerous' or 'safe'");
  const auto queue = disagreement_ids_locked();
  const bool was_disagreement = std::find(queue.begin(), queue.end(), tweet_id) != queue.end();
  store_.append({tweet_id, adjudicator, *parsed, now_(), RecordKind::kAdjudication});
  nlohmann::json j{{"ok", true}, {"tweet_id", tweet_id}, {"label", to_string(*parsed)}, {"flagged", !was_disagreement}};
  if (!was_disagreement) j["reason"] = "tweet was not in the disagreement queue";
  return j;
}

std::vector<std::optional<Label>> AnnotationService::effective_labels_locked() const {
  const auto labels = store_.labels_by_tweet();
  const auto adjudicated = store_.adjudications();
  std::vector<std::optional<Label>> out;
  out.reserve(corpus_.size());
  for (const auto& t : corpus_) {
    if (auto adj = adjudicated.find(t.id); adj != adjudicated.end()) {
      out.emplace_back(adj->second);
      continue;
    }
    auto it = labels.find(t.id);
    if (it != labels.end() && !it->second.empty()) {
      const Label first = it->second.begin()->second;
      const bool agree =
          std::all_of(it->second.begin(), it->second.end(), [&](const auto& kv) { return kv.second == first; });
      if (agree) {
        out.emplace_back(first);
        continue;
      }
    }
    out.push_back(t.gold_label);
  }
  return out;
}

std::vector<std::optional<Label>> AnnotationService::effective_labels() const {
  std::lock_guard lock(mu_);
  return effective_labels_locked();
}

Corpus AnnotationService::labeled_corpus() const {
  std::lock_guard lock(mu_);
  const auto labels = store_.labels_by_tweet();
  const auto gold = effective_labels_locked();
  Corpus out;
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    Tweet t = corpus_.tweets()[i];
    if (auto it = labels.find(t.id); it != labels.end())
      for (const auto& [annotator, label] : it->second) t.annotator_labels[annotator] = label;
    t.gold_label = gold[i];
    out.add(std::move(t));
  }
  return out;
}

nlohmann::json AnnotationService::stats() const {
  std::lock_guard lock(mu_);
  const auto labels = effective_labels_locked();
  try {
    return to_json(phenomena_stats(features_, labels));
  } catch (const Error& e) {
    throw ServiceError(409, e.kind(), e.what());
  }
}

nlohmann::json AnnotationService::explain(const std::string& tweet_id) const {
  std::lock_guard lock(mu_);
  const std::size_t i = require_tweet(tweet_id);
  const auto& a = analyses_[i];
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& tok : a.analysis.tokens) tokens.push_back({{"kind", to_string(tok.kind)}, {"text", tok.text}});
  nlohmann::json matches = nlohmann::json::array();
  for (const auto& m : a.analysis.matches)
    matches.push_back({{"seed", m.seed}, {"begin", m.char_span.begin}, {"end", m.char_span.end}});
  nlohmann::json j{{"tweet_id", tweet_id},
                   {"normalized", a.analysis.normalized.text()},
                   {"tokens", tokens},
                   {"matches", matches},
                   {"features", to_json(a.analysis.features)}};
  if (a.suggestion) {
    j["verdict"] = to_json(*a.suggestion);
  } else {
    j["verdict"] = nullptr;
    j["reason"] = "no seed phrase in the tweet";
  }
  return j;
}

nlohmann::json AnnotationService::status() const {
  std::lock_guard lock(mu_);
  const auto labels = store_.labels_by_tweet();
  nlohmann::json per = nlohmann::json::object();
  for (const auto& annotator : annotators_) {
    std::size_t done = 0;
    for (const auto& [tweet, by] : labels) done += by.count(annotator);
    per[annotator] = done;
  }
  return {{"tweets", corpus_.size()},
          {"labeled", per},
          {"records", store_.records().size()},
          {"disagreements", disagreement_ids_locked().size()},
          {"adjudicated", store_.adjudications().size()}};
}

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string annotator_of(const httplib::Request& req, const nlohmann::json* body = nullptr) {
  if (req.has_header("X-Annotator")) return req.get_header_value("X-Annotator");
  if (req.has_param("annotator")) return req.get_param_value("annotator");
  if (body && body->contains("annotator") && (*body)["annotator"].is_string())
    return (*body)["annotator"].get<std::string>();
  return {};
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) throw ServiceError(400, "bad_request", "request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error&) {
    throw ServiceError(400, "bad_request", "request body is not valid JSON");
  }
}

std::string string_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ServiceError(400, "bad_request", std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send_json(res, {{"error", e.kind()}, {"message", e.what()}}, e.status());
    } catch (const Error& e) {
      send_json(res, {{"error", e.kind()}, {"message", e.what()}}, 400);
    } catch (const std::exception& e) {
      send_json(res, {{"error", "internal"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace

HttpServer::HttpServer(AnnotationService& service, std::string cors_origin,
                       std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& s = impl_->server;
  s.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                         {"Access-Control-Allow-Headers", "Content-Type, X-Annotator"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/v1/tasks/next", guarded([&service](const httplib::Request& req, httplib::Response& res) {
          send_json(res, service.next_task(annotator_of(req)));
        }));
  s.Post("/v1/labels", guarded([&service](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           send_json(res, service.submit_label(annotator_of(req, &body), string_field(body, "tweet_id"),
                                               string_field(body, "label")));
         }));
  s.Get("/v1/agreement", guarded([&service](const httplib::Request&, httplib::Response& res) {
          send_json(res, service.agreement());
        }));
  s.Get("/v1/disagreements", guarded([&service](const httplib::Request&, httplib::Response& res) {
          send_json(res, service.disagreements());
        }));
  s.Post("/v1/adjudicate", guarded([&service](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           send_json(res, service.adjudicate(annotator_of(req, &body), string_field(body, "tweet_id"),
                                             string_field(body, "label")));
         }));
  s.Get("/v1/stats", guarded([&service](const httplib::Request&, httplib::Response& res) {
          send_json(res, service.stats());
        }));
  s.Get("/v1/tweets/:id/explain", guarded([&service](const httplib::Request& req, httplib::Response& res) {
          send_json(res, service.explain(req.path_params.at("id")));
        }));
  s.Get("/v1/status", guarded([&service](const httplib::Request&, httplib::Response& res) {
          send_json(res, service.status());
        }));
  if (static_dir) s.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() = default;

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace dangspeech
