#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "dangspeech/service.hpp"
#include "fixtures.hpp"

using namespace dangspeech;
using nlohmann::json;

namespace {

std::string fixed_now() { return "2020-05-01T00:00:00Z"; }

struct Fixture {
  LabelStore store;
  AnnotationService service{fixtures::guideline_examples(), fixtures::resources(), store, {"a", "b"}, fixed_now};
};

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.status();
  }
  return 200;
}

// Runs an HttpServer on an ephemeral port for the lifetime of the object.
struct LiveServer {
  HttpServer server;
  int port;
  std::thread thread;

  explicit LiveServer(AnnotationService& s) : server(s, "http://localhost:5173"), port(server.bind_any_port()) {
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("tasks walk the corpus per annotator") {
  Fixture f;
  json t = f.service.next_task("a");
  REQUIRE(t["task"].is_object());
  CHECK(t["task"]["tweet_id"] == "ex01");
  CHECK(t["task"]["assignment"] == "a");
  CHECK(t["task"]["features"].contains("is_question"));
  CHECK_FALSE(t["task"]["features"].contains("tokens"));
  f.service.submit_label("a", "ex01", "safe");
  CHECK(f.service.next_task("a")["task"]["tweet_id"] == "ex02");
  CHECK(f.service.next_task("b")["task"]["tweet_id"] == "ex01");
  for (const auto& tw : f.service.corpus())
    if (tw.id != "ex01") f.service.submit_label("a", tw.id, "dangerous");
  CHECK(f.service.next_task("a")["task"].is_null());
}

TEST_CASE("task carries seed spans and the rule suggestion") {
  Fixture f;
  f.service.submit_label("a", "ex01", "safe");
  f.service.submit_label("a", "ex02", "safe");
  const json t = f.service.next_task("a")["task"];
  CHECK(t["tweet_id"] == "ex03");
  REQUIRE(t["seed_spans"].size() == 1);
  const std::string text = t["text"];
  const std::size_t b = t["seed_spans"][0]["begin"], e = t["seed_spans"][0]["end"];
  CHECK(text.substr(b, e - b) == "باقتلك");
  CHECK(t["suggestion"]["label"] == "safe");
  CHECK(t["suggestion"]["fired_rules"][0] == "R2");
}

TEST_CASE("label submission errors") {
  Fixture f;
  CHECK(status_of([&] { f.service.submit_label("a", "ex01", "maybe"); }) == 400);
  CHECK(status_of([&] { f.service.submit_label("zed", "ex01", "safe"); }) == 403);
  CHECK(status_of([&] { f.service.submit_label("", "ex01", "safe"); }) == 400);
  CHECK(status_of([&] { f.service.submit_label("a", "nope", "safe"); }) == 404);
  f.service.submit_label("a", "ex01", "safe");
  CHECK(status_of([&] { f.service.submit_label("a", "ex01", "dangerous"); }) == 409);
  CHECK(f.store.records().size() == 1);
  CHECK(f.store.records()[0].timestamp == "2020-05-01T00:00:00Z");
}

TEST_CASE("agreement, disagreements and adjudication") {
  Fixture f;
  json a = f.service.agreement();
  CHECK(a["kappa"].is_null());
  CHECK(a["n"] == 0);

  f.service.submit_label("a", "ex01", "safe");
  f.service.submit_label("b", "ex01", "safe");
  f.service.submit_label("a", "ex02", "safe");
  f.service.submit_label("b", "ex02", "dangerous");
  f.service.submit_label("a", "ex03", "dangerous");
  const json r = f.service.submit_label("b", "ex03", "dangerous");
  CHECK(r["ok"] == true);
  CHECK(r["disagreements"] == 1);
  // [[1,1],[0,1]]: p_o = 2/3, p_e = (2*1 + 1*2)/9 = 4/9, kappa = 0.4
  CHECK(r["agreement"]["kappa"].get<double>() == doctest::Approx(0.4));
  CHECK(r["agreement"]["p_o"].get<double>() == doctest::Approx(2.0 / 3.0));

  const json d = f.service.disagreements();
  CHECK(d["count"] == 1);
  CHECK(d["items"][0]["tweet_id"] == "ex02");
  CHECK(d["items"][0]["labels"]["b"] == "dangerous");

  const json adj = f.service.adjudicate("lead", "ex02", "dangerous");
  CHECK(adj["flagged"] == false);
  CHECK(f.service.disagreements()["count"] == 0);
  CHECK(f.service.adjudicate("lead", "ex01", "dangerous")["flagged"] == true);
  CHECK(status_of([&] { f.service.adjudicate("lead", "ex01", "x"); }) == 400);
  CHECK(status_of([&] { f.service.adjudicate("lead", "zz", "safe"); }) == 404);
  CHECK(status_of([&] { f.service.adjudicate("", "ex01", "safe"); }) == 400);
  // adjudication does not touch the annotator matrix
  CHECK(f.service.agreement()["n"] == 3);
}

TEST_CASE("degenerate agreement reports why kappa is missing") {
  Fixture f;
  f.service.submit_label("a", "ex01", "safe");
  f.service.submit_label("b", "ex01", "safe");
  const json a = f.service.agreement();
  CHECK(a["kappa"].is_null());
  CHECK(a["reason"].is_string());
}

TEST_CASE("effective labels prefer adjudication, then consensus, then gold") {
  Fixture f;
  f.service.submit_label("a", "ex01", "dangerous");
  f.service.submit_label("b", "ex01", "dangerous");
  f.service.submit_label("a", "ex03", "dangerous");
  f.service.submit_label("b", "ex03", "safe");
  f.service.submit_label("a", "ex04", "safe");
  f.service.submit_label("b", "ex04", "safe");
  f.service.adjudicate("lead", "ex05", "dangerous");
  const auto labels = f.service.effective_labels();
  CHECK(labels[0] == Label::kDangerous);    // consensus
  CHECK_FALSE(labels[1].has_value());       // nothing
  CHECK(labels[2] == Label::kSafe);         // split: corpus gold
  CHECK(labels[3] == Label::kSafe);         // consensus over gold
  CHECK(labels[4] == Label::kDangerous);    // adjudication over gold
  const Corpus c = f.service.labeled_corpus();
  CHECK(c.find("ex03")->annotator_labels.size() == 2);
  CHECK(c.find("ex05")->gold_label == Label::kDangerous);
}

TEST_CASE("stats, explain and status") {
  Fixture f;
  const json s = f.service.stats();
  CHECK(s["n_safe"].get<int>() + s["n_dangerous"].get<int>() == 10);
  CHECK(s["rows"].size() == 6);

  const json e = f.service.explain("ex07");
  CHECK(e["verdict"]["label"] == "dangerous");
  CHECK(e["verdict"]["fired_rules"][0] == "R6");
  CHECK(e["matches"].size() == 1);
  CHECK(f.service.explain("ex02")["verdict"].is_null());
  CHECK(status_of([&] { f.service.explain("zz"); }) == 404);

  f.service.submit_label("a", "ex01", "safe");
  const json st = f.service.status();
  CHECK(st["tweets"] == 23);
  CHECK(st["labeled"]["a"] == 1);
  CHECK(st["records"] == 1);
}

TEST_CASE("stats on an unlabelled corpus is a conflict") {
  Corpus c;
  Tweet t;
  t.id = "1";
  t.text = "اقتلك";
  c.add(t);
  LabelStore store;
  AnnotationService svc(c, fixtures::resources(), store, {"a", "b"});
  CHECK(status_of([&] { svc.stats(); }) == 409);
}

TEST_CASE("labels survive a restart through the store file") {
  const auto dir = fixtures::temp_dir("svc");
  {
    LabelStore store(dir / "labels.jsonl");
    AnnotationService svc(fixtures::guideline_examples(), fixtures::resources(), store, {"a", "b"});
    svc.submit_label("a", "ex01", "safe");
    svc.submit_label("b", "ex01", "dangerous");
  }
  LabelStore store(dir / "labels.jsonl");
  AnnotationService svc(fixtures::guideline_examples(), fixtures::resources(), store, {"a", "b"});
  CHECK(svc.disagreements()["count"] == 1);
  CHECK(svc.next_task("a")["task"]["tweet_id"] == "ex02");
}

TEST_CASE("concurrent submissions are serialized") {
  Fixture f;
  std::vector<std::thread> workers;
  for (const char* who : {"a", "b"})
    workers.emplace_back([&f, who] {
      for (const auto& t : f.service.corpus()) f.service.submit_label(who, t.id, "safe");
    });
  for (auto& w : workers) w.join();
  CHECK(f.store.records().size() == 46);
  CHECK(f.service.agreement()["n"] == 23);
}

TEST_CASE("http api") {
  Fixture f;
  LiveServer live(f.service);
  auto cli = live.client();

  auto r = cli.Get("/v1/tasks/next?annotator=a");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Content-Type").find("application/json") == 0);
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  CHECK(body(r)["task"]["tweet_id"] == "ex01");

  r = cli.Get("/v1/tasks/next", {{"X-Annotator", "b"}});
  CHECK(body(r)["task"]["assignment"] == "b");
  r = cli.Get("/v1/tasks/next?annotator=nobody");
  CHECK(r->status == 403);
  CHECK(body(r)["error"] == "unknown_annotator");
  r = cli.Get("/v1/tasks/next");
  CHECK(r->status == 400);

  r = cli.Post("/v1/labels", R"({"annotator": "a", "tweet_id": "ex01", "label": "safe"})", "application/json");
  CHECK(r->status == 200);
  CHECK(body(r)["ok"] == true);
  r = cli.Post("/v1/labels", {{"X-Annotator", "b"}}, R"({"tweet_id": "ex01", "label": "dangerous"})",
               "application/json");
  CHECK(r->status == 200);
  CHECK(body(r)["disagreements"] == 1);
  r = cli.Post("/v1/labels", R"({"annotator": "a", "tweet_id": "ex01", "label": "safe"})", "application/json");
  CHECK(r->status == 409);
  r = cli.Post("/v1/labels", R"({"annotator": "a", "tweet_id": "ex02", "label": "meh"})", "application/json");
  CHECK(r->status == 400);
  CHECK(body(r)["error"] == "invalid_label");
  r = cli.Post("/v1/labels", R"({"annotator": "a", "tweet_id": "ex99", "label": "safe"})", "application/json");
  CHECK(r->status == 404);
  r = cli.Post("/v1/labels", "{not json", "application/json");
  CHECK(r->status == 400);
  CHECK(body(r)["error"] == "bad_request");
  r = cli.Post("/v1/labels", R"({"annotator": "a", "label": "safe"})", "application/json");
  CHECK(r->status == 400);

  r = cli.Get("/v1/agreement");
  CHECK(body(r)["n"] == 1);
  r = cli.Get("/v1/disagreements");
  CHECK(body(r)["count"] == 1);

  r = cli.Post("/v1/adjudicate", R"({"annotator": "lead", "tweet_id": "ex01", "label": "safe"})",
               "application/json");
  CHECK(r->status == 200);
  CHECK(body(r)["flagged"] == false);
  CHECK(body(cli.Get("/v1/disagreements"))["count"] == 0);

  r = cli.Get("/v1/stats");
  CHECK(r->status == 200);
  CHECK(body(r)["rows"].size() == 6);

  r = cli.Get("/v1/tweets/ex04/explain");
  CHECK(body(r)["verdict"]["fired_rules"][0] == "R4");
  r = cli.Get("/v1/tweets/nope/explain");
  CHECK(r->status == 404);

  r = cli.Get("/v1/status");
  CHECK(body(r)["records"] == 3);

  r = cli.Options("/v1/labels");
  REQUIRE(r);
  CHECK(r->status == 204);
  CHECK(r->get_header_value("Access-Control-Allow-Headers").find("X-Annotator") != std::string::npos);

  r = cli.Get("/v1/unknown");
  CHECK(r->status == 404);
}
