#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

using namespace dangspeech;
using nlohmann::json;

namespace {

struct Run {
  int rc;
  std::string out;
};

// Runs the CLI through the shell, stderr merged into stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string(DANGSPEECH_CLI) + " " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen-seeds reproduces the reference list") {
  const auto out = fixtures::temp_dir("cli_seeds");
  const Run r = cli("--out " + q(out) + " gen-seeds --check " + q(fixtures::data_dir() / "seeds_286.txt"));
  CHECK(r.rc == 0);
  CHECK(r.out.find("286 phrases, 0 missing, 0 extra") != std::string::npos);
  CHECK(read(out / "seeds.txt") == fixtures::resources().seeds().to_text());
}

TEST_CASE("gen-seeds reports a diff against another list") {
  const auto dir = fixtures::temp_dir("cli_seeds_diff");
  std::ofstream(dir / "ref.txt") << "اقتلك\nكلمه\n";
  const Run r = cli("--out " + q(dir) + " gen-seeds --check " + q(dir / "ref.txt"));
  CHECK(r.rc == 1);
  CHECK(r.out.find("1 missing, 285 extra") != std::string::npos);
  CHECK(r.out.find("- كلمه") != std::string::npos);
}

TEST_CASE("match, features and judge") {
  Run r = cli("match 'انا بفكر اقتلك' 'صباح الخير'");
  CHECK(r.rc == 0);
  std::istringstream lines(r.out);
  std::string l1, l2;
  std::getline(lines, l1);
  std::getline(lines, l2);
  CHECK(json::parse(l1)["matches"][0]["seed"] == "اقتلك");
  CHECK(json::parse(l2)["matches"].empty());

  r = cli("features '@user اقتلك؟'");
  CHECK(json::parse(r.out)["features"]["is_question"] == true);

  r = cli("judge --input " + q(fixtures::fixture_dir() / "guideline_examples.jsonl"));
  CHECK(r.rc == 0);
  std::istringstream all(r.out);
  std::map<std::string, json> by_id;
  for (std::string line; std::getline(all, line);) {
    const json j = json::parse(line);
    by_id[j["id"]] = j;
  }
  CHECK(by_id.size() == 23);
  CHECK(by_id["ex03"]["verdict"]["label"] == "safe");
  CHECK(by_id["ex07"]["verdict"]["fired_rules"][0] == "R6");
  CHECK(by_id["ex02"]["verdict"].is_null());
}

TEST_CASE("kappa from a matrix") {
  const auto out = fixtures::temp_dir("cli_kappa");
  const Run r = cli("--out " + q(out) + " kappa --matrix 3570,52,70,1319");
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out)["kappa"].get<double>() == doctest::Approx(0.9389983078756325).epsilon(1e-13));
  CHECK(std::filesystem::exists(out / "kappa.json"));
  const Run bad = cli("--out " + q(out) + " kappa --matrix 5,0,0,0");
  CHECK(bad.rc == 1);
  CHECK(json::parse(bad.out)["error"] == "undefined_kappa");
}

TEST_CASE("baseline evaluation from split counts") {
  const auto out = fixtures::temp_dir("cli_eval");
  const Run r = cli("--out " + q(out) + " eval --baseline majority --split " + q(fixtures::data_dir() / "table8.json"));
  CHECK(r.rc == 0);
  CHECK(r.out.find("Acc 58.66 F1 36.97") != std::string::npos);
  const Run no_baseline = cli("--out " + q(out) + " eval --split " + q(fixtures::data_dir() / "table8.json"));
  CHECK(no_baseline.rc == 1);
}

TEST_CASE("ingest, preprocess, split, train, eval pipeline") {
  const auto dir = fixtures::temp_dir("cli_pipeline");
  // a small labelled corpus from the annotated fixture
  const Corpus full = fixtures::annotated_fixture();
  Corpus small;
  for (std::size_t i = 0; i < 600; ++i) small.add(full.tweets()[i]);
  write_jsonl(small, dir / "corpus.jsonl");

  Run r = cli("ingest " + q(dir / "corpus.jsonl"));
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out)["tweets"] == 600);

  r = cli("--out " + q(dir) + " preprocess " + q(dir / "corpus.jsonl"));
  CHECK(r.rc == 0);
  const std::size_t retained = json::parse(r.out)["retained"];
  CHECK(retained < 600);

  r = cli("--out " + q(dir) + " --seed 3 split " + q(dir / "preprocessed.jsonl"));
  CHECK(r.rc == 0);
  const json s = json::parse(r.out);
  CHECK(s["train"].get<std::size_t>() + s["dev"].get<std::size_t>() + s["test"].get<std::size_t>() == retained);

  r = cli("--out " + q(dir) + " train " + q(dir / "preprocessed.jsonl") + " --split " + q(dir / "split.json") +
          " --epochs 20");
  CHECK(r.rc == 0);
  CHECK(std::filesystem::exists(dir / "params.json"));
  const std::string first = read(dir / "params.json");
  r = cli("--out " + q(dir) + " train " + q(dir / "preprocessed.jsonl") + " --split " + q(dir / "split.json") +
          " --epochs 20");
  CHECK(read(dir / "params.json") == first);

  r = cli("--out " + q(dir) + " eval --split " + q(dir / "split.json") + " --corpus " +
          q(dir / "preprocessed.jsonl") + " --model " + q(dir / "params.json"));
  CHECK(r.rc == 0);
  CHECK(r.out.find("Acc ") != std::string::npos);

  r = cli("--out " + q(dir) + " eval --split " + q(dir / "split.json") + " --corpus " +
          q(dir / "preprocessed.jsonl") + " --baseline majority");
  CHECK(r.rc == 0);

  r = cli("--out " + q(dir) + " stats " + q(dir / "corpus.jsonl"));
  CHECK(r.rc == 0);
  CHECK(r.out.find("Mentions") != std::string::npos);

  r = cli("--out " + q(dir) + " kappa --corpus " + q(dir / "corpus.jsonl"));
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out)["n"] == 600);
}

TEST_CASE("collect-sim with checkpoints") {
  const auto dir = fixtures::temp_dir("cli_collect");
  const auto seeds = fixtures::resources().seeds().texts();
  const auto world = fixtures::synthetic_world(seeds);
  Corpus source;
  for (const auto& t : world.tweets) source.add(t);
  write_jsonl(source, dir / "source.jsonl");
  const std::string base = "--out " + q(dir) + " collect-sim " + q(dir / "source.jsonl") + " --from " +
                           world.window.from + " --to " + world.window.to + " --checkpoint " + q(dir / "ckpt");
  std::filesystem::create_directories(dir / "ckpt");
  Run r = cli(base + " --max-units 100");
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out)["state"] == "searching");
  int guard = 0;
  while (json::parse(r.out)["state"] != "done" && guard++ < 20) r = cli(base + " --resume --max-units 100");
  CHECK(json::parse(r.out)["state"] == "done");
  const Corpus got = ingest(dir / "collected.jsonl").corpus;
  std::set<std::string> ids;
  for (const auto& t : got) ids.insert(t.id);
  CHECK(ids == fixtures::expected_collection(world, seeds));
}

TEST_CASE("errors are reported as json with exit codes") {
  Run r = cli("ingest /nonexistent.jsonl");
  CHECK(r.rc == 2);
  r = cli("no-such-command");
  CHECK(r.rc == 2);
  const auto dir = fixtures::temp_dir("cli_err");
  std::ofstream(dir / "bad.jsonl") << "{\"id\": \"1\", \"text\": \"ok\"}\n{oops\n";
  r = cli("ingest " + q(dir / "bad.jsonl"));
  CHECK(r.rc == 1);
  const json e = json::parse(r.out);
  CHECK(e["error"] == "parse_error");
  CHECK(e["command"] == "ingest");
  CHECK(e["message"].get<std::string>().find(":2:") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags win") {
  const auto dir = fixtures::temp_dir("cli_config");
  std::ofstream(dir / "cfg.json") << json{{"out", (dir / "from_config").string()}}.dump();
  Run r = cli("--config " + q(dir / "cfg.json") + " kappa --matrix 1,2,3,4");
  CHECK(r.rc == 0);
  CHECK(std::filesystem::exists(dir / "from_config" / "kappa.json"));
  r = cli("--config " + q(dir / "cfg.json") + " --out " + q(dir / "flag") + " kappa --matrix 1,2,3,4");
  CHECK(std::filesystem::exists(dir / "flag" / "kappa.json"));
}

TEST_CASE("help mentions every subcommand") {
  const Run r = cli("--help");
  CHECK(r.rc == 0);
  for (const char* sc : {"gen-seeds", "match", "features", "judge", "ingest", "preprocess", "split", "stats",
                         "kappa", "train", "eval", "collect-sim", "serve"})
    CHECK_MESSAGE(r.out.find(sc) != std::string::npos, sc);
}
