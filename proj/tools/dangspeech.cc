// dangspeech: command-line driver for the threat-speech toolkit.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dangspeech/agreement.hpp"
#include "dangspeech/collector.hpp"
#include "dangspeech/corpus.hpp"
#include "dangspeech/experiment.hpp"
#include "dangspeech/model.hpp"
#include "dangspeech/resources.hpp"
#include "dangspeech/service.hpp"
#include "dangspeech/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dangspeech;

namespace {

struct Context {
  std::string data_dir = DANGSPEECH_DEFAULT_DATA_DIR;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string rules;
  std::string config;
  Hyperparams hp;
  std::string command;

  CLI::Option* data_dir_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* rules_opt = nullptr;
};

// Values from --config fill in whatever was not given on the command line.
void apply_config(Context& ctx) {
  if (ctx.config.empty()) return;
  std::ifstream in(ctx.config);
  if (!in) throw IoError("cannot open config " + ctx.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(ctx.config, 0, e.what());
  }
  if (j.contains("data_dir") && !ctx.data_dir_opt->count()) ctx.data_dir = j["data_dir"].get<std::string>();
  if (j.contains("seed") && !ctx.seed_opt->count()) ctx.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out") && !ctx.out_opt->count()) ctx.out = j["out"].get<std::string>();
  if (j.contains("rules") && !ctx.rules_opt->count()) ctx.rules = j["rules"].get<std::string>();
  if (j.contains("hyperparams")) ctx.hp = hyperparams_from_json(j["hyperparams"]);
}

ResourcePaths resource_paths(const Context& ctx) {
  ResourcePaths p = ResourcePaths::in(ctx.data_dir);
  if (!ctx.rules.empty()) p.rule_config = fs::path(ctx.rules);
  p.validate();
  return p;
}

void write_out(const Context& ctx, const std::string& name, const std::string& contents) {
  const fs::path path = fs::path(ctx.out) / name;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
}

// Texts from positional arguments, or the "text" field of each JSONL line.
std::vector<std::pair<std::string, std::string>> input_texts(const std::vector<std::string>& texts,
                                                             const std::string& input) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!input.empty()) {
    for (const auto& t : ingest(input).corpus) out.emplace_back(t.id, t.text);
  }
  for (std::size_t i = 0; i < texts.size(); ++i) out.emplace_back(std::to_string(i + 1), texts[i]);
  if (out.empty()) throw Error("no_input", "give a text argument or --input FILE");
  return out;
}

json match_json(const SeedMatch& m, std::string_view raw) {
  return {{"seed", m.seed},
          {"begin", m.char_span.begin},
          {"end", m.char_span.end},
          {"text", std::string(raw.substr(m.char_span.begin, m.char_span.size()))}};
}

json verdict_or_null(const Resources& res, const TweetAnalysis& a) {
  if (a.matches.empty()) return nullptr;
  return to_json(res.engine().judge(a.features, a.matches,
                                    detect_sports_context(res.engine().sports(), a.tokens)));
}

bool is_count_spec(const json& j) { return j.contains("train") && j["train"].is_object(); }

std::atomic<HttpServer*> g_server{nullptr};

void on_signal(int) {
  if (HttpServer* s = g_server.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  CLI::App app{"Arabic dangerous-speech toolkit: threat lexicon, seed phrases, matching, guideline rules,\n"
               "corpus statistics, annotator agreement, evaluation and annotation service."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  ctx.data_dir_opt = app.add_option("--data-dir", ctx.data_dir, "Directory holding lexicon and marker files")
                         ->capture_default_str();
  ctx.seed_opt = app.add_option("--seed", ctx.seed, "Seed for every random choice")->capture_default_str();
  ctx.out_opt = app.add_option("--out", ctx.out, "Output directory")->capture_default_str();
  ctx.rules_opt = app.add_option("--rules", ctx.rules, "Rule order/toggle file (default: <data-dir>/rules.conf)");
  app.add_option("--config", ctx.config, "JSON file with defaults: data_dir, seed, out, rules, hyperparams")
      ->check(CLI::ExistingFile);

  // gen-seeds
  std::string check_file;
  auto* gen = app.add_subcommand(
      "gen-seeds",
      "Generate the direct-threat seed phrases (1st person SG/PL subject + threat verb + 2nd person SG/PL\n"
      "object clitic, plus multiword expressions) and optionally diff them against a published list.");
  gen->add_option("--check", check_file, "Reference list to diff against (one phrase per line)")
      ->check(CLI::ExistingFile);

  // match / features / judge
  std::vector<std::string> texts;
  std::string input_file;
  auto* match = app.add_subcommand("match", "Find seed phrases in texts (token-level, leftmost-longest).");
  auto* feats = app.add_subcommand(
      "features", "Extract phenomena features: mentions, questions, emoji polarity, conditionals, modals,\n"
                  "body parts, laughter, seed counts and the token bag.");
  auto* judge = app.add_subcommand(
      "judge", "Apply the annotation-guideline rules (sports context, emoji polarity, laughter, questions and\n"
               "modals, seed-only tweets, default dangerous) and print the verdict with its rule trace.");
  for (auto* sc : {match, feats, judge}) {
    sc->add_option("text", texts, "Tweet text(s)");
    sc->add_option("--input", input_file, "JSONL file of tweets")->check(CLI::ExistingFile);
  }

  // ingest / preprocess / split / stats
  std::string corpus_file;
  auto* ing = app.add_subcommand("ingest", "Validate a JSONL tweet file (first id wins on duplicates).");
  ing->add_option("corpus", corpus_file, "JSONL tweets")->required()->check(CLI::ExistingFile);

  std::size_t min_words = 2;
  auto* pre = app.add_subcommand(
      "preprocess", "Remove every seed phrase (used to collect the data) and keep tweets with at least two\n"
                    "words left.");
  pre->add_option("corpus", corpus_file, "JSONL tweets")->required()->check(CLI::ExistingFile);
  pre->add_option("--min-words", min_words, "Minimum word tokens after seed removal")->capture_default_str();

  std::string ratios_str, counts_file;
  auto* spl = app.add_subcommand(
      "split", "Stratified train/dev/test split, by ratios or by explicit per-class counts (table8.json\n"
               "holds the reference split sizes).");
  spl->add_option("corpus", corpus_file, "JSONL tweets with gold labels")->required()->check(CLI::ExistingFile);
  auto* ratios_opt = spl->add_option("--ratios", ratios_str, "train,dev,test ratios (default 0.8,0.1,0.1)");
  spl->add_option("--counts", counts_file, "Per-class counts JSON")->check(CLI::ExistingFile)->excludes(ratios_opt);

  std::string timeline_file;
  auto* sts = app.add_subcommand(
      "stats", "Per-class phenomena frequencies of a labelled corpus, and optionally descriptive statistics\n"
               "(mean, std, min, max, nearest-rank quartiles) of per-user timeline counts.");
  sts->add_option("corpus", corpus_file, "JSONL tweets with gold labels")->check(CLI::ExistingFile);
  sts->add_option("--timeline", timeline_file, "JSON {\"seed_counts\": [...], \"timeline_sizes\": [...]}")
      ->check(CLI::ExistingFile);

  // kappa
  std::vector<std::uint64_t> matrix;
  std::string store_file;
  std::vector<std::string> pair;
  auto* kap = app.add_subcommand(
      "kappa", "Cohen's kappa between two annotators from a 2x2 matrix, a corpus with annotator labels, or\n"
               "a label store; also lists disagreements.");
  kap->add_option("--matrix", matrix, "safe/safe safe/dangerous dangerous/safe dangerous/dangerous")
      ->expected(4)
      ->delimiter(',');
  kap->add_option("--corpus", corpus_file, "JSONL tweets with annotator_labels")->check(CLI::ExistingFile);
  kap->add_option("--store", store_file, "Label store JSONL")->check(CLI::ExistingFile);
  kap->add_option("--annotators", pair, "The two annotator ids (default: first two found)")->delimiter(',');

  // train / eval
  std::string split_file, model_file, baseline, augment_file;
  auto* trn = app.add_subcommand(
      "train", "Train the logistic-regression classifier on the train split, select the epoch with the best\n"
               "dev macro F1, report on test. Writes report.json, report.txt and params.json.");
  trn->add_option("corpus", corpus_file, "Preprocessed JSONL tweets")->required()->check(CLI::ExistingFile);
  trn->add_option("--split", split_file, "Split manifest from `split`")->required()->check(CLI::ExistingFile);
  trn->add_option("--augment", augment_file, "Extra labelled JSONL tweets added to train")->check(CLI::ExistingFile);
  trn->add_option("--epochs", ctx.hp.epochs, "Gradient-descent epochs")->capture_default_str();
  trn->add_option("--lr", ctx.hp.learning_rate, "Step-size bound")->capture_default_str();
  trn->add_option("--l2", ctx.hp.l2, "L2 strength")->capture_default_str();

  auto* evl = app.add_subcommand(
      "eval", "Score on the test split: per-class and macro precision/recall/F1 plus accuracy. The majority\n"
              "baseline also works from per-class split counts alone.");
  evl->add_option("--split", split_file, "Split manifest or per-class counts JSON")->required()->check(CLI::ExistingFile);
  evl->add_option("--baseline", baseline, "Baseline predictor")->check(CLI::IsMember({"majority"}));
  evl->add_option("--corpus", corpus_file, "Preprocessed JSONL tweets")->check(CLI::ExistingFile);
  evl->add_option("--model", model_file, "params.json from `train`")->check(CLI::ExistingFile);

  // collect-sim
  std::string source_file, checkpoint_dir, window_from, window_to;
  double rate = 2.0;
  std::size_t parallelism = 1;
  std::optional<std::size_t> max_units;
  bool resume = false;
  auto* col = app.add_subcommand(
      "collect-sim", "Two-phase collection against a simulated source: seed search, author extraction, timeline\n"
                     "crawl, local seed verification and deduplication. Rate limited, retried, resumable.");
  col->add_option("source", source_file, "JSONL tweets acting as the platform")->required()->check(CLI::ExistingFile);
  col->add_option("--rate", rate, "Requests per second (simulated clock)")->capture_default_str();
  col->add_option("--parallelism", parallelism, "Concurrent timeline fetches")->capture_default_str();
  col->add_option("--from", window_from, "Search window start (ISO-8601)");
  col->add_option("--to", window_to, "Search window end (ISO-8601)");
  col->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory");
  col->add_option("--max-units", max_units, "Stop after this many queries/users (then checkpoint)");
  col->add_flag("--resume", resume, "Continue from --checkpoint");

  // serve
  std::string host = "127.0.0.1", cors_origin = "*", ui_dir;
  int port = 8080;
  std::vector<std::string> annotators{"A", "B"};
  auto* srv = app.add_subcommand(
      "serve", "HTTP annotation service under /v1: dual annotation tasks with rule suggestions, label\n"
               "submission, live agreement, disagreement queue, adjudication, statistics and explanations.");
  srv->add_option("corpus", corpus_file, "JSONL tweets to annotate")->required()->check(CLI::ExistingFile);
  srv->add_option("--store", store_file, "Label store JSONL (created if missing)")->required();
  srv->add_option("--annotators", annotators, "Annotator ids; the first two form the agreement pair")
      ->delimiter(',')
      ->capture_default_str();
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();
  srv->add_option("--cors-origin", cors_origin)->capture_default_str();
  srv->add_option("--ui-dir", ui_dir, "Static files served at /")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  for (auto* sc : app.get_subcommands()) ctx.command = sc->get_name();

  try {
    apply_config(ctx);

    if (*gen) {
      const auto paths = resource_paths(ctx);
      const SeedSet seeds = generate_all(Lexicon::load(paths.lexicon), load_rules(paths.seed_rules));
      write_out(ctx, "seeds.txt", seeds.to_text());
      if (check_file.empty()) {
        std::cout << seeds.size() << " phrases\n";
        return 0;
      }
      const SeedDiff diff = diff_against_published(seeds, fs::path(check_file));
      std::cout << seeds.size() << " phrases, " << diff.missing.size() << " missing, " << diff.extra.size()
                << " extra\n";
      for (const auto& m : diff.missing) std::cout << "- " << m << "\n";
      for (const auto& x : diff.extra) std::cout << "+ " << x << "\n";
      return diff.exact() ? 0 : 1;
    }

    if (*match || *feats || *judge) {
      const Resources res(resource_paths(ctx));
      for (const auto& [id, text] : input_texts(texts, input_file)) {
        const TweetAnalysis a = res.analyze(text);
        json line{{"id", id}};
        if (*match) {
          json ms = json::array();
          for (const auto& m : a.matches) ms.push_back(match_json(m, text));
          line["matches"] = ms;
        } else if (*feats) {
          line["features"] = to_json(a.features);
        } else {
          line["verdict"] = verdict_or_null(res, a);
          if (a.matches.empty()) line["reason"] = "no seed phrase in the text";
        }
        std::cout << line.dump() << "\n";
      }
      return 0;
    }

    if (*ing) {
      const IngestResult r = ingest(corpus_file);
      json counts = json::object();
      for (const auto& [l, n] : r.corpus.class_counts()) counts[std::string(to_string(l))] = n;
      write_out(ctx, "corpus.jsonl", to_jsonl(r.corpus));
      std::cout << json{{"tweets", r.corpus.size()}, {"duplicates", r.duplicates}, {"class_counts", counts}}.dump()
                << "\n";
      if (r.duplicates) std::cerr << "warning: " << r.duplicates << " duplicate id(s) dropped\n";
      return 0;
    }

    if (*pre) {
      const Resources res(resource_paths(ctx));
      const PreprocessResult r = preprocess(ingest(corpus_file).corpus, res.matcher(), min_words);
      write_out(ctx, "preprocessed.jsonl", to_jsonl(r.corpus));
      write_out(ctx, "preprocess_report.json", to_json(r.report).dump(2) + "\n");
      std::cout << to_json(r.report).dump() << "\n";
      return 0;
    }

    if (*spl) {
      const Corpus corpus = ingest(corpus_file).corpus;
      DatasetSplit s;
      if (!counts_file.empty()) {
        s = split_by_counts(corpus, load_split_counts(counts_file), ctx.seed);
      } else {
        SplitRatios r;
        if (!ratios_str.empty()) {
          std::vector<double> v;
          std::stringstream ss(ratios_str);
          for (std::string item; std::getline(ss, item, ',');) v.push_back(std::stod(item));
          if (v.size() != 3) throw Error("invalid_ratios", "--ratios needs three comma-separated numbers");
          r = {v[0], v[1], v[2]};
        }
        s = split_by_ratios(corpus, r, ctx.seed);
      }
      write_out(ctx, "split.json", to_json(s).dump(2) + "\n");
      std::cout << json{{"train", s.train.size()}, {"dev", s.dev.size()}, {"test", s.test.size()}, {"seed", s.seed}}.dump()
                << "\n";
      return 0;
    }

    if (*sts) {
      if (corpus_file.empty() && timeline_file.empty())
        throw Error("no_input", "give a corpus and/or --timeline FILE");
      json out = json::object();
      if (!corpus_file.empty()) {
        const Resources res(resource_paths(ctx));
        const Corpus corpus = ingest(corpus_file).corpus;
        std::vector<FeatureVector> fs_;
        std::vector<std::optional<Label>> labels;
        for (const auto& t : corpus) {
          fs_.push_back(res.features(t.text));
          labels.push_back(t.gold_label);
        }
        const PhenomenaTable table = phenomena_stats(fs_, labels);
        out["phenomena"] = to_json(table);
        std::cout << to_text_table(table);
      }
      if (!timeline_file.empty()) {
        std::ifstream in(timeline_file);
        const json j = json::parse(in);
        const TimelineStats ts = timeline_stats(j.at("seed_counts").get<std::vector<double>>(),
                                                j.at("timeline_sizes").get<std::vector<double>>());
        out["timeline"] = to_json(ts);
        std::cout << to_text_table(ts);
      }
      write_out(ctx, "stats.json", out.dump(2) + "\n");
      return 0;
    }

    if (*kap) {
      ConfusionMatrix2x2 m;
      json extra = json::object();
      if (!matrix.empty()) {
        m.counts = {{{matrix[0], matrix[1]}, {matrix[2], matrix[3]}}};
      } else {
        Corpus corpus;
        if (!corpus_file.empty()) {
          corpus = ingest(corpus_file).corpus;
        } else if (!store_file.empty()) {
          const LabelStore store(store_file);
          for (const auto& [tweet, by] : store.labels_by_tweet()) {
            Tweet t;
            t.id = tweet;
            t.text = tweet;
            t.annotator_labels = by;
            corpus.add(std::move(t));
          }
        } else {
          throw Error("no_input", "give --matrix, --corpus or --store");
        }
        if (pair.empty()) {
          std::set<std::string> seen;
          for (const auto& t : corpus)
            for (const auto& [a, l] : t.annotator_labels) seen.insert(a);
          pair.assign(seen.begin(), seen.end());
        }
        if (pair.size() < 2) throw Error("no_input", "need labels from two annotators");
        m = confusion_matrix(corpus, pair[0], pair[1]);
        const auto dis = disagreements(corpus);
        extra["annotators"] = {pair[0], pair[1]};
        extra["disagreements"] = dis.size();
        extra["disagreement_ids"] = dis;
      }
      const KappaParts k = kappa_parts(m);
      json out{{"matrix", to_json(m)}, {"n", m.total()}, {"p_o", k.p_o}, {"p_e", k.p_e}, {"kappa", k.kappa}};
      out.update(extra);
      write_out(ctx, "kappa.json", out.dump(2) + "\n");
      out.erase("disagreement_ids");
      std::cout << out.dump() << "\n";
      return 0;
    }

    if (*trn) {
      const Resources res(resource_paths(ctx));
      const Corpus corpus = ingest(corpus_file).corpus;
      std::optional<Corpus> aug;
      if (!augment_file.empty()) aug = ingest(augment_file).corpus;
      ExperimentConfig cfg;
      cfg.hyperparams = ctx.hp;
      cfg.hyperparams.seed = ctx.seed;
      const ExperimentResult r =
          run_experiment(corpus, load_split(split_file), [&](const Tweet& t) { return res.features(t.text); },
                         cfg, aug ? &*aug : nullptr);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      write_artifacts(r, ctx.out);
      std::cout << report_text(r);
      return 0;
    }

    if (*evl) {
      std::ifstream in(split_file);
      const json spec = json::parse(in);
      if (is_count_spec(spec)) {
        if (baseline.empty()) throw Error("no_model", "per-class counts only support --baseline majority");
        const EvalReport r = majority_baseline_report(split_counts_from_json(spec));
        write_out(ctx, "eval.json", to_json(r).dump(2) + "\n");
        std::cout << to_text_table(r, "Baseline");
        std::printf("Acc %.2f F1 %.2f\n", r.accuracy, r.macro_f1);
        return 0;
      }
      if (corpus_file.empty()) throw Error("no_input", "a split manifest needs --corpus");
      const Corpus corpus = ingest(corpus_file).corpus;
      const DatasetSplit split = split_from_json(spec);
      EvalReport r;
      std::string name;
      if (!baseline.empty()) {
        ExperimentConfig cfg;
        cfg.baseline = true;
        r = run_experiment(corpus, split, [](const Tweet&) { return FeatureVector{}; }, cfg).test;
        name = "Baseline";
      } else {
        if (model_file.empty()) throw Error("no_model", "give --model params.json or --baseline majority");
        const Resources res(resource_paths(ctx));
        const ModelParams params = load_params(model_file);
        std::vector<Label> pred, gold;
        for (const Tweet* t : select(corpus, split.test)) {
          if (!t->gold_label) throw Error("unlabeled_tweet", "tweet '" + t->id + "' has no gold label");
          pred.push_back(predict(params, res.features(t->text)).label);
          gold.push_back(*t->gold_label);
        }
        r = evaluate(pred, gold);
        name = "logreg";
      }
      write_out(ctx, "eval.json", to_json(r).dump(2) + "\n");
      std::cout << to_text_table(r, name);
      std::printf("Acc %.2f F1 %.2f\n", r.accuracy, r.macro_f1);
      return 0;
    }

    if (*col) {
      const Resources res(resource_paths(ctx));
      SyntheticSource source(ingest(source_file).corpus.tweets());
      SimulatedClock clock;
      CollectorConfig cfg;
      cfg.window = {window_from, window_to};
      cfg.requests_per_second = rate;
      cfg.parallelism = parallelism;
      CollectionJob job(source, res.matcher(), res.seeds().texts(), cfg, clock);
      if (resume) {
        if (checkpoint_dir.empty()) throw Error("no_checkpoint", "--resume needs --checkpoint DIR");
        job.load_checkpoint(checkpoint_dir);
      }
      const bool done = job.run(max_units);
      if (!checkpoint_dir.empty()) job.save_checkpoint(checkpoint_dir);
      if (done) write_out(ctx, "collected.jsonl", to_jsonl(job.results()));
      for (const auto& msg : job.log()) std::cerr << "warning: " << msg << "\n";
      std::cout << json{{"state", to_string(job.state())},
                        {"counters", to_json(job.counters())},
                        {"collected", job.results().size()},
                        {"simulated_seconds", clock.now()}}
                       .dump()
                << "\n";
      return 0;
    }

    if (*srv) {
      const Resources res(resource_paths(ctx));
      LabelStore store{fs::path(store_file)};
      AnnotationService service(ingest(corpus_file).corpus, res, store, annotators);
      HttpServer server(service, cors_origin, ui_dir.empty() ? std::nullopt : std::optional<fs::path>(ui_dir));
      if (!server.bind(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << port << "/v1\n";
      server.listen_after_bind();
      g_server = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", e.kind()}, {"message", e.what()}, {"command", ctx.command}}.dump() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << json{{"error", "parse_error"}, {"message", e.what()}, {"command", ctx.command}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}, {"command", ctx.command}}.dump() << "\n";
    return 1;
  }
  return 0;
}
