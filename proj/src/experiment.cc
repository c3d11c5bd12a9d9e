#include "dangspeech/experiment.hpp"

#include "util.hpp"

namespace dangspeech {

namespace {

Label gold_of(const Tweet& t) {
  if (!t.gold_label) throw Error("unlabeled_tweet", "tweet '" + t.id + "' has no gold label");
  return *t.gold_label;
}

struct Part {
  std::vector<SparseVector> x;
  std::vector<Label> y;
};

std::vector<Label> predict_all(const ModelParams& p, const Part& part) {
  std::vector<Label> out;
  out.reserve(part.x.size());
  for (const auto& x : part.x) out.push_back(predict(p, x).label);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const Corpus& corpus, const DatasetSplit& split, const FeatureFn& features,
                                const ExperimentConfig& config, const Corpus* augmentation) {
  ExperimentResult r;
  const auto train_tweets = select(corpus, split.train);
  const auto dev_tweets = select(corpus, split.dev);
  const auto test_tweets = select(corpus, split.test);
  if (dev_tweets.empty() || test_tweets.empty())
    throw Error("empty_split", "dev and test parts must be non-empty");

  std::vector<FeatureVector> train_f;
  std::vector<Label> train_y;
  for (const Tweet* t : train_tweets) {
    train_f.push_back(features(*t));
    train_y.push_back(gold_of(*t));
  }
  r.train_size = train_f.size();
  if (augmentation) {
    if (augmentation->empty()) r.warnings.push_back("augmentation corpus is empty");
    for (const auto& t : *augmentation) {
      train_f.push_back(features(t));
      train_y.push_back(gold_of(t));
      ++r.augmentation_size;
    }
  }

  std::vector<Label> dev_y, test_y;
  for (const Tweet* t : dev_tweets) dev_y.push_back(gold_of(*t));
  for (const Tweet* t : test_tweets) test_y.push_back(gold_of(*t));

  if (config.baseline) {
    r.model = "majority";
    const Label l = MajorityBaseline::fit(train_y).label();
    r.dev = evaluate(std::vector<Label>(dev_y.size(), l), dev_y);
    r.test = evaluate(std::vector<Label>(test_y.size(), l), test_y);
    return r;
  }

  r.model = "logreg";
  Vocabulary vocab = build_vocabulary(train_f);
  std::vector<Example> data;
  data.reserve(train_f.size());
  for (std::size_t i = 0; i < train_f.size(); ++i) data.push_back({encode(vocab, train_f[i]), train_y[i]});

  Part dev, test;
  for (const Tweet* t : dev_tweets) dev.x.push_back(encode(vocab, features(*t)));
  for (const Tweet* t : test_tweets) test.x.push_back(encode(vocab, features(*t)));

  double best = -1;
  ModelParams best_params;
  auto on_epoch = [&](std::size_t epoch, const ModelParams& p) {
    const double f1 = evaluate(predict_all(p, dev), dev_y).macro_f1;
    r.dev_macro_f1.push_back(f1);
    if (f1 > best) {
      best = f1;
      best_params = p;
      r.best_epoch = epoch;
    }
  };
  TrainResult trained = train(data, std::move(vocab), config.hyperparams, on_epoch);
  r.loss_history = std::move(trained.loss_history);
  if (r.best_epoch == 0) best_params = trained.params;  // zero epochs
  r.params = std::move(best_params);
  r.dev = evaluate(predict_all(r.params, dev), dev_y);
  r.test = evaluate(predict_all(r.params, test), test_y);
  return r;
}

nlohmann::json report_json(const ExperimentResult& r) {
  nlohmann::json j{{"model", r.model},
                   {"train_size", r.train_size},
                   {"augmentation_size", r.augmentation_size},
                   {"dev", to_json(r.dev)},
                   {"test", to_json(r.test)}};
  if (r.model != "majority") {
    j["best_epoch"] = r.best_epoch;
    j["hyperparams"] = to_json(r.params.hyperparams);
    j["dev_macro_f1"] = r.dev_macro_f1;
    j["loss_history"] = r.loss_history;
  }
  return j;
}

std::string report_text(const ExperimentResult& r) {
  return "TEST\n" + to_text_table(r.test, r.model) + "DEV\n" + to_text_table(r.dev, r.model);
}

void write_artifacts(const ExperimentResult& r, const std::filesystem::path& out_dir) {
  util::write_file(out_dir / "report.json", report_json(r).dump(2) + "\n");
  util::write_file(out_dir / "report.txt", report_text(r));
  if (r.model != "majority") save_params(r.params, out_dir / "params.json");
}

}  // namespace dangspeech
