#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dangspeech/corpus.hpp"
#include "dangspeech/model.hpp"

namespace dangspeech {

using FeatureFn = std::function<FeatureVector(const Tweet&)>;

struct ExperimentConfig {
  Hyperparams hyperparams;
  bool baseline = false;  // majority-class predictor instead of the classifier
};

struct ExperimentResult {
  std::string model;  // "logreg" or "majority"
  EvalReport dev;
  EvalReport test;
  std::size_t best_epoch = 0;         // 0 for the baseline
  std::vector<double> dev_macro_f1;   // per epoch
  std::vector<double> loss_history;
  std::size_t train_size = 0;
  std::size_t augmentation_size = 0;
  ModelParams params;                 // empty for the baseline
  std::vector<std::string> warnings;  // not part of the report
};

// Trains on split.train (plus every labelled tweet of `augmentation`),
// picks the epoch with the best dev macro F1 (earliest on ties) and scores
// it on split.test. Every tweet used needs a gold label.
ExperimentResult run_experiment(const Corpus& corpus, const DatasetSplit& split, const FeatureFn& features,
                                const ExperimentConfig& config, const Corpus* augmentation = nullptr);

nlohmann::json report_json(const ExperimentResult& r);
std::string report_text(const ExperimentResult& r);

// report.json, report.txt and (for the classifier) params.json.
void write_artifacts(const ExperimentResult& r, const std::filesystem::path& out_dir);

}  // namespace dangspeech
