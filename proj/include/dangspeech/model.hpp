#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dangspeech/corpus.hpp"
#include "dangspeech/features.hpp"
#include "dangspeech/label.hpp"

namespace dangspeech {

// Feature-id table. Ids are assigned in insertion order.
class Vocabulary {
 public:
  std::size_t add(const std::string& name);
  // -1 when unknown.
  long find(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Named binary features of a tweet: "flag:<name>" for the phenomena and
// "tok:<token>" for each distinct bag entry. Sorted by name.
std::vector<std::string> feature_names(const FeatureVector& f);

// Sorted by name, so ids are independent of example order.
Vocabulary build_vocabulary(const std::vector<FeatureVector>& examples);

// (feature id, value) pairs sorted by id; unknown names are dropped.
using SparseVector = std::vector<std::pair<std::size_t, double>>;
SparseVector encode(const Vocabulary& vocab, const FeatureVector& f);

struct Example {
  SparseVector x;
  Label y;
};

struct Hyperparams {
  double learning_rate = 1.0;  // upper bound; the step is capped at 1/L
  double l2 = 1e-3;            // on the weights, not the bias
  std::size_t epochs = 200;
  std::uint64_t seed = 1;
};

nlohmann::json to_json(const Hyperparams& h);
Hyperparams hyperparams_from_json(const nlohmann::json& j);

struct ModelParams {
  static constexpr int kFormatVersion = 1;

  Vocabulary vocabulary;
  std::vector<double> weights;  // one per vocabulary entry
  double bias = 0;
  Hyperparams hyperparams;
};

nlohmann::json to_json(const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j);
void save_params(const ModelParams& p, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

// Mean logistic loss plus l2/2 * |w|^2. Fills the gradients when non-null.
double loss_and_gradient(const std::vector<double>& weights, double bias, const std::vector<Example>& data,
                         double l2, std::vector<double>* grad_w = nullptr, double* grad_b = nullptr);

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_history;  // before training, then after each epoch
  double step = 0;                   // step size actually used
};

// Called after every epoch with the 1-based epoch number.
using EpochCallback = std::function<void(std::size_t epoch, const ModelParams&)>;

// Full-batch gradient descent from zero weights. With step <= 1/L for the
// smoothness constant L of the objective the loss never increases.
// Throws Error("single_class") unless both labels occur.
TrainResult train(const std::vector<Example>& data, Vocabulary vocab, const Hyperparams& hp,
                  const EpochCallback& on_epoch = {});
TrainResult train(const std::vector<FeatureVector>& features, const std::vector<Label>& labels,
                  const Hyperparams& hp, const EpochCallback& on_epoch = {});

struct Prediction {
  Label label;
  double probability;  // of dangerous
};

double sigmoid(double z);
Prediction predict(const ModelParams& params, const SparseVector& x);
Prediction predict(const ModelParams& params, const FeatureVector& f);

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;  // gold count
};

// All metric values are percentages.
struct EvalReport {
  std::size_t n = 0;
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [gold][predicted]
  std::array<ClassMetrics, 2> per_class{};                // indexed by Label
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  double accuracy = 0;

  const ClassMetrics& of(Label l) const { return per_class[static_cast<std::size_t>(index_of(l))]; }
};

// An undefined precision (class never predicted) counts as 0, and so does
// an F1 whose precision and recall are both 0. Throws
// Error("length_mismatch") and Error("empty_input").
EvalReport evaluate(const std::vector<Label>& predictions, const std::vector<Label>& gold);
EvalReport evaluate_confusion(const std::array<std::array<std::size_t, 2>, 2>& confusion);

nlohmann::json to_json(const EvalReport& r);
std::string to_text_table(const EvalReport& r, const std::string& name);

// Predicts the most frequent training label (safe on a tie).
class MajorityBaseline {
 public:
  static MajorityBaseline fit(const std::vector<Label>& train_labels);
  static MajorityBaseline fit(const ClassCounts& train_counts);
  Label label() const { return label_; }
  Label predict() const { return label_; }

 private:
  explicit MajorityBaseline(Label l) : label_(l) {}
  Label label_;
};

// Baseline scored straight from split class counts: the train majority
// label is predicted for every test item.
EvalReport majority_baseline_report(const SplitCounts& counts);

}  // namespace dangspeech
