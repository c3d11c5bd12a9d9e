#include "dangspeech/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "util.hpp"

namespace dangspeech {

std::size_t Vocabulary::add(const std::string& name) {
  auto [it, inserted] = index_.try_emplace(name, names_.size());
  if (inserted) names_.push_back(name);
  return it->second;
}

long Vocabulary::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::vector<std::string> feature_names(const FeatureVector& f) {
  std::vector<std::string> names;
  auto flag = [&](bool on, const char* name) {
    if (on) names.push_back(std::string("flag:") + name);
  };
  flag(f.has_mention, "mention");
  flag(f.is_question, "question");
  flag(f.emoji_pleasant > 0, "emoji_pleasant");
  flag(f.emoji_unpleasant > 0, "emoji_unpleasant");
  flag(f.emoji_other > 0, "emoji_other");
  flag(f.has_conditional, "conditional");
  flag(f.has_modal, "modal");
  flag(f.body_part_count > 0, "body_part");
  flag(f.has_laughter, "laughter");
  for (const auto& [tok, count] : f.tokens) names.push_back("tok:" + tok);
  std::sort(names.begin(), names.end());
  return names;
}

Vocabulary build_vocabulary(const std::vector<FeatureVector>& examples) {
  std::set<std::string> all;
  for (const auto& f : examples)
    for (auto& n : feature_names(f)) all.insert(std::move(n));
  Vocabulary v;
  for (const auto& n : all) v.add(n);
  return v;
}

SparseVector encode(const Vocabulary& vocab, const FeatureVector& f) {
  SparseVector x;
  for (const auto& name : feature_names(f)) {
    const long id = vocab.find(name);
    if (id >= 0) x.emplace_back(static_cast<std::size_t>(id), 1.0);
  }
  std::sort(x.begin(), x.end());
  return x;
}

nlohmann::json to_json(const Hyperparams& h) {
  return {{"learning_rate", h.learning_rate}, {"l2", h.l2}, {"epochs", h.epochs}, {"seed", h.seed}};
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  Hyperparams h;
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.l2 = j.value("l2", h.l2);
  h.epochs = j.value("epochs", h.epochs);
  h.seed = j.value("seed", h.seed);
  return h;
}

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json weights = nlohmann::json::object();
  for (std::size_t i = 0; i < p.weights.size(); ++i) weights[p.vocabulary.names()[i]] = p.weights[i];
  return {{"format", "dangspeech-logreg"},
          {"version", ModelParams::kFormatVersion},
          {"hyperparams", to_json(p.hyperparams)},
          {"bias", p.bias},
          {"weights", weights}};
}

ModelParams model_params_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "dangspeech-logreg")
    throw Error("invalid_model", "not a dangspeech model file");
  if (j.value("version", 0) != ModelParams::kFormatVersion)
    throw Error("invalid_model", "unsupported model version");
  ModelParams p;
  p.hyperparams = hyperparams_from_json(j.at("hyperparams"));
  p.bias = j.at("bias").get<double>();
  for (const auto& [name, w] : j.at("weights").items()) {
    p.vocabulary.add(name);
    p.weights.push_back(w.get<double>());
  }
  return p;
}

void save_params(const ModelParams& p, const std::filesystem::path& path) {
  util::write_file(path, to_json(p).dump(2) + "\n");
}

ModelParams load_params(const std::filesystem::path& path) {
  try {
    return model_params_from_json(nlohmann::json::parse(util::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double margin(const std::vector<double>& w, double b, const SparseVector& x) {
  double z = b;
  for (const auto& [i, v] : x)
    if (i < w.size()) z += w[i] * v;
  return z;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double loss_and_gradient(const std::vector<double>& w, double b, const std::vector<Example>& data, double l2,
                         std::vector<double>* grad_w, double* grad_b) {
  if (data.empty()) throw Error("empty_input", "loss over an empty training set");
  const double n = static_cast<double>(data.size());
  if (grad_w) grad_w->assign(w.size(), 0.0);
  double gb = 0;
  double loss = 0;
  for (const auto& ex : data) {
    const double z = margin(w, b, ex.x);
    const double y = ex.y == Label::kDangerous ? 1.0 : 0.0;
    // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
    loss += softplus(z) - y * z;
    const double r = sigmoid(z) - y;
    gb += r;
    if (grad_w)
      for (const auto& [i, v] : ex.x) (*grad_w)[i] += r * v;
  }
  loss /= n;
  double sq = 0;
  for (double wi : w) sq += wi * wi;
  loss += 0.5 * l2 * sq;
  if (grad_w)
    for (std::size_t i = 0; i < w.size(); ++i) (*grad_w)[i] = (*grad_w)[i] / n + l2 * w[i];
  if (grad_b) *grad_b = gb / n;
  return loss;
}

TrainResult train(const std::vector<Example>& data, Vocabulary vocab, const Hyperparams& hp,
                  const EpochCallback& on_epoch) {
  bool seen[2] = {false, false};
  for (const auto& ex : data) seen[index_of(ex.y)] = true;
  if (!seen[0] || !seen[1]) throw Error("single_class", "training needs examples of both classes");

  // The Hessian of the mean logistic loss is bounded by max |(x,1)|^2 / 4.
  double max_sq = 0;
  for (const auto& ex : data) {
    double sq = 1.0;
    for (const auto& [i, v] : ex.x) sq += v * v;
    max_sq = std::max(max_sq, sq);
  }
  const double lipschitz = 0.25 * max_sq + hp.l2;

  TrainResult result;
  result.step = std::min(hp.learning_rate, 1.0 / lipschitz);
  ModelParams& p = result.params;
  p.vocabulary = std::move(vocab);
  p.weights.assign(p.vocabulary.size(), 0.0);
  p.hyperparams = hp;

  std::vector<double> gw;
  double gb = 0;
  result.loss_history.push_back(loss_and_gradient(p.weights, p.bias, data, hp.l2, &gw, &gb));
  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    for (std::size_t i = 0; i < p.weights.size(); ++i) p.weights[i] -= result.step * gw[i];
    p.bias -= result.step * gb;
    result.loss_history.push_back(loss_and_gradient(p.weights, p.bias, data, hp.l2, &gw, &gb));
    if (on_epoch) on_epoch(epoch, p);
  }
  return result;
}

TrainResult train(const std::vector<FeatureVector>& features, const std::vector<Label>& labels,
                  const Hyperparams& hp, const EpochCallback& on_epoch) {
  if (features.size() != labels.size()) throw Error("length_mismatch", "features and labels differ in length");
  Vocabulary vocab = build_vocabulary(features);
  std::vector<Example> data;
  data.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) data.push_back({encode(vocab, features[i]), labels[i]});
  return train(data, std::move(vocab), hp, on_epoch);
}

Prediction predict(const ModelParams& params, const SparseVector& x) {
  const double p = sigmoid(margin(params.weights, params.bias, x));
  return {p > 0.5 ? Label::kDangerous : Label::kSafe, p};
}

Prediction predict(const ModelParams& params, const FeatureVector& f) {
  return predict(params, encode(params.vocabulary, f));
}

namespace {

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : 100.0 * static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

EvalReport evaluate_confusion(const std::array<std::array<std::size_t, 2>, 2>& c) {
  EvalReport r;
  r.confusion = c;
  r.n = c[0][0] + c[0][1] + c[1][0] + c[1][1];
  if (r.n == 0) throw Error("empty_input", "evaluation over zero examples");
  for (int k = 0; k < 2; ++k) {
    ClassMetrics& m = r.per_class[static_cast<std::size_t>(k)];
    const std::size_t tp = c[k][k];
    const std::size_t predicted = c[0][k] + c[1][k];
    m.support = c[k][0] + c[k][1];
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, m.support);
    m.f1 = m.precision + m.recall == 0 ? 0.0 : 2 * m.precision * m.recall / (m.precision + m.recall);
  }
  r.macro_precision = (r.per_class[0].precision + r.per_class[1].precision) / 2;
  r.macro_recall = (r.per_class[0].recall + r.per_class[1].recall) / 2;
  r.macro_f1 = (r.per_class[0].f1 + r.per_class[1].f1) / 2;
  r.accuracy = ratio(c[0][0] + c[1][1], r.n);
  return r;
}

EvalReport evaluate(const std::vector<Label>& predictions, const std::vector<Label>& gold) {
  if (predictions.size() != gold.size())
    throw Error("length_mismatch", "predictions and gold labels differ in length");
  std::array<std::array<std::size_t, 2>, 2> c{};
  for (std::size_t i = 0; i < gold.size(); ++i) ++c[index_of(gold[i])][index_of(predictions[i])];
  return evaluate_confusion(c);
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_class = nlohmann::json::object();
  for (Label l : kLabels) {
    const auto& m = r.of(l);
    per_class[std::string(to_string(l))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  return {{"n", r.n},
          {"confusion", r.confusion},
          {"per_class", per_class},
          {"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall},
          {"macro_f1", r.macro_f1},
          {"accuracy", r.accuracy}};
}

std::string to_text_table(const EvalReport& r, const std::string& name) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %10s %10s %10s %10s\n", "Model", "Precision", "Recall", "Acc", "F1");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %10.2f %10.2f %10.2f %10.2f\n", name.c_str(), r.macro_precision,
                r.macro_recall, r.accuracy, r.macro_f1);
  out += buf;
  return out;
}

MajorityBaseline MajorityBaseline::fit(const std::vector<Label>& train_labels) {
  ClassCounts c;
  for (Label l : train_labels) (l == Label::kSafe ? c.safe : c.dangerous)++;
  return fit(c);
}

MajorityBaseline MajorityBaseline::fit(const ClassCounts& c) {
  if (c.total() == 0) throw Error("empty_input", "majority baseline needs training labels");
  return MajorityBaseline(c.dangerous > c.safe ? Label::kDangerous : Label::kSafe);
}

EvalReport majority_baseline_report(const SplitCounts& counts) {
  const Label l = MajorityBaseline::fit(counts.train).label();
  std::array<std::array<std::size_t, 2>, 2> c{};
  c[0][index_of(l)] = counts.test.safe;
  c[1][index_of(l)] = counts.test.dangerous;
  return evaluate_confusion(c);
}

}  // namespace dangspeech
