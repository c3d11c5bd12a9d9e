#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dangspeech/corpus.hpp"
#include "dangspeech/label.hpp"

namespace dangspeech {

// counts[a][b]: annotator A said label a, annotator B said label b, with
// labels indexed safe = 0, dangerous = 1.
struct ConfusionMatrix2x2 {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t total() const;
  void add(Label a, Label b) { ++counts[index_of(a)][index_of(b)]; }
  ConfusionMatrix2x2 transposed() const;
  friend bool operator==(const ConfusionMatrix2x2&, const ConfusionMatrix2x2&) = default;
};

nlohmann::json to_json(const ConfusionMatrix2x2& m);

class UndefinedKappaError : public Error {
 public:
  explicit UndefinedKappaError(const std::string& why) : Error("undefined_kappa", why) {}
};

struct KappaParts {
  double p_o = 0;  // observed agreement
  double p_e = 0;  // chance agreement from the marginals
  double kappa = 0;
};

// Throws UndefinedKappaError on an empty matrix or when p_e = 1.
KappaParts kappa_parts(const ConfusionMatrix2x2& m);
double cohen_kappa(const ConfusionMatrix2x2& m);

// Matrix over tweets labelled by both annotators.
ConfusionMatrix2x2 confusion_matrix(const Corpus& corpus, const std::string& annotator_a,
                                    const std::string& annotator_b);

// Ids of tweets with at least two annotator labels that are not all equal,
// in corpus order.
std::vector<std::string> disagreements(const Corpus& corpus);

enum class RecordKind { kLabel, kAdjudication };

struct LabelRecord {
  std::string tweet_id;
  std::string annotator_id;
  Label label = Label::kSafe;
  std::string timestamp;
  RecordKind kind = RecordKind::kLabel;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

nlohmann::json to_json(const LabelRecord& r);
LabelRecord label_record_from_json(const nlohmann::json& j);

// Append-only JSONL label log. With a path, existing records are replayed on
// open and every append is flushed to disk; without one it lives in memory.
// Not synchronized: callers serialize writes.
class LabelStore {
 public:
  LabelStore() = default;
  explicit LabelStore(const std::filesystem::path& path);

  void append(const LabelRecord& r);
  const std::vector<LabelRecord>& records() const { return records_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

  // Latest label per (tweet, annotator), adjudications excluded.
  std::map<std::string, std::map<std::string, Label>> labels_by_tweet() const;
  // Latest adjudication per tweet.
  std::map<std::string, Label> adjudications() const;

 private:
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::vector<LabelRecord> records_;
};

}  // namespace dangspeech
