#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dangspeech/label.hpp"
#include "dangspeech/matcher.hpp"

namespace dangspeech {

struct Tweet {
  std::string id;
  std::string author_id;
  std::string text;
  std::string created_at;  // ISO-8601, kept verbatim
  std::optional<Label> gold_label;
  std::map<std::string, Label> annotator_labels;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

nlohmann::json to_json(const Tweet& t);
// Throws Error("missing_field") / Error("invalid_field").
Tweet tweet_from_json(const nlohmann::json& j);

// Tweets in insertion order with unique ids.
class Corpus {
 public:
  Corpus() = default;

  // Returns false (and keeps the existing tweet) when the id is taken.
  bool add(Tweet t);

  const Tweet* find(std::string_view id) const;
  const std::vector<Tweet>& tweets() const { return tweets_; }
  std::size_t size() const { return tweets_.size(); }
  bool empty() const { return tweets_.empty(); }

  auto begin() const { return tweets_.begin(); }
  auto end() const { return tweets_.end(); }

  // Gold-label histogram; unlabeled tweets are not counted.
  std::map<Label, std::size_t> class_counts() const;

 private:
  std::vector<Tweet> tweets_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct IngestResult {
  Corpus corpus;
  std::size_t duplicates = 0;  // lines dropped because the id was already seen
};

// One JSON object per line with at least "id" and "text". Blank lines are
// skipped. Errors carry the line number.
IngestResult ingest(const std::filesystem::path& path);
IngestResult ingest_jsonl(std::string_view contents, const std::string& source_name = "<memory>");

std::string to_jsonl(const Corpus& corpus);
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);

// Removes every seed occurrence (each match becomes a single space) and
// re-normalizes until no seed is left. The result is normalized text;
// `removed` receives the number of occurrences taken out.
std::string remove_seeds(std::string_view text, const SeedMatcher& matcher,
                         std::size_t* removed = nullptr);

struct PreprocessReport {
  std::size_t input = 0;
  std::size_t retained = 0;
  std::size_t dropped = 0;
  std::size_t seeds_removed = 0;
  std::map<Label, std::size_t> retained_by_class;
  std::map<Label, std::size_t> dropped_by_class;
};

nlohmann::json to_json(const PreprocessReport& r);

struct PreprocessResult {
  Corpus corpus;
  PreprocessReport report;
};

// Seed removal followed by dropping tweets with fewer than `min_words`
// word tokens left.
PreprocessResult preprocess(const Corpus& corpus, const SeedMatcher& matcher, std::size_t min_words = 2);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

nlohmann::json to_json(const DatasetSplit& s);
DatasetSplit split_from_json(const nlohmann::json& j);
DatasetSplit load_split(const std::filesystem::path& path);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct ClassCounts {
  std::size_t safe = 0;
  std::size_t dangerous = 0;

  std::size_t total() const { return safe + dangerous; }
  std::size_t of(Label l) const { return l == Label::kSafe ? safe : dangerous; }
};

struct SplitCounts {
  ClassCounts train;
  ClassCounts dev;
  ClassCounts test;
};

// {"train": {"safe": n, "dangerous": m}, "dev": {...}, "test": {...}}
SplitCounts split_counts_from_json(const nlohmann::json& j);
SplitCounts load_split_counts(const std::filesystem::path& path);
nlohmann::json to_json(const SplitCounts& c);

// Stratified by gold label. Within each class the ids are sorted, shuffled
// with `seed`, and cut in train/dev/test order. Every tweet needs a gold
// label.
DatasetSplit split_by_ratios(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed);
// Per-class counts must add up to the class sizes of the corpus.
DatasetSplit split_by_counts(const Corpus& corpus, const SplitCounts& counts, std::uint64_t seed);

// Tweets of `corpus` listed in `ids`, in that order. Unknown ids throw.
std::vector<const Tweet*> select(const Corpus& corpus, const std::vector<std::string>& ids);

}  // namespace dangspeech
