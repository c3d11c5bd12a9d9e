#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dangspeech/features.hpp"
#include "dangspeech/label.hpp"

namespace dangspeech {

struct PhenomenonRow {
  std::string name;
  std::size_t freq = 0;  // tweets showing the phenomenon, both classes
  std::size_t freq_safe = 0;
  std::size_t freq_dangerous = 0;
  double pct_safe = 0;       // share of safe tweets showing it
  double pct_dangerous = 0;  // share of dangerous tweets showing it
  double pct_overall = 0;    // share of all tweets showing it
};

struct PhenomenaTable {
  std::size_t n_safe = 0;
  std::size_t n_dangerous = 0;
  std::vector<PhenomenonRow> rows;  // Mentions, Questions, Emoji, Conditional, Body parts, Hahaha
};

// features[i] belongs to a tweet labelled labels[i]. Throws
// Error("unlabeled_corpus") when no label is present and
// Error("length_mismatch") when the vectors differ in size. Entries without
// a label are skipped.
PhenomenaTable phenomena_stats(const std::vector<FeatureVector>& features,
                               const std::vector<std::optional<Label>>& labels);

nlohmann::json to_json(const PhenomenaTable& t);
std::string to_text_table(const PhenomenaTable& t);

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0;
  double std = 0;  // sample standard deviation; 0 for a single value
  double min = 0;
  double max = 0;
  double p25 = 0;
  double p50 = 0;
  double p75 = 0;
};

// Nearest-rank percentile of sorted data: the value at rank ceil(p/100 * n),
// rank 1 for p = 0.
double percentile_nearest_rank(const std::vector<double>& sorted, double p);

// Throws Error("empty_input").
DescriptiveStats describe(std::vector<double> values);

struct TimelineStats {
  DescriptiveStats seed_counts;     // dangerous-seed tweets per user
  DescriptiveStats timeline_sizes;  // timeline tweets per user
};

TimelineStats timeline_stats(const std::vector<double>& seed_counts,
                             const std::vector<double>& timeline_sizes);

nlohmann::json to_json(const DescriptiveStats& s);
nlohmann::json to_json(const TimelineStats& s);
std::string to_text_table(const TimelineStats& s);

}  // namespace dangspeech
