#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "dangspeech/features.hpp"
#include "dangspeech/heuristics.hpp"
#include "dangspeech/lexicon.hpp"
#include "dangspeech/matcher.hpp"
#include "dangspeech/seedgen.hpp"

namespace dangspeech {

struct ResourcePaths {
  std::filesystem::path lexicon;
  std::filesystem::path seed_rules;
  std::filesystem::path emoji;
  std::filesystem::path conditional;
  std::filesystem::path modal;
  std::filesystem::path body_parts;
  std::filesystem::path sports;
  std::optional<std::filesystem::path> rule_config;

  // The standard file names inside a data directory. rules.conf is used
  // when present.
  static ResourcePaths in(const std::filesystem::path& data_dir);

  // Throws IoError naming the first missing file.
  void validate() const;
};

// Everything the text pipeline needs, loaded once. The matcher is built
// from the generated seed set.
class Resources {
 public:
  explicit Resources(const ResourcePaths& paths);
  static Resources from_dir(const std::filesystem::path& data_dir) { return Resources(ResourcePaths::in(data_dir)); }

  const Lexicon& lexicon() const { return lexicon_; }
  const std::vector<InflectionRule>& rules() const { return rules_; }
  const SeedSet& seeds() const { return seeds_; }
  const SeedMatcher& matcher() const { return matcher_; }
  const EmojiLexicon& emoji() const { return emoji_; }
  const MarkerLexicons& markers() const { return markers_; }
  const RuleEngine& engine() const { return engine_; }

  TweetAnalysis analyze(std::string_view text) const { return dangspeech::analyze(text, matcher_, emoji_, markers_); }
  FeatureVector features(std::string_view text) const { return analyze(text).features; }

 private:
  Lexicon lexicon_;
  std::vector<InflectionRule> rules_;
  SeedSet seeds_;
  SeedMatcher matcher_;
  EmojiLexicon emoji_;
  MarkerLexicons markers_;
  RuleEngine engine_;
};

}  // namespace dangspeech
