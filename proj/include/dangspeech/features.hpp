#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dangspeech/matcher.hpp"
#include "dangspeech/textproc.hpp"

namespace dangspeech {

// A list of normalized marker words (conditionals, modals, body parts,
// sports terms). One entry per line; '#' comments allowed.
class MarkerLexicon {
 public:
  MarkerLexicon() = default;
  explicit MarkerLexicon(const std::vector<std::string>& entries);

  static MarkerLexicon load(const std::filesystem::path& path);
  static MarkerLexicon parse(std::string_view contents);

  bool contains(std::string_view normalized_token) const;

  // Also accepts the token with a conjunction/preposition/article prefix
  // and a pronoun, plural or nisba suffix peeled off ("وجمهوركم",
  // "المانشستراويه").
  bool contains_inflected(std::string_view normalized_token) const;

  std::size_t size() const { return entries_.size(); }
  const std::set<std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::set<std::string, std::less<>> entries_;
};

enum class EmojiClass { kPleasant, kUnpleasant, kOther };

std::string_view to_string(EmojiClass c);

// Emoji polarity lexicon: lines of `emoji<TAB>pleasant|unpleasant|other`.
// Unlisted emoji are kOther.
class EmojiLexicon {
 public:
  EmojiLexicon() = default;
  static EmojiLexicon load(const std::filesystem::path& path);
  static EmojiLexicon parse(std::string_view contents, const std::string& source_name = "<memory>");

  void add(std::string_view emoji, EmojiClass c);
  // Looks up the full sequence, then without selectors/skin tones, then the
  // first code point.
  EmojiClass classify(std::string_view emoji) const;
  std::size_t size() const { return classes_.size(); }

 private:
  std::map<std::string, EmojiClass, std::less<>> classes_;
};

struct MarkerLexicons {
  MarkerLexicon conditional;
  MarkerLexicon modal;
  MarkerLexicon body_parts;
};

struct FeatureVector {
  bool has_mention = false;
  std::size_t mention_count = 0;
  bool is_question = false;
  std::size_t emoji_pleasant = 0;
  std::size_t emoji_unpleasant = 0;
  std::size_t emoji_other = 0;
  bool has_conditional = false;
  bool has_modal = false;
  std::size_t body_part_count = 0;
  bool has_laughter = false;
  std::size_t seed_count = 0;
  std::size_t seed_token_count = 0;  // word tokens covered by seed matches
  std::size_t token_count = 0;       // word tokens
  // Bag of normalized tokens. Mentions collapse to "@user" and URLs to
  // "<url>"; punctuation is left out.
  std::map<std::string, std::size_t> tokens;

  std::size_t emoji_count() const { return emoji_pleasant + emoji_unpleasant + emoji_other; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

nlohmann::json to_json(const FeatureVector& f);
FeatureVector feature_vector_from_json(const nlohmann::json& j);

// Everything derived from one text in a single pass.
struct TweetAnalysis {
  NormalizedText normalized;
  std::vector<Token> tokens;
  std::vector<SeedMatch> matches;
  FeatureVector features;
};

TweetAnalysis analyze(std::string_view text, const SeedMatcher& matcher, const EmojiLexicon& emoji,
                      const MarkerLexicons& markers);

FeatureVector extract_features(std::string_view text, const SeedMatcher& matcher,
                               const EmojiLexicon& emoji, const MarkerLexicons& markers);

// Run of three or more heh, or "haha" in Latin script (any case).
bool has_laughter(std::string_view normalized);

}  // namespace dangspeech
