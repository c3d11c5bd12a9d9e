#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dangspeech/features.hpp"
#include "dangspeech/label.hpp"
#include "dangspeech/matcher.hpp"

namespace dangspeech {

// Annotation-guideline rules. Every rule is terminal: the first one whose
// condition holds decides the label.
//   R1 sports context                              -> safe
//   R2 pleasant emoji and no unpleasant emoji      -> safe
//   R3 laughter and no unpleasant emoji            -> safe (extension, toggleable)
//   R4 unpleasant emoji                            -> dangerous
//   R5 question mark or modal marker               -> dangerous
//   R6 nothing but the seed(s) once mentions and
//      punctuation are dropped                     -> dangerous
//   R7 default                                     -> dangerous
enum class RuleId { R1, R2, R3, R4, R5, R6, R7 };

inline constexpr std::array<RuleId, 7> kAllRules = {RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4,
                                                   RuleId::R5, RuleId::R6, RuleId::R7};

std::string_view to_string(RuleId id);
RuleId parse_rule_id(std::string_view s);

enum class Confidence { kGuideline, kDefault };
std::string_view to_string(Confidence c);

struct RuleTraceEntry {
  RuleId rule;
  bool fired;
  std::string reason;
};

struct RuleVerdict {
  Label label = Label::kDangerous;
  std::vector<RuleId> fired_rules;  // terminal rule last
  Confidence confidence = Confidence::kDefault;
  std::vector<RuleTraceEntry> trace;  // every evaluated rule, in order
};

nlohmann::json to_json(const RuleVerdict& v);

// Rule order and toggles. File format is `key = value` lines:
//   order = R1, R2, R3, R4, R5, R6
//   R3.enabled = false
// R7 is always evaluated last and cannot be disabled.
struct RuleConfig {
  std::vector<RuleId> order{kAllRules.begin(), kAllRules.end()};
  std::array<bool, 7> enabled{true, true, true, true, true, true, true};

  bool is_enabled(RuleId id) const { return enabled[static_cast<std::size_t>(id)]; }

  static RuleConfig parse(std::string_view contents, const std::string& source_name = "<memory>");
  static RuleConfig load(const std::filesystem::path& path);
};

class NoSeedError : public Error {
 public:
  NoSeedError() : Error("no_seed", "rule engine applies only to tweets with at least one seed match") {}
};

// True iff any token (clitics peeled) is in the sports lexicon.
bool detect_sports_context(const MarkerLexicon& sports, const std::vector<Token>& tokens);
bool detect_sports_context(const MarkerLexicon& sports, const FeatureVector& features);

class RuleEngine {
 public:
  explicit RuleEngine(MarkerLexicon sports, RuleConfig config = {});

  // `sports_context` overrides detection from the feature token bag.
  RuleVerdict judge(const FeatureVector& features, const std::vector<SeedMatch>& matches,
                    std::optional<bool> sports_context = std::nullopt) const;

  const RuleConfig& config() const { return config_; }
  const MarkerLexicon& sports() const { return sports_; }

 private:
  MarkerLexicon sports_;
  RuleConfig config_;
};

}  // namespace dangspeech
