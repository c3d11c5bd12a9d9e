#include "dangspeech/heuristics.hpp"

#include <algorithm>

#include "util.hpp"

namespace dangspeech {

std::string_view to_string(RuleId id) {
  static constexpr std::string_view kNames[] = {"R1", "R2", "R3", "R4", "R5", "R6", "R7"};
  return kNames[static_cast<std::size_t>(id)];
}

RuleId parse_rule_id(std::string_view s) {
  s = util::trim(s);
  for (RuleId id : kAllRules)
    if (to_string(id) == s) return id;
  throw Error("unknown_rule", "unknown rule id '" + std::string(s) + "'");
}

std::string_view to_string(Confidence c) {
  return c == Confidence::kGuideline ? "guideline" : "default";
}

nlohmann::json to_json(const RuleVerdict& v) {
  nlohmann::json fired = nlohmann::json::array();
  for (RuleId id : v.fired_rules) fired.push_back(to_string(id));
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : v.trace)
    trace.push_back({{"rule", to_string(t.rule)}, {"fired", t.fired}, {"reason", t.reason}});
  return {{"label", to_string(v.label)},
          {"fired_rules", fired},
          {"confidence", to_string(v.confidence)},
          {"trace", trace}};
}

RuleConfig RuleConfig::parse(std::string_view contents, const std::string& source_name) {
  RuleConfig cfg;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(contents)) {
    ++line_no;
    auto line = util::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected key = value");
    const auto key = util::trim(line.substr(0, eq));
    auto value = util::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']')
      value = value.substr(1, value.size() - 2);

    try {
      if (key == "order") {
        cfg.order.clear();
        for (auto item : util::split_list(value)) {
          std::string_view id = item;
          if (id.size() >= 2 && id.front() == '"' && id.back() == '"') id = id.substr(1, id.size() - 2);
          const RuleId rule = parse_rule_id(id);
          if (std::find(cfg.order.begin(), cfg.order.end(), rule) != cfg.order.end())
            throw ParseError(source_name, line_no, "rule listed twice in order");
          cfg.order.push_back(rule);
        }
      } else if (key.ends_with(".enabled")) {
        const RuleId rule = parse_rule_id(key.substr(0, key.size() - 8));
        bool on;
        if (value == "true" || value == "on" || value == "1") {
          on = true;
        } else if (value == "false" || value == "off" || value == "0") {
          on = false;
        } else {
          throw ParseError(source_name, line_no, "expected true or false");
        }
        if (rule == RuleId::R7 && !on) throw ParseError(source_name, line_no, "R7 cannot be disabled");
        cfg.enabled[static_cast<std::size_t>(rule)] = on;
      } else {
        throw ParseError(source_name, line_no, "unknown key '" + std::string(key) + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  cfg.order.erase(std::remove(cfg.order.begin(), cfg.order.end(), RuleId::R7), cfg.order.end());
  cfg.order.push_back(RuleId::R7);
  return cfg;
}

RuleConfig RuleConfig::load(const std::filesystem::path& path) {
  return parse(util::read_file(path), path.string());
}

bool detect_sports_context(const MarkerLexicon& sports, const std::vector<Token>& tokens) {
  return std::any_of(tokens.begin(), tokens.end(), [&](const Token& t) {
    return (t.kind == TokenKind::kWord || t.kind == TokenKind::kHashtag) &&
           sports.contains_inflected(t.kind == TokenKind::kHashtag ? t.text.substr(1) : t.text);
  });
}

bool detect_sports_context(const MarkerLexicon& sports, const FeatureVector& features) {
  for (const auto& [tok, count] : features.tokens) {
    std::string_view t = tok;
    if (t.starts_with("#")) t.remove_prefix(1);
    if (sports.contains_inflected(t)) return true;
  }
  return false;
}

RuleEngine::RuleEngine(MarkerLexicon sports, RuleConfig config)
    : sports_(std::move(sports)), config_(std::move(config)) {}

namespace {

struct Outcome {
  bool fired;
  Label label;
  std::string reason;
};

bool seed_only(const FeatureVector& f, const std::vector<SeedMatch>& matches) {
  std::size_t seed_tokens = 0;
  for (const auto& m : matches) seed_tokens += m.token_count();
  if (f.token_count != seed_tokens || f.emoji_count() != 0) return false;
  for (const auto& [tok, count] : f.tokens)
    if (tok.starts_with("#") || tok == "<url>") return false;
  return true;
}

}  // namespace

RuleVerdict RuleEngine::judge(const FeatureVector& f, const std::vector<SeedMatch>& matches,
                              std::optional<bool> sports_context) const {
  if (matches.empty()) throw NoSeedError();
  const bool sports = sports_context.value_or(detect_sports_context(sports_, f));

  auto evaluate = [&](RuleId id) -> Outcome {
    switch (id) {
      case RuleId::R1:
        return {sports, Label::kSafe, sports ? "sports context" : "no sports context"};
      case RuleId::R2: {
        const bool hit = f.emoji_pleasant > 0 && f.emoji_unpleasant == 0;
        return {hit, Label::kSafe,
                hit ? "pleasant emoji without unpleasant emoji" : "no unmixed pleasant emoji"};
      }
      case RuleId::R3: {
        const bool hit = f.has_laughter && f.emoji_unpleasant == 0;
        return {hit, Label::kSafe, hit ? "laughter without unpleasant emoji" : "no mitigating laughter"};
      }
      case RuleId::R4: {
        const bool hit = f.emoji_unpleasant > 0;
        return {hit, Label::kDangerous, hit ? "unpleasant emoji" : "no unpleasant emoji"};
      }
      case RuleId::R5: {
        const bool hit = f.is_question || f.has_modal;
        std::string why = f.is_question && f.has_modal ? "question mark and modal marker"
                          : f.is_question              ? "question mark"
                          : f.has_modal                ? "modal marker"
                                                       : "no question or modal marker";
        return {hit, Label::kDangerous, why};
      }
      case RuleId::R6: {
        const bool hit = seed_only(f, matches);
        return {hit, Label::kDangerous, hit ? "tweet is only the threat phrase" : "tweet has other content"};
      }
      case RuleId::R7:
        return {true, Label::kDangerous, "default: bare threat"};
    }
    return {false, Label::kDangerous, ""};
  };

  RuleVerdict v;
  for (RuleId id : config_.order) {
    if (!config_.is_enabled(id)) continue;
    Outcome o = evaluate(id);
    v.trace.push_back({id, o.fired, o.reason});
    if (o.fired) {
      v.label = o.label;
      v.fired_rules.push_back(id);
      v.confidence = (id == RuleId::R7 || id == RuleId::R3) ? Confidence::kDefault : Confidence::kGuideline;
      break;
    }
  }
  return v;
}

}  // namespace dangspeech
