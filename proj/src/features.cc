#include "dangspeech/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dangspeech/unicode.hpp"
#include "util.hpp"

namespace dangspeech {

namespace {

constexpr std::array<std::string_view, 12> kPrefixes = {
    "", "و", "ف", "ب", "ل", "ال", "وال", "بال", "فال", "لل", "ول", "وب"};

constexpr std::array<std::string_view, 17> kSuffixes = {
    "", "كم", "كوا", "كن", "ك", "هم", "ها", "ه", "ي", "نا",
    "يه", "اويه", "اوي", "يين", "ين", "ون", "ات"};

}  // namespace

MarkerLexicon::MarkerLexicon(const std::vector<std::string>& entries) {
  for (const auto& e : entries) {
    std::string n = normalize_string(e);
    if (!n.empty()) entries_.insert(std::move(n));
  }
}

MarkerLexicon MarkerLexicon::parse(std::string_view contents) {
  std::vector<std::string> entries;
  for (const auto& raw : util::split_lines(contents)) {
    const auto line = util::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    entries.emplace_back(line);
  }
  return MarkerLexicon(entries);
}

MarkerLexicon MarkerLexicon::load(const std::filesystem::path& path) {
  return parse(util::read_file(path));
}

bool MarkerLexicon::contains(std::string_view token) const { return entries_.count(token) > 0; }

bool MarkerLexicon::contains_inflected(std::string_view token) const {
  if (contains(token)) return true;
  for (auto prefix : kPrefixes) {
    if (!token.starts_with(prefix)) continue;
    const std::string_view rest = token.substr(prefix.size());
    for (auto suffix : kSuffixes) {
      if (!rest.ends_with(suffix) || rest.size() == suffix.size()) continue;
      const std::string_view stem = rest.substr(0, rest.size() - suffix.size());
      if (unicode::length(stem) >= 2 && contains(stem)) return true;
    }
  }
  return false;
}

std::string_view to_string(EmojiClass c) {
  switch (c) {
    case EmojiClass::kPleasant:
      return "pleasant";
    case EmojiClass::kUnpleasant:
      return "unpleasant";
    case EmojiClass::kOther:
      return "other";
  }
  return "other";
}

EmojiLexicon EmojiLexicon::parse(std::string_view contents, const std::string& source_name) {
  EmojiLexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(contents)) {
    ++line_no;
    const auto line = util::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = util::split(line, '\t');
    if (cols.size() < 2) throw ParseError(source_name, line_no, "expected emoji<TAB>class");
    const auto cls = util::trim(cols[1]);
    EmojiClass c;
    if (cls == "pleasant") {
      c = EmojiClass::kPleasant;
    } else if (cls == "unpleasant") {
      c = EmojiClass::kUnpleasant;
    } else if (cls == "other") {
      c = EmojiClass::kOther;
    } else {
      throw ParseError(source_name, line_no, "unknown emoji class '" + std::string(cls) + "'");
    }
    lex.add(util::trim(cols[0]), c);
  }
  return lex;
}

EmojiLexicon EmojiLexicon::load(const std::filesystem::path& path) {
  return parse(util::read_file(path), path.string());
}

void EmojiLexicon::add(std::string_view emoji, EmojiClass c) { classes_[std::string(emoji)] = c; }

EmojiClass EmojiLexicon::classify(std::string_view emoji) const {
  if (auto it = classes_.find(emoji); it != classes_.end()) return it->second;

  std::string bare;
  const auto cps = unicode::decode(emoji);
  for (const auto& cp : cps)
    if (!unicode::is_emoji_component(cp.value)) unicode::append_utf8(bare, cp.value);
  if (auto it = classes_.find(bare); it != classes_.end()) return it->second;

  if (!cps.empty()) {
    if (auto it = classes_.find(unicode::encode(cps.front().value)); it != classes_.end())
      return it->second;
  }
  return EmojiClass::kOther;
}

bool has_laughter(std::string_view normalized) {
  constexpr std::string_view kHeh = "ه";
  std::size_t run = 0;
  std::size_t i = 0;
  while (i < normalized.size()) {
    if (normalized.substr(i, kHeh.size()) == kHeh) {
      if (++run >= 3) return true;
      i += kHeh.size();
    } else {
      run = 0;
      ++i;
    }
  }
  std::string lower(normalized);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.find("haha") != std::string::npos;
}

TweetAnalysis analyze(std::string_view text, const SeedMatcher& matcher, const EmojiLexicon& emoji,
                      const MarkerLexicons& markers) {
  TweetAnalysis a;
  a.normalized = normalize(text);
  a.tokens = tokenize(a.normalized);
  a.matches = matcher.find(a.normalized, a.tokens);

  FeatureVector& f = a.features;
  for (const auto& tok : a.tokens) {
    switch (tok.kind) {
      case TokenKind::kMention:
        ++f.mention_count;
        ++f.tokens["@user"];
        break;
      case TokenKind::kUrl:
        ++f.tokens["<url>"];
        break;
      case TokenKind::kEmoji:
        switch (emoji.classify(tok.text)) {
          case EmojiClass::kPleasant:
            ++f.emoji_pleasant;
            break;
          case EmojiClass::kUnpleasant:
            ++f.emoji_unpleasant;
            break;
          case EmojiClass::kOther:
            ++f.emoji_other;
            break;
        }
        ++f.tokens[tok.text];
        break;
      case TokenKind::kPunct:
        if (tok.text == "?" || tok.text == "؟") f.is_question = true;
        break;
      case TokenKind::kHashtag:
        ++f.tokens[tok.text];
        break;
      case TokenKind::kWord:
        ++f.token_count;
        ++f.tokens[tok.text];
        if (markers.conditional.contains(tok.text)) f.has_conditional = true;
        if (markers.modal.contains(tok.text)) f.has_modal = true;
        if (markers.body_parts.contains_inflected(tok.text)) ++f.body_part_count;
        break;
    }
  }
  f.has_mention = f.mention_count > 0;
  f.has_laughter = has_laughter(a.normalized.text());
  f.seed_count = a.matches.size();
  for (const auto& m : a.matches) f.seed_token_count += m.token_count();
  return a;
}

FeatureVector extract_features(std::string_view text, const SeedMatcher& matcher,
                               const EmojiLexicon& emoji, const MarkerLexicons& markers) {
  return analyze(text, matcher, emoji, markers).features;
}

nlohmann::json to_json(const FeatureVector& f) {
  return nlohmann::json{
      {"has_mention", f.has_mention},
      {"mention_count", f.mention_count},
      {"is_question", f.is_question},
      {"emoji_pleasant", f.emoji_pleasant},
      {"emoji_unpleasant", f.emoji_unpleasant},
      {"emoji_other", f.emoji_other},
      {"has_conditional", f.has_conditional},
      {"has_modal", f.has_modal},
      {"body_part_count", f.body_part_count},
      {"has_laughter", f.has_laughter},
      {"seed_count", f.seed_count},
      {"seed_token_count", f.seed_token_count},
      {"token_count", f.token_count},
      {"tokens", f.tokens},
  };
}

FeatureVector feature_vector_from_json(const nlohmann::json& j) {
  FeatureVector f;
  f.has_mention = j.at("has_mention").get<bool>();
  f.mention_count = j.at("mention_count").get<std::size_t>();
  f.is_question = j.at("is_question").get<bool>();
  f.emoji_pleasant = j.at("emoji_pleasant").get<std::size_t>();
  f.emoji_unpleasant = j.at("emoji_unpleasant").get<std::size_t>();
  f.emoji_other = j.at("emoji_other").get<std::size_t>();
  f.has_conditional = j.at("has_conditional").get<bool>();
  f.has_modal = j.value("has_modal", false);
  f.body_part_count = j.at("body_part_count").get<std::size_t>();
  f.has_laughter = j.at("has_laughter").get<bool>();
  f.seed_count = j.at("seed_count").get<std::size_t>();
  f.seed_token_count = j.value("seed_token_count", std::size_t{0});
  f.token_count = j.at("token_count").get<std::size_t>();
  f.tokens = j.value("tokens", std::map<std::string, std::size_t>{});
  return f;
}

}  // namespace dangspeech
