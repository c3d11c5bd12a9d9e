#include "dangspeech/seedgen.hpp"

#include <algorithm>
#include <set>

#include "dangspeech/textproc.hpp"
#include "dangspeech/unicode.hpp"
#include "util.hpp"

namespace dangspeech {

std::string_view to_string(Subject s) { return s == Subject::k1SG ? "1SG" : "1PL"; }
std::string_view to_string(Object o) { return o == Object::k2SG ? "2SG" : "2PL"; }

namespace {

std::string expand(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// Recovers (subject, object) for a whole-phrase variant from its first
// word's person prefix and any plural object clitic.
std::pair<Subject, Object> classify_variant(std::string_view phrase) {
  const auto words = util::split(phrase, ' ');
  std::string_view first = words.front();
  constexpr std::string_view kProgressive = "ب";
  if (first.starts_with(kProgressive) && unicode::length(first) > 3)
    first.remove_prefix(kProgressive.size());
  const Subject subject = first.starts_with("ن") ? Subject::k1PL : Subject::k1SG;

  Object object = Object::k2SG;
  for (auto w : words)
    if (w.ends_with("كم") || w.ends_with("كوا"))
      object = Object::k2PL;
  return {subject, object};
}

void require_normalized(const std::string& text, const InflectionRule& rule) {
  if (normalize_string(text) != text)
    throw Error("rule_not_normalized", "rule at line " + std::to_string(rule.line) + " for '" +
                                           rule.verb + "' produces non-normalized text '" + text + "'");
}

}  // namespace

std::vector<InflectionRule> parse_rules(std::string_view contents, const std::string& source_name) {
  std::vector<InflectionRule> rules;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(contents)) {
    ++line_no;
    const std::string_view line = util::trim_eol(raw);
    if (util::trim(line).empty() || line.front() == '#') continue;

    auto cols = util::split(line, '\t');
    if (cols.size() < 2 || cols.size() > 6)
      throw ParseError(source_name, line_no, "expected 2 to 6 tab-separated columns");
    cols.resize(6);

    InflectionRule r;
    r.line = line_no;
    r.verb = std::string(util::trim(cols[0]));
    if (r.verb.empty()) throw ParseError(source_name, line_no, "empty verb");
    r.stem_1sg = std::string(util::trim(cols[1]));
    r.stem_1pl = std::string(util::trim(cols[2]));
    r.suffixes_2sg = util::split_list(cols[3]);
    r.suffixes_2pl = util::split_list(cols[4]);
    r.extra_variants = util::split_list(cols[5]);
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<InflectionRule> load_rules(const std::filesystem::path& path) {
  return parse_rules(util::read_file(path), path.string());
}

std::vector<SeedPhrase> inflect(const InflectionRule& rule, Subject subject, Object object) {
  const std::string& stem = subject == Subject::k1SG ? rule.stem_1sg : rule.stem_1pl;
  const std::string verb_key = normalize_string(rule.verb);

  std::vector<SeedPhrase> out;
  int variant = 0;
  const bool has_stem = !stem.empty();
  if (has_stem) {
    const auto& suffixes = object == Object::k2SG ? rule.suffixes_2sg : rule.suffixes_2pl;
    for (const auto& suffix : suffixes) {
      std::string text = expand(stem + suffix);
      require_normalized(text, rule);
      out.push_back({std::move(text), verb_key, subject, object, variant++});
    }
  }

  bool has_variant = false;
  for (const auto& v : rule.extra_variants) {
    std::string text = expand(v);
    require_normalized(text, rule);
    const auto [s, o] = classify_variant(text);
    if (s != subject) continue;
    has_variant = true;
    if (o != object) continue;
    out.push_back({std::move(text), verb_key, subject, object, variant++});
  }

  if (!has_stem && !has_variant) throw MissingStemError(rule.verb, subject);
  return out;
}

SeedSet::SeedSet(std::vector<SeedPhrase> phrases) {
  std::stable_sort(phrases.begin(), phrases.end(),
                   [](const SeedPhrase& a, const SeedPhrase& b) { return a.text < b.text; });
  auto last = std::unique(phrases.begin(), phrases.end(), [](const SeedPhrase& a, const SeedPhrase& b) {
    return a.text == b.text;
  });
  phrases.erase(last, phrases.end());
  phrases_ = std::move(phrases);
}

SeedSet SeedSet::parse_list(std::string_view contents, const std::string& source_name) {
  std::vector<SeedPhrase> phrases;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(contents)) {
    ++line_no;
    const std::string_view line = util::trim(raw);
    if (line.empty()) continue;
    for (const auto& cp : unicode::decode(line))
      if (cp.value == 0xFFFD) throw ParseError(source_name, line_no, "invalid UTF-8");
    SeedPhrase p;
    p.text = normalize_string(line);
    phrases.push_back(std::move(p));
  }
  return SeedSet(std::move(phrases));
}

SeedSet SeedSet::load_list(const std::filesystem::path& path) {
  return parse_list(util::read_file(path), path.string());
}

std::vector<std::string> SeedSet::texts() const {
  std::vector<std::string> out;
  out.reserve(phrases_.size());
  for (const auto& p : phrases_) out.push_back(p.text);
  return out;
}

bool SeedSet::contains(std::string_view text) const {
  const std::string key = normalize_string(text);
  auto it = std::lower_bound(phrases_.begin(), phrases_.end(), key,
                             [](const SeedPhrase& p, const std::string& k) { return p.text < k; });
  return it != phrases_.end() && it->text == key;
}

std::string SeedSet::to_text() const {
  std::string out;
  for (const auto& p : phrases_) {
    out += p.text;
    out += '\n';
  }
  return out;
}

SeedSet generate_all(const Lexicon& lexicon, const std::vector<InflectionRule>& rules) {
  std::vector<SeedPhrase> all;
  for (const auto& rule : rules) {
    if (lexicon.find(rule.verb) == nullptr) throw UnknownVerbError(rule.verb, rule.line);
    for (Subject s : {Subject::k1SG, Subject::k1PL}) {
      const std::string& stem = s == Subject::k1SG ? rule.stem_1sg : rule.stem_1pl;
      // A row without a stem for this subject simply contributes nothing
      // unless one of its whole-phrase variants uses that subject.
      if (stem.empty()) {
        bool any = false;
        for (const auto& v : rule.extra_variants)
          any = any || classify_variant(expand(v)).first == s;
        if (!any) continue;
      }
      for (Object o : {Object::k2SG, Object::k2PL}) {
        auto phrases = inflect(rule, s, o);
        std::move(phrases.begin(), phrases.end(), std::back_inserter(all));
      }
    }
  }
  return SeedSet(std::move(all));
}

SeedDiff diff_against_published(const SeedSet& generated, const SeedSet& published) {
  const auto gen = generated.texts();
  const auto pub = published.texts();
  SeedDiff d;
  std::set_difference(pub.begin(), pub.end(), gen.begin(), gen.end(), std::back_inserter(d.missing));
  std::set_difference(gen.begin(), gen.end(), pub.begin(), pub.end(), std::back_inserter(d.extra));
  return d;
}

SeedDiff diff_against_published(const SeedSet& generated, const std::filesystem::path& published) {
  return diff_against_published(generated, SeedSet::load_list(published));
}

}  // namespace dangspeech
