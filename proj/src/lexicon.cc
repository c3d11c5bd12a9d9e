#include "dangspeech/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dangspeech/textproc.hpp"
#include "dangspeech/unicode.hpp"
#include "util.hpp"

namespace dangspeech {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool arabic_letters_only(std::string_view s) {
  const auto cps = unicode::decode(s);
  return !cps.empty() && std::all_of(cps.begin(), cps.end(), [](const unicode::CodePoint& c) {
    return unicode::is_arabic_letter(c.value);
  });
}

}  // namespace

Dialect parse_dialect(std::string_view code) {
  const std::string c = lower(util::trim(code));
  if (c == "m" || c == "msa") return Dialect::kMSA;
  if (c == "g" || c == "gulf") return Dialect::kGulf;
  if (c == "e" || c == "egyptian") return Dialect::kEgyptian;
  if (c == "l" || c == "levantine") return Dialect::kLevantine;
  if (c == "r" || c == "maghrebi") return Dialect::kMaghrebi;
  throw UnknownDialectError(code);
}

std::string_view to_string(Dialect d) {
  switch (d) {
    case Dialect::kMSA:
      return "MSA";
    case Dialect::kGulf:
      return "Gulf";
    case Dialect::kEgyptian:
      return "Egyptian";
    case Dialect::kLevantine:
      return "Levantine";
    case Dialect::kMaghrebi:
      return "Maghrebi";
  }
  return "?";
}

Usage parse_usage(std::string_view s) {
  const std::string u = lower(util::trim(s));
  if (u == "literal") return Usage::kLiteral;
  if (u == "metaphorical") return Usage::kMetaphorical;
  if (u == "idiomatic") return Usage::kIdiomatic;
  throw Error("invalid_usage", "unknown usage class '" + std::string(s) + "'");
}

std::string_view to_string(Usage u) {
  switch (u) {
    case Usage::kLiteral:
      return "literal";
    case Usage::kMetaphorical:
      return "metaphorical";
    case Usage::kIdiomatic:
      return "idiomatic";
  }
  return "?";
}

std::vector<Dialect> DialectSet::members() const {
  std::vector<Dialect> out;
  for (Dialect d : kAllDialects)
    if (contains(d)) out.push_back(d);
  return out;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  return parse(util::read_file(path), path.string());
}

Lexicon Lexicon::parse(std::string_view contents, const std::string& source_name) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(contents)) {
    ++line_no;
    const std::string_view line = util::trim_eol(raw);
    if (util::trim(line).empty() || line.front() == '#') continue;

    auto cols = util::split(line, '\t');
    if (cols.size() < 4 || cols.size() > 5)
      throw ParseError(source_name, line_no,
                       "expected 4 or 5 tab-separated columns, got " + std::to_string(cols.size()));

    ThreatVerb v;
    v.surface = std::string(util::trim(cols[0]));
    v.normalized = normalize_string(v.surface);
    if (!arabic_letters_only(v.normalized))
      throw ParseError(source_name, line_no, "surface form must be Arabic letters: '" + v.surface + "'");

    const std::string_view dialects = util::trim(cols[1]);
    if (dialects.empty()) throw ParseError(source_name, line_no, "empty dialect set");
    if (lower(dialects) == "all") {
      for (Dialect d : kAllDialects) v.dialects.insert(d);
    } else {
      for (const auto& code : util::split(dialects, ',')) v.dialects.insert(parse_dialect(code));
    }

    try {
      v.usage = parse_usage(cols[2]);
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    v.gloss = std::string(util::trim(cols[3]));
    if (cols.size() == 5 && !util::trim(cols[4]).empty())
      v.default_object = normalize_string(util::trim(cols[4]));
    if (v.usage == Usage::kIdiomatic && !v.default_object)
      throw ParseError(source_name, line_no, "idiomatic entry '" + v.surface + "' needs a default object");

    if (lex.index_.count(v.normalized)) throw DuplicateEntryError(v.surface, line_no);
    lex.index_.emplace(v.normalized, lex.verbs_.size());
    lex.verbs_.push_back(std::move(v));
  }
  if (lex.verbs_.empty()) throw ParseError(source_name, line_no, "no entries");
  return lex;
}

std::vector<ThreatVerb> Lexicon::verbs_for_dialect(Dialect d) const {
  std::vector<ThreatVerb> out;
  std::copy_if(verbs_.begin(), verbs_.end(), std::back_inserter(out),
               [d](const ThreatVerb& v) { return v.dialects.contains(d); });
  return out;
}

std::vector<ThreatVerb> Lexicon::verbs_for_dialect(std::string_view code) const {
  return verbs_for_dialect(parse_dialect(code));
}

std::map<Usage, std::size_t> Lexicon::usage_counts() const {
  std::map<Usage, std::size_t> counts;
  for (const auto& v : verbs_) ++counts[v.usage];
  return counts;
}

const ThreatVerb* Lexicon::find(std::string_view surface) const {
  auto it = index_.find(normalize_string(surface));
  return it == index_.end() ? nullptr : &verbs_[it->second];
}

}  // namespace dangspeech
