#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dangspeech/error.hpp"
#include "dangspeech/lexicon.hpp"

namespace dangspeech {

// Only first-person subjects and second-person objects are generated:
// third-person patterns are overwhelmingly non-threatening.
enum class Subject { k1SG, k1PL };
enum class Object { k2SG, k2PL };

std::string_view to_string(Subject s);
std::string_view to_string(Object o);

struct SeedPhrase {
  std::string text;  // normalized
  std::string verb;  // normalized lexicon key; empty when loaded from a plain list
  Subject subject = Subject::k1SG;
  Object object = Object::k2SG;
  int variant_id = 0;
};

// One row of the rule file. A verb may have several rows (for example a
// clitic row and a multiword row).
struct InflectionRule {
  std::string verb;
  std::string stem_1sg;
  std::string stem_1pl;
  std::vector<std::string> suffixes_2sg;
  std::vector<std::string> suffixes_2pl;
  // Whole phrases outside the stem x suffix product, e.g. dialect spellings.
  std::vector<std::string> extra_variants;
  std::size_t line = 0;
};

class MissingStemError : public Error {
 public:
  MissingStemError(const std::string& verb, Subject s)
      : Error("missing_stem", "rule for '" + verb + "' has no " + std::string(to_string(s)) + " stem") {}
};

class UnknownVerbError : public Error {
 public:
  UnknownVerbError(const std::string& verb, std::size_t line)
      : Error("unknown_verb",
              "rule at line " + std::to_string(line) + " references unknown verb '" + verb + "'") {}
};

// TSV: verb, stem_1sg, stem_1pl, suffixes_2sg, suffixes_2pl, extra_variants.
// Lists are comma-separated; '_' marks a word boundary inside a suffix or
// variant. Trailing empty columns may be omitted.
std::vector<InflectionRule> parse_rules(std::string_view contents,
                                        const std::string& source_name = "<memory>");
std::vector<InflectionRule> load_rules(const std::filesystem::path& path);

// Deterministic: suffix order, then extra variants in file order.
std::vector<SeedPhrase> inflect(const InflectionRule& rule, Subject subject, Object object);

// Deduplicated phrases, sorted by text (byte-lexicographic).
class SeedSet {
 public:
  SeedSet() = default;
  explicit SeedSet(std::vector<SeedPhrase> phrases);

  // One phrase per line; blank lines skipped; each line normalized.
  static SeedSet load_list(const std::filesystem::path& path);
  static SeedSet parse_list(std::string_view contents, const std::string& source_name = "<memory>");

  const std::vector<SeedPhrase>& phrases() const { return phrases_; }
  std::vector<std::string> texts() const;
  std::size_t size() const { return phrases_.size(); }
  bool empty() const { return phrases_.empty(); }
  bool contains(std::string_view text) const;

  std::string to_text() const;  // one phrase per line

 private:
  std::vector<SeedPhrase> phrases_;
};

SeedSet generate_all(const Lexicon& lexicon, const std::vector<InflectionRule>& rules);

struct SeedDiff {
  std::vector<std::string> missing;  // in the reference list, not generated
  std::vector<std::string> extra;    // generated, not in the reference list
  bool exact() const { return missing.empty() && extra.empty(); }
};

SeedDiff diff_against_published(const SeedSet& generated, const SeedSet& published);
SeedDiff diff_against_published(const SeedSet& generated, const std::filesystem::path& published);

}  // namespace dangspeech
