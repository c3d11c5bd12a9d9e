#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dangspeech/error.hpp"

namespace dangspeech {

enum class Dialect { kMSA, kGulf, kEgyptian, kLevantine, kMaghrebi };

inline constexpr Dialect kAllDialects[] = {Dialect::kMSA, Dialect::kGulf, Dialect::kEgyptian,
                                           Dialect::kLevantine, Dialect::kMaghrebi};

// Accepts full names ("Gulf"), the single-letter codes of the lexicon file
// (M, G, E, L, R) and "MSA"; case-insensitive.
Dialect parse_dialect(std::string_view code);
std::string_view to_string(Dialect d);

enum class Usage { kLiteral, kMetaphorical, kIdiomatic };

Usage parse_usage(std::string_view s);
std::string_view to_string(Usage u);

class DialectSet {
 public:
  DialectSet() = default;
  void insert(Dialect d) { bits_ |= bit(d); }
  bool contains(Dialect d) const { return (bits_ & bit(d)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::vector<Dialect> members() const;
  friend bool operator==(const DialectSet&, const DialectSet&) = default;

 private:
  static unsigned bit(Dialect d) { return 1u << static_cast<unsigned>(d); }
  unsigned bits_ = 0;
};

struct ThreatVerb {
  std::string surface;     // as written in the lexicon file
  std::string normalized;  // lookup key
  DialectSet dialects;
  Usage usage = Usage::kLiteral;
  std::string gloss;
  std::optional<std::string> default_object;

  friend bool operator==(const ThreatVerb&, const ThreatVerb&) = default;
};

struct MultiwordSeed {
  std::vector<std::string> tokens;
  std::string gloss;
};

class DuplicateEntryError : public Error {
 public:
  explicit DuplicateEntryError(const std::string& surface, std::size_t line)
      : Error("duplicate_entry",
              "duplicate lexicon entry '" + surface + "' at line " + std::to_string(line)),
        surface_(surface) {}
  const std::string& surface() const { return surface_; }

 private:
  std::string surface_;
};

class UnknownDialectError : public Error {
 public:
  explicit UnknownDialectError(std::string_view code)
      : Error("unknown_dialect", "unknown dialect code '" + std::string(code) + "'") {}
};

// Immutable threat-verb lexicon. Safe for concurrent reads.
class Lexicon {
 public:
  // TSV: surface, dialects, usage, gloss, default_object. '#' lines and
  // blank lines are skipped. Throws ParseError / DuplicateEntryError /
  // UnknownDialectError.
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon parse(std::string_view contents, const std::string& source_name = "<memory>");

  const std::vector<ThreatVerb>& verbs() const { return verbs_; }
  std::size_t size() const { return verbs_.size(); }

  // Entries whose dialect set contains `d`, in file order.
  std::vector<ThreatVerb> verbs_for_dialect(Dialect d) const;
  std::vector<ThreatVerb> verbs_for_dialect(std::string_view code) const;

  std::map<Usage, std::size_t> usage_counts() const;

  // Lookup by any orthographic variant of the surface form.
  const ThreatVerb* find(std::string_view surface) const;

 private:
  std::vector<ThreatVerb> verbs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace dangspeech
