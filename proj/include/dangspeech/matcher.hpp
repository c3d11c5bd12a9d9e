#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dangspeech/error.hpp"
#include "dangspeech/seedgen.hpp"
#include "dangspeech/textproc.hpp"

namespace dangspeech {

struct SeedMatch {
  std::string seed;          // normalized seed text
  std::size_t seed_index;    // index into SeedMatcher::seeds()
  std::size_t token_begin;   // [token_begin, token_end) in the token list
  std::size_t token_end;
  Span normalized_span;      // bytes in the normalized text
  Span char_span;            // bytes in the original text

  std::size_t token_count() const { return token_end - token_begin; }
  friend bool operator==(const SeedMatch&, const SeedMatch&) = default;
};

// Token-level Aho-Corasick automaton over the seed phrases. A seed matches
// only whole word tokens, and a multiword seed only contiguous word tokens.
// Overlaps are resolved leftmost-longest. Immutable after construction.
class SeedMatcher {
 public:
  // Throws Error("empty_seed_set") when `seeds` is empty.
  explicit SeedMatcher(const SeedSet& seeds);
  explicit SeedMatcher(const std::vector<std::string>& seeds);

  const std::vector<std::string>& seeds() const { return seeds_; }
  const std::vector<std::size_t>& seed_lengths() const { return seed_lengths_; }

  // Matches over already tokenized normalized text.
  std::vector<SeedMatch> find(const NormalizedText& text, const std::vector<Token>& tokens) const;

  // Normalizes and tokenizes `raw` first.
  std::vector<SeedMatch> find(std::string_view raw) const;

 private:
  struct Node {
    std::unordered_map<int, int> next;
    int fail = 0;
    int pattern = -1;   // seed ending exactly here
    int out_link = -1;  // nearest node on the fail chain with a pattern
  };

  void build(std::vector<std::string> seeds);
  int symbol(std::string_view token) const;

  std::vector<std::string> seeds_;
  std::vector<std::size_t> seed_lengths_;  // in tokens
  std::unordered_map<std::string, int> vocab_;
  std::vector<Node> nodes_;
};

// Same as calling matcher.find(raw).
std::vector<SeedMatch> find_seeds(const SeedMatcher& matcher, std::string_view raw);

}  // namespace dangspeech
