#pragma once

// Fixture generators and brute-force oracles shared by the unit suites and
// the acceptance binary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dangspeech/collector.hpp"
#include "dangspeech/corpus.hpp"
#include "dangspeech/resources.hpp"

namespace fixtures {

using namespace dangspeech;

std::filesystem::path data_dir();
std::filesystem::path fixture_dir();

// Loaded once from the shipped data directory.
const Resources& resources();

// Numbered guideline example tweets (ids ex01..ex23); gold labels only
// where the guidelines state one.
Corpus guideline_examples();

// Fresh scratch directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

// Seed occurrence found by the brute-force oracle.
struct OracleMatch {
  std::string seed;
  std::size_t token_begin;
  std::size_t token_end;
  std::size_t char_begin;  // bytes in the raw text
  std::size_t char_end;

  friend bool operator==(const OracleMatch&, const OracleMatch&) = default;
};

// Scans every token window against every seed, then keeps leftmost-longest
// non-overlapping occurrences.
std::vector<OracleMatch> brute_force_matches(const std::vector<std::string>& seeds, const std::string& raw);

// Filler words that are neither seeds nor marker words.
const std::vector<std::string>& filler_words();

// Random tweets with planted seeds, near-miss decoys, tatweel/diacritics,
// mentions, emoji and punctuation (including punctuation inside multiword
// seeds, which must break them).
std::vector<std::string> planted_tweets(const std::vector<std::string>& seeds, std::size_t n, std::uint64_t seed);

// 5,011 annotated tweets. Two annotators "a" and "b" label them as
// [[3570, 52], [70, 1319]] (rows a, columns b; safe first); gold labels
// are 3,636 safe / 1,375 dangerous (66 of the 122 disagreements resolved
// to safe). Exactly 411 safe and 155 dangerous tweets have fewer than two
// words left once seeds are removed.
Corpus annotated_fixture(std::uint64_t seed = 2020);

// 1,000-tweet synthetic platform: 100 seed-bearing tweets inside the
// search window, decoys that only contain a seed as a substring, and
// timeline tweets (seed-bearing or not) outside the window.
struct SyntheticWorld {
  std::vector<Tweet> tweets;
  TimeWindow window;
  std::set<std::string> planted_search_ids;  // the 100
};

SyntheticWorld synthetic_world(const std::vector<std::string>& seeds, std::uint64_t seed = 7);

// What a correct two-phase collection must return, computed by brute force.
std::set<std::string> expected_collection(const SyntheticWorld& world, const std::vector<std::string>& seeds);

}  // namespace fixtures
