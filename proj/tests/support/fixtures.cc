#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <unistd.h>

#include "dangspeech/random.hpp"
#include "dangspeech/textproc.hpp"

namespace fixtures {

namespace fs = std::filesystem;

fs::path data_dir() { return DANGSPEECH_TEST_DATA_DIR; }
fs::path fixture_dir() { return DANGSPEECH_FIXTURE_DIR; }

const Resources& resources() {
  static const Resources res = Resources::from_dir(data_dir());
  return res;
}

Corpus guideline_examples() { return ingest(fixture_dir() / "guideline_examples.jsonl").corpus; }

fs::path temp_dir(const std::string& name) {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() / ("dangspeech_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<OracleMatch> brute_force_matches(const std::vector<std::string>& seeds, const std::string& raw) {
  const NormalizedText norm = normalize(raw);
  const auto tokens = tokenize(norm);
  std::vector<OracleMatch> all;
  for (const auto& s : seeds) {
    const auto seed_tokens = tokenize(normalize_string(s));
    const std::size_t k = seed_tokens.size();
    for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j)
        ok = tokens[i + j].kind == TokenKind::kWord && tokens[i + j].text == seed_tokens[j].text;
      if (!ok) continue;
      const Span src = norm.source_span({tokens[i].span.begin, tokens[i + k - 1].span.end});
      all.push_back({normalize_string(s), i, i + k, src.begin, src.end});
    }
  }
  std::sort(all.begin(), all.end(), [](const OracleMatch& a, const OracleMatch& b) {
    if (a.token_begin != b.token_begin) return a.token_begin < b.token_begin;
    return a.token_end > b.token_end;
  });
  std::vector<OracleMatch> kept;
  std::size_t covered = 0;
  for (const auto& m : all) {
    if (m.token_begin < covered) continue;
    kept.push_back(m);
    covered = m.token_end;
  }
  return kept;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> kWords = {
      "والله", "بكره", "اليوم", "الحين", "صاحبي", "كلام", "الناس", "شوف", "بس",    "خلاص",
      "طيب",   "هذا",  "الموضوع", "عشان", "كده",  "ليش",  "مره",  "جدا", "حبيبي", "تعال"};
  return kWords;
}

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[uniform_index(rng, v.size())];
}

bool chance(Rng& rng, unsigned percent) { return uniform_index(rng, 100) < percent; }

// Inserts a tatweel after the first letter, or a fatha, so the raw text
// differs from the normalized seed.
std::string decorate(const std::string& seed, Rng& rng) {
  const unsigned roll = static_cast<unsigned>(uniform_index(rng, 10));
  if (roll >= 3 || seed.size() < 4) return seed;
  const std::string mark = roll == 0 ? "ـ" : "َ";
  return seed.substr(0, 2) + mark + seed.substr(2);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

const std::vector<std::string> kEmoji = {"😊", "🔪", "😂", "❤️", "👍🏽", "🔥", "🇸🇦"};
const std::vector<std::string> kPunct = {"!", "؟", "،", ".", "..."};

}  // namespace

std::vector<std::string> planted_tweets(const std::vector<std::string>& seeds, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const std::set<std::string> seed_set(seeds.begin(), seeds.end());
  std::vector<std::string> multi;
  for (const auto& s : seeds)
    if (s.find(' ') != std::string::npos) multi.push_back(s);

  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> parts;
    const std::size_t len = 1 + uniform_index(rng, 12);
    for (std::size_t k = 0; k < len; ++k) {
      const unsigned roll = static_cast<unsigned>(uniform_index(rng, 100));
      if (roll < 25) {
        parts.push_back(decorate(pick(seeds, rng), rng));
      } else if (roll < 32) {
        // Multiword seed cut by punctuation or truncated: no match.
        const std::string& m = pick(multi, rng);
        const auto sp = m.find(' ');
        parts.push_back(chance(rng, 50) ? m.substr(0, sp) + "، " + m.substr(sp + 1) : m.substr(0, sp));
      } else if (roll < 40) {
        // Near miss: seed glued to an extra letter.
        std::string decoy = pick(seeds, rng);
        if (decoy.find(' ') == std::string::npos) decoy += "ش";
        if (!seed_set.count(decoy)) parts.push_back(decoy);
      } else if (roll < 48) {
        parts.push_back("@user" + std::to_string(uniform_index(rng, 9)));
      } else if (roll < 55) {
        parts.push_back(pick(kEmoji, rng));
      } else if (roll < 62) {
        parts.push_back(pick(kPunct, rng));
      } else {
        parts.push_back(pick(filler_words(), rng));
      }
    }
    // Sometimes glue punctuation or emoji straight onto the previous word.
    std::string text = join(parts);
    if (chance(rng, 30)) text += pick(kPunct, rng);
    if (chance(rng, 20)) text += pick(kEmoji, rng);
    out.push_back(text);
  }
  return out;
}

Corpus annotated_fixture(std::uint64_t seed) {
  Rng rng(seed);
  const auto seeds = resources().seeds().texts();

  struct Row {
    Label a, b, gold;
  };
  std::vector<Row> rows;
  auto push = [&](std::size_t n, Label a, Label b, Label gold) {
    for (std::size_t i = 0; i < n; ++i) rows.push_back({a, b, gold});
  };
  const Label S = Label::kSafe, D = Label::kDangerous;
  push(3570, S, S, S);
  push(1319, D, D, D);
  push(30, S, D, S);
  push(22, S, D, D);
  push(36, D, S, S);
  push(34, D, S, D);
  shuffle(rows, rng);

  std::size_t drop_safe = 411, drop_dangerous = 155;
  Corpus corpus;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    bool drop = false;
    if (r.gold == S && drop_safe > 0) {
      drop = true;
      --drop_safe;
    } else if (r.gold == D && drop_dangerous > 0) {
      drop = true;
      --drop_dangerous;
    }

    std::vector<std::string> parts;
    const std::string s1 = decorate(pick(seeds, rng), rng);
    if (drop) {
      switch (uniform_index(rng, 6)) {
        case 0:
          parts = {s1};
          break;
        case 1:
          parts = {"@user", s1};
          break;
        case 2:
          parts = {s1, pick(filler_words(), rng)};
          break;
        case 3:
          parts = {s1, pick(seeds, rng), pick(kEmoji, rng)};
          break;
        case 4:
          parts = {"@user", "@user", pick(filler_words(), rng), s1 + "؟"};
          break;
        default:
          parts = {pick(seeds, rng), "🔪", "!", s1};
          break;
      }
    } else {
      const std::size_t words = 2 + uniform_index(rng, 6);
      for (std::size_t k = 0; k < words; ++k) parts.push_back(pick(filler_words(), rng));
      parts.insert(parts.begin() + static_cast<long>(uniform_index(rng, parts.size() + 1)), s1);
      if (chance(rng, 20)) parts.insert(parts.begin(), "@user");
      if (chance(rng, 15)) parts.push_back(pick(seeds, rng));
      if (chance(rng, 25)) parts.push_back(pick(kEmoji, rng));
    }

    Tweet t;
    char id[24];
    std::snprintf(id, sizeof id, "t%05zu", i + 1);
    t.id = id;
    t.author_id = "u" + std::to_string(uniform_index(rng, 800));
    t.text = join(parts);
    t.created_at = "2019-06-01T00:00:00Z";
    t.gold_label = r.gold;
    t.annotator_labels = {{"a", r.a}, {"b", r.b}};
    corpus.add(std::move(t));
  }
  return corpus;
}

SyntheticWorld synthetic_world(const std::vector<std::string>& seeds, std::uint64_t seed) {
  Rng rng(seed);
  SyntheticWorld w;
  w.window = {"2019-03-01T00:00:00Z", "2019-03-14T23:59:59Z"};
  const std::set<std::string> seed_set(seeds.begin(), seeds.end());

  auto in_window = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2019-03-%02dT%02d:00:00Z", static_cast<int>(1 + uniform_index(rng, 14)),
                  static_cast<int>(uniform_index(rng, 24)));
    return std::string(buf);
  };
  auto outside = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2018-%02d-%02dT10:00:00Z", static_cast<int>(1 + uniform_index(rng, 12)),
                  static_cast<int>(1 + uniform_index(rng, 28)));
    return std::string(buf);
  };
  auto filler = [&](std::size_t n) {
    std::vector<std::string> p;
    for (std::size_t k = 0; k < n; ++k) p.push_back(pick(filler_words(), rng));
    return p;
  };
  auto add = [&](const std::string& author, std::string text, std::string created) {
    Tweet t;
    t.id = std::to_string(100000 + w.tweets.size());
    t.author_id = author;
    t.text = std::move(text);
    t.created_at = std::move(created);
    w.tweets.push_back(t);
    return w.tweets.back().id;
  };

  // 100 seed-bearing tweets in the window from 40 authors.
  for (int i = 0; i < 100; ++i) {
    auto parts = filler(1 + uniform_index(rng, 4));
    parts.insert(parts.begin() + static_cast<long>(uniform_index(rng, parts.size() + 1)), pick(seeds, rng));
    w.planted_search_ids.insert(add("user" + std::to_string(uniform_index(rng, 40)), join(parts), in_window()));
  }
  // 150 in-window decoys: a seed only as a substring of a longer word.
  for (int i = 0; i < 150; ++i) {
    std::string decoy;
    do {
      decoy = pick(seeds, rng);
      if (decoy.find(' ') != std::string::npos) decoy.clear();
      else decoy = "م" + decoy + "ش";
    } while (decoy.empty() || seed_set.count(decoy));
    auto parts = filler(2);
    parts.push_back(decoy);
    add("user" + std::to_string(40 + uniform_index(rng, 60)), join(parts), in_window());
  }
  // Timeline tweets of the planted authors, outside the window; a third
  // carry a seed. The planted tweets come back through the timelines too.
  for (int i = 0; i < 450; ++i) {
    auto parts = filler(2 + uniform_index(rng, 3));
    if (i % 3 == 0) parts.push_back(pick(seeds, rng));
    add("user" + std::to_string(uniform_index(rng, 40)), join(parts), outside());
  }
  // Everyone else: seed-bearing tweets outside the window are never found.
  while (w.tweets.size() < 1000) {
    auto parts = filler(3);
    if (w.tweets.size() % 4 == 0) parts.push_back(pick(seeds, rng));
    add("user" + std::to_string(100 + uniform_index(rng, 200)), join(parts), outside());
  }
  return w;
}

std::set<std::string> expected_collection(const SyntheticWorld& world, const std::vector<std::string>& seeds) {
  auto has_seed = [&](const Tweet& t) { return !brute_force_matches(seeds, t.text).empty(); };
  std::set<std::string> ids, authors;
  for (const auto& t : world.tweets) {
    if (world.window.contains(t.created_at) && has_seed(t)) {
      ids.insert(t.id);
      authors.insert(t.author_id);
    }
  }
  for (const auto& t : world.tweets)
    if (authors.count(t.author_id) && has_seed(t)) ids.insert(t.id);
  return ids;
}

}  // namespace fixtures
