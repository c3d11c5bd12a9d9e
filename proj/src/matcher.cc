#include "dangspeech/matcher.hpp"

#include <algorithm>
#include <queue>

namespace dangspeech {

SeedMatcher::SeedMatcher(const SeedSet& seeds) { build(seeds.texts()); }

SeedMatcher::SeedMatcher(const std::vector<std::string>& seeds) { build(seeds); }

void SeedMatcher::build(std::vector<std::string> seeds) {
  for (auto& s : seeds) s = normalize_string(s);
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  if (seeds.empty()) throw Error("empty_seed_set", "cannot build a matcher from an empty seed set");

  nodes_.assign(1, Node{});
  for (const auto& seed : seeds) {
    const auto tokens = tokenize(seed);
    if (tokens.empty()) throw Error("invalid_seed", "seed has no tokens: '" + seed + "'");
    int state = 0;
    for (const auto& tok : tokens) {
      if (tok.kind != TokenKind::kWord)
        throw Error("invalid_seed", "seed '" + seed + "' contains non-word token '" + tok.text + "'");
      auto [it, inserted] = vocab_.try_emplace(tok.text, static_cast<int>(vocab_.size()));
      const int sym = it->second;
      auto next = nodes_[state].next.find(sym);
      if (next == nodes_[state].next.end()) {
        nodes_.push_back(Node{});
        const int child = static_cast<int>(nodes_.size()) - 1;
        nodes_[state].next.emplace(sym, child);
        state = child;
      } else {
        state = next->second;
      }
    }
    nodes_[state].pattern = static_cast<int>(seeds_.size());
    seeds_.push_back(seed);
    seed_lengths_.push_back(tokens.size());
  }

  // Breadth-first fail links.
  std::queue<int> queue;
  for (const auto& [sym, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    queue.push(child);
  }
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop();
    for (const auto& [sym, child] : nodes_[node].next) {
      int f = nodes_[node].fail;
      while (f != 0 && !nodes_[f].next.count(sym)) f = nodes_[f].fail;
      auto it = nodes_[f].next.find(sym);
      nodes_[child].fail = (it != nodes_[f].next.end() && it->second != child) ? it->second : 0;
      const int fail = nodes_[child].fail;
      nodes_[child].out_link = nodes_[fail].pattern >= 0 ? fail : nodes_[fail].out_link;
      queue.push(child);
    }
  }
}

int SeedMatcher::symbol(std::string_view token) const {
  auto it = vocab_.find(std::string(token));
  return it == vocab_.end() ? -1 : it->second;
}

std::vector<SeedMatch> SeedMatcher::find(const NormalizedText& text,
                                         const std::vector<Token>& tokens) const {
  struct Hit {
    std::size_t begin;
    std::size_t end;
    int pattern;
  };
  std::vector<Hit> hits;

  int state = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int sym = tokens[i].kind == TokenKind::kWord ? symbol(tokens[i].text) : -1;
    if (sym < 0) {
      state = 0;
      continue;
    }
    while (state != 0 && !nodes_[state].next.count(sym)) state = nodes_[state].fail;
    auto it = nodes_[state].next.find(sym);
    state = it == nodes_[state].next.end() ? 0 : it->second;

    for (int n = nodes_[state].pattern >= 0 ? state : nodes_[state].out_link; n >= 0;
         n = nodes_[n].out_link) {
      const int p = nodes_[n].pattern;
      hits.push_back({i + 1 - seed_lengths_[static_cast<std::size_t>(p)], i + 1, p});
    }
  }

  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });

  std::vector<SeedMatch> out;
  std::size_t covered = 0;
  for (const auto& h : hits) {
    if (h.begin < covered) continue;
    covered = h.end;
    const Span norm{tokens[h.begin].span.begin, tokens[h.end - 1].span.end};
    out.push_back({seeds_[static_cast<std::size_t>(h.pattern)], static_cast<std::size_t>(h.pattern),
                   h.begin, h.end, norm, text.source_span(norm)});
  }
  return out;
}

std::vector<SeedMatch> SeedMatcher::find(std::string_view raw) const {
  const NormalizedText norm = normalize(raw);
  return find(norm, tokenize(norm));
}

std::vector<SeedMatch> find_seeds(const SeedMatcher& matcher, std::string_view raw) {
  return matcher.find(raw);
}

}  // namespace dangspeech
