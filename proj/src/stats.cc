#include "dangspeech/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "dangspeech/error.hpp"

namespace dangspeech {

namespace {

struct Phenomenon {
  const char* name;
  std::function<bool(const FeatureVector&)> present;
};

const std::vector<Phenomenon>& phenomena() {
  static const std::vector<Phenomenon> kList = {
      {"Mentions", [](const FeatureVector& f) { return f.has_mention; }},
      {"Questions", [](const FeatureVector& f) { return f.is_question; }},
      {"Emoji", [](const FeatureVector& f) { return f.emoji_count() > 0; }},
      {"Conditional", [](const FeatureVector& f) { return f.has_conditional; }},
      {"Body parts", [](const FeatureVector& f) { return f.body_part_count > 0; }},
      {"Hahaha", [](const FeatureVector& f) { return f.has_laughter; }},
  };
  return kList;
}

double pct(std::size_t k, std::size_t n) { return n == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(n); }

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

PhenomenaTable phenomena_stats(const std::vector<FeatureVector>& features,
                               const std::vector<std::optional<Label>>& labels) {
  if (features.size() != labels.size())
    throw Error("length_mismatch", "features and labels differ in length");
  PhenomenaTable table;
  for (const auto& l : labels) {
    if (!l) continue;
    if (*l == Label::kSafe) {
      ++table.n_safe;
    } else {
      ++table.n_dangerous;
    }
  }
  if (table.n_safe + table.n_dangerous == 0)
    throw Error("unlabeled_corpus", "phenomena statistics need gold labels");

  for (const auto& ph : phenomena()) {
    PhenomenonRow row;
    row.name = ph.name;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (!labels[i] || !ph.present(features[i])) continue;
      ++row.freq;
      if (*labels[i] == Label::kSafe) {
        ++row.freq_safe;
      } else {
        ++row.freq_dangerous;
      }
    }
    row.pct_safe = pct(row.freq_safe, table.n_safe);
    row.pct_dangerous = pct(row.freq_dangerous, table.n_dangerous);
    row.pct_overall = pct(row.freq, table.n_safe + table.n_dangerous);
    table.rows.push_back(row);
  }
  return table;
}

nlohmann::json to_json(const PhenomenaTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"phenomenon", r.name},
                    {"freq", r.freq},
                    {"freq_safe", r.freq_safe},
                    {"freq_dangerous", r.freq_dangerous},
                    {"pct_non_dangerous", r.pct_safe},
                    {"pct_dangerous", r.pct_dangerous},
                    {"pct_overall", r.pct_overall}});
  }
  return {{"n_safe", t.n_safe}, {"n_dangerous", t.n_dangerous}, {"rows", rows}};
}

std::string to_text_table(const PhenomenaTable& t) {
  std::string out = pad("Phenomena", 12, true) + pad("Freq.", 8, false) + pad("% non-dangerous", 17, false) +
                    pad("% dangerous", 13, false) + pad("% overall", 11, false) + "\n";
  for (const auto& r : t.rows) {
    out += pad(r.name, 12, true) + pad(std::to_string(r.freq), 8, false) +
           pad(fmt("%.1f%%", r.pct_safe), 17, false) + pad(fmt("%.1f%%", r.pct_dangerous), 13, false) +
           pad(fmt("%.1f%%", r.pct_overall), 11, false) + "\n";
  }
  return out;
}

double percentile_nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error("empty_input", "percentile of an empty sample");
  if (p <= 0) return sorted.front();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

DescriptiveStats describe(std::vector<double> v) {
  if (v.empty()) throw Error("empty_input", "descriptive statistics of an empty sample");
  std::sort(v.begin(), v.end());
  DescriptiveStats s;
  s.n = v.size();
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1));
  }
  s.min = v.front();
  s.max = v.back();
  s.p25 = percentile_nearest_rank(v, 25);
  s.p50 = percentile_nearest_rank(v, 50);
  s.p75 = percentile_nearest_rank(v, 75);
  return s;
}

TimelineStats timeline_stats(const std::vector<double>& seed_counts, const std::vector<double>& timeline_sizes) {
  return {describe(seed_counts), describe(timeline_sizes)};
}

nlohmann::json to_json(const DescriptiveStats& s) {
  return {{"n", s.n},     {"mean", s.mean}, {"std", s.std}, {"min", s.min},
          {"max", s.max}, {"p25", s.p25},   {"p50", s.p50}, {"p75", s.p75}};
}

nlohmann::json to_json(const TimelineStats& s) {
  return {{"seed_counts", to_json(s.seed_counts)}, {"timeline_sizes", to_json(s.timeline_sizes)}};
}

std::string to_text_table(const TimelineStats& s) {
  std::string out = pad("", 16, true);
  for (const char* h : {"mean", "std", "min", "25%", "50%", "75%", "max"}) out += pad(h, 10, false);
  out += "\n";
  auto row = [&](const char* name, const DescriptiveStats& d) {
    out += pad(name, 16, true);
    for (double v : {d.mean, d.std, d.min, d.p25, d.p50, d.p75, d.max}) out += pad(fmt("%.2f", v), 10, false);
    out += "\n";
  };
  row("seed tweets", s.seed_counts);
  row("timeline size", s.timeline_sizes);
  return out;
}

}  // namespace dangspeech
