#include "dangspeech/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "dangspeech/random.hpp"
#include "util.hpp"

namespace dangspeech {

namespace {

std::string id_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  throw Error("invalid_field", "id must be a string or an integer");
}

}  // namespace

nlohmann::json to_json(const Tweet& t) {
  nlohmann::json j{{"id", t.id}, {"author_id", t.author_id}, {"text", t.text}};
  if (!t.created_at.empty()) j["created_at"] = t.created_at;
  if (t.gold_label) j["gold_label"] = to_string(*t.gold_label);
  if (!t.annotator_labels.empty()) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [annotator, label] : t.annotator_labels) labels[annotator] = to_string(label);
    j["annotator_labels"] = labels;
  }
  return j;
}

Tweet tweet_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("invalid_field", "expected a JSON object");
  if (!j.contains("id")) throw Error("missing_field", "missing required field 'id'");
  if (!j.contains("text")) throw Error("missing_field", "missing required field 'text'");
  Tweet t;
  t.id = id_string(j.at("id"));
  if (t.id.empty()) throw Error("invalid_field", "empty id");
  if (!j.at("text").is_string()) throw Error("invalid_field", "text must be a string");
  t.text = j.at("text").get<std::string>();
  if (util::trim(t.text).empty()) throw Error("invalid_field", "empty text in tweet " + t.id);
  if (j.contains("author_id")) {
    t.author_id = id_string(j.at("author_id"));
  } else if (j.contains("user_id")) {
    t.author_id = id_string(j.at("user_id"));
  }
  if (j.contains("created_at") && j.at("created_at").is_string())
    t.created_at = j.at("created_at").get<std::string>();
  for (const char* key : {"gold_label", "label"}) {
    if (j.contains(key) && !j.at(key).is_null()) {
      t.gold_label = parse_label(j.at(key).get<std::string>());
      break;
    }
  }
  if (j.contains("annotator_labels")) {
    for (const auto& [annotator, label] : j.at("annotator_labels").items())
      t.annotator_labels[annotator] = parse_label(label.get<std::string>());
  }
  return t;
}

bool Corpus::add(Tweet t) {
  if (index_.count(t.id)) return false;
  index_.emplace(t.id, tweets_.size());
  tweets_.push_back(std::move(t));
  return true;
}

const Tweet* Corpus::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &tweets_[it->second];
}

std::map<Label, std::size_t> Corpus::class_counts() const {
  std::map<Label, std::size_t> counts;
  for (const auto& t : tweets_)
    if (t.gold_label) ++counts[*t.gold_label];
  return counts;
}

IngestResult ingest_jsonl(std::string_view contents, const std::string& source_name) {
  IngestResult result;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(contents)) {
    ++line_no;
    const auto line = util::trim(raw);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source_name, line_no, std::string("malformed JSON: ") + e.what());
    }
    Tweet t;
    try {
      t = tweet_from_json(j);
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (!result.corpus.add(std::move(t))) ++result.duplicates;
  }
  return result;
}

IngestResult ingest(const std::filesystem::path& path) {
  return ingest_jsonl(util::read_file(path), path.string());
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& t : corpus) {
    out += to_json(t).dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  util::write_file(path, to_jsonl(corpus));
}

std::string remove_seeds(std::string_view text, const SeedMatcher& matcher, std::size_t* removed) {
  NormalizedText norm = normalize(text);
  if (removed) *removed = 0;
  for (;;) {
    const auto matches = matcher.find(norm, tokenize(norm));
    if (matches.empty()) break;
    if (removed) *removed += matches.size();
    const std::string& s = norm.text();
    std::string next;
    std::size_t pos = 0;
    for (const auto& m : matches) {
      next.append(s, pos, m.normalized_span.begin - pos);
      next += ' ';
      pos = m.normalized_span.end;
    }
    next.append(s, pos, std::string::npos);
    norm = normalize(next);
  }
  return norm.text();
}

nlohmann::json to_json(const PreprocessReport& r) {
  auto by_class = [](const std::map<Label, std::size_t>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (Label l : kLabels) {
      auto it = m.find(l);
      j[std::string(to_string(l))] = it == m.end() ? 0 : it->second;
    }
    return j;
  };
  return {{"input", r.input},
          {"retained", r.retained},
          {"dropped", r.dropped},
          {"seeds_removed", r.seeds_removed},
          {"retained_by_class", by_class(r.retained_by_class)},
          {"dropped_by_class", by_class(r.dropped_by_class)}};
}

PreprocessResult preprocess(const Corpus& corpus, const SeedMatcher& matcher, std::size_t min_words) {
  PreprocessResult result;
  PreprocessReport& rep = result.report;
  for (const auto& t : corpus) {
    ++rep.input;
    Tweet out = t;
    std::size_t removed = 0;
    out.text = remove_seeds(t.text, matcher, &removed);
    rep.seeds_removed += removed;
    if (count_words(tokenize(out.text)) < min_words) {
      ++rep.dropped;
      if (t.gold_label) ++rep.dropped_by_class[*t.gold_label];
      continue;
    }
    ++rep.retained;
    if (t.gold_label) ++rep.retained_by_class[*t.gold_label];
    result.corpus.add(std::move(out));
  }
  return result;
}

nlohmann::json to_json(const DatasetSplit& s) {
  return {{"seed", s.seed}, {"train", s.train}, {"dev", s.dev}, {"test", s.test}};
}

DatasetSplit split_from_json(const nlohmann::json& j) {
  DatasetSplit s;
  s.seed = j.value("seed", std::uint64_t{0});
  s.train = j.at("train").get<std::vector<std::string>>();
  s.dev = j.at("dev").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

DatasetSplit load_split(const std::filesystem::path& path) {
  try {
    return split_from_json(nlohmann::json::parse(util::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, std::string("invalid split manifest: ") + e.what());
  }
}

SplitCounts split_counts_from_json(const nlohmann::json& j) {
  auto part = [&](const char* name) {
    const auto& p = j.at(name);
    return ClassCounts{p.at("safe").get<std::size_t>(), p.at("dangerous").get<std::size_t>()};
  };
  return {part("train"), part("dev"), part("test")};
}

SplitCounts load_split_counts(const std::filesystem::path& path) {
  try {
    return split_counts_from_json(nlohmann::json::parse(util::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, std::string("invalid split counts: ") + e.what());
  }
}

nlohmann::json to_json(const SplitCounts& c) {
  auto part = [](const ClassCounts& p) { return nlohmann::json{{"safe", p.safe}, {"dangerous", p.dangerous}}; };
  return {{"train", part(c.train)}, {"dev", part(c.dev)}, {"test", part(c.test)}};
}

namespace {

// Sorted ids per class, each shuffled with its own stream derived from seed.
std::map<Label, std::vector<std::string>> shuffled_by_class(const Corpus& corpus, std::uint64_t seed) {
  std::map<Label, std::vector<std::string>> ids;
  for (const auto& t : corpus) {
    if (!t.gold_label)
      throw Error("unlabeled_tweet", "split needs a gold label on every tweet; '" + t.id + "' has none");
    ids[*t.gold_label].push_back(t.id);
  }
  for (auto& [label, v] : ids) {
    std::sort(v.begin(), v.end());
    Rng rng(seed * 2 + static_cast<std::uint64_t>(index_of(label)));
    shuffle(v, rng);
  }
  return ids;
}

void cut(const std::vector<std::string>& ids, std::size_t n_train, std::size_t n_dev, DatasetSplit& s) {
  s.train.insert(s.train.end(), ids.begin(), ids.begin() + static_cast<long>(n_train));
  s.dev.insert(s.dev.end(), ids.begin() + static_cast<long>(n_train),
               ids.begin() + static_cast<long>(n_train + n_dev));
  s.test.insert(s.test.end(), ids.begin() + static_cast<long>(n_train + n_dev), ids.end());
}

void sort_parts(DatasetSplit& s) {
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.dev.begin(), s.dev.end());
  std::sort(s.test.begin(), s.test.end());
}

}  // namespace

DatasetSplit split_by_ratios(const Corpus& corpus, const SplitRatios& r, std::uint64_t seed) {
  if (r.train < 0 || r.dev < 0 || r.test < 0 || std::abs(r.train + r.dev + r.test - 1.0) > 1e-9)
    throw Error("invalid_ratios", "split ratios must be non-negative and sum to 1");
  DatasetSplit s;
  s.seed = seed;
  for (const auto& [label, ids] : shuffled_by_class(corpus, seed)) {
    const double n = static_cast<double>(ids.size());
    const auto n_train = std::min(ids.size(), static_cast<std::size_t>(std::llround(r.train * n)));
    const auto n_dev = std::min(ids.size() - n_train, static_cast<std::size_t>(std::llround(r.dev * n)));
    cut(ids, n_train, n_dev, s);
  }
  sort_parts(s);
  return s;
}

DatasetSplit split_by_counts(const Corpus& corpus, const SplitCounts& c, std::uint64_t seed) {
  DatasetSplit s;
  s.seed = seed;
  auto by_class = shuffled_by_class(corpus, seed);
  for (Label l : kLabels) {
    const auto& ids = by_class[l];
    const std::size_t want = c.train.of(l) + c.dev.of(l) + c.test.of(l);
    if (want > ids.size())
      throw Error("counts_exceed_class", "split asks for " + std::to_string(want) + " " +
                                             std::string(to_string(l)) + " tweets but the corpus has " +
                                             std::to_string(ids.size()));
    if (want < ids.size())
      throw Error("counts_mismatch", "split counts for " + std::string(to_string(l)) + " add up to " +
                                         std::to_string(want) + ", corpus has " + std::to_string(ids.size()));
    cut(ids, c.train.of(l), c.dev.of(l), s);
  }
  sort_parts(s);
  return s;
}

std::vector<const Tweet*> select(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::vector<const Tweet*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const Tweet* t = corpus.find(id);
    if (!t) throw Error("unknown_tweet", "tweet '" + id + "' is not in the corpus");
    out.push_back(t);
  }
  return out;
}

}  // namespace dangspeech
