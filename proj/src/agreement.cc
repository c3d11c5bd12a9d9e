#include "dangspeech/agreement.hpp"

#include "util.hpp"

namespace dangspeech {

std::uint64_t ConfusionMatrix2x2::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

ConfusionMatrix2x2 ConfusionMatrix2x2::transposed() const {
  ConfusionMatrix2x2 t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) t.counts[b][a] = counts[a][b];
  return t;
}

nlohmann::json to_json(const ConfusionMatrix2x2& m) {
  return nlohmann::json::array({{m.counts[0][0], m.counts[0][1]}, {m.counts[1][0], m.counts[1][1]}});
}

KappaParts kappa_parts(const ConfusionMatrix2x2& m) {
  const std::uint64_t n = m.total();
  if (n == 0) throw UndefinedKappaError("no doubly-labelled items");
  const double total = static_cast<double>(n);
  const auto& c = m.counts;
  KappaParts k;
  k.p_o = static_cast<double>(c[0][0] + c[1][1]) / total;
  // Integer marginal products keep the Table-sized cases exact.
  const std::uint64_t row0 = c[0][0] + c[0][1], row1 = c[1][0] + c[1][1];
  const std::uint64_t col0 = c[0][0] + c[1][0], col1 = c[0][1] + c[1][1];
  const std::uint64_t chance = row0 * col0 + row1 * col1;
  if (chance == n * n) throw UndefinedKappaError("chance agreement is 1 (an annotator used a single label)");
  k.p_e = static_cast<double>(chance) / (total * total);
  k.kappa = (k.p_o - k.p_e) / (1.0 - k.p_e);
  return k;
}

double cohen_kappa(const ConfusionMatrix2x2& m) { return kappa_parts(m).kappa; }

ConfusionMatrix2x2 confusion_matrix(const Corpus& corpus, const std::string& annotator_a,
                                    const std::string& annotator_b) {
  ConfusionMatrix2x2 m;
  for (const auto& t : corpus) {
    auto a = t.annotator_labels.find(annotator_a);
    auto b = t.annotator_labels.find(annotator_b);
    if (a != t.annotator_labels.end() && b != t.annotator_labels.end()) m.add(a->second, b->second);
  }
  return m;
}

std::vector<std::string> disagreements(const Corpus& corpus) {
  std::vector<std::string> out;
  for (const auto& t : corpus) {
    if (t.annotator_labels.size() < 2) continue;
    const Label first = t.annotator_labels.begin()->second;
    for (const auto& [annotator, label] : t.annotator_labels) {
      if (label != first) {
        out.push_back(t.id);
        break;
      }
    }
  }
  return out;
}

nlohmann::json to_json(const LabelRecord& r) {
  return {{"tweet_id", r.tweet_id},
          {"annotator_id", r.annotator_id},
          {"label", to_string(r.label)},
          {"timestamp", r.timestamp},
          {"kind", r.kind == RecordKind::kLabel ? "label" : "adjudication"}};
}

LabelRecord label_record_from_json(const nlohmann::json& j) {
  LabelRecord r;
  r.tweet_id = j.at("tweet_id").get<std::string>();
  r.annotator_id = j.at("annotator_id").get<std::string>();
  r.label = parse_label(j.at("label").get<std::string>());
  r.timestamp = j.value("timestamp", "");
  const std::string kind = j.value("kind", "label");
  if (kind == "label") {
    r.kind = RecordKind::kLabel;
  } else if (kind == "adjudication") {
    r.kind = RecordKind::kAdjudication;
  } else {
    throw Error("invalid_field", "unknown record kind '" + kind + "'");
  }
  return r;
}

LabelStore::LabelStore(const std::filesystem::path& path) : path_(path) {
  if (std::filesystem::exists(path)) {
    const std::string contents = util::read_file(path);
    std::size_t line_no = 0;
    for (const auto& raw : util::split_lines(contents)) {
      ++line_no;
      const auto line = util::trim(raw);
      if (line.empty()) continue;
      try {
        records_.push_back(label_record_from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), line_no, e.what());
      } catch (const Error& e) {
        throw ParseError(path.string(), line_no, e.what());
      }
    }
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw IoError("cannot open label store " + path.string());
}

void LabelStore::append(const LabelRecord& r) {
  if (path_) {
    out_ << to_json(r).dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("cannot append to label store " + path_->string());
  }
  records_.push_back(r);
}

std::map<std::string, std::map<std::string, Label>> LabelStore::labels_by_tweet() const {
  std::map<std::string, std::map<std::string, Label>> out;
  for (const auto& r : records_)
    if (r.kind == RecordKind::kLabel) out[r.tweet_id][r.annotator_id] = r.label;
  return out;
}

std::map<std::string, Label> LabelStore::adjudications() const {
  std::map<std::string, Label> out;
  for (const auto& r : records_)
    if (r.kind == RecordKind::kAdjudication) out[r.tweet_id] = r.label;
  return out;
}

}  // namespace dangspeech
