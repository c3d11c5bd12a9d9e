#include <doctest.h>

#include <algorithm>

#include "dangspeech/seedgen.hpp"
#include "fixtures.hpp"

using namespace dangspeech;

namespace {

const std::vector<std::string> kMultiword = {
    "اشرب من دمك",  "اشرب دمك",   "اشرب من دمكم", "اشوه وجهك",  "اطير راسك",   "اطير روسكم",
    "افجر راسك",    "افقع وجهك",  "افقع وجوهكم",  "افك وجهك",   "اقضي عليك",   "اقضي عليكم",
    "اكسر وجهك",    "امحيك من على وش الارض",      "امحيكم من على وش الارض",     "نشرب من دمك",
    "نشرب دمك",     "نشرب من دمكم", "نطير راسك",  "نطير روسكم", "نفجر راسك",   "نفقع وجهك",
    "نقضي عليك",    "نقضي عليكم", "نمحيك من على وش الارض",      "نمحيكم من على وش الارض"};

}  // namespace

TEST_CASE("generated seeds equal the reference list") {
  const auto& res = fixtures::resources();
  CHECK(res.seeds().size() == 286);
  const SeedDiff diff = diff_against_published(res.seeds(), fixtures::data_dir() / "seeds_286.txt");
  CHECK(diff.missing.empty());
  CHECK(diff.extra.empty());
  CHECK(diff.exact());
}

TEST_CASE("every multiword expression is in the seed set") {
  REQUIRE(kMultiword.size() == 26);
  for (const auto& m : kMultiword) CHECK_MESSAGE(fixtures::resources().seeds().contains(m), m);
}

TEST_CASE("generation is deterministic and sorted") {
  const auto& res = fixtures::resources();
  const SeedSet again = generate_all(res.lexicon(), res.rules());
  CHECK(again.texts() == res.seeds().texts());
  const auto t = again.texts();
  CHECK(std::is_sorted(t.begin(), t.end()));
  CHECK(std::adjacent_find(t.begin(), t.end()) == t.end());
  CHECK(again.to_text() == res.seeds().to_text());
}

TEST_CASE("every generated seed is normalized and traces to a lexicon verb") {
  const auto& res = fixtures::resources();
  for (const auto& p : res.seeds().phrases()) {
    CHECK(normalize_string(p.text) == p.text);
    CHECK_MESSAGE(res.lexicon().find(p.verb) != nullptr, p.text);
  }
}

TEST_CASE("inflect applies stems and suffixes") {
  const auto rules = parse_rules("قتل\tاقتل\tنقتل\tك\tكم,كوا\tباقتلك\n");
  REQUIRE(rules.size() == 1);
  auto texts = [](const std::vector<SeedPhrase>& v) {
    std::vector<std::string> out;
    for (const auto& p : v) out.push_back(p.text);
    return out;
  };
  CHECK(texts(inflect(rules[0], Subject::k1SG, Object::k2SG)) == std::vector<std::string>{"اقتلك", "باقتلك"});
  CHECK(texts(inflect(rules[0], Subject::k1SG, Object::k2PL)) == std::vector<std::string>{"اقتلكم", "اقتلكوا"});
  CHECK(texts(inflect(rules[0], Subject::k1PL, Object::k2PL)) == std::vector<std::string>{"نقتلكم", "نقتلكوا"});
  const auto sg = inflect(rules[0], Subject::k1SG, Object::k2SG);
  CHECK(sg[0].verb == "قتل");
  CHECK(sg[1].variant_id == 1);
}

TEST_CASE("underscore marks a word boundary") {
  const auto rules = parse_rules("قضى\tاقضي\tنقضي\t_عليك\t_عليكم\n");
  const auto v = inflect(rules[0], Subject::k1PL, Object::k2SG);
  REQUIRE(v.size() == 1);
  CHECK(v[0].text == "نقضي عليك");
}

TEST_CASE("missing stem without a variant is an error") {
  const auto rules = parse_rules("قتل\tاقتل\t\tك\tكم\n");
  CHECK_THROWS_AS(inflect(rules[0], Subject::k1PL, Object::k2SG), MissingStemError);
}

TEST_CASE("rule for a verb outside the lexicon") {
  const auto& res = fixtures::resources();
  const auto rules = parse_rules("كتب\tاكتب\tنكتب\tك\tكم\n");
  CHECK_THROWS_AS(generate_all(res.lexicon(), rules), UnknownVerbError);
}

TEST_CASE("rule file parse errors carry line numbers") {
  try {
    parse_rules("# c\nقتل\tاقتل\tنقتل\tك\tكم\nonlyone\n", "rules.tsv");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("seed list parsing normalizes and deduplicates") {
  const SeedSet s = SeedSet::parse_list("اقتلك\n\nأقتلك\nاقـتلك\nاذبحك\n");
  CHECK(s.size() == 2);
  CHECK(s.contains("اقتلك"));
  CHECK(s.contains("أقتلك"));
  CHECK_FALSE(s.contains("اطعنك"));
}

TEST_CASE("diff reports both directions") {
  const SeedSet gen = SeedSet::parse_list("a\nb\nc\n");
  const SeedSet pub = SeedSet::parse_list("b\nc\nd\n");
  const SeedDiff d = diff_against_published(gen, pub);
  CHECK(d.missing == std::vector<std::string>{"d"});
  CHECK(d.extra == std::vector<std::string>{"a"});
  CHECK_FALSE(d.exact());
}
