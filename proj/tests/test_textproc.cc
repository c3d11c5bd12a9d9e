#include <doctest.h>

#include "dangspeech/random.hpp"
#include "dangspeech/textproc.hpp"
#include "dangspeech/unicode.hpp"

using namespace dangspeech;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(std::string_view raw) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : tokenize(normalize(raw))) out.emplace_back(t.kind, t.text);
  return out;
}

}  // namespace

TEST_CASE("utf8 decode and encode round trip") {
  const std::string s = "aéا\U0001F52A";
  const auto cps = unicode::decode(s);
  REQUIRE(cps.size() == 4);
  CHECK(cps[2].value == 0x0627);
  CHECK(cps[3].begin == 5);
  CHECK(cps[3].end == 9);
  std::string back;
  for (const auto& cp : cps) unicode::append_utf8(back, cp.value);
  CHECK(back == s);
  CHECK(unicode::length(s) == 4);
}

TEST_CASE("invalid utf8 decodes to replacement characters") {
  const auto cps = unicode::decode("a\xff" "b");
  REQUIRE(cps.size() == 3);
  CHECK(cps[1].value == 0xFFFD);
}

TEST_CASE("character classes") {
  CHECK(unicode::is_arabic_letter(U'ق'));
  CHECK_FALSE(unicode::is_arabic_letter(U'a'));
  CHECK(unicode::is_emoji_base(U'\U0001F52A'));
  CHECK_FALSE(unicode::is_emoji_base(U'#'));
  CHECK(unicode::is_emoji_component(0x200D));
  CHECK(unicode::is_emoji_component(0x1F3FD));
  CHECK(unicode::is_punctuation(U'؟'));
  CHECK(unicode::is_bidi_control(0x200F));
}

TEST_CASE("normalize folds orthographic variants") {
  CHECK(normalize_string("أنا") == "انا");
  CHECK(normalize_string("إذا") == "اذا");
  CHECK(normalize_string("آخر") == "اخر");
  CHECK(normalize_string("على") == "علي");
  CHECK(normalize_string("جمعة") == "جمعه");
  CHECK(normalize_string("اقـــتلك") == "اقتلك");
  CHECK(normalize_string("طَعْناً") == "طعنا");
  CHECK(normalize_string("  a \t\n b  ") == "a b");
  CHECK(normalize_string("‏اقتلك‎") == "اقتلك");
  CHECK(normalize_string("") == "");
}

TEST_CASE("normalize composes to NFC") {
  // e + combining acute
  CHECK(normalize_string("é") == "é");
  // alef + combining hamza above composes to U+0623, which then folds
  CHECK(normalize_string("أ") == "ا");
}

TEST_CASE("normalize is idempotent on random strings") {
  const std::vector<std::string> pieces = {"ا", "أ", "ى", "ة", "ـ", "َ", "ٌ", "ٔ", "ٕ", " ", "\t",
                                           "e", "́", "😊", "👍🏽", "!", "؟", "‏", "ك", "@"};
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = uniform_index(rng, 12);
    for (std::uint64_t k = 0; k < n; ++k) s += pieces[uniform_index(rng, pieces.size())];
    const std::string once = normalize_string(s);
    CHECK(normalize_string(once) == once);
  }
}

TEST_CASE("offset map points back into the source") {
  const std::string raw = "  أنا   اقـتلك 😊";
  const NormalizedText n = normalize(raw);
  CHECK(n.text() == "انا اقتلك 😊");
  CHECK(n.source_size() == raw.size());
  const auto pos = n.text().find("اقتلك");
  const Span src = n.source_span({pos, pos + std::string("اقتلك").size()});
  CHECK(raw.substr(src.begin, src.size()) == "اقـتلك");
  // maps are non-decreasing
  for (std::size_t i = 1; i < n.text().size(); ++i) {
    CHECK(n.src_begin()[i - 1] <= n.src_begin()[i]);
    CHECK(n.src_end()[i - 1] <= n.src_end()[i]);
  }
}

TEST_CASE("tokenizer kinds") {
  const auto t = kinds("@user_1 #الهلال اقتلك؟ https://t.co/x 😊👍🏽 www.a.com!");
  REQUIRE(t.size() == 9);
  CHECK(t[0] == std::make_pair(TokenKind::kMention, std::string("@user_1")));
  CHECK(t[1] == std::make_pair(TokenKind::kHashtag, std::string("#الهلال")));
  CHECK(t[2] == std::make_pair(TokenKind::kWord, std::string("اقتلك")));
  CHECK(t[3] == std::make_pair(TokenKind::kPunct, std::string("؟")));
  CHECK(t[4] == std::make_pair(TokenKind::kUrl, std::string("https://t.co/x")));
  CHECK(t[5].first == TokenKind::kEmoji);
  CHECK(t[5].second == "😊");
  CHECK(t[6].first == TokenKind::kEmoji);
  CHECK(t[6].second == "👍🏽");
  CHECK(t[7] == std::make_pair(TokenKind::kUrl, std::string("www.a.com")));
  CHECK(t[8] == std::make_pair(TokenKind::kPunct, std::string("!")));
  const auto t2 = kinds("www.a.com!");
  REQUIRE(t2.size() == 2);
  CHECK(t2[0].first == TokenKind::kUrl);
  CHECK(t2[0].second == "www.a.com");
}

TEST_CASE("emoji sequences stay whole") {
  CHECK(kinds("👨‍👩‍👧").size() == 1);
  CHECK(kinds("🇸🇦").size() == 1);
  CHECK(kinds("❤️").size() == 1);
  CHECK(kinds("😊😊").size() == 2);
}

TEST_CASE("punctuation splits and each code point is a token") {
  const auto t = kinds("اقتلك...!");
  REQUIRE(t.size() == 5);
  CHECK(t[1].first == TokenKind::kPunct);
  CHECK(count_words(tokenize("a b ! c")) == 3);
  CHECK(tokenize("").empty());
  CHECK(kinds("@").size() == 1);
  CHECK(kinds("@")[0].first == TokenKind::kPunct);
}

TEST_CASE("token spans index the normalized text") {
  const NormalizedText n = normalize("@user انا بفكر اقتلك 😊");
  for (const auto& tok : tokenize(n)) CHECK(n.text().substr(tok.span.begin, tok.span.size()) == tok.text);
}
