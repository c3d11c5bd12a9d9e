#include "dangspeech/textproc.hpp"

#include <algorithm>
#include <cassert>

#include "dangspeech/unicode.hpp"

namespace dangspeech {

NormalizedText::NormalizedText(std::string text, std::vector<std::size_t> src_begin,
                               std::vector<std::size_t> src_end, std::size_t source_size)
    : text_(std::move(text)),
      src_begin_(std::move(src_begin)),
      src_end_(std::move(src_end)),
      source_size_(source_size) {
  assert(src_begin_.size() == text_.size() && src_end_.size() == text_.size());
}

Span NormalizedText::source_span(Span normalized) const {
  if (normalized.begin >= normalized.end) {
    const std::size_t at =
        normalized.begin < src_begin_.size() ? src_begin_[normalized.begin] : source_size_;
    return {at, at};
  }
  return {src_begin_[normalized.begin], src_end_[normalized.end - 1]};
}

namespace {

struct Unit {
  char32_t cp;
  std::size_t begin;
  std::size_t end;
};

bool is_stripped(char32_t cp) {
  return (cp >= 0x064B && cp <= 0x0652) || cp == 0x0640 || unicode::is_bidi_control(cp);
}

char32_t fold(char32_t cp) {
  switch (cp) {
    case 0x0623:  // alef with hamza above
    case 0x0625:  // alef with hamza below
    case 0x0622:  // alef with madda
      return 0x0627;
    case 0x0649:  // alef maqsura
      return 0x064A;
    case 0x0629:  // teh marbuta
      return 0x0647;
    default:
      return cp;
  }
}

std::vector<Unit> compose(const std::vector<Unit>& in) {
  std::u32string all;
  all.reserve(in.size());
  for (const auto& u : in) all.push_back(u.cp);
  if (unicode::is_nfc(all)) return in;

  std::vector<Unit> out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    std::size_t j = i + 1;
    while (j < in.size() && !unicode::nfc_boundary_before(in[j].cp)) ++j;

    std::u32string seg;
    for (std::size_t k = i; k < j; ++k) seg.push_back(in[k].cp);
    const std::u32string composed = unicode::nfc(seg);
    if (composed.size() == seg.size()) {
      for (std::size_t k = 0; k < seg.size(); ++k)
        out.push_back({composed[k], in[i + k].begin, in[i + k].end});
    } else {
      for (char32_t cp : composed) out.push_back({cp, in[i].begin, in[j - 1].end});
    }
    i = j;
  }
  return out;
}

bool is_url_trailer(char32_t cp) {
  switch (cp) {
    case U'.':
    case U',':
    case U'!':
    case U'?':
    case U';':
    case U':':
    case U')':
    case U'"':
    case U'\'':
    case U'،':
    case U'؟':
    case U'؛':
      return true;
    default:
      return false;
  }
}

bool same_code_points(const std::vector<Unit>& a, const std::vector<Unit>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Unit& x, const Unit& y) { return x.cp == y.cp; });
}

}  // namespace

NormalizedText normalize(std::string_view text) {
  std::vector<Unit> units;
  for (const auto& cp : unicode::decode(text)) units.push_back({cp.value, cp.begin, cp.end});

  // Stripping can expose new NFC compositions (tatweel between a letter and
  // a combining hamza) and NFC can produce foldable letters, so iterate.
  for (;;) {
    std::vector<Unit> next;
    next.reserve(units.size());
    for (const auto& u : units) {
      if (!is_stripped(u.cp)) {
        next.push_back(u);
      } else if (!unicode::is_bidi_control(u.cp) && !next.empty() && next.back().end == u.begin) {
        // A dropped diacritic or tatweel still belongs to the letter before
        // it, so spans mapped back to the source include it.
        next.back().end = u.end;
      }
    }
    next = compose(next);
    for (auto& u : next) u.cp = fold(u.cp);
    if (same_code_points(next, units)) break;
    units = std::move(next);
  }

  std::string out;
  std::vector<std::size_t> src_begin;
  std::vector<std::size_t> src_end;
  out.reserve(text.size());
  auto emit = [&](char32_t cp, std::size_t b, std::size_t e) {
    unicode::append_utf8(out, cp);
    src_begin.resize(out.size(), b);
    src_end.resize(out.size(), e);
  };

  std::size_t i = 0;
  while (i < units.size()) {
    if (unicode::is_whitespace(units[i].cp)) {
      std::size_t j = i;
      while (j < units.size() && unicode::is_whitespace(units[j].cp)) ++j;
      if (!out.empty() && j < units.size()) emit(U' ', units[i].begin, units[j - 1].end);
      i = j;
      continue;
    }
    emit(units[i].cp, units[i].begin, units[i].end);
    ++i;
  }
  return NormalizedText(std::move(out), std::move(src_begin), std::move(src_end), text.size());
}

std::string normalize_string(std::string_view text) { return normalize(text).text(); }

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord:
      return "word";
    case TokenKind::kMention:
      return "mention";
    case TokenKind::kHashtag:
      return "hashtag";
    case TokenKind::kUrl:
      return "url";
    case TokenKind::kEmoji:
      return "emoji";
    case TokenKind::kPunct:
      return "punct";
  }
  return "unknown";
}

namespace {

bool is_word_char(char32_t cp) {
  return unicode::is_letter(cp) || unicode::is_digit(cp) || unicode::is_mark(cp) || cp == U'_';
}

bool starts_with_ci(const std::vector<unicode::CodePoint>& cps, std::size_t i,
                    std::u32string_view prefix) {
  if (i + prefix.size() > cps.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char32_t c = cps[i + k].value;
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    if (c != prefix[k]) return false;
  }
  return true;
}

}  // namespace

std::vector<Token> tokenize(std::string_view normalized) {
  const auto cps = unicode::decode(normalized);
  std::vector<Token> tokens;

  auto push = [&](TokenKind kind, std::size_t first, std::size_t last) {
    const Span span{cps[first].begin, cps[last - 1].end};
    tokens.push_back({kind, std::string(normalized.substr(span.begin, span.size())), span});
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;

    if (unicode::is_whitespace(c)) {
      ++i;
      continue;
    }

    if (starts_with_ci(cps, i, U"http://") || starts_with_ci(cps, i, U"https://") ||
        starts_with_ci(cps, i, U"www.")) {
      std::size_t j = i;
      while (j < cps.size() && !unicode::is_whitespace(cps[j].value)) ++j;
      // Trailing sentence punctuation belongs to the sentence, not the link.
      while (j > i + 4 && is_url_trailer(cps[j - 1].value)) --j;
      push(TokenKind::kUrl, i, j);
      i = j;
      continue;
    }

    if ((c == U'@' || c == U'#') && i + 1 < cps.size() && is_word_char(cps[i + 1].value)) {
      std::size_t j = i + 1;
      while (j < cps.size() && is_word_char(cps[j].value)) ++j;
      push(c == U'@' ? TokenKind::kMention : TokenKind::kHashtag, i, j);
      i = j;
      continue;
    }

    if (unicode::is_emoji_base(c)) {
      std::size_t j = i + 1;
      const bool regional = c >= 0x1F1E6 && c <= 0x1F1FF;
      if (regional && j < cps.size() && cps[j].value >= 0x1F1E6 && cps[j].value <= 0x1F1FF) {
        ++j;
      } else {
        for (;;) {
          while (j < cps.size() && unicode::is_emoji_component(cps[j].value) &&
                 cps[j].value != 0x200D)
            ++j;
          if (j + 1 < cps.size() && cps[j].value == 0x200D &&
              unicode::is_emoji_base(cps[j + 1].value)) {
            j += 2;
            continue;
          }
          break;
        }
      }
      push(TokenKind::kEmoji, i, j);
      i = j;
      continue;
    }

    if (unicode::is_emoji_component(c)) {
      // Stray selector or joiner outside an emoji sequence.
      ++i;
      continue;
    }

    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < cps.size() && is_word_char(cps[j].value)) ++j;
      push(TokenKind::kWord, i, j);
      i = j;
      continue;
    }

    push(TokenKind::kPunct, i, i + 1);
    ++i;
  }
  return tokens;
}

std::vector<Token> tokenize(const NormalizedText& text) { return tokenize(text.text()); }

std::size_t count_words(const std::vector<Token>& tokens) {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const Token& t) { return t.kind == TokenKind::kWord; }));
}

}  // namespace dangspeech
