#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dangspeech {

// Byte range [begin, end) in some UTF-8 string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

// Normalized text plus, for every byte of `text`, the byte range of the
// original code point(s) it came from. Both maps are non-decreasing.
class NormalizedText {
 public:
  NormalizedText() = default;
  NormalizedText(std::string text, std::vector<std::size_t> src_begin,
                 std::vector<std::size_t> src_end, std::size_t source_size);

  const std::string& text() const { return text_; }
  std::size_t source_size() const { return source_size_; }
  bool empty() const { return text_.empty(); }

  // Maps a byte range of the normalized text back to the original text.
  // The empty range maps to an empty range at the corresponding position.
  Span source_span(Span normalized) const;

  const std::vector<std::size_t>& src_begin() const { return src_begin_; }
  const std::vector<std::size_t>& src_end() const { return src_end_; }

 private:
  std::string text_;
  std::vector<std::size_t> src_begin_;
  std::vector<std::size_t> src_end_;
  std::size_t source_size_ = 0;
};

// Orthographic canonicalization:
//  - harakat U+064B..U+0652 and tatweel U+0640 removed
//  - alef with hamza/madda folded to bare alef, alef maqsura to yeh,
//    teh marbuta to heh
//  - NFC
//  - whitespace runs collapsed to one ASCII space, ends trimmed
// Total and idempotent.
NormalizedText normalize(std::string_view text);

// Convenience when the offset map is not needed.
std::string normalize_string(std::string_view text);

enum class TokenKind { kWord, kMention, kHashtag, kUrl, kEmoji, kPunct };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  Span span;  // byte range in the normalized text

  friend bool operator==(const Token&, const Token&) = default;
};

// Splits normalized text on whitespace and punctuation. Mentions, hashtags,
// URLs and emoji sequences (ZWJ, modifiers, flags, keycaps) are single
// tokens; each punctuation code point is its own token.
std::vector<Token> tokenize(const NormalizedText& text);
std::vector<Token> tokenize(std::string_view normalized);

// Number of kWord tokens.
std::size_t count_words(const std::vector<Token>& tokens);

}  // namespace dangspeech
