#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dangspeech::unicode {

// One decoded code point and the byte range it occupied in the source.
struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

// Decodes UTF-8. Invalid sequences decode to U+FFFD, one per bad byte.
std::vector<CodePoint> decode(std::string_view utf8);

void append_utf8(std::string& out, char32_t cp);
std::string encode(char32_t cp);

std::size_t length(std::string_view utf8);

// NFC-composes a run of code points.
std::u32string nfc(const std::u32string& text);

bool is_nfc(const std::u32string& text);

// True when NFC never composes `cp` with anything before it.
bool nfc_boundary_before(char32_t cp);

bool is_whitespace(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_mark(char32_t cp);
bool is_punctuation(char32_t cp);

// Pictographic emoji, regional indicators and the joiners/modifiers that
// glue emoji sequences together.
bool is_emoji_base(char32_t cp);
bool is_emoji_component(char32_t cp);

bool is_arabic_letter(char32_t cp);

// Directional marks and embedding controls that carry no text.
bool is_bidi_control(char32_t cp);

}  // namespace dangspeech::unicode
