#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dangspeech/error.hpp"

namespace dangspeech {

enum class Label { kSafe = 0, kDangerous = 1 };

inline constexpr Label kLabels[] = {Label::kSafe, Label::kDangerous};

inline std::string_view to_string(Label l) { return l == Label::kDangerous ? "dangerous" : "safe"; }

inline std::optional<Label> try_parse_label(std::string_view s) {
  if (s == "dangerous" || s == "1") return Label::kDangerous;
  if (s == "safe" || s == "0" || s == "non-dangerous") return Label::kSafe;
  return std::nullopt;
}

inline Label parse_label(std::string_view s) {
  if (auto l = try_parse_label(s)) return *l;
  throw Error("invalid_label", "unknown label '" + std::string(s) + "' (expected dangerous or safe)");
}

inline int index_of(Label l) { return static_cast<int>(l); }

}  // namespace dangspeech
