#include "qgen/text.hpp"

#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <array>

namespace qgen::text {

namespace {

constexpr std::array<std::string_view, 14> kDetachable = {
    "?", "!", ".", ",", ";", ":", "\"", "(", ")", "\xC2\xAB" /* « */, "\xC2\xBB" /* » */,
    "\xE2\x80\x9C" /* “ */, "\xE2\x80\x9D" /* ” */, "\xE2\x80\xA6" /* … */};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view leading_punct(std::string_view s) {
  for (auto p : kDetachable)
    if (s.size() > 0 && s.starts_with(p)) return p;
  return {};
}

std::string_view trailing_punct(std::string_view s) {
  for (auto p : kDetachable)
    if (s.size() > 0 && s.ends_with(p)) return p;
  return {};
}

}  // namespace

std::string lowercase(std::string_view utf8) {
  bool ascii = true;
  for (unsigned char c : utf8) {
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) {
    std::string out(utf8);
    for (auto& c : out)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
  }
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& chunk : split_whitespace(s)) {
    std::string_view rest = chunk;
    std::vector<std::string> tail;
    while (true) {
      auto p = leading_punct(rest);
      if (p.empty() || p.size() == rest.size()) break;
      out.emplace_back(p);
      rest.remove_prefix(p.size());
    }
    while (true) {
      auto p = trailing_punct(rest);
      if (p.empty() || p.size() == rest.size()) break;
      tail.emplace_back(p);
      rest.remove_suffix(p.size());
    }
    out.emplace_back(rest);
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

bool is_punctuation(std::string_view token) {
  int32_t i = 0;
  const auto len = static_cast<int32_t>(token.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(token.data());
  while (i < len) {
    UChar32 cp;
    U8_NEXT(bytes, i, len, cp);
    if (cp >= 0 && u_isalnum(cp)) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace qgen::text
