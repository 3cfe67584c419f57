#pragma once

// UTF-8 text helpers shared by induction, generation and the metrics.

#include <string>
#include <string_view>
#include <vector>

namespace qgen::text {

/// Unicode lowercase (root locale) of a UTF-8 string.
std::string lowercase(std::string_view utf8);

/// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// Splits `s` on `sep`, keeping empty fields.
std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Whitespace tokenization that also detaches leading and trailing
/// sentence punctuation (`?!.,;:` quotes and brackets), so "graduate?"
/// becomes {"graduate", "?"}. Word-internal characters are untouched.
std::vector<std::string> tokenize(std::string_view s);

/// True when the token has no letter or digit code point.
bool is_punctuation(std::string_view token);

std::string_view trim(std::string_view s);

}  // namespace qgen::text
