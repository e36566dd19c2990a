#ifndef LOWRES_TEXT_UTIL_H_
#define LOWRES_TEXT_UTIL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lowres {

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(std::span<const std::string> parts, std::string_view sep);
std::string_view trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Levenshtein distance with unit costs over code points.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Same distance, but returns limit + 1 as soon as the distance is known to
// exceed `limit`.
std::size_t levenshtein_bounded(std::string_view a, std::string_view b,
                                std::size_t limit);

std::size_t levenshtein(const std::u32string& a, const std::u32string& b);

std::string sha256_hex(std::string_view data);

}  // namespace lowres

#endif  // LOWRES_TEXT_UTIL_H_
