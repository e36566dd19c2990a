#ifndef LOWRES_UNICODE_H_
#define LOWRES_UNICODE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Thin UTF-8 helpers over ICU. All strings in the library are UTF-8.
namespace lowres::unicode {

// Decodes UTF-8; malformed bytes decode to U+FFFD.
std::vector<char32_t> decode(std::string_view s);
void append_utf8(char32_t cp, std::string& out);
std::string encode(const std::vector<char32_t>& cps);

// Decodes the code point at byte offset `pos`, advancing `pos` past it.
char32_t next_code_point(std::string_view s, std::size_t& pos);

std::size_t length(std::string_view s);  // in code points

bool is_space(char32_t cp);
// Letters, digits and combining marks (so abugida vowel signs stay inside
// their word).
bool is_word_char(char32_t cp);
bool is_upper(char32_t cp);
bool is_punct(char32_t cp);
bool is_latin(char32_t cp);

// First code point has the uppercase (or titlecase) property.
bool is_capitalized(std::string_view s);
bool has_latin(std::string_view s);

std::string to_lower(std::string_view s);
std::string nfc(std::string_view s);

}  // namespace lowres::unicode

#endif  // LOWRES_UNICODE_H_
