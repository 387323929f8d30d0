#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace agtd {

/// Decodes UTF-8 into Unicode scalar values. Throws std::runtime_error on
/// malformed input (truncated sequences, overlong encodings, surrogates).
std::vector<char32_t> decode_utf8(std::string_view text);

std::string encode_utf8(const std::vector<char32_t>& cps);
void append_utf8(std::string& out, char32_t cp);

// Word characters are letters, decimal digits and combining marks of the
// scripts the toolkit processes (Latin, Devanagari and the other major
// blocks). Everything else -- punctuation, symbols, format controls --
// separates tokens.
bool is_word_cp(char32_t cp);

bool is_space_cp(char32_t cp);

// Sentence terminators: danda, double danda and the Latin ., ?, !
bool is_sentence_terminator_cp(char32_t cp);

constexpr char32_t kDanda = U'।';
constexpr char32_t kDoubleDanda = U'॥';

}  // namespace agtd
