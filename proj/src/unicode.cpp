#include "agtd/unicode.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace agtd {

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw std::runtime_error("invalid UTF-8 lead byte at offset " +
                               std::to_string(i));
    }
    if (i + len > n) throw std::runtime_error("truncated UTF-8 sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80)
        throw std::runtime_error("invalid UTF-8 continuation byte at offset " +
                                 std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMinByLen[len])
      throw std::runtime_error("overlong UTF-8 encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      throw std::runtime_error("invalid Unicode scalar value");
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

namespace {

struct Range {
  char32_t lo;
  char32_t hi;
};

// Letters, decimal digits and combining marks, sorted by codepoint.
// Dandas (0964, 0965) and the Devanagari abbreviation sign (0970) are
// deliberately absent: they are punctuation.
constexpr std::array<Range, 30> kWordRanges{{
    {0x0030, 0x0039},  // ASCII digits
    {0x0041, 0x005A},  // ASCII uppercase
    {0x0061, 0x007A},  // ASCII lowercase
    {0x00C0, 0x00D6},  // Latin-1 letters
    {0x00D8, 0x00F6},  // Latin-1 letters (multiplication sign excluded)
    {0x00F8, 0x02AF},  // Latin Extended-A/B, IPA
    {0x02B0, 0x02C1},  // common modifier letters
    {0x0300, 0x036F},  // combining diacritical marks
    {0x0386, 0x0386},  // Greek capital alpha with tonos
    {0x0388, 0x03FF},  // Greek
    {0x0400, 0x0481},  // Cyrillic
    {0x048A, 0x052F},  // Cyrillic supplement ranges
    {0x0591, 0x05BD},  // Hebrew points
    {0x05D0, 0x05EA},  // Hebrew letters
    {0x0610, 0x061A},  // Arabic marks
    {0x0620, 0x0669},  // Arabic letters, marks, digits
    {0x066E, 0x06D3},  // Arabic letters (Arabic full stop 06D4 excluded)
    {0x06D5, 0x06DC},  // Arabic small high marks
    {0x06DF, 0x06FF},  // Arabic marks and letters
    {0x0900, 0x0963},  // Devanagari: signs, letters, matras, virama
    {0x0966, 0x096F},  // Devanagari digits
    {0x0971, 0x097F},  // Devanagari: additional letters
    {0x0980, 0x0D7F},  // Bengali..Malayalam (coarse; dandas live in 09xx only
                       //  via the shared Devanagari codepoints, not here)
    {0x0D80, 0x0DF4},  // Sinhala
    {0x1E00, 0x1FFF},  // Latin Extended Additional, Greek Extended
    {0x3040, 0x30FF},  // Hiragana, Katakana
    {0x4E00, 0x9FFF},  // CJK unified ideographs
    {0xA8E0, 0xA8F7},  // Devanagari Extended: cantillation, candrabindus
    {0xA8FD, 0xA8FF},  // Devanagari Extended: siddham, vowel signs
    {0xAC00, 0xD7A3},  // Hangul syllables
}};

constexpr std::array<Range, 10> kSpaceRanges{{
    {0x0009, 0x000D},  // tab..carriage return
    {0x0020, 0x0020},
    {0x0085, 0x0085},  // next line
    {0x00A0, 0x00A0},  // no-break space
    {0x1680, 0x1680},
    {0x2000, 0x200A},
    {0x2028, 0x2029},  // line/paragraph separator
    {0x202F, 0x202F},
    {0x205F, 0x205F},
    {0x3000, 0x3000},  // ideographic space
}};

template <std::size_t N>
bool in_ranges(const std::array<Range, N>& ranges, char32_t cp) {
  auto it = std::upper_bound(
      ranges.begin(), ranges.end(), cp,
      [](char32_t v, const Range& r) { return v < r.lo; });
  return it != ranges.begin() && cp <= std::prev(it)->hi;
}

}  // namespace

bool is_word_cp(char32_t cp) { return in_ranges(kWordRanges, cp); }

bool is_space_cp(char32_t cp) { return in_ranges(kSpaceRanges, cp); }

bool is_sentence_terminator_cp(char32_t cp) {
  return cp == U'.' || cp == U'?' || cp == U'!' || cp == kDanda ||
         cp == kDoubleDanda;
}

}  // namespace agtd
