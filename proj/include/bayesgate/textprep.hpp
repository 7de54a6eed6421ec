#pragma once

#include <cstdint>
#include <locale.h>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>
#include <wctype.h>

namespace bayesgate {

// Tokens in submission order, lowercase, duplicates preserved.
using TokenSequence = std::vector<std::string>;

// Token -> occurrence count. Counts sum to the length of the source sequence.
using FrequencyMap = std::map<std::string, std::uint64_t>;

template <typename S>
concept TermSet = requires(const S& set, std::string_view term) {
  { set.contains(term) } -> std::convertible_to<bool>;
};

namespace detail {

// glibc ships a built-in C.UTF-8 locale whose LC_CTYPE tables cover all of
// Unicode, so iswalnum/towlower work for non-ASCII letters without any
// locale files being installed. Null when the lookup fails; ASCII handling
// below never depends on it.
inline ::locale_t unicode_ctype() {
  static const ::locale_t loc = ::newlocale(LC_CTYPE_MASK, "C.UTF-8", (::locale_t)0);
  return loc;
}

inline bool is_utf8_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Decodes the UTF-8 sequence starting at `i` and advances past it. Malformed
// input consumes a single byte and yields nullopt, which the tokenizer treats
// as a separator.
inline std::optional<char32_t> decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return static_cast<char32_t>(b0);
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return std::nullopt;
  }
  if (i + len > s.size()) {
    ++i;
    return std::nullopt;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto bk = static_cast<unsigned char>(s[i + k]);
    if (!is_utf8_continuation(bk)) {
      ++i;
      return std::nullopt;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  // Reject overlong encodings, surrogates and out-of-range values.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
      cp > 0x10FFFF) {
    ++i;
    return std::nullopt;
  }
  i += len;
  return cp;
}

inline void encode_utf8(char32_t cp, std::string& out) {
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

inline bool is_word_char(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  if (::locale_t loc = unicode_ctype())
    return ::iswalnum_l(static_cast<wint_t>(cp), loc) != 0;
  return false;
}

inline char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  if (::locale_t loc = unicode_ctype())
    return static_cast<char32_t>(::towlower_l(static_cast<wint_t>(cp), loc));
  return cp;
}

}  // namespace detail

// Lowercases the input and splits it into tokens. Every character that is not
// a letter or digit acts as a separator, so punctuation, symbols, whitespace
// and malformed byte sequences all break tokens. Digits stay part of tokens
// ("v1agra" survives as one word).
inline TokenSequence normalize(std::string_view raw) {
  TokenSequence tokens;
  std::string current;
  std::size_t i = 0;
  while (i < raw.size()) {
    const auto cp = detail::decode_utf8(raw, i);
    if (cp && detail::is_word_char(*cp)) {
      detail::encode_utf8(detail::to_lower(*cp), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (const auto& tok : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

// Drops every occurrence of a stopword, keeping the relative order of the
// rest. The output length is the "total number of words" the likelihood
// denominator uses.
template <TermSet S>
TokenSequence remove_stopwords(const TokenSequence& tokens, const S& stopwords) {
  TokenSequence content;
  content.reserve(tokens.size());
  for (const auto& tok : tokens)
    if (!stopwords.contains(tok)) content.push_back(tok);
  return content;
}

inline FrequencyMap frequency_map(const TokenSequence& tokens) {
  FrequencyMap freq;
  for (const auto& tok : tokens) ++freq[tok];
  return freq;
}

// Occurrences of spam-lexicon members, counted with multiplicity: a spam word
// repeated n times contributes n.
template <TermSet S>
std::uint64_t count_spam_tokens(const TokenSequence& tokens, const S& spam_lexicon) {
  std::uint64_t count = 0;
  for (const auto& tok : tokens)
    if (spam_lexicon.contains(tok)) ++count;
  return count;
}

}  // namespace bayesgate
