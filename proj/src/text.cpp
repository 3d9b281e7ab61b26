#include "skillprobe/text.hpp"

#include <cctype>

namespace skillprobe::text {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

// A single quote only opens a span when the previous character is not part of
// a word, and only closes one when the next character is not part of a word.
// That keeps apostrophes in "don't" or "pig's" from toggling quote state.
struct QuoteTracker {
  char open = '\0';  // '"', '\'' or '`'

  bool inside() const { return open != '\0'; }

  // Returns true when `c` at position i toggles quote state.
  bool step(std::string_view s, std::size_t i) {
    char c = s[i];
    unsigned char prev = i > 0 ? static_cast<unsigned char>(s[i - 1]) : ' ';
    unsigned char next =
        i + 1 < s.size() ? static_cast<unsigned char>(s[i + 1]) : ' ';
    if (!inside()) {
      if (c == '"' || c == '`') {
        open = c;
        return true;
      }
      if (c == '\'' && !is_word_char(prev)) {
        open = '\'';
        return true;
      }
      return false;
    }
    if (open == '"' && c == '"') {
      open = '\0';
      return true;
    }
    if (open == '`' && c == '\'') {
      open = '\0';
      return true;
    }
    if (open == '\'' && c == '\'' && !(is_word_char(prev) && is_word_char(next))) {
      open = '\0';
      return true;
    }
    return false;
  }
};

}  // namespace

std::string normalize_utterance(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isalnum(c) != 0 || c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '\'') {
      // dropped: "don't" -> "dont"
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool contains_token_run(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool all = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (haystack[i + k] != needle[k]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (unsigned char c : s) {
    if (std::isspace(c) != 0) {
      pending = true;
    } else {
      if (pending && !out.empty()) out.push_back(' ');
      pending = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::vector<std::string> split_description_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_terminator(c) || c == '\n' || c == '\r') {
      if (!cur.empty()) out.push_back(collapse_whitespace(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(collapse_whitespace(cur));
  std::vector<std::string> filtered;
  for (auto& sent : out)
    if (!sent.empty()) filtered.push_back(std::move(sent));
  return filtered;
}

std::vector<std::string> split_sentences_quote_aware(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  QuoteTracker quotes;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    quotes.step(s, i);
    cur.push_back(c);
    if (!quotes.inside() && is_terminator(c)) {
      // swallow the whole terminator cluster ("?.", "...", "?!")
      while (i + 1 < s.size() && is_terminator(s[i + 1])) {
        cur.push_back(s[i + 1]);
        ++i;
      }
      std::string sent = collapse_whitespace(cur);
      if (!sent.empty()) out.push_back(std::move(sent));
      cur.clear();
    }
    ++i;
  }
  std::string tail = collapse_whitespace(cur);
  bool tail_has_word = false;
  for (unsigned char c : tail)
    if (is_word_char(c)) tail_has_word = true;
  if (tail_has_word) out.push_back(std::move(tail));
  return out;
}

std::vector<std::string> quoted_phrases(std::string_view s) {
  std::vector<std::string> out;
  QuoteTracker quotes;
  std::string cur;
  bool collecting = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool toggled = quotes.step(s, i);
    if (toggled) {
      if (quotes.inside()) {
        collecting = true;
        cur.clear();
      } else {
        collecting = false;
        std::string phrase = collapse_whitespace(cur);
        if (!phrase.empty()) out.push_back(std::move(phrase));
      }
      continue;
    }
    if (collecting) cur.push_back(s[i]);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

}  // namespace skillprobe::text
