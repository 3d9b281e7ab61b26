#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace skillprobe::text {

// Lowercases ASCII letters, drops apostrophes outright ("don't" -> "dont"),
// turns all other punctuation into spaces, and collapses whitespace runs.
// Bytes >= 0x80 pass through unchanged. Idempotent.
std::string normalize_utterance(std::string_view raw);

// Whitespace split; intended for normalized strings.
std::vector<std::string> split_tokens(std::string_view s);

// True when `needle` occurs as a contiguous token run inside `haystack`.
bool contains_token_run(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle);

// Collapses whitespace runs (including newlines) to single spaces and trims.
std::string collapse_whitespace(std::string_view s);

// Splits prose into sentences on '.', '!', '?' and newlines, dropping the
// terminators. No quote or abbreviation handling; meant for store listings.
std::vector<std::string> split_description_sentences(std::string_view s);

// Splits on '.', '!', '?' but ignores terminators inside quoted spans.
// Terminator characters stay attached to their sentence.
std::vector<std::string> split_sentences_quote_aware(std::string_view s);

// Extracts quoted spans: "..." pairs, `...' pairs, and '...' pairs where the
// single quotes sit on word boundaries (so contractions do not open a span).
std::vector<std::string> quoted_phrases(std::string_view s);

// Case-insensitive ASCII lowercase copy.
std::string to_lower(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);

}  // namespace skillprobe::text
