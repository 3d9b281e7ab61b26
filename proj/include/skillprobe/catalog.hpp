#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skillprobe::catalog {

// One store listing, as mirrored from a skill directory page.
struct SkillRecord {
  std::string skill_id;
  std::string name;
  std::string invocation_name;  // lowercase, trimmed
  std::vector<std::string> sample_utterances;  // at most 3 on a store page
  std::vector<std::string> additional_instructions;
  std::string description;
  std::string category;  // exactly one tag, e.g. "kids"
  std::vector<std::string> permissions;
  std::string icon_digest;
  bool mature_content = false;

  bool is_kids() const { return category == "kids"; }
};

enum class UtteranceKind { Opening, InSkill };

enum class UtteranceSource {
  SampleList,
  AdditionalInstructions,
  DescriptionQuote,
  DescriptionInvocationSentence,
  Generated,
};

struct Utterance {
  std::string text;  // normalized: lowercase, punctuation stripped
  UtteranceKind kind = UtteranceKind::InSkill;
  UtteranceSource source = UtteranceSource::Generated;
};

struct CatalogIssue {
  std::size_t entry_index = 0;
  std::string message;
};

struct Catalog {
  std::vector<SkillRecord> records;
  std::vector<CatalogIssue> issues;  // entries skipped during validation
};

// Parses a JSON document holding an array of catalog entries. Unknown keys
// are ignored; entries failing validation are skipped and reported in
// `issues`. Throws std::runtime_error on an unreadable or unparsable file
// and on duplicate skill ids.
Catalog parse_catalog(const std::filesystem::path& path);

// Normalizes one utterance and decides whether it opens the skill: the first
// token is an opening verb (open/launch/start/ask/play/begin/talk) or the
// text contains the record's invocation name as a contiguous token run.
// Throws std::invalid_argument when the text normalizes to nothing.
Utterance classify_utterance(std::string_view raw, const SkillRecord& record,
                             UtteranceSource source = UtteranceSource::Generated);

// Collects probe candidates from the record: sample utterances, additional
// instructions, description sentences that begin with the wake-word prefix
// ("alexa,") with the prefix stripped, and quoted description phrases of 2
// to 12 tokens. Deduplicated on normalized text; first occurrence wins.
std::vector<Utterance> extract_utterances(const SkillRecord& record);

const char* to_string(UtteranceKind k);
const char* to_string(UtteranceSource s);
std::optional<UtteranceSource> utterance_source_from_string(std::string_view s);

}  // namespace skillprobe::catalog
