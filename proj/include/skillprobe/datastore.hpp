#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skillprobe/explorer.hpp"

namespace skillprobe::datastore {

// One skill's accumulated conversations. Each conversation alternates probe
// utterance / response text, so it has even length >= 2. The on-disk form is
// canonical: conversations sorted and deduplicated, which makes merging
// idempotent and commutative.
struct ConversationRecord {
  std::string skill_id;
  std::vector<std::vector<std::string>> conversations;
};

// Flattens a tree's runs into alternating utterance/response lists. A run
// contributes one entry per visited node; the exchange that terminated the
// run (an error, silence, or an already-seen response) is not part of it.
ConversationRecord conversations_from_tree(const explorer::ConversationTree& tree);

// Sorts and deduplicates in place.
void canonicalize(ConversationRecord& record);

// Canonicalizes, then writes JSON atomically (temp file + rename).
// Throws std::runtime_error naming the path on I/O failure.
void save_conversations(const ConversationRecord& record,
                        const std::filesystem::path& path);

// Loads and validates (alternation invariant, even length >= 2).
// Throws std::runtime_error on unreadable, unparsable, or invalid files.
ConversationRecord load_conversations(const std::filesystem::path& path);

// Union of both conversation sets, canonical. Throws std::invalid_argument
// when the skill ids differ.
ConversationRecord merge_records(const ConversationRecord& a,
                                 const ConversationRecord& b);

// Merges `incoming` into the file at `path` (which may not exist yet) and
// writes the result back. Returns the merged record.
ConversationRecord merge_into_file(const std::filesystem::path& path,
                                   const ConversationRecord& incoming);

// Reconstructs the conversation tree a record describes: nodes keyed by
// collapsed response text in conversation order, roots from each
// conversation's first exchange, edges first-wins so the result stays a
// tree. Response kinds are Empty for blank text, Speech otherwise; response
// classes are left at their default for consumers to assign.
explorer::ConversationTree rebuild_tree(const ConversationRecord& record);

}  // namespace skillprobe::datastore
