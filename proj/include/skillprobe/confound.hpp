#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skillprobe/catalog.hpp"
#include "skillprobe/skillhost.hpp"

namespace skillprobe::confound {

enum class CollisionCategory { KidsOnly, Joint, NonKidsOnly };
enum class OutcomeKind {
  IrrelevantInvoked,
  RelevantInvoked,
  RelevantNonKidPrioritized,  // Joint entries only
  NoInvocation,
};

const char* to_string(CollisionCategory c);
const char* to_string(OutcomeKind o);

// An opening utterance shared by two or more skills.
struct ConfoundingEntry {
  std::string utterance;  // normalized
  std::set<std::string> skill_ids;
  CollisionCategory category = CollisionCategory::Joint;
  bool same_name_icon = false;  // >=2 members share name (case-insensitive) + icon
};

struct ConfoundingOutcome {
  std::string utterance;
  std::optional<std::string> invoked_skill_id;  // absent iff NoInvocation
  OutcomeKind outcome = OutcomeKind::NoInvocation;
  std::optional<std::string> note;  // host error detail
};

// Collects every opening utterance claimed by at least two skills, sorted by
// utterance. KidsOnly when every member is a kid skill, NonKidsOnly when
// none is, Joint otherwise.
std::vector<ConfoundingEntry> build_dictionary(
    const std::vector<catalog::SkillRecord>& records);

// Sends the utterance on a fresh session (so no skill is enabled) and reads
// back which skill, if any, the utterance invoked. `is_kids` maps skill id
// to kid-category membership for the non-kid-priority check.
ConfoundingOutcome test_utterance(const ConfoundingEntry& entry,
                                  host::HostBackend& host,
                                  const std::map<std::string, bool>& is_kids);

struct ConfoundSummary {
  // counts[category][outcome]
  std::map<CollisionCategory, std::map<OutcomeKind, int>> counts;
  int total_entries = 0;

  int count(CollisionCategory c, OutcomeKind o) const;
};

ConfoundSummary summarize(const std::vector<ConfoundingEntry>& entries,
                          const std::vector<ConfoundingOutcome>& outcomes);

}  // namespace skillprobe::confound
