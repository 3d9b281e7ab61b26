#include "skillprobe/confound.hpp"

#include <algorithm>

#include "skillprobe/text.hpp"

namespace skillprobe::confound {

const char* to_string(CollisionCategory c) {
  switch (c) {
    case CollisionCategory::KidsOnly: return "kids_only";
    case CollisionCategory::Joint: return "joint";
    case CollisionCategory::NonKidsOnly: return "non_kids_only";
  }
  return "joint";
}

const char* to_string(OutcomeKind o) {
  switch (o) {
    case OutcomeKind::IrrelevantInvoked: return "irrelevant_invoked";
    case OutcomeKind::RelevantInvoked: return "relevant_invoked";
    case OutcomeKind::RelevantNonKidPrioritized:
      return "relevant_nonkid_prioritized";
    case OutcomeKind::NoInvocation: return "no_invocation";
  }
  return "no_invocation";
}

std::vector<ConfoundingEntry> build_dictionary(
    const std::vector<catalog::SkillRecord>& records) {
  std::map<std::string, std::set<std::string>> claims;  // utterance -> skills
  std::map<std::string, const catalog::SkillRecord*> by_id;
  for (const auto& record : records) {
    by_id[record.skill_id] = &record;
    for (const auto& u : catalog::extract_utterances(record))
      if (u.kind == catalog::UtteranceKind::Opening)
        claims[u.text].insert(record.skill_id);
  }

  std::vector<ConfoundingEntry> entries;
  for (const auto& [utterance, skills] : claims) {
    if (skills.size() < 2) continue;
    ConfoundingEntry entry;
    entry.utterance = utterance;
    entry.skill_ids = skills;

    bool any_kid = false, any_nonkid = false;
    for (const auto& id : skills)
      (by_id.at(id)->is_kids() ? any_kid : any_nonkid) = true;
    entry.category = any_kid && any_nonkid ? CollisionCategory::Joint
                     : any_kid             ? CollisionCategory::KidsOnly
                                           : CollisionCategory::NonKidsOnly;

    // name+icon collision among the members sharing this utterance
    std::map<std::pair<std::string, std::string>, int> identities;
    for (const auto& id : skills) {
      const auto* r = by_id.at(id);
      if (r->icon_digest.empty()) continue;
      int& n = identities[{text::to_lower(r->name), r->icon_digest}];
      if (++n >= 2) entry.same_name_icon = true;
    }
    entries.push_back(std::move(entry));
  }
  return entries;  // claims map iteration is already utterance-sorted
}

ConfoundingOutcome test_utterance(const ConfoundingEntry& entry,
                                  host::HostBackend& host,
                                  const std::map<std::string, bool>& is_kids) {
  ConfoundingOutcome out;
  out.utterance = entry.utterance;
  try {
    std::string session = host.open_session();
    host::HostResponse resp = host.say(session, entry.utterance);
    try {
      host.close_session(session);
    } catch (...) {
    }
    if (!resp.invoked_skill_id) {
      out.outcome = OutcomeKind::NoInvocation;
      return out;
    }
    out.invoked_skill_id = resp.invoked_skill_id;
    if (!entry.skill_ids.count(*resp.invoked_skill_id)) {
      out.outcome = OutcomeKind::IrrelevantInvoked;
      return out;
    }
    bool invoked_is_kid = false;
    if (auto it = is_kids.find(*resp.invoked_skill_id); it != is_kids.end())
      invoked_is_kid = it->second;
    bool kid_member_exists = false;
    for (const auto& id : entry.skill_ids)
      if (auto it = is_kids.find(id); it != is_kids.end() && it->second)
        kid_member_exists = true;
    if (entry.category == CollisionCategory::Joint && !invoked_is_kid &&
        kid_member_exists) {
      out.outcome = OutcomeKind::RelevantNonKidPrioritized;
      return out;
    }
    out.outcome = OutcomeKind::RelevantInvoked;
    return out;
  } catch (const std::exception& e) {
    out.invoked_skill_id.reset();
    out.outcome = OutcomeKind::NoInvocation;
    out.note = e.what();
    return out;
  }
}

int ConfoundSummary::count(CollisionCategory c, OutcomeKind o) const {
  auto row = counts.find(c);
  if (row == counts.end()) return 0;
  auto cell = row->second.find(o);
  return cell == row->second.end() ? 0 : cell->second;
}

ConfoundSummary summarize(const std::vector<ConfoundingEntry>& entries,
                          const std::vector<ConfoundingOutcome>& outcomes) {
  ConfoundSummary summary;
  summary.total_entries = static_cast<int>(entries.size());
  std::map<std::string, const ConfoundingEntry*> by_utterance;
  for (const auto& e : entries) by_utterance[e.utterance] = &e;
  for (const auto& o : outcomes) {
    auto it = by_utterance.find(o.utterance);
    if (it == by_utterance.end()) continue;
    ++summary.counts[it->second->category][o.outcome];
  }
  return summary;
}

}  // namespace skillprobe::confound
