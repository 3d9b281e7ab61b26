#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skillprobe/catalog.hpp"
#include "skillprobe/explorer.hpp"
#include "skillprobe/respclass.hpp"

namespace skillprobe::riskscan {

enum class FindingKind { Expletive, PiiRequest };
enum class ReviewVerdict { Pending, Confirmed, Rejected };
enum class PermissionCheck {
  NoPermissionDeclared,
  PermissionDeclaredMismatched,
  PermissionDeclaredMatching,
};

const char* to_string(FindingKind k);
const char* to_string(ReviewVerdict v);
const char* to_string(PermissionCheck c);
std::optional<FindingKind> finding_kind_from_string(std::string_view s);
std::optional<ReviewVerdict> review_verdict_from_string(std::string_view s);
std::optional<PermissionCheck> permission_check_from_string(std::string_view s);

struct RiskFinding {
  std::string finding_id;  // stable across rescans of the same content
  std::string skill_id;
  FindingKind kind = FindingKind::Expletive;
  std::string response_text;
  std::string evidence;  // matched term, verbatim from the response
  std::optional<std::string> pii_keyword;  // canonical; set iff kind=PiiRequest
  int depth = 0;
  std::string opening_utterance;  // root opening of the node's subtree
  std::optional<catalog::UtteranceSource> utterance_source;
  std::optional<PermissionCheck> permission_check;  // PiiRequest only
  ReviewVerdict verdict = ReviewVerdict::Pending;
};

// Term list for content moderation. Matching is token-boundary and
// case-insensitive, with common digit/symbol substitutions folded back to
// letters (sh1t -> shit) before comparison.
class ModerationList {
 public:
  ModerationList() = default;
  // One term per line (terms may span several words); '#' comments.
  static ModerationList load(const std::filesystem::path& file);
  static const ModerationList& bundled();

  void add_term(std::string_view term);
  std::size_t size() const { return terms_.size(); }

  // First matching term's verbatim occurrence in `text`, if any.
  std::optional<std::string> match(std::string_view text) const;

 private:
  std::vector<std::vector<std::string>> terms_;  // normalized token runs
};

struct PiiHit {
  std::string keyword;   // canonical
  std::string evidence;  // verbatim occurrence
};

// The fixed canonical keyword list plus an alias table (e.g. "birthday"
// counts as "date of birth"). Extensible additively via files.
class PiiKeywords {
 public:
  PiiKeywords() = default;
  // keywords file: one canonical keyword per line. aliases file:
  // "alias<TAB>canonical" per line. '#' comments in both.
  static PiiKeywords load(const std::filesystem::path& keywords_file,
                          const std::filesystem::path& aliases_file);
  static const PiiKeywords& bundled();

  void add_keyword(std::string_view canonical);
  void add_alias(std::string_view alias, std::string_view canonical);
  const std::vector<std::string>& keywords() const { return canonical_; }

  // First keyword or alias occurring as a token run in `tokens`
  // (verbatim word tokens); returns the canonical keyword, the verbatim
  // evidence, and the run's word-token offset.
  struct TokenHit {
    std::string keyword;
    std::string evidence;
    std::size_t start = 0;
  };
  std::optional<TokenHit> find_in_tokens(const std::vector<std::string>& words) const;

 private:
  std::vector<std::string> canonical_;
  // token-run key -> canonical keyword, longest runs first
  std::vector<std::pair<std::vector<std::string>, std::string>> runs_;
};

// Every node whose text contains a moderation term, flagged Pending for
// human review (benign uses are expected; no auto-confirmation).
std::vector<RiskFinding> scan_expletives(const explorer::ConversationTree& tree,
                                         const ModerationList& moderation);

// A personal-information request: the sentence both contains a keyword (or
// alias) and asks for it — a WH question about it, a polar question or
// directive whose possessive/request-verb context targets it, or a request
// focus that canonicalizes to it. Plain statements never match.
std::optional<PiiHit> detect_pii_request(std::string_view response_text,
                                         const respclass::Classifier& classifier,
                                         const PiiKeywords& keywords);

// keyword -> platform permission tag ("address" -> "device_address").
class PermissionMap {
 public:
  PermissionMap() = default;
  static PermissionMap load(const std::filesystem::path& file);  // TSV rows
  static const PermissionMap& bundled();

  void add(std::string_view keyword, std::string_view permission);
  std::optional<std::string> permission_for(const std::string& keyword) const;

 private:
  std::map<std::string, std::string> map_;
};

// Annotates PiiRequest findings in place: no declared permissions at all,
// declared but not covering the keyword, or declared and matching.
void cross_check_permissions(std::vector<RiskFinding>& findings,
                             const catalog::SkillRecord& record,
                             const PermissionMap& map);

// Full pass over one tree: expletive scan, per-node PII detection,
// permission cross-check, opening/source annotation, stable finding ids.
std::vector<RiskFinding> scan_tree(const explorer::ConversationTree& tree,
                                   const catalog::SkillRecord& record,
                                   const respclass::Classifier& classifier,
                                   const ModerationList& moderation,
                                   const PiiKeywords& keywords,
                                   const PermissionMap& permissions);

// One reviewer's call on one finding.
struct ReviewVote {
  std::string finding_id;
  std::string reviewer;
  bool inappropriate = false;
};

// Applies votes: a finding with votes is Confirmed when its yes-votes reach
// ceil(3/4 x its vote count) (3 of 4 reviewers), Rejected otherwise;
// findings without votes stay Pending. Returns the confirmed findings.
std::vector<RiskFinding> review_queue(std::vector<RiskFinding>& findings,
                                      const std::vector<ReviewVote>& votes);

}  // namespace skillprobe::riskscan
