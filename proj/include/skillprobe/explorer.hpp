#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skillprobe/catalog.hpp"
#include "skillprobe/respclass.hpp"
#include "skillprobe/skillhost.hpp"

namespace skillprobe::explorer {

// Ordered answer lists keyed by question subtheme ("human:age" -> 1, 2, ...).
// Questions without a usable list get the generic deflection answer.
struct AnswerDicts {
  static constexpr const char* kDontKnowAnswer = "i don't know. please tell me.";

  std::map<std::string, std::vector<std::string>> by_subtheme;

  // File format: one "theme:subtheme<TAB>answer" row per line, '#' comments.
  // Rows with one key accumulate in file order.
  static AnswerDicts load(const std::filesystem::path& file);
  static const AnswerDicts& bundled();

  std::vector<std::string> answers_for(const respclass::ThemeLabel& theme) const;
};

struct ExploreConfig {
  int max_runs_per_skill = 25;
  int max_depth = 15;
  int repeat_threshold = 2;   // same text this many times in one run ends it
  int max_nodes_per_skill = 500;
};

enum class EndReason {
  NotNew,        // response already covered by the tree or repeated in-run
  Empty,
  Audio,
  Error,
  BoundReached,  // depth or node budget hit
  Diverged,      // replayed step produced an unexpected response
  HostError,     // transport failure; tree carries an error annotation
};
const char* to_string(EndReason r);

struct NodeEdge {
  std::string utterance;  // probe that led to the child
  int child = 0;
};

// One unique response. Uniqueness key: whitespace-collapsed exact text.
struct ConversationNode {
  int id = 0;  // 1-based, discovery order
  std::string text;
  host::ResponseKind kind = host::ResponseKind::Speech;
  respclass::SentenceKind response_class = respclass::SentenceKind::Informative;
  int depth = 1;   // roots are depth 1; child depth = parent depth + 1
  int parent = 0;  // 0 for roots
  std::vector<NodeEdge> edges;  // distinct utterances, new children only
};

struct RootEdge {
  std::string utterance;  // normalized opening
  int node = 0;
};

struct Run {
  std::vector<int> path;                // nodes visited, root first
  std::vector<std::string> utterances;  // utterances[i] produced path[i]
  EndReason end_reason = EndReason::NotNew;
};

struct ConversationTree {
  std::string skill_id;
  std::vector<ConversationNode> nodes;  // node id == index + 1
  std::vector<RootEdge> roots;          // distinct openings, discovery order
  std::vector<Run> runs;
  std::optional<std::string> error;  // set when a host failure cut things short

  const ConversationNode& node(int id) const { return nodes.at(id - 1); }
  ConversationNode& node(int id) { return nodes.at(id - 1); }
  // Looks a node up by whitespace-collapsed text; 0 when absent.
  int find_by_text(const std::string& collapsed) const;
};

// What has been tried where, across the runs of one skill.
struct PathMemory {
  struct NodeState {
    std::vector<std::string> alternatives;  // generation order, as sent
    std::set<std::string> taken;            // normalized forms already sent
    bool exhausted = false;  // no further probes allowed at this node
  };
  std::map<int, NodeState> nodes;
  int runs = 0;

  bool node_has_untaken(int id) const;
};

struct CoverageMetrics {
  int unique_responses = 0;
  int max_depth = 0;
  int max_branching = 0;
  int initial_utterances = 0;
};

// Every follow-up the policy is willing to send for one response class, in
// preference order: yes/no for polar questions, subtheme dictionary answers
// for WH questions, suggested phrases (then dictionary answers when the
// directive paraphrases a question) for directives, and the two generic
// continuation prompts for plain statements.
std::vector<std::string> followup_alternatives(const respclass::ResponseClass& cls,
                                               const AnswerDicts& dicts);

// First alternative not yet taken (comparison on normalized text).
std::optional<std::string> generate_followup(
    const std::vector<std::string>& alternatives,
    const std::set<std::string>& taken);

struct TerminationDecision {
  bool end = false;
  EndReason reason = EndReason::NotNew;
};

// Decides whether the response to a fresh (untried) probe ends the run:
// text repeated within the run or an already-exhausted known response ->
// NotNew; Empty/Audio/Error kinds end with their own reason; a new response
// that cannot be recorded (node budget) -> BoundReached.
TerminationDecision should_terminate(const host::HostResponse& response,
                                     const std::map<std::string, int>& run_text_counts,
                                     const ConversationTree& tree,
                                     const PathMemory& memory,
                                     const ExploreConfig& config);

// True when any node in `node_id`'s subtree still has an untaken probe.
bool subtree_has_untaken(const ConversationTree& tree, const PathMemory& memory,
                         int node_id);

// Runs repeated conversations: each run opens a fresh session, enters through
// an opening utterance (untried openings first), replays recorded choices
// down to a branch with untried probes, takes the first one, and keeps going
// until the run terminates. Stops when no untried (node, probe) pair remains,
// or at the run/node budget.
ConversationTree explore_skill(
    const catalog::SkillRecord& record,
    const std::vector<catalog::Utterance>& utterances, host::HostBackend& backend,
    const ExploreConfig& config = {},
    const respclass::Classifier& classifier = respclass::Classifier::bundled(),
    const AnswerDicts& dicts = AnswerDicts::bundled());

CoverageMetrics coverage_metrics(const ConversationTree& tree);

}  // namespace skillprobe::explorer
