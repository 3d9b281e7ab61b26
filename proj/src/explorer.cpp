#include "skillprobe/explorer.hpp"

#include <algorithm>
#include <fstream>

#include "skillprobe/data_dir.hpp"
#include "skillprobe/text.hpp"

namespace skillprobe::explorer {

namespace {

// Depth of the deepest node with an untaken probe in the subtree, and the
// lowest node id at that depth; nullopt when the subtree is spent.
struct Frontier {
  int depth = 0;
  int node = 0;
};

std::optional<Frontier> deepest_untaken(const ConversationTree& tree,
                                        const PathMemory& memory, int node_id) {
  std::optional<Frontier> best;
  auto consider = [&](int depth, int id) {
    if (!best || depth > best->depth || (depth == best->depth && id < best->node))
      best = Frontier{depth, id};
  };
  if (memory.node_has_untaken(node_id))
    consider(tree.node(node_id).depth, node_id);
  for (const auto& edge : tree.node(node_id).edges)
    if (auto sub = deepest_untaken(tree, memory, edge.child))
      consider(sub->depth, sub->node);
  return best;
}

}  // namespace

AnswerDicts AnswerDicts::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw std::runtime_error("cannot read answer dictionary: " + file.string());
  AnswerDicts out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out.by_subtheme[line.substr(0, tab)].push_back(line.substr(tab + 1));
  }
  return out;
}

const AnswerDicts& AnswerDicts::bundled() {
  static const AnswerDicts dicts =
      load(default_data_dir() / "lexicon" / "followup_answers.tsv");
  return dicts;
}

std::vector<std::string> AnswerDicts::answers_for(
    const respclass::ThemeLabel& theme) const {
  auto it = by_subtheme.find(theme.key());
  if (it == by_subtheme.end() || it->second.empty()) return {kDontKnowAnswer};
  return it->second;
}

const char* to_string(EndReason r) {
  switch (r) {
    case EndReason::NotNew: return "not_new";
    case EndReason::Empty: return "empty";
    case EndReason::Audio: return "audio";
    case EndReason::Error: return "error";
    case EndReason::BoundReached: return "bound_reached";
    case EndReason::Diverged: return "diverged";
    case EndReason::HostError: return "host_error";
  }
  return "not_new";
}

int ConversationTree::find_by_text(const std::string& collapsed) const {
  for (const auto& n : nodes)
    if (text::collapse_whitespace(n.text) == collapsed) return n.id;
  return 0;
}

bool PathMemory::node_has_untaken(int id) const {
  auto it = nodes.find(id);
  if (it == nodes.end() || it->second.exhausted) return false;
  for (const auto& alt : it->second.alternatives)
    if (!it->second.taken.count(text::normalize_utterance(alt))) return true;
  return false;
}

std::vector<std::string> followup_alternatives(const respclass::ResponseClass& cls,
                                               const AnswerDicts& dicts) {
  std::vector<std::string> alts;
  auto add = [&](const std::string& a) {
    std::string norm = text::normalize_utterance(a);
    for (const auto& prev : alts)
      if (text::normalize_utterance(prev) == norm) return;
    alts.push_back(a);
  };
  switch (cls.kind) {
    case respclass::SentenceKind::YesNoQuestion:
      add("yes");
      add("no");
      break;
    case respclass::SentenceKind::WhQuestion: {
      respclass::ThemeLabel theme =
          cls.theme.value_or(respclass::ThemeLabel{});  // description:other
      for (const auto& a : dicts.answers_for(theme)) add(a);
      break;
    }
    case respclass::SentenceKind::Directive:
      for (const auto& p : cls.suggested_phrases) add(p);
      if (cls.theme)
        for (const auto& a : dicts.answers_for(*cls.theme)) add(a);
      if (alts.empty()) {
        add("tell me another one");
        add("tell me more");
      }
      break;
    case respclass::SentenceKind::Informative:
      add("tell me another one");
      add("tell me more");
      break;
  }
  return alts;
}

std::optional<std::string> generate_followup(
    const std::vector<std::string>& alternatives,
    const std::set<std::string>& taken) {
  for (const auto& alt : alternatives)
    if (!taken.count(text::normalize_utterance(alt))) return alt;
  return std::nullopt;
}

TerminationDecision should_terminate(const host::HostResponse& response,
                                     const std::map<std::string, int>& run_text_counts,
                                     const ConversationTree& tree,
                                     const PathMemory& memory,
                                     const ExploreConfig& config) {
  const std::string key = text::collapse_whitespace(response.text);
  auto counted = run_text_counts.find(key);
  if (counted != run_text_counts.end() && counted->second >= config.repeat_threshold)
    return {true, EndReason::NotNew};
  int existing = tree.find_by_text(key);
  if (existing && !subtree_has_untaken(tree, memory, existing))
    return {true, EndReason::NotNew};
  switch (response.kind) {
    case host::ResponseKind::Empty: return {true, EndReason::Empty};
    case host::ResponseKind::Audio: return {true, EndReason::Audio};
    case host::ResponseKind::Error: return {true, EndReason::Error};
    case host::ResponseKind::Speech: break;
  }
  if (!existing &&
      static_cast<int>(tree.nodes.size()) >= config.max_nodes_per_skill)
    return {true, EndReason::BoundReached};
  return {false, EndReason::NotNew};
}

bool subtree_has_untaken(const ConversationTree& tree, const PathMemory& memory,
                         int node_id) {
  if (memory.node_has_untaken(node_id)) return true;
  for (const auto& edge : tree.node(node_id).edges)
    if (subtree_has_untaken(tree, memory, edge.child)) return true;
  return false;
}

namespace {

class Exploration {
 public:
  Exploration(const catalog::SkillRecord& record,
              const std::vector<catalog::Utterance>& utterances,
              host::HostBackend& backend, const ExploreConfig& config,
              const respclass::Classifier& classifier, const AnswerDicts& dicts)
      : backend_(backend), config_(config), classifier_(classifier), dicts_(dicts) {
    tree_.skill_id = record.skill_id;
    for (const auto& u : utterances)
      if (u.kind == catalog::UtteranceKind::Opening) openings_.push_back(u.text);
  }

  ConversationTree run_all() {
    if (openings_.empty()) {
      tree_.error = "no opening utterances";
      return tree_;
    }
    while (memory_.runs < config_.max_runs_per_skill) {
      if (static_cast<int>(tree_.nodes.size()) >= config_.max_nodes_per_skill)
        break;
      std::optional<std::string> entry = pick_entry();
      if (!entry) break;  // no untried openings and no untaken probes left
      ++memory_.runs;
      if (!one_run(*entry)) break;  // host failure
    }
    return tree_;
  }

 private:
  // Node bookkeeping ---------------------------------------------------

  int root_for(const std::string& opening) const {
    for (const auto& r : tree_.roots)
      if (r.utterance == opening) return r.node;
    return 0;
  }

  int create_node(const std::string& raw_text, host::ResponseKind kind, int parent) {
    ConversationNode n;
    n.id = static_cast<int>(tree_.nodes.size()) + 1;
    n.text = raw_text;
    n.kind = kind;
    n.parent = parent;
    n.depth = parent ? tree_.node(parent).depth + 1 : 1;
    auto cls = classifier_.classify(raw_text);
    n.response_class = cls.kind;
    tree_.nodes.push_back(n);

    PathMemory::NodeState state;
    state.alternatives = followup_alternatives(cls, dicts_);
    // Non-speech responses and nodes at the depth cap take no probes.
    state.exhausted =
        kind != host::ResponseKind::Speech || n.depth >= config_.max_depth;
    memory_.nodes.emplace(n.id, std::move(state));
    return n.id;
  }

  // Entry selection ----------------------------------------------------

  std::optional<std::string> pick_entry() {
    for (const auto& opening : openings_)
      if (!root_for(opening)) return opening;
    // Replay toward the deepest node that still has an untried probe.
    std::optional<Frontier> best;
    std::set<int> seen_roots;
    for (const auto& r : tree_.roots) {
      if (!seen_roots.insert(r.node).second) continue;
      if (auto sub = deepest_untaken(tree_, memory_, r.node)) {
        if (!best || sub->depth > best->depth ||
            (sub->depth == best->depth && sub->node < best->node))
          best = sub;
      }
    }
    if (!best) return std::nullopt;
    int root = best->node;
    while (tree_.node(root).parent) root = tree_.node(root).parent;
    for (const auto& r : tree_.roots)
      if (r.node == root) return r.utterance;
    return std::nullopt;  // unreachable: every node descends from a root
  }

  // One conversation ---------------------------------------------------

  struct SessionGuard {
    host::HostBackend& backend;
    std::string id;
    explicit SessionGuard(host::HostBackend& b) : backend(b), id(b.open_session()) {}
    ~SessionGuard() {
      try {
        backend.close_session(id);
      } catch (...) {  // session cleanup must not mask the run's outcome
      }
    }
  };

  // Returns false when the host became unreachable (exploration stops).
  bool one_run(const std::string& opening) {
    Run run;
    std::map<std::string, int> run_counts;
    try {
      SessionGuard session(backend_);

      host::HostResponse resp = backend_.say(session.id, opening);
      std::string key = text::collapse_whitespace(resp.text);
      ++run_counts[key];
      int current = tree_.find_by_text(key);
      if (!current) {
        current = create_node(resp.text, resp.kind, 0);
        tree_.roots.push_back({opening, current});
        run.path.push_back(current);
        run.utterances.push_back(opening);
        if (resp.kind != host::ResponseKind::Speech) {
          run.end_reason = kind_reason(resp.kind);
          tree_.runs.push_back(std::move(run));
          return true;
        }
        if (tree_.node(current).depth >= config_.max_depth) {
          run.end_reason = EndReason::BoundReached;
          tree_.runs.push_back(std::move(run));
          return true;
        }
      } else {
        if (!root_for(opening)) tree_.roots.push_back({opening, current});
        run.path.push_back(current);
        run.utterances.push_back(opening);
        if (!subtree_has_untaken(tree_, memory_, current)) {
          run.end_reason = EndReason::NotNew;
          tree_.runs.push_back(std::move(run));
          return true;
        }
      }

      // Walk: fresh probe when this node has one, else replay the recorded
      // edge toward the deepest untried descendant.
      for (;;) {
        auto& state = memory_.nodes.at(current);
        std::optional<std::string> probe;
        if (!state.exhausted)
          probe = generate_followup(state.alternatives, state.taken);

        if (probe) {
          state.taken.insert(text::normalize_utterance(*probe));
          host::HostResponse r = backend_.say(session.id, *probe);
          std::string k = text::collapse_whitespace(r.text);
          ++run_counts[k];
          TerminationDecision d =
              should_terminate(r, run_counts, tree_, memory_, config_);
          if (d.end) {
            if (r.kind != host::ResponseKind::Speech) state.exhausted = true;
            run.end_reason = d.reason;
            break;
          }
          int existing = tree_.find_by_text(k);
          if (existing) {
            // Recording this hop would need a second parent; treat the
            // response as already covered.
            run.end_reason = EndReason::NotNew;
            break;
          }
          int child = create_node(r.text, r.kind, current);
          tree_.node(current).edges.push_back({*probe, child});
          run.path.push_back(child);
          run.utterances.push_back(*probe);
          if (memory_.nodes.at(child).exhausted) {
            run.end_reason = tree_.node(child).depth >= config_.max_depth
                                 ? EndReason::BoundReached
                                 : kind_reason(r.kind);
            break;
          }
          current = child;
          continue;
        }

        // Replay descent.
        const ConversationNode& node = tree_.node(current);
        const NodeEdge* chosen = nullptr;
        std::optional<Frontier> best;
        for (const auto& edge : node.edges) {
          if (auto sub = deepest_untaken(tree_, memory_, edge.child)) {
            if (!best || sub->depth > best->depth ||
                (sub->depth == best->depth && sub->node < best->node)) {
              best = sub;
              chosen = &edge;
            }
          }
        }
        if (!chosen) {
          run.end_reason = EndReason::NotNew;
          break;
        }
        host::HostResponse r = backend_.say(session.id, chosen->utterance);
        std::string k = text::collapse_whitespace(r.text);
        ++run_counts[k];
        if (k != text::collapse_whitespace(tree_.node(chosen->child).text)) {
          run.end_reason = EndReason::Diverged;
          break;
        }
        current = chosen->child;
        run.path.push_back(current);
        run.utterances.push_back(chosen->utterance);
      }
    } catch (const std::exception& e) {
      tree_.error = e.what();
      run.end_reason = EndReason::HostError;
      tree_.runs.push_back(std::move(run));
      return false;
    }
    tree_.runs.push_back(std::move(run));
    return true;
  }

  static EndReason kind_reason(host::ResponseKind kind) {
    switch (kind) {
      case host::ResponseKind::Empty: return EndReason::Empty;
      case host::ResponseKind::Audio: return EndReason::Audio;
      case host::ResponseKind::Error: return EndReason::Error;
      case host::ResponseKind::Speech: break;
    }
    return EndReason::NotNew;
  }

  host::HostBackend& backend_;
  const ExploreConfig& config_;
  const respclass::Classifier& classifier_;
  const AnswerDicts& dicts_;
  std::vector<std::string> openings_;
  ConversationTree tree_;
  PathMemory memory_;
};

}  // namespace

ConversationTree explore_skill(const catalog::SkillRecord& record,
                               const std::vector<catalog::Utterance>& utterances,
                               host::HostBackend& backend,
                               const ExploreConfig& config,
                               const respclass::Classifier& classifier,
                               const AnswerDicts& dicts) {
  Exploration exploration(record, utterances, backend, config, classifier, dicts);
  return exploration.run_all();
}

CoverageMetrics coverage_metrics(const ConversationTree& tree) {
  CoverageMetrics m;
  m.unique_responses = static_cast<int>(tree.nodes.size());
  for (const auto& n : tree.nodes) {
    m.max_depth = std::max(m.max_depth, n.depth);
    m.max_branching = std::max(m.max_branching, static_cast<int>(n.edges.size()));
  }
  m.initial_utterances = static_cast<int>(tree.roots.size());
  return m;
}

}  // namespace skillprobe::explorer
