#include "skillprobe/datastore.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "json.hpp"
#include "skillprobe/text.hpp"

namespace skillprobe::datastore {

namespace {
using json = nlohmann::ordered_json;
}

ConversationRecord conversations_from_tree(const explorer::ConversationTree& tree) {
  ConversationRecord record;
  record.skill_id = tree.skill_id;
  for (const auto& run : tree.runs) {
    if (run.path.empty()) continue;
    std::vector<std::string> conv;
    conv.reserve(run.path.size() * 2);
    for (std::size_t i = 0; i < run.path.size(); ++i) {
      conv.push_back(run.utterances[i]);
      conv.push_back(tree.node(run.path[i]).text);
    }
    record.conversations.push_back(std::move(conv));
  }
  return record;
}

void canonicalize(ConversationRecord& record) {
  std::sort(record.conversations.begin(), record.conversations.end());
  record.conversations.erase(
      std::unique(record.conversations.begin(), record.conversations.end()),
      record.conversations.end());
}

void save_conversations(const ConversationRecord& record,
                        const std::filesystem::path& path) {
  ConversationRecord canonical = record;
  canonicalize(canonical);
  json doc;
  doc["skill_id"] = canonical.skill_id;
  doc["conversations"] = canonical.conversations;

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("cannot move " + tmp.string() + " to " +
                             path.string() + ": " + ec.message());
}

ConversationRecord load_conversations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid conversation file " + path.string() + ": " +
                             e.what());
  }
  if (!doc.is_object() || !doc.contains("skill_id") ||
      !doc.at("skill_id").is_string() || !doc.contains("conversations") ||
      !doc.at("conversations").is_array())
    throw std::runtime_error("invalid conversation file " + path.string());

  ConversationRecord record;
  record.skill_id = doc.at("skill_id").get<std::string>();
  for (const auto& conv : doc.at("conversations")) {
    if (!conv.is_array() || conv.size() < 2 || conv.size() % 2 != 0)
      throw std::runtime_error("conversation in " + path.string() +
                               " does not alternate utterance/response");
    std::vector<std::string> entries;
    for (const auto& item : conv) {
      if (!item.is_string())
        throw std::runtime_error("conversation in " + path.string() +
                                 " holds a non-string entry");
      entries.push_back(item.get<std::string>());
    }
    record.conversations.push_back(std::move(entries));
  }
  return record;
}

ConversationRecord merge_records(const ConversationRecord& a,
                                 const ConversationRecord& b) {
  if (a.skill_id != b.skill_id)
    throw std::invalid_argument("cannot merge conversations of " + a.skill_id +
                                " with " + b.skill_id);
  ConversationRecord merged = a;
  merged.conversations.insert(merged.conversations.end(), b.conversations.begin(),
                              b.conversations.end());
  canonicalize(merged);
  return merged;
}

ConversationRecord merge_into_file(const std::filesystem::path& path,
                                   const ConversationRecord& incoming) {
  ConversationRecord merged = incoming;
  if (std::filesystem::exists(path))
    merged = merge_records(load_conversations(path), incoming);
  save_conversations(merged, path);
  canonicalize(merged);
  return merged;
}

explorer::ConversationTree rebuild_tree(const ConversationRecord& record) {
  explorer::ConversationTree tree;
  tree.skill_id = record.skill_id;
  std::map<std::string, int> by_text;

  auto node_for = [&](const std::string& response, int parent) {
    std::string key = text::collapse_whitespace(response);
    auto it = by_text.find(key);
    if (it != by_text.end()) return it->second;
    explorer::ConversationNode n;
    n.id = static_cast<int>(tree.nodes.size()) + 1;
    n.text = response;
    n.kind = key.empty() ? host::ResponseKind::Empty : host::ResponseKind::Speech;
    n.parent = parent;
    n.depth = parent ? tree.node(parent).depth + 1 : 1;
    tree.nodes.push_back(n);
    by_text.emplace(key, n.id);
    return n.id;
  };

  for (const auto& conv : record.conversations) {
    explorer::Run run;
    int current = 0;
    for (std::size_t i = 0; i + 1 < conv.size(); i += 2) {
      const std::string& utterance = conv[i];
      const std::string& response = conv[i + 1];
      if (i == 0) {
        int node = node_for(response, 0);
        bool known = false;
        for (const auto& r : tree.roots)
          if (r.utterance == utterance) known = true;
        if (!known) tree.roots.push_back({utterance, node});
        current = node;
      } else {
        std::string key = text::collapse_whitespace(response);
        auto it = by_text.find(key);
        int child;
        if (it == by_text.end()) {
          child = node_for(response, current);
          tree.node(current).edges.push_back({utterance, child});
        } else {
          child = it->second;
          // Keep the structure a tree: link only under the recorded parent.
          if (tree.node(child).parent == current) {
            bool have_edge = false;
            for (const auto& e : tree.node(current).edges)
              if (e.child == child) have_edge = true;
            if (!have_edge) tree.node(current).edges.push_back({utterance, child});
          }
        }
        current = child;
      }
      run.path.push_back(current);
      run.utterances.push_back(utterance);
    }
    if (!run.path.empty()) tree.runs.push_back(std::move(run));
  }
  return tree;
}

}  // namespace skillprobe::datastore
