#include "skillprobe/skillhost.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include "json.hpp"
#include "skillprobe/text.hpp"

namespace skillprobe::host {

namespace {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::optional<MatcherKind> matcher_kind_from_string(std::string_view s) {
  if (s == "exact") return MatcherKind::Exact;
  if (s == "any_of") return MatcherKind::AnyOf;
  if (s == "fallback") return MatcherKind::Fallback;
  return std::nullopt;
}

bool parse_definition(const nlohmann::ordered_json& entry, SkillDefinition& def,
                      std::string& err) {
  if (!entry.is_object()) {
    err = "definition is not an object";
    return false;
  }
  if (!entry.contains("skill_id") || !entry.at("skill_id").is_string() ||
      entry.at("skill_id").get<std::string>().empty()) {
    err = "missing skill_id";
    return false;
  }
  def.skill_id = entry.at("skill_id").get<std::string>();
  if (entry.contains("category") && entry.at("category").is_string())
    def.category = entry.at("category").get<std::string>();
  if (entry.contains("mature_content") && entry.at("mature_content").is_boolean())
    def.mature_content = entry.at("mature_content").get<bool>();

  if (!entry.contains("states") || !entry.at("states").is_object()) {
    err = "missing states";
    return false;
  }
  for (const auto& [state_id, body] : entry.at("states").items()) {
    StateSpec spec;
    if (!body.is_object()) {
      err = "state '" + state_id + "' is not an object";
      return false;
    }
    if (body.contains("text") && body.at("text").is_string())
      spec.response_text = body.at("text").get<std::string>();
    if (body.contains("kind")) {
      auto k = response_kind_from_string(body.at("kind").get<std::string>());
      if (!k) {
        err = "state '" + state_id + "' has unknown kind";
        return false;
      }
      spec.kind = *k;
    }
    int fallbacks = 0;
    if (body.contains("transitions")) {
      for (const auto& tr : body.at("transitions")) {
        Matcher m;
        auto kind = matcher_kind_from_string(tr.value("match", ""));
        if (!kind) {
          err = "state '" + state_id + "' has unknown matcher";
          return false;
        }
        m.kind = *kind;
        if (m.kind == MatcherKind::Exact) {
          m.phrases.push_back(text::normalize_utterance(tr.value("phrase", "")));
        } else if (m.kind == MatcherKind::AnyOf) {
          for (const auto& p : tr.value("phrases", std::vector<std::string>{}))
            m.phrases.push_back(text::normalize_utterance(p));
        } else {
          ++fallbacks;
        }
        m.next_state = tr.value("next", "");
        if (m.next_state.empty()) {
          err = "state '" + state_id + "' has a transition without next";
          return false;
        }
        spec.transitions.push_back(std::move(m));
      }
    }
    if (fallbacks > 1) {
      err = "state '" + state_id + "' declares more than one fallback";
      return false;
    }
    def.states.emplace(state_id, std::move(spec));
  }

  if (!entry.contains("initial_transitions") ||
      !entry.at("initial_transitions").is_object() ||
      entry.at("initial_transitions").empty()) {
    err = "missing initial transitions";
    return false;
  }
  for (const auto& [utterance, state] : entry.at("initial_transitions").items())
    def.initial_transitions.emplace_back(text::normalize_utterance(utterance),
                                         state.get<std::string>());

  // structural checks: targets exist, everything reachable from some entry
  for (const auto& [utterance, state] : def.initial_transitions) {
    if (!def.states.count(state)) {
      err = "initial transition targets undefined state '" + state + "'";
      return false;
    }
  }
  for (const auto& [sid, spec] : def.states) {
    for (const auto& m : spec.transitions) {
      if (!def.states.count(m.next_state)) {
        err = "state '" + sid + "' targets undefined state '" + m.next_state + "'";
        return false;
      }
    }
  }
  std::set<std::string> reach;
  std::deque<std::string> frontier;
  for (const auto& [utterance, state] : def.initial_transitions)
    if (reach.insert(state).second) frontier.push_back(state);
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop_front();
    for (const auto& m : def.states.at(cur).transitions)
      if (reach.insert(m.next_state).second) frontier.push_back(m.next_state);
  }
  for (const auto& [sid, spec] : def.states) {
    if (!reach.count(sid)) {
      err = "state '" + sid + "' is unreachable";
      return false;
    }
  }
  return true;
}

}  // namespace

const std::string* SkillDefinition::initial_state_for(
    const std::string& normalized) const {
  for (const auto& [utterance, state] : initial_transitions)
    if (utterance == normalized) return &state;
  return nullptr;
}

DefinitionSet load_skill_definitions(
    const std::filesystem::path& path,
    const std::vector<catalog::SkillRecord>* records) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read definitions file: " + path.string());
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("definitions file is not valid JSON: " +
                             path.string() + ": " + e.what());
  }
  if (!doc.is_array())
    throw std::runtime_error("definitions document must be a JSON array: " +
                             path.string());

  std::map<std::string, const catalog::SkillRecord*> by_id;
  if (records)
    for (const auto& r : *records) by_id[r.skill_id] = &r;

  DefinitionSet out;
  for (const auto& entry : doc) {
    SkillDefinition def;
    std::string err;
    if (!parse_definition(entry, def, err)) {
      std::string id = entry.is_object() ? entry.value("skill_id", "") : "";
      out.issues.push_back({id, err});
      continue;
    }
    if (out.skills.count(def.skill_id)) {
      out.issues.push_back({def.skill_id, "duplicate definition"});
      continue;
    }
    if (records) {
      auto it = by_id.find(def.skill_id);
      if (it == by_id.end()) {
        out.issues.push_back({def.skill_id, "skill id not present in catalog"});
        continue;
      }
      def.category = it->second->category;
      def.mature_content = it->second->mature_content;
    }
    out.load_order.push_back(def.skill_id);
    out.skills.emplace(def.skill_id, std::move(def));
  }
  return out;
}

SkillHost::SkillHost(DefinitionSet definitions, ResolverPolicy policy)
    : definitions_(std::move(definitions)), policy_(std::move(policy)) {}

std::string SkillHost::open_session() {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  std::string id = "s" + std::to_string(++next_session_);
  sessions_.emplace(id, std::make_shared<Session>());
  return id;
}

std::shared_ptr<SkillHost::Session> SkillHost::find_session(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end())
    throw ProtocolError("unknown_session", "unknown session: " + id);
  return it->second;
}

std::optional<std::string> SkillHost::resolve_invocation(
    const std::string& normalized_text) const {
  if (auto it = policy_.overrides.find(normalized_text);
      it != policy_.overrides.end() && definitions_.skills.count(it->second))
    return it->second;

  std::vector<const SkillDefinition*> candidates;
  for (const auto& id : definitions_.load_order) {
    const auto& def = definitions_.skills.at(id);
    if (def.initial_state_for(normalized_text)) candidates.push_back(&def);
  }
  if (candidates.empty()) return std::nullopt;

  auto min_id = [](const std::vector<const SkillDefinition*>& defs) {
    const SkillDefinition* best = defs.front();
    for (const auto* d : defs)
      if (d->skill_id < best->skill_id) best = d;
    return best->skill_id;
  };

  switch (policy_.mode) {
    case ResolverMode::RegistrationOrder:
      return candidates.front()->skill_id;
    case ResolverMode::LexicographicId:
      return min_id(candidates);
    case ResolverMode::PreferNonKid: {
      std::vector<const SkillDefinition*> preferred;
      for (const auto* d : candidates)
        if (!d->is_kids()) preferred.push_back(d);
      return min_id(preferred.empty() ? candidates : preferred);
    }
    case ResolverMode::PreferKid: {
      std::vector<const SkillDefinition*> preferred;
      for (const auto* d : candidates)
        if (d->is_kids()) preferred.push_back(d);
      return min_id(preferred.empty() ? candidates : preferred);
    }
    case ResolverMode::Seeded: {
      std::vector<std::string> ids;
      for (const auto* d : candidates) ids.push_back(d->skill_id);
      std::sort(ids.begin(), ids.end());
      std::uint64_t h = fnv1a64(normalized_text);
      h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&policy_.seed),
                                   sizeof(policy_.seed)),
                  h);
      return ids[h % ids.size()];
    }
  }
  return std::nullopt;
}

HostResponse SkillHost::say(const std::string& session_id, const std::string& text) {
  auto session = find_session(session_id);
  std::string normalized = text::normalize_utterance(text);

  std::lock_guard<std::mutex> lock(session->mu);
  HostResponse resp;

  auto respond_from = [&](const StateSpec& spec) {
    resp.kind = spec.kind;
    resp.text = (spec.kind == ResponseKind::Audio || spec.kind == ResponseKind::Empty)
                    ? std::string()
                    : spec.response_text;
  };

  if (session->active_skill.empty()) {
    auto invoked = resolve_invocation(normalized);
    if (!invoked) {
      resp.kind = ResponseKind::Error;
      resp.text = kNotUnderstoodText;
    } else {
      const auto& def = definitions_.skills.at(*invoked);
      const std::string* state = def.initial_state_for(normalized);
      if (!state) state = &def.initial_transitions.front().second;
      session->enabled.insert(*invoked);
      resp.invoked_skill_id = *invoked;
      const auto& spec = def.states.at(*state);
      respond_from(spec);
      if (spec.kind == ResponseKind::Speech) {
        session->active_skill = *invoked;
        session->current_state = *state;
      }
    }
  } else {
    const auto& def = definitions_.skills.at(session->active_skill);
    const auto& spec = def.states.at(session->current_state);
    const Matcher* hit = nullptr;
    for (auto kind : {MatcherKind::Exact, MatcherKind::AnyOf, MatcherKind::Fallback}) {
      for (const auto& m : spec.transitions) {
        if (m.kind != kind) continue;
        bool matches = kind == MatcherKind::Fallback;
        for (const auto& p : m.phrases)
          if (p == normalized) matches = true;
        if (matches) {
          hit = &m;
          break;
        }
      }
      if (hit) break;
    }
    if (!hit) {
      resp.kind = ResponseKind::Error;
      resp.text = kNotUnderstoodText;
      session->active_skill.clear();
      session->current_state.clear();
    } else {
      const auto& next = def.states.at(hit->next_state);
      respond_from(next);
      if (next.kind == ResponseKind::Speech) {
        session->current_state = hit->next_state;
      } else {
        session->active_skill.clear();
        session->current_state.clear();
      }
    }
  }

  resp.enabled_skill_ids.assign(session->enabled.begin(), session->enabled.end());
  return resp;
}

std::vector<std::string> SkillHost::set_skill_enabled(const std::string& session_id,
                                                      const std::string& skill_id,
                                                      bool enabled) {
  auto session = find_session(session_id);
  if (!definitions_.skills.count(skill_id))
    throw ProtocolError("unknown_skill", "unknown skill: " + skill_id);
  std::lock_guard<std::mutex> lock(session->mu);
  if (enabled) {
    session->enabled.insert(skill_id);
  } else {
    session->enabled.erase(skill_id);
    if (session->active_skill == skill_id) {
      session->active_skill.clear();
      session->current_state.clear();
    }
  }
  return {session->enabled.begin(), session->enabled.end()};
}

void SkillHost::close_session(const std::string& session_id) {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  if (!sessions_.erase(session_id))
    throw ProtocolError("unknown_session", "unknown session: " + session_id);
}

std::size_t SkillHost::session_count() const {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  return sessions_.size();
}

const char* to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::Speech: return "speech";
    case ResponseKind::Audio: return "audio";
    case ResponseKind::Empty: return "empty";
    case ResponseKind::Error: return "error";
  }
  return "speech";
}

std::optional<ResponseKind> response_kind_from_string(std::string_view s) {
  if (s == "speech") return ResponseKind::Speech;
  if (s == "audio") return ResponseKind::Audio;
  if (s == "empty") return ResponseKind::Empty;
  if (s == "error") return ResponseKind::Error;
  return std::nullopt;
}

const char* to_string(ResolverMode m) {
  switch (m) {
    case ResolverMode::RegistrationOrder: return "registration";
    case ResolverMode::LexicographicId: return "lex";
    case ResolverMode::PreferNonKid: return "prefer-nonkid";
    case ResolverMode::PreferKid: return "prefer-kid";
    case ResolverMode::Seeded: return "seeded";
  }
  return "lex";
}

std::optional<ResolverMode> resolver_mode_from_string(std::string_view s) {
  if (s == "registration") return ResolverMode::RegistrationOrder;
  if (s == "lex") return ResolverMode::LexicographicId;
  if (s == "prefer-nonkid") return ResolverMode::PreferNonKid;
  if (s == "prefer-kid") return ResolverMode::PreferKid;
  if (s == "seeded") return ResolverMode::Seeded;
  return std::nullopt;
}

}  // namespace skillprobe::host
