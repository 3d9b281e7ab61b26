#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skillprobe/catalog.hpp"

namespace skillprobe::host {

enum class ResponseKind { Speech, Audio, Empty, Error };
const char* to_string(ResponseKind k);
std::optional<ResponseKind> response_kind_from_string(std::string_view s);

enum class MatcherKind { Exact, AnyOf, Fallback };

struct Matcher {
  MatcherKind kind = MatcherKind::Exact;
  std::vector<std::string> phrases;  // normalized; empty for Fallback
  std::string next_state;
};

struct StateSpec {
  std::string response_text;
  ResponseKind kind = ResponseKind::Speech;
  std::vector<Matcher> transitions;
};

// Deterministic conversational state machine standing in for one skill.
struct SkillDefinition {
  std::string skill_id;
  std::string category = "other";
  bool mature_content = false;
  std::map<std::string, StateSpec> states;
  // normalized opening utterance -> initial state, in definition order
  std::vector<std::pair<std::string, std::string>> initial_transitions;

  bool is_kids() const { return category == "kids"; }
  const std::string* initial_state_for(const std::string& normalized) const;
};

struct DefinitionIssue {
  std::string skill_id;
  std::string message;
};

struct DefinitionSet {
  std::map<std::string, SkillDefinition> skills;  // by id
  std::vector<std::string> load_order;            // registration order
  std::vector<DefinitionIssue> issues;            // skipped definitions
};

// Loads a JSON array of definitions. Per-skill validation failures (dangling
// transition targets, missing initial transitions, unreachable states, ids
// absent from the supplied catalog) skip the definition and land in
// `issues`. Category and mature flags are copied from the catalog when one
// is given. Throws std::runtime_error on unreadable/unparsable files.
DefinitionSet load_skill_definitions(
    const std::filesystem::path& path,
    const std::vector<catalog::SkillRecord>* records = nullptr);

enum class ResolverMode {
  RegistrationOrder,
  LexicographicId,
  PreferNonKid,
  PreferKid,
  Seeded,
};
const char* to_string(ResolverMode m);
std::optional<ResolverMode> resolver_mode_from_string(std::string_view s);

struct ResolverPolicy {
  ResolverMode mode = ResolverMode::LexicographicId;
  std::uint64_t seed = 0;  // used by Seeded
  // normalized utterance -> skill id; wins over every mode, letting tests
  // route an utterance to a skill that does not list it
  std::map<std::string, std::string> overrides;
};

struct HostResponse {
  std::string text;  // empty iff kind is Audio or Empty
  ResponseKind kind = ResponseKind::Speech;
  std::optional<std::string> invoked_skill_id;  // set when this turn invoked
  std::vector<std::string> enabled_skill_ids;   // sorted
};

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Session-oriented interface shared by the in-process host and the TCP
// client, so callers cannot tell which one they are driving.
class HostBackend {
 public:
  virtual ~HostBackend() = default;
  virtual std::string open_session() = 0;
  virtual HostResponse say(const std::string& session_id, const std::string& text) = 0;
  virtual std::vector<std::string> set_skill_enabled(const std::string& session_id,
                                                     const std::string& skill_id,
                                                     bool enabled) = 0;
  virtual void close_session(const std::string& session_id) = 0;
};

// In-process host. Definitions are immutable after construction; sessions
// are independent and may be driven concurrently (requests on one session
// are serialized).
class SkillHost : public HostBackend {
 public:
  static constexpr const char* kNotUnderstoodText = "Sorry, I don't understand.";

  SkillHost(DefinitionSet definitions, ResolverPolicy policy);

  std::string open_session() override;
  HostResponse say(const std::string& session_id, const std::string& text) override;
  std::vector<std::string> set_skill_enabled(const std::string& session_id,
                                             const std::string& skill_id,
                                             bool enabled) override;
  void close_session(const std::string& session_id) override;

  // Resolution for an utterance with no active skill: overrides first, then
  // skills listing the utterance among their initial transitions, picked by
  // the policy mode.
  std::optional<std::string> resolve_invocation(const std::string& normalized_text) const;

  const DefinitionSet& definitions() const { return definitions_; }
  const ResolverPolicy& policy() const { return policy_; }
  std::size_t session_count() const;

 private:
  struct Session {
    std::mutex mu;
    std::string active_skill;   // empty when idle
    std::string current_state;
    std::set<std::string> enabled;
  };

  std::shared_ptr<Session> find_session(const std::string& id) const;

  DefinitionSet definitions_;
  ResolverPolicy policy_;
  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 0;
};

}  // namespace skillprobe::host
