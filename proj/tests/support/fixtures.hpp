#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skillprobe/catalog.hpp"
#include "skillprobe/skillhost.hpp"

namespace fixtures {

// Locations baked in by the test build.
std::filesystem::path bundled_fixture_dir();
std::filesystem::path corpus_file();

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// One skill in both its catalog and definition form.
struct SkillSpec {
  std::string skill_id;
  std::string name;
  std::string invocation;
  std::string category = "kids";
  std::vector<std::string> samples;
  std::string description;
  std::vector<std::string> permissions;
  std::string icon_digest;
  bool mature_content = false;

  nlohmann::ordered_json states = nlohmann::ordered_json::object();
  nlohmann::ordered_json initial = nlohmann::ordered_json::object();

  // Speech state with exact-match transitions [(phrase, next_state), ...].
  void add_state(const std::string& state_name, const std::string& text,
                 const std::vector<std::pair<std::string, std::string>>&
                     transitions = {});
  void add_initial(const std::string& utterance, const std::string& state_name);

  nlohmann::ordered_json catalog_json() const;
  nlohmann::ordered_json definition_json() const;
};

// A catalog document plus its matching definition document.
struct GeneratedCorpus {
  nlohmann::ordered_json catalog_doc = nlohmann::ordered_json::array();
  nlohmann::ordered_json definition_doc = nlohmann::ordered_json::array();

  void add(const SkillSpec& spec);

  // Writes catalog.json and skills.json into dir; returns their paths.
  std::pair<std::filesystem::path, std::filesystem::path> write_to(
      const std::filesystem::path& dir) const;

  // Parses the documents through the real loaders (via a scratch dir).
  skillprobe::catalog::Catalog load_catalog(const TempDir& dir) const;
  skillprobe::host::DefinitionSet load_definitions(const TempDir& dir) const;
};

// --- Planted audit corpus ---------------------------------------------------

struct PlantInfo {
  std::string skill_id;
  std::string kind;     // "expletive" or "pii_request"
  std::string keyword;  // canonical personal-data keyword; empty for expletive
  int depth = 1;        // depth of the node carrying the planted response
  bool description_only = false;  // reachable only via description utterances
};

// 128 skills: 8 with planted expletives, 20 with planted personal-data
// requests (3 of them invocable only through description-derived utterances),
// and 100 clean skills of which exactly two carry lookalike questions that a
// keyword scanner is expected to flag anyway.
struct PlantedCorpus {
  GeneratedCorpus corpus;
  std::vector<PlantInfo> plants;
  std::set<std::string> bait_skill_ids;
  std::set<std::string> clean_skill_ids;  // includes the bait skills
};
PlantedCorpus planted_corpus();

// --- Shared-utterance collision fixture --------------------------------------

struct CollisionExpectation {
  std::string utterance;  // normalized
  std::set<std::string> members;
  std::string category;  // "kids_only" | "joint" | "non_kids_only"
  bool same_name_icon = false;
  bool no_invocation = false;  // no member's definition accepts the utterance
};

// 60 skills, 50 shared opening utterances: 15 kids-only, 20 joint,
// 15 non-kids-only; two entries (one kids-only, one non-kids-only) are
// catalog-only and invoke nothing.
struct CollisionFixture {
  GeneratedCorpus corpus;
  std::vector<CollisionExpectation> entries;  // sorted by utterance
};
CollisionFixture collision_fixture();

// --- Bulk fixture ------------------------------------------------------------

// `skills` single-level skills, each offering `options` quoted choices, so a
// full exploration yields skills x options stored conversations.
GeneratedCorpus bulk_corpus(int skills, int options);

// --- Small CLI fixtures ------------------------------------------------------

// 12 two-branch skills; with_broken replaces one skill's definition with one
// whose transition targets an undefined state (a definition issue).
GeneratedCorpus small_corpus(bool with_broken);

}  // namespace fixtures
