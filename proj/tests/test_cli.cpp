#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "skillprobe/cli.hpp"
#include "skillprobe/datastore.hpp"
#include "support/fixtures.hpp"

using namespace skillprobe;
namespace fs = std::filesystem;

namespace {

// cmd_* report progress on stdout; swap the buffer to read it back.
class StdoutCapture {
 public:
  StdoutCapture() : old_(std::cout.rdbuf(buffer_.rdbuf())) {}
  ~StdoutCapture() { std::cout.rdbuf(old_); }
  std::string text() const { return buffer_.str(); }

 private:
  std::ostringstream buffer_;
  std::streambuf* old_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

nlohmann::json read_json(const fs::path& p) {
  return nlohmann::json::parse(read_file(p));
}

std::set<std::string> dir_filenames(const fs::path& dir) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir))
    names.insert(e.path().filename().string());
  return names;
}

cli::RunConfig corpus_config(const fixtures::GeneratedCorpus& corpus,
                             const fixtures::TempDir& dir,
                             const fs::path& out_dir) {
  auto [cat, defs] = corpus.write_to(dir.path() / "inputs");
  cli::RunConfig config;
  config.catalog_path = cat;
  config.definitions_path = defs;
  config.out_dir = out_dir;
  return config;
}

// Two-plant corpus used by the scan and review tests.
fixtures::GeneratedCorpus risk_corpus() {
  fixtures::GeneratedCorpus corpus;

  fixtures::SkillSpec sweary;
  sweary.skill_id = "risk.demo.01";
  sweary.name = "Risk Demo 01";
  sweary.invocation = "risk demo 01";
  sweary.icon_digest = "icon-r1";
  sweary.samples = {"Open risk demo 01"};
  sweary.add_initial("open risk demo 01", "s1");
  sweary.add_state("s1", "You would scare the crap out of a toilet.");
  corpus.add(sweary);

  fixtures::SkillSpec nosy;
  nosy.skill_id = "risk.demo.02";
  nosy.name = "Risk Demo 02";
  nosy.invocation = "risk demo 02";
  nosy.icon_digest = "icon-r2";
  nosy.samples = {"Open risk demo 02"};
  nosy.permissions = {"customer_name"};
  nosy.add_initial("open risk demo 02", "s1");
  nosy.add_state("s1", "What is your name?");
  corpus.add(nosy);

  fixtures::SkillSpec polite;
  polite.skill_id = "risk.demo.03";
  polite.name = "Risk Demo 03";
  polite.invocation = "risk demo 03";
  polite.icon_digest = "icon-r3";
  polite.samples = {"Open risk demo 03"};
  polite.add_initial("open risk demo 03", "s1");
  polite.add_state("s1", "Have a lovely day, friend.");
  corpus.add(polite);

  return corpus;
}

}  // namespace

TEST_CASE("exploring a catalog writes one dataset file per skill") {
  fixtures::TempDir dir;
  auto config = corpus_config(fixtures::small_corpus(false), dir,
                              dir.path() / "out");

  StdoutCapture cap;
  REQUIRE(cli::cmd_explore(config) == 0);
  CHECK(cap.text() ==
        "explored 12 of 12 skills, 24 conversations, 36 unique responses\n");

  auto names = dir_filenames(config.out_dir);
  CHECK(names.size() == 13);  // 12 skills + summary
  CHECK(names.count("summary.json") == 1);
  CHECK(names.count("mini.skill.01.json") == 1);
  CHECK(names.count("mini.skill.12.json") == 1);

  auto summary = read_json(config.out_dir / "summary.json");
  CHECK(summary.at("skills") == 12);
  CHECK(summary.at("explored") == 12);
  CHECK(summary.at("conversations") == 24);
  CHECK(summary.at("responses") == 36);
  CHECK(summary.at("errored").empty());

  // spot-check one stored record: both branches, canonical order
  auto record =
      datastore::load_conversations(config.out_dir / "mini.skill.03.json");
  CHECK(record.skill_id == "mini.skill.03");
  REQUIRE(record.conversations.size() == 2);
  CHECK(record.conversations[0] ==
        std::vector<std::string>{"open mini app 03",
                                 "Welcome to mini app 03. Would you like a tip?",
                                 "no", "Bye from mini app 03."});
  CHECK(record.conversations[1] ==
        std::vector<std::string>{"open mini app 03",
                                 "Welcome to mini app 03. Would you like a tip?",
                                 "yes", "Tip 03: stretch before you run."});
}

TEST_CASE("a skill whose definition fails validation becomes an error entry") {
  fixtures::TempDir dir;
  auto config = corpus_config(fixtures::small_corpus(true), dir,
                              dir.path() / "out");

  StdoutCapture cap;
  REQUIRE(cli::cmd_explore(config) == 0);  // per-skill errors are not fatal
  CHECK(cap.text() ==
        "explored 11 of 12 skills, 22 conversations, 33 unique responses\n");

  auto summary = read_json(config.out_dir / "summary.json");
  CHECK(summary.at("skills") == 12);
  CHECK(summary.at("explored") == 11);
  REQUIRE(summary.at("errored").size() == 1);
  CHECK(summary.at("errored")[0].at("skill_id") == "mini.skill.07");
  CHECK_FALSE(summary.at("errored")[0].at("error").get<std::string>().empty());
  CHECK_FALSE(fs::exists(config.out_dir / "mini.skill.07.json"));
}

TEST_CASE("exploration output is reproducible") {
  fixtures::TempDir dir;
  auto corpus = fixtures::small_corpus(false);

  auto first = corpus_config(corpus, dir, dir.path() / "a");
  auto second = corpus_config(corpus, dir, dir.path() / "b");
  second.workers = 1;  // a different pool size must not change the output

  {
    StdoutCapture quiet;
    REQUIRE(cli::cmd_explore(first) == 0);
    REQUIRE(cli::cmd_explore(second) == 0);
  }

  auto names = dir_filenames(first.out_dir);
  CHECK(names == dir_filenames(second.out_dir));
  for (const auto& name : names)
    CHECK(read_file(first.out_dir / name) == read_file(second.out_dir / name));

  // re-running into the same directory only re-merges what is already there
  auto before = read_file(first.out_dir / "mini.skill.05.json");
  {
    StdoutCapture quiet;
    REQUIRE(cli::cmd_explore(first) == 0);
  }
  CHECK(read_file(first.out_dir / "mini.skill.05.json") == before);
}

TEST_CASE("missing inputs and bad host specs fail with exit code 2") {
  fixtures::TempDir dir;
  StdoutCapture quiet;

  cli::RunConfig config;
  config.catalog_path = dir.path() / "nope.json";
  config.definitions_path = dir.path() / "nope_defs.json";
  config.out_dir = dir.path() / "out";
  CHECK(cli::cmd_explore(config) == 2);

  auto good = corpus_config(fixtures::small_corpus(false), dir,
                            dir.path() / "out2");
  auto broken = good;
  broken.definitions_path = dir.path() / "missing.json";
  CHECK(cli::cmd_explore(broken) == 2);

  auto hostless = good;
  hostless.host = "nonsense";  // no port
  CHECK(cli::cmd_explore(hostless) == 2);
  hostless.host = "127.0.0.1:99999";  // port out of range
  CHECK(cli::cmd_explore(hostless) == 2);

  CHECK(cli::cmd_scan(good, dir.path() / "no-dataset") == 2);
  CHECK(cli::cmd_coverage(good, dir.path() / "no-dataset") == 2);
}

TEST_CASE("scanning a dataset reports findings with their context") {
  fixtures::TempDir dir;
  auto config = corpus_config(risk_corpus(), dir, dir.path() / "dataset");
  {
    StdoutCapture quiet;
    REQUIRE(cli::cmd_explore(config) == 0);
  }

  auto scan_config = config;
  scan_config.out_dir = dir.path() / "scan";
  StdoutCapture cap;
  REQUIRE(cli::cmd_scan(scan_config, config.out_dir) == 0);
  CHECK(cap.text() ==
        "scanned 3 skills: 1 expletive findings in 1 skills, "
        "1 personal-information findings in 1 skills\n");

  auto doc = read_json(scan_config.out_dir / "findings.json");
  auto summary = doc.at("summary");
  CHECK(summary.at("skills_scanned") == 3);
  CHECK(summary.at("expletive_findings") == 1);
  CHECK(summary.at("pii_findings") == 1);
  CHECK(summary.at("skills_with_expletives") == 1);
  CHECK(summary.at("skills_with_pii") == 1);

  auto findings = doc.at("findings");
  REQUIRE(findings.size() == 2);

  const auto& sweary = findings[0];
  CHECK(sweary.at("skill_id") == "risk.demo.01");
  CHECK(sweary.at("kind") == "expletive");
  CHECK(sweary.at("response_text") ==
        "You would scare the crap out of a toilet.");
  CHECK(sweary.at("evidence") == "crap");
  CHECK(sweary.at("depth") == 1);
  CHECK(sweary.at("opening_utterance") == "open risk demo 01");
  CHECK(sweary.at("utterance_source") == "sample_list");
  CHECK(sweary.at("verdict") == "pending");
  CHECK_FALSE(sweary.contains("pii_keyword"));
  CHECK_FALSE(sweary.contains("permission_check"));
  CHECK(sweary.at("finding_id").get<std::string>().size() == 16);

  const auto& nosy = findings[1];
  CHECK(nosy.at("skill_id") == "risk.demo.02");
  CHECK(nosy.at("kind") == "pii_request");
  CHECK(nosy.at("pii_keyword") == "name");
  CHECK(nosy.at("evidence") == "name");
  CHECK(nosy.at("permission_check") == "permission_declared_matching");
  CHECK(nosy.at("verdict") == "pending");
}

TEST_CASE("review votes update finding verdicts in place") {
  fixtures::TempDir dir;
  auto config = corpus_config(risk_corpus(), dir, dir.path() / "dataset");
  auto scan_config = config;
  scan_config.out_dir = dir.path() / "scan";
  {
    StdoutCapture quiet;
    REQUIRE(cli::cmd_explore(config) == 0);
    REQUIRE(cli::cmd_scan(scan_config, config.out_dir) == 0);
  }
  fs::path findings_file = scan_config.out_dir / "findings.json";

  auto doc = read_json(findings_file);
  std::string sweary_id = doc.at("findings")[0].at("finding_id");
  std::string nosy_id = doc.at("findings")[1].at("finding_id");

  fs::path votes = dir.path() / "votes.tsv";
  std::ofstream(votes) << "finding_id\treviewer\tvote\n"   // header is skipped
                       << "# weekly review session\n"       // comments too
                       << sweary_id << "\talice\t1\n"
                       << sweary_id << "\tbob\tyes\n"
                       << sweary_id << "\tcarol\t1\n"
                       << sweary_id << "\tdave\t0\n"
                       << "not-a-finding\talice\t1\n"       // unknown id
                       << sweary_id << "\teve\tmaybe\n"     // unusable vote
                       << "line without tabs\n";

  {
    StdoutCapture cap;
    REQUIRE(cli::cmd_review(config, findings_file, votes) == 0);
    CHECK(cap.text() == "review: 1 confirmed, 0 rejected, 1 pending\n");
  }
  auto reviewed = read_json(findings_file);
  CHECK(reviewed.at("findings")[0].at("verdict") == "confirmed");
  CHECK(reviewed.at("findings")[1].at("verdict") == "pending");

  // a later session can settle the remaining finding without disturbing the
  // first verdict
  std::ofstream(votes) << nosy_id << "\talice\t0\n";
  {
    StdoutCapture cap;
    REQUIRE(cli::cmd_review(config, findings_file, votes) == 0);
    CHECK(cap.text() == "review: 0 confirmed, 1 rejected, 0 pending\n");
  }
  reviewed = read_json(findings_file);
  CHECK(reviewed.at("findings")[0].at("verdict") == "confirmed");
  CHECK(reviewed.at("findings")[1].at("verdict") == "rejected");

  // broken inputs are configuration errors
  StdoutCapture quiet;
  CHECK(cli::cmd_review(config, dir.path() / "absent.json", votes) == 2);
  CHECK(cli::cmd_review(config, findings_file, dir.path() / "absent.tsv") == 2);
  fs::path bad = dir.path() / "bad.json";
  std::ofstream(bad) << "[]";
  CHECK(cli::cmd_review(config, bad, votes) == 2);
  std::ofstream(bad) << "not json";
  CHECK(cli::cmd_review(config, bad, votes) == 2);
}

TEST_CASE("coverage tables summarize a stored dataset") {
  fixtures::TempDir dir;
  cli::RunConfig config;
  config.catalog_path = fixtures::bundled_fixture_dir() / "walkthrough_catalog.json";
  config.definitions_path = fixtures::bundled_fixture_dir() / "walkthrough_skills.json";
  config.out_dir = dir.path() / "dataset";
  {
    StdoutCapture cap;
    REQUIRE(cli::cmd_explore(config) == 0);
    CHECK(cap.text() ==
          "explored 1 of 1 skills, 3 conversations, 6 unique responses\n");
  }

  auto cover_config = config;
  cover_config.out_dir = dir.path() / "cover";
  StdoutCapture cap;
  REQUIRE(cli::cmd_coverage(cover_config, config.out_dir) == 0);
  CHECK(cap.text() == "coverage for 1 skills\n");

  CHECK(read_file(cover_config.out_dir / "coverage.tsv") ==
        "skill_id\tunique_responses\tmax_depth\tmax_branching\t"
        "initial_utterances\n"
        "demo.skill-x\t6\t4\t2\t2\n");
  CHECK(read_file(cover_config.out_dir / "coverage_hist.tsv") ==
        "metric\tvalue\tskills\n"
        "initial_utterances\t2\t1\n"
        "max_branching\t2\t1\n"
        "max_depth\t4\t1\n"
        "unique_responses\t6\t1\n");

  // an empty dataset still produces the headers
  fs::path empty = dir.path() / "empty";
  fs::create_directories(empty);
  auto empty_config = cover_config;
  empty_config.out_dir = dir.path() / "cover2";
  StdoutCapture cap2;
  REQUIRE(cli::cmd_coverage(empty_config, empty) == 0);
  CHECK(cap2.text() == "coverage for 0 skills\n");
  CHECK(read_file(empty_config.out_dir / "coverage.tsv") ==
        "skill_id\tunique_responses\tmax_depth\tmax_branching\t"
        "initial_utterances\n");
}

TEST_CASE("the collision command reports routing for every shared utterance") {
  fixtures::TempDir dir;
  auto fixture = fixtures::collision_fixture();
  auto config = corpus_config(fixture.corpus, dir, dir.path() / "out");

  StdoutCapture cap;
  REQUIRE(cli::cmd_confound(config) == 0);
  CHECK(cap.text() == "tested 50 confounding utterances\n");

  auto doc = read_json(config.out_dir / "confound.json");
  REQUIRE(doc.at("entries").size() == 50);

  // entry for "start shared activity 02": the same-identity kids pair
  const auto& pair = doc.at("entries")[1];
  CHECK(pair.at("utterance") == "start shared activity 02");
  CHECK(pair.at("skill_ids") ==
        nlohmann::json::array({"conf.kid.03", "conf.kid.04"}));
  CHECK(pair.at("category") == "kids_only");
  CHECK(pair.at("same_name_icon") == true);
  CHECK(pair.at("outcome") == "relevant_invoked");
  CHECK(pair.at("invoked_skill_id") == "conf.kid.03");

  // catalog-only entries carry no invoked skill
  const auto& ghost = doc.at("entries")[0];
  CHECK(ghost.at("utterance") == "start shared activity 01");
  CHECK(ghost.at("outcome") == "no_invocation");
  CHECK_FALSE(ghost.contains("invoked_skill_id"));

  auto summary = doc.at("summary");
  CHECK(summary.at("total_entries") == 50);
  CHECK(summary.at("kids_only").at("relevant_invoked") == 14);
  CHECK(summary.at("kids_only").at("no_invocation") == 1);
  // under the default lexicographic policy the general-audience member always
  // wins joint entries ("conf.gen." sorts before "conf.kid.")
  CHECK(summary.at("joint").at("relevant_nonkid_prioritized") == 20);
  CHECK(summary.at("joint").at("relevant_invoked") == 0);
  CHECK(summary.at("non_kids_only").at("relevant_invoked") == 14);
  CHECK(summary.at("non_kids_only").at("no_invocation") == 1);
  CHECK(summary.at("non_kids_only").at("relevant_nonkid_prioritized") == 0);

  auto tsv = read_file(config.out_dir / "confound.tsv");
  CHECK(tsv.rfind("utterance\tcategory\tsame_name_icon\toutcome\t"
                  "invoked_skill_id\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 51);
  CHECK(tsv.find("start shared activity 02\tkids_only\t1\trelevant_invoked\t"
                 "conf.kid.03\n") != std::string::npos);
  CHECK(tsv.find("start shared activity 01\tkids_only\t0\tno_invocation\t\n") !=
        std::string::npos);
}

TEST_CASE("config files overlay the run defaults") {
  fixtures::TempDir dir;

  cli::RunConfig config;
  CHECK(config.host == "embedded");
  CHECK(config.workers == 5);
  CHECK(config.out_dir == "out");
  CHECK(config.explore.max_runs_per_skill == 25);
  CHECK(config.policy.mode == host::ResolverMode::LexicographicId);

  fs::path file = dir.path() / "config.json";
  std::ofstream(file) << R"({
    "catalog": "/data/catalog.json",
    "definitions": "/data/skills.json",
    "host": "127.0.0.1:7007",
    "workers": 9,
    "out": "/tmp/results",
    "max_runs": 7,
    "max_depth": 4,
    "repeat_threshold": 3,
    "max_nodes": 42,
    "policy": {
      "mode": "prefer-kid",
      "seed": 99,
      "overrides": {"Start Shared Activity 20!": "conf.gen.25"}
    }
  })";
  cli::apply_config_file(config, file);

  CHECK(config.catalog_path == "/data/catalog.json");
  CHECK(config.definitions_path == "/data/skills.json");
  CHECK(config.host == "127.0.0.1:7007");
  CHECK(config.workers == 9);
  CHECK(config.out_dir == "/tmp/results");
  CHECK(config.explore.max_runs_per_skill == 7);
  CHECK(config.explore.max_depth == 4);
  CHECK(config.explore.repeat_threshold == 3);
  CHECK(config.explore.max_nodes_per_skill == 42);
  CHECK(config.policy.mode == host::ResolverMode::PreferKid);
  CHECK(config.policy.seed == 99);
  // override keys are normalized like any other utterance
  REQUIRE(config.policy.overrides.count("start shared activity 20") == 1);
  CHECK(config.policy.overrides.at("start shared activity 20") == "conf.gen.25");

  // settings not mentioned keep their previous values
  fs::path partial = dir.path() / "partial.json";
  std::ofstream(partial) << R"({"workers": 2})";
  cli::apply_config_file(config, partial);
  CHECK(config.workers == 2);
  CHECK(config.host == "127.0.0.1:7007");
}

TEST_CASE("malformed config files are rejected with a reason") {
  fixtures::TempDir dir;
  cli::RunConfig config;

  CHECK_THROWS_AS(cli::apply_config_file(config, dir.path() / "absent.json"),
                  std::runtime_error);

  fs::path garbled = dir.path() / "garbled.json";
  std::ofstream(garbled) << "{ not json";
  CHECK_THROWS_AS(cli::apply_config_file(config, garbled), std::runtime_error);

  fs::path list = dir.path() / "list.json";
  std::ofstream(list) << "[1, 2, 3]";
  CHECK_THROWS_AS(cli::apply_config_file(config, list), std::runtime_error);

  fs::path mode = dir.path() / "mode.json";
  std::ofstream(mode) << R"({"policy": {"mode": "coin_flip"}})";
  CHECK_THROWS_WITH_AS(cli::apply_config_file(config, mode),
                       doctest::Contains("coin_flip"), std::runtime_error);
}

TEST_CASE("the environment can name a config file") {
  fixtures::TempDir dir;
  fs::path file = dir.path() / "env.json";
  std::ofstream(file) << R"({"workers": 3, "out": "custom-out"})";

  setenv("SKILLPROBE_CONFIG", file.string().c_str(), 1);
  auto config = cli::config_from_env();
  unsetenv("SKILLPROBE_CONFIG");
  CHECK(config.workers == 3);
  CHECK(config.out_dir == "custom-out");

  auto defaults = cli::config_from_env();  // unset -> plain defaults
  CHECK(defaults.workers == 5);
  CHECK(defaults.out_dir == "out");
}
