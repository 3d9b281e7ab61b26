#include "support/fixtures.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace fixtures {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::filesystem::path bundled_fixture_dir() { return SKILLPROBE_FIXTURE_DIR; }

std::filesystem::path corpus_file() { return SKILLPROBE_CORPUS_FILE; }

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "skillprobe-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data()))
    throw std::runtime_error("mkdtemp failed for " + tmpl);
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void SkillSpec::add_state(
    const std::string& state_name, const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& transitions) {
  ordered_json st;
  st["text"] = text;
  st["kind"] = "speech";
  st["transitions"] = ordered_json::array();
  for (const auto& [phrase, next] : transitions)
    st["transitions"].push_back(
        {{"match", "exact"}, {"phrase", phrase}, {"next", next}});
  states[state_name] = std::move(st);
}

void SkillSpec::add_initial(const std::string& utterance,
                            const std::string& state_name) {
  initial[utterance] = state_name;
}

ordered_json SkillSpec::catalog_json() const {
  ordered_json entry;
  entry["skill_id"] = skill_id;
  entry["name"] = name;
  entry["invocation_name"] = invocation;
  entry["category"] = category;
  entry["sample_utterances"] = samples;
  if (!description.empty()) entry["description"] = description;
  entry["permissions"] = permissions;
  if (!icon_digest.empty()) entry["icon_digest"] = icon_digest;
  entry["mature_content"] = mature_content;
  return entry;
}

ordered_json SkillSpec::definition_json() const {
  ordered_json entry;
  entry["skill_id"] = skill_id;
  entry["category"] = category;
  entry["mature_content"] = mature_content;
  entry["initial_transitions"] = initial;
  entry["states"] = states;
  return entry;
}

void GeneratedCorpus::add(const SkillSpec& spec) {
  catalog_doc.push_back(spec.catalog_json());
  definition_doc.push_back(spec.definition_json());
}

std::pair<fs::path, fs::path> GeneratedCorpus::write_to(
    const fs::path& dir) const {
  fs::create_directories(dir);
  fs::path cat = dir / "catalog.json";
  fs::path defs = dir / "skills.json";
  std::ofstream(cat) << catalog_doc.dump(2) << "\n";
  std::ofstream(defs) << definition_doc.dump(2) << "\n";
  return {cat, defs};
}

skillprobe::catalog::Catalog GeneratedCorpus::load_catalog(
    const TempDir& dir) const {
  auto [cat, defs] = write_to(dir.path());
  (void)defs;
  return skillprobe::catalog::parse_catalog(cat);
}

skillprobe::host::DefinitionSet GeneratedCorpus::load_definitions(
    const TempDir& dir) const {
  auto [cat, defs] = write_to(dir.path());
  (void)cat;
  auto catalog = skillprobe::catalog::parse_catalog(dir.path() / "catalog.json");
  return skillprobe::host::load_skill_definitions(defs, &catalog.records);
}

namespace {

std::string pad(int n, int width) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%0*d", width, n);
  return buf;
}

// A skill whose responses form a single chain; the final state carries
// `payload`. Chain steps answer "tell me another one".
SkillSpec chain_skill(const std::string& skill_id, int pack, int depth,
                      const std::string& payload, bool description_only) {
  SkillSpec s;
  const std::string nnn = pad(pack, 3);
  s.skill_id = skill_id;
  s.name = "Probe Pack " + nnn;
  s.invocation = "probe pack " + nnn;
  s.icon_digest = "icon-" + nnn;
  const std::string opening = "open probe pack " + nnn;
  if (description_only) {
    s.description =
        "A guessing game for curious minds. Alexa, open probe pack " + nnn + ".";
  } else {
    s.samples = {"Open probe pack " + nnn};
  }
  s.add_initial(opening, "s1");
  for (int i = 1; i < depth; ++i)
    s.add_state("s" + std::to_string(i),
                "Chapter " + std::to_string(i) + " of saga " + nnn +
                    ". The journey continues.",
                {{"tell me another one", "s" + std::to_string(i + 1)}});
  s.add_state("s" + std::to_string(depth), payload);
  return s;
}

SkillSpec clean_skill(int n) {
  SkillSpec s;
  const std::string nnn = pad(n, 3);
  const int pack = 28 + n;
  s.skill_id = "clean.skill." + nnn;
  s.name = "Probe Pack " + pad(pack, 3);
  s.invocation = "probe pack " + pad(pack, 3);
  s.icon_digest = "icon-" + pad(pack, 3);
  s.samples = {"Open probe pack " + pad(pack, 3)};
  s.add_initial("open probe pack " + pad(pack, 3), "s1");
  std::string fact = "Fun fact " + nnn + ": the collection holds " + nnn +
                     " shiny marbles.";
  if (n == 50) fact = "What is your dog's name?";
  if (n == 51) fact = "How old is your house?";
  s.add_state("s1", "Welcome to Club " + nnn + ". Would you like a fact?",
              {{"yes", "s2"}, {"no", "s3"}});
  s.add_state("s2", fact);
  s.add_state("s3", "Goodbye then, friend " + nnn + ".");
  return s;
}

}  // namespace

PlantedCorpus planted_corpus() {
  PlantedCorpus out;

  struct ExpPlant {
    int depth;
    const char* text;
  };
  const ExpPlant exp[] = {
      {11, "And the pirate swore he would kick their collective ass."},
      {5, "A pig's orgasm lasts for 30 minutes."},
      {4, "You would scare the crap out of a toilet."},
      {4, "Holy sh1t, that was close."},
      {2, "The donkey made a giant fart sound."},
      {1, "This barn is full of poop and mischief."},
      {1, "Do not be such a dumbass about it."},
      {1, "What the hell was that noise?"},
  };
  for (int i = 0; i < 8; ++i) {
    std::string id = "plant.exp." + pad(i + 1, 2);
    out.corpus.add(chain_skill(id, i + 1, exp[i].depth, exp[i].text, false));
    out.plants.push_back({id, "expletive", "", exp[i].depth, false});
  }

  struct PiiPlant {
    int depth;
    const char* text;
    const char* keyword;
    bool description_only;
    const char* permission;  // granted platform permission, or nullptr
  };
  const PiiPlant pii[] = {
      {11, "Welcome to Mr Tongue Twister. What is your name?", "name", false,
       nullptr},
      {4, "What is your phone number?", "phone number", false, "mobile_number"},
      {4, "Tell me your address please.", "address", false, "customer_name"},
      {3, "Would you please tell me your age?", "age", false, nullptr},
      {3, "What is your zip code?", "zipcode", false, nullptr},
      {3, "Please say your passport number.", "passport number", false, nullptr},
      {3, "Enter your credit card number to continue.", "credit card number",
       false, nullptr},
      {3, "What is your date of birth?", "date of birth", false, nullptr},
      {3, "Please tell me your driver's license number.",
       "driver's license number", false, nullptr},
      {2, "What is your social security number?", "social security number",
       false, nullptr},
      {2, "Tell me your taxpayer ID number.", "taxpayer ID number", false,
       nullptr},
      {2, "What is your patient ID number?", "patient ID number", false,
       nullptr},
      {2, "Please provide your financial account number.",
       "financial account number", false, nullptr},
      {2, "When is your birthday?", "date of birth", false, nullptr},
      {2, "When were you born?", "date of birth", false, nullptr},
      {1, "how old are you?", "age", false, nullptr},
      {1, "Before we begin the game. What is your name?", "name", false,
       nullptr},
      {1, "Please tell me your name to make your player tag.", "name", true,
       nullptr},
      {1, "What is your address?", "address", true, nullptr},
      {2, "Please say your phone number now.", "phone number", true, nullptr},
  };
  for (int i = 0; i < 20; ++i) {
    std::string id = "plant.pii." + pad(i + 1, 2);
    SkillSpec spec = chain_skill(id, 9 + i, pii[i].depth, pii[i].text,
                                 pii[i].description_only);
    if (pii[i].permission) spec.permissions = {pii[i].permission};
    out.corpus.add(spec);
    out.plants.push_back(
        {id, "pii_request", pii[i].keyword, pii[i].depth,
         pii[i].description_only});
  }

  for (int n = 1; n <= 100; ++n) {
    SkillSpec spec = clean_skill(n);
    out.corpus.add(spec);
    out.clean_skill_ids.insert(spec.skill_id);
    if (n == 50 || n == 51) out.bait_skill_ids.insert(spec.skill_id);
  }
  return out;
}

CollisionFixture collision_fixture() {
  CollisionFixture out;

  auto shared_utt = [](int nn) { return "start shared activity " + pad(nn, 2); };

  // Which shared utterances each skill claims in the catalog, and which of
  // those its definition actually accepts (entries 01 and 36 are omitted from
  // every member's definition).
  struct Party {
    SkillSpec spec;
    std::vector<int> entries;
  };
  std::vector<Party> kids(30), gens(30);

  for (int i = 0; i < 30; ++i) {
    const std::string nn = pad(i + 1, 2);
    kids[i].spec.skill_id = "conf.kid." + nn;
    kids[i].spec.name = "Kid Corner " + nn;
    kids[i].spec.category = "kids";
    kids[i].spec.invocation = "kid corner " + nn;
    kids[i].spec.icon_digest = "icon-kid-" + nn;
    gens[i].spec.skill_id = "conf.gen." + nn;
    gens[i].spec.name = "Gen Parlor " + nn;
    gens[i].spec.category = "trivia";
    gens[i].spec.invocation = "gen parlor " + nn;
    gens[i].spec.icon_digest = "icon-gen-" + nn;
  }
  // Same displayed identity: one kids-only pair and one joint pair.
  kids[2].spec.name = "Echo Pals";
  kids[3].spec.name = "ECHO PALS";
  kids[2].spec.icon_digest = "sha-echo";
  kids[3].spec.icon_digest = "sha-echo";
  kids[0].spec.name = "Twin Quiz";
  gens[0].spec.name = "twin quiz";
  kids[0].spec.icon_digest = "sha-twin";
  gens[0].spec.icon_digest = "sha-twin";

  for (int nn = 1; nn <= 15; ++nn) {  // kids-only pairs
    kids[2 * nn - 2].entries.push_back(nn);
    kids[2 * nn - 1].entries.push_back(nn);
  }
  for (int nn = 16; nn <= 35; ++nn) {  // joint pairs
    kids[nn - 16].entries.push_back(nn);
    gens[nn - 16].entries.push_back(nn);
  }
  for (int nn = 36; nn <= 50; ++nn) {  // non-kids pairs
    gens[2 * (nn - 35) - 2].entries.push_back(nn);
    gens[2 * (nn - 35) - 1].entries.push_back(nn);
  }

  auto finish = [&](Party& p, const std::string& kind, int idx) {
    const std::string nn = pad(idx + 1, 2);
    const std::string own = "open " + kind + " " + nn;
    p.spec.samples.push_back("Open " + kind + " " + nn);
    for (int e : p.entries) p.spec.samples.push_back("Start shared activity " + pad(e, 2));
    p.spec.add_initial(own, "s1");
    for (int e : p.entries)
      if (e != 1 && e != 36) p.spec.add_initial(shared_utt(e), "s1");
    p.spec.add_state("s1", "Hello from " + kind + " " + nn +
                               ". Shared fun awaits.");
  };
  for (int i = 0; i < 30; ++i) finish(kids[i], "kid corner", i);
  for (int i = 0; i < 30; ++i) finish(gens[i], "gen parlor", i);

  for (auto& p : kids) out.corpus.add(p.spec);
  for (auto& p : gens) out.corpus.add(p.spec);

  for (int nn = 1; nn <= 50; ++nn) {
    CollisionExpectation e;
    e.utterance = shared_utt(nn);
    if (nn <= 15) {
      e.members = {kids[2 * nn - 2].spec.skill_id, kids[2 * nn - 1].spec.skill_id};
      e.category = "kids_only";
    } else if (nn <= 35) {
      e.members = {kids[nn - 16].spec.skill_id, gens[nn - 16].spec.skill_id};
      e.category = "joint";
    } else {
      e.members = {gens[2 * (nn - 35) - 2].spec.skill_id,
                   gens[2 * (nn - 35) - 1].spec.skill_id};
      e.category = "non_kids_only";
    }
    e.same_name_icon = (nn == 2 || nn == 16);
    e.no_invocation = (nn == 1 || nn == 36);
    out.entries.push_back(std::move(e));
  }
  return out;
}

GeneratedCorpus bulk_corpus(int skills, int options) {
  static const char* kWords[] = {
      "one",          "two",       "three",    "four",     "five",
      "six",          "seven",     "eight",    "nine",     "ten",
      "eleven",       "twelve",    "thirteen", "fourteen", "fifteen",
      "sixteen",      "seventeen", "eighteen", "nineteen", "twenty",
      "twenty one",   "twenty two", "twenty three", "twenty four",
      "twenty five",  "twenty six", "twenty seven", "twenty eight",
      "twenty nine",  "thirty"};
  if (options > 30) throw std::invalid_argument("at most 30 options");

  GeneratedCorpus out;
  for (int n = 1; n <= skills; ++n) {
    SkillSpec s;
    const std::string nnn = pad(n, 3);
    s.skill_id = "bulk.skill." + nnn;
    s.name = "Speed Pack " + nnn;
    s.invocation = "speed pack " + nnn;
    s.icon_digest = "icon-bulk-" + nnn;
    s.samples = {"Open speed pack " + nnn};
    s.add_initial("open speed pack " + nnn, "s1");

    std::string prompt = "Pick a tile now. You can say";
    std::vector<std::pair<std::string, std::string>> transitions;
    for (int i = 0; i < options; ++i) {
      const std::string phrase = std::string("tile ") + kWords[i];
      prompt += (i == 0 ? " '" : (i + 1 == options ? " or '" : " '"));
      prompt += phrase + "'";
      prompt += (i + 1 == options ? "." : ",");
      const std::string leaf = "t" + std::to_string(i + 1);
      transitions.emplace_back(phrase, leaf);
    }
    s.add_state("s1", prompt, transitions);
    for (int i = 0; i < options; ++i)
      s.add_state("t" + std::to_string(i + 1),
                  "You flipped tile " + std::string(kWords[i]) + " in pack " +
                      nnn + ". A prize appears.");
    out.add(s);
  }
  return out;
}

GeneratedCorpus small_corpus(bool with_broken) {
  GeneratedCorpus out;
  for (int n = 1; n <= 12; ++n) {
    SkillSpec s;
    const std::string nn = pad(n, 2);
    s.skill_id = "mini.skill." + nn;
    s.name = "Mini App " + nn;
    s.invocation = "mini app " + nn;
    s.icon_digest = "icon-mini-" + nn;
    s.samples = {"Open mini app " + nn};
    s.add_initial("open mini app " + nn, "s1");
    s.add_state("s1", "Welcome to mini app " + nn + ". Would you like a tip?",
                {{"yes", "s2"}, {"no", "s3"}});
    if (with_broken && n == 7) {
      // transition target that no state defines
      s.states["s1"]["transitions"][0]["next"] = "zz";
    }
    s.add_state("s2", "Tip " + nn + ": stretch before you run.");
    s.add_state("s3", "Bye from mini app " + nn + ".");
    out.add(s);
  }
  return out;
}

}  // namespace fixtures
