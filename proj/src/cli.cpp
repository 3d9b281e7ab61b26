#include "skillprobe/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "json.hpp"
#include "skillprobe/catalog.hpp"
#include "skillprobe/confound.hpp"
#include "skillprobe/datastore.hpp"
#include "skillprobe/riskscan.hpp"
#include "skillprobe/text.hpp"
#include "skillprobe/wire.hpp"

namespace skillprobe::cli {

namespace {

using json = nlohmann::ordered_json;

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("cannot move " + tmp.string() + ": " + ec.message());
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

void parallel_for(int workers, std::size_t n,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

// "<ipv4>:<port>"; "embedded" is handled by callers.
std::optional<std::pair<std::string, std::uint16_t>> parse_host(
    const std::string& spec) {
  auto colon = spec.rfind(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string addr = colon == 0 ? "127.0.0.1" : spec.substr(0, colon);
  try {
    int port = std::stoi(spec.substr(colon + 1));
    if (port <= 0 || port > 65535) return std::nullopt;
    return std::make_pair(addr, static_cast<std::uint16_t>(port));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct LoadedInputs {
  catalog::Catalog catalog;
  host::DefinitionSet definitions;
};

std::optional<LoadedInputs> load_inputs(const RunConfig& config, bool need_defs) {
  LoadedInputs inputs;
  try {
    inputs.catalog = catalog::parse_catalog(config.catalog_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  if (need_defs) {
    try {
      inputs.definitions = host::load_skill_definitions(config.definitions_path,
                                                        &inputs.catalog.records);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return std::nullopt;
    }
  }
  return inputs;
}

json finding_to_json(const riskscan::RiskFinding& f) {
  json out;
  out["finding_id"] = f.finding_id;
  out["skill_id"] = f.skill_id;
  out["kind"] = riskscan::to_string(f.kind);
  out["response_text"] = f.response_text;
  out["evidence"] = f.evidence;
  if (f.pii_keyword) out["pii_keyword"] = *f.pii_keyword;
  out["depth"] = f.depth;
  out["opening_utterance"] = f.opening_utterance;
  if (f.utterance_source)
    out["utterance_source"] = catalog::to_string(*f.utterance_source);
  if (f.permission_check)
    out["permission_check"] = riskscan::to_string(*f.permission_check);
  out["verdict"] = riskscan::to_string(f.verdict);
  return out;
}

riskscan::RiskFinding finding_from_json(const json& j) {
  riskscan::RiskFinding f;
  f.finding_id = j.value("finding_id", "");
  f.skill_id = j.value("skill_id", "");
  if (auto k = riskscan::finding_kind_from_string(j.value("kind", ""))) f.kind = *k;
  f.response_text = j.value("response_text", "");
  f.evidence = j.value("evidence", "");
  if (j.contains("pii_keyword"))
    f.pii_keyword = j.at("pii_keyword").get<std::string>();
  f.depth = j.value("depth", 0);
  f.opening_utterance = j.value("opening_utterance", "");
  if (j.contains("utterance_source"))
    f.utterance_source = catalog::utterance_source_from_string(
        j.at("utterance_source").get<std::string>());
  if (j.contains("permission_check"))
    f.permission_check = riskscan::permission_check_from_string(
        j.at("permission_check").get<std::string>());
  if (auto v = riskscan::review_verdict_from_string(j.value("verdict", "")))
    f.verdict = *v;
  return f;
}

std::vector<std::filesystem::path> dataset_files(
    const std::filesystem::path& dataset_dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dataset_dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dataset_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != ".json") continue;
    auto name = p.filename().string();
    if (name == "summary.json" || name == "findings.json" ||
        name == "confound.json")
      continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

RunConfig config_from_env() {
  RunConfig config;
  if (const char* path = std::getenv("SKILLPROBE_CONFIG"); path && *path)
    apply_config_file(config, path);
  return config;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config: " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("config is not valid JSON: " + file.string() + ": " +
                             e.what());
  }
  if (!doc.is_object())
    throw std::runtime_error("config must be a JSON object: " + file.string());

  if (doc.contains("catalog"))
    config.catalog_path = doc.at("catalog").get<std::string>();
  if (doc.contains("definitions"))
    config.definitions_path = doc.at("definitions").get<std::string>();
  if (doc.contains("host")) config.host = doc.at("host").get<std::string>();
  if (doc.contains("workers")) config.workers = doc.at("workers").get<int>();
  if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("out")) config.out_dir = doc.at("out").get<std::string>();
  if (doc.contains("max_runs"))
    config.explore.max_runs_per_skill = doc.at("max_runs").get<int>();
  if (doc.contains("max_depth"))
    config.explore.max_depth = doc.at("max_depth").get<int>();
  if (doc.contains("repeat_threshold"))
    config.explore.repeat_threshold = doc.at("repeat_threshold").get<int>();
  if (doc.contains("max_nodes"))
    config.explore.max_nodes_per_skill = doc.at("max_nodes").get<int>();
  if (doc.contains("data_dir")) {
    std::string dir = doc.at("data_dir").get<std::string>();
    setenv("SKILLPROBE_DATA", dir.c_str(), 1);
  }
  if (doc.contains("policy")) {
    const json& p = doc.at("policy");
    if (p.contains("mode")) {
      auto mode = host::resolver_mode_from_string(p.at("mode").get<std::string>());
      if (!mode)
        throw std::runtime_error("config names unknown resolver mode: " +
                                 p.at("mode").get<std::string>());
      config.policy.mode = *mode;
    }
    if (p.contains("seed")) config.policy.seed = p.at("seed").get<std::uint64_t>();
    if (p.contains("overrides"))
      for (const auto& [utterance, skill] : p.at("overrides").items())
        config.policy.overrides[text::normalize_utterance(utterance)] =
            skill.get<std::string>();
  }
}

int cmd_explore(const RunConfig& config) {
  auto inputs = load_inputs(config, /*need_defs=*/true);
  if (!inputs) return 2;

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << config.out_dir.string() << ": "
              << ec.message() << "\n";
    return 2;
  }

  std::vector<catalog::SkillRecord> skills = inputs->catalog.records;
  std::sort(skills.begin(), skills.end(),
            [](const auto& a, const auto& b) { return a.skill_id < b.skill_id; });

  std::map<std::string, std::string> definition_errors;
  for (const auto& issue : inputs->definitions.issues)
    if (!issue.skill_id.empty())
      definition_errors.emplace(issue.skill_id, issue.message);

  // Backends: the embedded simulator is shared; a wire host gets one
  // connection per worker.
  std::unique_ptr<host::SkillHost> embedded;
  std::vector<std::unique_ptr<wire::WireClient>> clients;
  int workers = std::max(1, config.workers);
  if (config.host == "embedded") {
    embedded = std::make_unique<host::SkillHost>(inputs->definitions,
                                                 config.policy);
  } else {
    auto addr = parse_host(config.host);
    if (!addr) {
      std::cerr << "error: bad host spec '" << config.host << "'\n";
      return 2;
    }
    try {
      for (int w = 0; w < workers; ++w)
        clients.push_back(
            std::make_unique<wire::WireClient>(addr->first, addr->second));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  std::atomic<int> next_client{0};

  struct SkillResult {
    std::size_t conversations = 0;
    std::size_t responses = 0;
    std::optional<std::string> error;
  };
  std::vector<SkillResult> results(skills.size());

  parallel_for(workers, skills.size(), [&](std::size_t i) {
    const catalog::SkillRecord& record = skills[i];
    SkillResult& result = results[i];
    if (auto it = definition_errors.find(record.skill_id);
        it != definition_errors.end()) {
      result.error = it->second;
      return;
    }
    if (!inputs->definitions.skills.count(record.skill_id)) {
      result.error = "no definition for this skill";
      return;
    }
    thread_local host::HostBackend* backend = nullptr;
    if (!backend)
      backend = embedded
                    ? static_cast<host::HostBackend*>(embedded.get())
                    : clients[next_client.fetch_add(1) % clients.size()].get();
    try {
      auto utterances = catalog::extract_utterances(record);
      auto tree = explorer::explore_skill(record, utterances, *backend,
                                          config.explore);
      auto conversations = datastore::conversations_from_tree(tree);
      if (!conversations.conversations.empty() || !tree.error) {
        auto merged = datastore::merge_into_file(
            config.out_dir / (record.skill_id + ".json"), conversations);
        result.conversations = merged.conversations.size();
      }
      result.responses = tree.nodes.size();
      if (tree.error) result.error = *tree.error;
    } catch (const std::exception& e) {
      result.error = e.what();
    }
  });

  std::size_t explored = 0, total_conversations = 0, total_responses = 0;
  json errored = json::array();
  for (std::size_t i = 0; i < skills.size(); ++i) {
    total_conversations += results[i].conversations;
    total_responses += results[i].responses;
    if (results[i].error) {
      json entry;
      entry["skill_id"] = skills[i].skill_id;
      entry["error"] = *results[i].error;
      errored.push_back(entry);
    } else {
      ++explored;
    }
  }

  json summary;
  summary["skills"] = skills.size();
  summary["explored"] = explored;
  summary["conversations"] = total_conversations;
  summary["responses"] = total_responses;
  summary["errored"] = errored;
  try {
    write_json_file(config.out_dir / "summary.json", summary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::cout << "explored " << explored << " of " << skills.size() << " skills, "
            << total_conversations << " conversations, " << total_responses
            << " unique responses\n";
  return 0;
}

int cmd_scan(const RunConfig& config, const std::filesystem::path& dataset_dir) {
  auto inputs = load_inputs(config, /*need_defs=*/false);
  if (!inputs) return 2;
  if (!std::filesystem::is_directory(dataset_dir)) {
    std::cerr << "error: dataset directory " << dataset_dir.string()
              << " does not exist\n";
    return 2;
  }
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << config.out_dir.string() << ": "
              << ec.message() << "\n";
    return 2;
  }

  std::map<std::string, const catalog::SkillRecord*> by_id;
  for (const auto& r : inputs->catalog.records) by_id[r.skill_id] = &r;

  const auto& classifier = respclass::Classifier::bundled();
  const auto& moderation = riskscan::ModerationList::bundled();
  const auto& keywords = riskscan::PiiKeywords::bundled();
  const auto& permissions = riskscan::PermissionMap::bundled();

  auto files = dataset_files(dataset_dir);
  std::vector<std::vector<riskscan::RiskFinding>> per_file(files.size());
  std::atomic<std::size_t> scanned{0};
  parallel_for(std::max(1, config.workers), files.size(), [&](std::size_t i) {
    try {
      auto record = datastore::load_conversations(files[i]);
      auto it = by_id.find(record.skill_id);
      if (it == by_id.end()) return;  // dataset entry without catalog metadata
      auto tree = datastore::rebuild_tree(record);
      per_file[i] = riskscan::scan_tree(tree, *it->second, classifier, moderation,
                                        keywords, permissions);
      scanned.fetch_add(1);
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << files[i].filename().string() << ": "
                << e.what() << "\n";
    }
  });

  std::vector<riskscan::RiskFinding> findings;
  for (auto& list : per_file)
    findings.insert(findings.end(), list.begin(), list.end());
  std::sort(findings.begin(), findings.end(), [](const auto& a, const auto& b) {
    if (a.skill_id != b.skill_id) return a.skill_id < b.skill_id;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.finding_id < b.finding_id;
  });

  std::set<std::string> expletive_skills, pii_skills;
  std::size_t expletive_findings = 0, pii_findings = 0;
  for (const auto& f : findings) {
    if (f.kind == riskscan::FindingKind::Expletive) {
      ++expletive_findings;
      expletive_skills.insert(f.skill_id);
    } else {
      ++pii_findings;
      pii_skills.insert(f.skill_id);
    }
  }

  json doc;
  json summary;
  summary["skills_scanned"] = scanned.load();
  summary["expletive_findings"] = expletive_findings;
  summary["pii_findings"] = pii_findings;
  summary["skills_with_expletives"] = expletive_skills.size();
  summary["skills_with_pii"] = pii_skills.size();
  doc["summary"] = summary;
  json list = json::array();
  for (const auto& f : findings) list.push_back(finding_to_json(f));
  doc["findings"] = list;
  try {
    write_json_file(config.out_dir / "findings.json", doc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::cout << "scanned " << scanned.load() << " skills: " << expletive_findings
            << " expletive findings in " << expletive_skills.size()
            << " skills, " << pii_findings << " personal-information findings in "
            << pii_skills.size() << " skills\n";
  return 0;
}

int cmd_confound(const RunConfig& config) {
  auto inputs = load_inputs(config, /*need_defs=*/true);
  if (!inputs) return 2;
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << config.out_dir.string() << ": "
              << ec.message() << "\n";
    return 2;
  }

  auto entries = confound::build_dictionary(inputs->catalog.records);
  std::map<std::string, bool> is_kids;
  for (const auto& r : inputs->catalog.records)
    is_kids[r.skill_id] = r.is_kids();

  std::unique_ptr<host::SkillHost> embedded;
  std::unique_ptr<wire::WireClient> client;
  host::HostBackend* backend = nullptr;
  if (config.host == "embedded") {
    embedded =
        std::make_unique<host::SkillHost>(inputs->definitions, config.policy);
    backend = embedded.get();
  } else {
    auto addr = parse_host(config.host);
    if (!addr) {
      std::cerr << "error: bad host spec '" << config.host << "'\n";
      return 2;
    }
    try {
      client = std::make_unique<wire::WireClient>(addr->first, addr->second);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    backend = client.get();
  }

  std::vector<confound::ConfoundingOutcome> outcomes(entries.size());
  parallel_for(std::max(1, config.workers), entries.size(), [&](std::size_t i) {
    outcomes[i] = confound::test_utterance(entries[i], *backend, is_kids);
  });
  auto summary = confound::summarize(entries, outcomes);

  json doc;
  json entry_list = json::array();
  std::string tsv =
      "utterance\tcategory\tsame_name_icon\toutcome\tinvoked_skill_id\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto& o = outcomes[i];
    json row;
    row["utterance"] = e.utterance;
    row["skill_ids"] = std::vector<std::string>(e.skill_ids.begin(),
                                                e.skill_ids.end());
    row["category"] = confound::to_string(e.category);
    row["same_name_icon"] = e.same_name_icon;
    row["outcome"] = confound::to_string(o.outcome);
    if (o.invoked_skill_id) row["invoked_skill_id"] = *o.invoked_skill_id;
    if (o.note) row["note"] = *o.note;
    entry_list.push_back(row);

    tsv += e.utterance;
    tsv += '\t';
    tsv += confound::to_string(e.category);
    tsv += '\t';
    tsv += e.same_name_icon ? "1" : "0";
    tsv += '\t';
    tsv += confound::to_string(o.outcome);
    tsv += '\t';
    tsv += o.invoked_skill_id.value_or("");
    tsv += '\n';
  }
  doc["entries"] = entry_list;

  json table;
  for (auto category :
       {confound::CollisionCategory::KidsOnly, confound::CollisionCategory::Joint,
        confound::CollisionCategory::NonKidsOnly}) {
    json row;
    for (auto outcome :
         {confound::OutcomeKind::IrrelevantInvoked,
          confound::OutcomeKind::RelevantInvoked,
          confound::OutcomeKind::RelevantNonKidPrioritized,
          confound::OutcomeKind::NoInvocation})
      row[confound::to_string(outcome)] = summary.count(category, outcome);
    table[confound::to_string(category)] = row;
  }
  table["total_entries"] = summary.total_entries;
  doc["summary"] = table;

  try {
    write_json_file(config.out_dir / "confound.json", doc);
    write_text_file(config.out_dir / "confound.tsv", tsv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::cout << "tested " << entries.size() << " confounding utterances\n";
  return 0;
}

int cmd_coverage(const RunConfig& config, const std::filesystem::path& dataset_dir) {
  if (!std::filesystem::is_directory(dataset_dir)) {
    std::cerr << "error: dataset directory " << dataset_dir.string()
              << " does not exist\n";
    return 2;
  }
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << config.out_dir.string() << ": "
              << ec.message() << "\n";
    return 2;
  }

  struct Row {
    std::string skill_id;
    explorer::CoverageMetrics metrics;
  };
  std::vector<Row> rows;
  for (const auto& file : dataset_files(dataset_dir)) {
    try {
      auto record = datastore::load_conversations(file);
      auto tree = datastore::rebuild_tree(record);
      rows.push_back({record.skill_id, explorer::coverage_metrics(tree)});
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << file.filename().string() << ": "
                << e.what() << "\n";
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.skill_id < b.skill_id; });

  std::string tsv =
      "skill_id\tunique_responses\tmax_depth\tmax_branching\tinitial_utterances\n";
  std::map<std::string, std::map<int, int>> histogram;
  for (const auto& row : rows) {
    tsv += row.skill_id + '\t' + std::to_string(row.metrics.unique_responses) +
           '\t' + std::to_string(row.metrics.max_depth) + '\t' +
           std::to_string(row.metrics.max_branching) + '\t' +
           std::to_string(row.metrics.initial_utterances) + '\n';
    ++histogram["unique_responses"][row.metrics.unique_responses];
    ++histogram["max_depth"][row.metrics.max_depth];
    ++histogram["max_branching"][row.metrics.max_branching];
    ++histogram["initial_utterances"][row.metrics.initial_utterances];
  }
  std::string hist = "metric\tvalue\tskills\n";
  for (const auto& [metric, values] : histogram)
    for (const auto& [value, count] : values)
      hist += metric + '\t' + std::to_string(value) + '\t' +
              std::to_string(count) + '\n';

  try {
    write_text_file(config.out_dir / "coverage.tsv", tsv);
    write_text_file(config.out_dir / "coverage_hist.tsv", hist);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "coverage for " << rows.size() << " skills\n";
  return 0;
}

int cmd_review(const RunConfig&, const std::filesystem::path& findings_file,
               const std::filesystem::path& votes_file) {
  json doc;
  {
    std::ifstream in(findings_file);
    if (!in) {
      std::cerr << "error: cannot read " << findings_file.string() << "\n";
      return 2;
    }
    try {
      in >> doc;
    } catch (const json::exception& e) {
      std::cerr << "error: invalid findings document: " << e.what() << "\n";
      return 2;
    }
  }
  if (!doc.is_object() || !doc.contains("findings") ||
      !doc.at("findings").is_array()) {
    std::cerr << "error: findings document has no findings list\n";
    return 2;
  }
  std::vector<riskscan::RiskFinding> findings;
  for (const auto& j : doc.at("findings")) findings.push_back(finding_from_json(j));

  std::vector<riskscan::ReviewVote> votes;
  {
    std::ifstream in(votes_file);
    if (!in) {
      std::cerr << "error: cannot read " << votes_file.string() << "\n";
      return 2;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto tab1 = line.find('\t');
      auto tab2 = tab1 == std::string::npos ? std::string::npos
                                            : line.find('\t', tab1 + 1);
      if (tab2 == std::string::npos) continue;
      std::string id = line.substr(0, tab1);
      if (id == "finding_id") continue;  // header row
      std::string vote = line.substr(tab2 + 1);
      bool yes = vote == "1" || vote == "yes" || vote == "true";
      bool no = vote == "0" || vote == "no" || vote == "false";
      if (!yes && !no) continue;
      votes.push_back({id, line.substr(tab1 + 1, tab2 - tab1 - 1), yes});
    }
  }

  auto confirmed = riskscan::review_queue(findings, votes);

  json list = json::array();
  std::size_t rejected = 0, pending = 0;
  for (const auto& f : findings) {
    if (f.verdict == riskscan::ReviewVerdict::Rejected) ++rejected;
    if (f.verdict == riskscan::ReviewVerdict::Pending) ++pending;
    list.push_back(finding_to_json(f));
  }
  doc["findings"] = list;
  try {
    write_json_file(findings_file, doc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "review: " << confirmed.size() << " confirmed, " << rejected
            << " rejected, " << pending << " pending\n";
  return 0;
}

int cmd_serve(const RunConfig& config, std::uint16_t port) {
  auto inputs = load_inputs(config, /*need_defs=*/true);
  if (!inputs) return 2;
  host::SkillHost host(inputs->definitions, config.policy);
  wire::HostServer server(host, port);
  try {
    server.start();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "listening on 127.0.0.1:" << server.port() << "\n" << std::flush;
  for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}

}  // namespace skillprobe::cli
