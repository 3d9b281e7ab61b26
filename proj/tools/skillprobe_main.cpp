#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "skillprobe/cli.hpp"
#include "skillprobe/skillhost.hpp"

namespace {

using skillprobe::cli::RunConfig;

void add_policy_option(CLI::App* cmd, RunConfig& config) {
  cmd->add_option_function<std::string>(
         "--policy",
         [&config](const std::string& value) {
           auto mode = skillprobe::host::resolver_mode_from_string(value);
           if (!mode)
             throw CLI::ValidationError("--policy",
                                        "unknown resolver mode: " + value);
           config.policy.mode = *mode;
         },
         "Resolver policy: registration, lex, prefer-nonkid, prefer-kid, seeded")
      ->expected(1);
}

void add_common_inputs(CLI::App* cmd, RunConfig& config, bool definitions) {
  cmd->add_option("--catalog", config.catalog_path, "Catalog JSON file");
  if (definitions)
    cmd->add_option("--definitions", config.definitions_path,
                    "Skill definition JSON file");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  try {
    config = skillprobe::cli::config_from_env();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Conversation-driven auditing for voice-app catalogs"};
  app.require_subcommand(1);

  std::string dataset_dir;
  std::string findings_file;
  std::string votes_file;
  std::uint16_t serve_port = 0;

  CLI::App* explore = app.add_subcommand(
      "explore", "Explore every catalog skill and record conversations");
  add_common_inputs(explore, config, true);
  explore->add_option("--host", config.host,
                      "Skill host: 'embedded' or <ipv4>:<port>");
  explore->add_option("--workers", config.workers, "Parallel workers");
  explore->add_option("--seed", config.seed, "Batch seed");
  explore->add_option("--out", config.out_dir, "Output dataset directory");
  explore->add_option("--max-runs", config.explore.max_runs_per_skill,
                      "Conversation runs per skill");
  explore->add_option("--max-depth", config.explore.max_depth,
                      "Maximum conversation depth");
  explore->add_option("--max-nodes", config.explore.max_nodes_per_skill,
                      "Maximum unique responses per skill");
  explore->add_option("--repeat-threshold", config.explore.repeat_threshold,
                      "In-run repetition cutoff");
  add_policy_option(explore, config);

  CLI::App* scan = app.add_subcommand(
      "scan", "Scan a recorded dataset for risky responses");
  scan->add_option("dataset", dataset_dir, "Dataset directory")->required();
  add_common_inputs(scan, config, false);
  scan->add_option("--workers", config.workers, "Parallel workers");
  scan->add_option("--out", config.out_dir, "Report directory");

  CLI::App* confound = app.add_subcommand(
      "confound", "Test utterances shared by several skills");
  add_common_inputs(confound, config, true);
  confound->add_option("--host", config.host,
                       "Skill host: 'embedded' or <ipv4>:<port>");
  confound->add_option("--workers", config.workers, "Parallel workers");
  confound->add_option("--seed", config.seed, "Batch seed");
  confound->add_option("--out", config.out_dir, "Report directory");
  add_policy_option(confound, config);

  CLI::App* coverage =
      app.add_subcommand("coverage", "Summarize dataset coverage metrics");
  coverage->add_option("dataset", dataset_dir, "Dataset directory")->required();
  coverage->add_option("--out", config.out_dir, "Report directory");

  CLI::App* review =
      app.add_subcommand("review", "Apply reviewer votes to findings");
  review->add_option("findings", findings_file, "findings.json path")->required();
  review->add_option("votes", votes_file, "Votes TSV (finding_id, reviewer, vote)")
      ->required();

  CLI::App* serve =
      app.add_subcommand("serve", "Run the embedded host over TCP");
  add_common_inputs(serve, config, true);
  serve->add_option("--port", serve_port, "TCP port (0 picks one)");
  serve->add_option("--seed", config.seed, "Batch seed");
  add_policy_option(serve, config);

  CLI11_PARSE(app, argc, argv);

  try {
    if (explore->parsed()) return skillprobe::cli::cmd_explore(config);
    if (scan->parsed()) return skillprobe::cli::cmd_scan(config, dataset_dir);
    if (confound->parsed()) return skillprobe::cli::cmd_confound(config);
    if (coverage->parsed())
      return skillprobe::cli::cmd_coverage(config, dataset_dir);
    if (review->parsed())
      return skillprobe::cli::cmd_review(config, findings_file, votes_file);
    if (serve->parsed()) return skillprobe::cli::cmd_serve(config, serve_port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
