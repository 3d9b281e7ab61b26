#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "skillprobe/explorer.hpp"
#include "skillprobe/skillhost.hpp"

namespace skillprobe::cli {

struct RunConfig {
  std::filesystem::path catalog_path;
  std::filesystem::path definitions_path;
  std::string host = "embedded";  // or "<ipv4>:<port>"
  int workers = 5;
  explorer::ExploreConfig explore;
  host::ResolverPolicy policy;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
};

// Defaults overlaid with the JSON document named by SKILLPROBE_CONFIG (when
// set). Command-line flags are applied on top by the binary.
RunConfig config_from_env();

// Applies one config document. Recognized keys: catalog, definitions, host,
// workers, seed, out, max_runs, max_depth, repeat_threshold, max_nodes,
// data_dir, policy {mode, seed, overrides {utterance: skill_id}}.
// Throws std::runtime_error on unreadable or malformed documents.
void apply_config_file(RunConfig& config, const std::filesystem::path& file);

// Explores every catalog skill with a worker pool and writes one
// conversation file per skill plus summary.json into the output directory.
// Skills without a loadable definition become error entries; exploration
// failures keep their partial output. Returns 0 even with error entries,
// nonzero only on configuration or connection failure.
int cmd_explore(const RunConfig& config);

// Rebuilds trees from a dataset directory, scans them against the bundled
// moderation wordlist and PII keyword list, cross-checks permissions, and
// writes findings.json into the output directory.
int cmd_scan(const RunConfig& config, const std::filesystem::path& dataset_dir);

// Builds the shared-utterance dictionary from the catalog, tests each entry
// against the host, and writes confound.json and confound.tsv.
int cmd_confound(const RunConfig& config);

// Emits per-skill coverage rows (coverage.tsv) and value histograms
// (coverage_hist.tsv) for a dataset directory.
int cmd_coverage(const RunConfig& config, const std::filesystem::path& dataset_dir);

// Applies reviewer votes (TSV: finding_id, reviewer, vote) to a findings
// document, updating verdicts in place.
int cmd_review(const RunConfig& config, const std::filesystem::path& findings_file,
               const std::filesystem::path& votes_file);

// Runs the embedded host behind the TCP wire protocol until interrupted.
int cmd_serve(const RunConfig& config, std::uint16_t port);

}  // namespace skillprobe::cli
