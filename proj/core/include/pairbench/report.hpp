/// @file report.hpp
/// @brief Run manifests and the consolidated plain-text/TSV report.
///
/// Every emitted report carries a provenance footer naming the manifest of the
/// run that produced it; the manifest's run_id is a SHA-256 over the input
/// digests, run parameters, and tool version (timestamps excluded), so a
/// report regenerated from the same inputs and seed is byte-identical.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pairbench/stats.hpp"
#include "pairbench/store.hpp"

namespace pairbench {

constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string run_id;  // sha256 of canonical() — inputs, parameters, tool version
  std::vector<std::pair<std::string, std::string>> inputs;  // (label, sha256)
  std::string policy;    // run descriptor, e.g. "deterministic-mixed" or "report"
  std::string judge_id;  // judge(s) involved, "-" where not applicable
  std::uint64_t seed{0};
  int resamples{kDefaultResamples};
  std::string tool_version{kToolVersion};
  std::string created_utc;  // informational only; not part of run_id

  /// The digest preimage: every field except created_utc, in a fixed order.
  std::string canonical() const;
};

RunManifest make_manifest(std::vector<std::pair<std::string, std::string>> inputs,
                          std::string policy, std::string judge_id, std::uint64_t seed,
                          int resamples);

std::string render_manifest(const RunManifest& manifest);  // JSON document
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// A loaded fixture-style dataset: the task set plus, per configuration, the
/// deterministic-mixed, LLM-only, and cross-judge verdict views, with the
/// bundle's declared orderings for the report blocks.
struct BundleView {
  struct ConfigData {
    std::string config_id;
    std::string scale;
    std::string role;  // "pre-sft" | "post-sft"
    VerdictSet det, llm, llm_b;
    bool det_artifact{false};  // det view is a recorded extraction-failure row
    bool det_test{false};      // det cells pinned by a reported paired test
    bool llm_test{false};
  };
  struct ScalePair {
    std::string scale, pre, post;
  };

  std::filesystem::path root;
  /// Every file behind this view as (bundle-relative label, absolute path),
  /// in load order — the input list for the run manifest.
  std::vector<std::pair<std::string, std::filesystem::path>> files;
  TaskSet tasks;
  std::vector<ConfigData> configs;
  std::vector<ScalePair> scale_pairs;
  std::vector<std::string> w_order;      // pre-SFT Δ trajectory order
  std::vector<std::string> shift_order;  // re-judge shift row order
  std::string saturation_a, saturation_b;
  std::string attribution_pre_small, attribution_pre_large, attribution_post;
  std::string per_skill_config;
  std::string det_judge, llm_judge, llm_judge_b;

  const ConfigData& config(const std::string& config_id) const;
};

BundleView load_bundle(const std::filesystem::path& bundle_json);

struct ReportOptions {
  int resamples{kDefaultResamples};
  std::uint64_t seed{0};
};

struct ReportDocument {
  std::string text;  // aligned plain-text tables
  std::string tsv;   // block \t row \t col \t rendered \t exact
};

/// Renders every block — SFT contribution by scale, per-config pass rates,
/// the pre-SFT Δ trajectory, re-judge shifts, per-model paired tests with
/// Bonferroni, the saturation test, the attribution split, and the per-skill
/// clustering — deterministically for fixed (bundle, options, manifest id).
ReportDocument render_report(const BundleView& bundle, const ReportOptions& options,
                             const RunManifest& manifest);

}  // namespace pairbench
