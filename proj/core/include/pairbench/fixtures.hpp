/// @file fixtures.hpp
/// Reconstructed verdict-level fixtures. Contingency cells are inverted from
/// reported pass rates plus the reported paired test statistic wherever one
/// exists (the inversion refuses to proceed unless the solution is unique);
/// configs without a reported test carry marginal pass counts only, realized
/// at minimal discordance and excluded from paired-test reproduction. Every
/// emitted file embeds its derivation note in the header.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "pairbench/stats.hpp"

namespace pairbench {

/// A paired test statistic as rendered in the source material, e.g. a
/// continuity-corrected chi-square "9.03" or an exact binomial p "0.00098".
struct ReportedTest {
  enum class Kind { kChi2, kExactP };
  Kind kind{Kind::kChi2};
  std::string rendered;
};

/// Finds the unique contingency table consistent with (n, pass counts) whose
/// recomputed McNemar statistic renders to `reported`. Throws ValidationError
/// listing every candidate (b, c) when the inversion is ambiguous, or stating
/// inconsistency when no candidate matches.
PairedTable invert_cells(std::int64_t n, std::int64_t pass_bl, std::int64_t pass_cu,
                         const ReportedTest& reported);

/// The unique minimal-discordance realization of marginal pass counts:
/// min(b, c) = 0. Used for configs whose discordance is not pinned by any
/// reported test.
PairedTable minimal_discordance_cells(std::int64_t n, std::int64_t pass_bl,
                                      std::int64_t pass_cu);

/// Paths of one emitted fixture bundle.
struct FixtureBundle {
  std::filesystem::path root;      ///< <out_dir>/v1
  std::filesystem::path tasks;     ///< task set (200 tasks, 40 skills)
  std::filesystem::path episodes;  ///< student-v2.0 episode log
  std::map<std::string, std::filesystem::path> det;    ///< deterministic-mixed view per config
  std::map<std::string, std::filesystem::path> llm;    ///< LLM-only view (judge-a) per config
  std::map<std::string, std::filesystem::path> llm_b;  ///< cross-family overlay (judge-b)
  std::filesystem::path bundle_json;                   ///< roles + file map for reporting
};

/// Emits the complete bundle under <out_dir>/v1. Deterministic and
/// network-free; refuses to emit on any inversion ambiguity or any internal
/// inconsistency between the per-skill layout and the inverted cells.
FixtureBundle build_fixtures(const std::filesystem::path& out_dir);

}  // namespace pairbench
