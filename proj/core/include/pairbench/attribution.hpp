/// @file attribution.hpp
/// Decomposition layer: Δ-lift, base-scaling vs fine-tuning split, re-judge
/// shift accounting, and per-skill aggregation with LIFT/FLAT/REGRESS
/// clustering.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pairbench/rational.hpp"
#include "pairbench/stats.hpp"
#include "pairbench/store.hpp"

namespace pairbench {

/// Additive decomposition of an end-to-end improvement into a base-scaling
/// component (between two pre-SFT controls) and an SFT component (from the
/// larger control to the tuned student). Components recompose bit-exactly:
/// base_scaling_* + sft_* == total_* per condition.
struct AttributionSplit {
  Rational base_scaling_bl, base_scaling_cu;
  Rational sft_bl, sft_cu;
  Rational total_bl, total_cu;
  Rational delta_lift_sft;  ///< == sft_cu - sft_bl
};

/// Per-config score shift when moving from the deterministic-mixed judge view
/// to the LLM-only view. shift_delta_delta == Δ(llm) − Δ(det) exactly.
struct RejudgeShiftRow {
  std::string config_id;
  Rational shift_bl, shift_cu;
  Rational shift_delta_delta;
};

enum class SkillCluster { kLift, kFlat, kRegress };

std::string to_string(SkillCluster cluster);

/// One skill's paired outcome summary. Cluster assignment is exact:
/// LIFT iff delta > 0, REGRESS iff delta < 0, FLAT iff delta == 0.
struct SkillReport {
  std::string skill_id;
  std::int64_t n_tasks{0};
  Rational bl_rate, cu_rate;
  Rational delta;
  SkillCluster cluster{SkillCluster::kFlat};
};

struct ClusterCensus {
  std::int64_t lift{0}, flat{0}, regress{0};
  std::optional<Rational> mean_bl_lift, mean_bl_flat, mean_bl_regress;
};

struct PerSkillResult {
  std::vector<SkillReport> reports;  ///< sorted by skill_id
  ClusterCensus census;
  std::int64_t total_tasks{0};
};

/// Spearman correlation of per-skill Δ against per-skill baseline rate.
struct SkillCorrelation {
  double rho_all{0};
  std::optional<double> rho_sub_ceiling;  ///< skills with baseline < 1.0; absent if < 2
  std::int64_t n_all{0};
  std::int64_t n_sub_ceiling{0};
};

/// Non-monotone Δ sequence across an ordered set of configs (e.g. pre-SFT
/// scales). Reported, not tested: sign_changes counts adjacent strict sign
/// flips; zeros break runs without counting.
struct DeltaSequence {
  std::vector<std::pair<std::string, Rational>> deltas;
  int sign_changes{0};
};

/// Δ(post) − Δ(pre). Both stats must cover the same task set (checked by n).
Rational delta_lift(const DeltaStats& pre, const DeltaStats& post);

/// Additive split across two pre-SFT controls and one tuned student, all on
/// the same task set and judge view.
AttributionSplit attribution_split(const DeltaStats& pre_small, const DeltaStats& pre_large,
                                   const DeltaStats& post_large);

/// Per-config shifts from the deterministic-mixed view to the LLM-only view.
/// Both views must list the same configs in the same order.
std::vector<RejudgeShiftRow> rejudge_shift(
    const std::vector<std::pair<std::string, DeltaStats>>& det_view,
    const std::vector<std::pair<std::string, DeltaStats>>& llm_view);

/// Groups one config's paired outcomes by skill and clusters each skill by
/// the sign of its Δ. Every judged task must map to a known skill.
PerSkillResult per_skill(const VerdictSet& verdicts, const TaskSet& tasks,
                         const std::string& config_id);

/// Spearman ρ of per-skill Δ against baseline rate, on all skills and on the
/// sub-ceiling subset (baseline < 1.0). Requires >= 2 skills.
SkillCorrelation skill_delta_vs_baseline(const std::vector<SkillReport>& reports);

/// Ordered Δ sequence with its sign-change count.
DeltaSequence delta_sequence(const std::vector<std::pair<std::string, DeltaStats>>& configs);

}  // namespace pairbench
