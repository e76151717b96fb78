#include "pairbench/attribution.hpp"

#include <algorithm>
#include <map>

#include "pairbench/errors.hpp"

namespace pairbench {

std::string to_string(SkillCluster cluster) {
  switch (cluster) {
    case SkillCluster::kLift: return "LIFT";
    case SkillCluster::kFlat: return "FLAT";
    case SkillCluster::kRegress: return "REGRESS";
  }
  throw ValidationError("unknown skill cluster");
}

namespace {

void require_same_n(std::int64_t a, std::int64_t b, const char* what) {
  if (a != b)
    throw ValidationError(std::string(what) + ": task-set mismatch (n = " + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
}

}  // namespace

Rational delta_lift(const DeltaStats& pre, const DeltaStats& post) {
  require_same_n(pre.n, post.n, "delta_lift");
  return post.delta - pre.delta;
}

AttributionSplit attribution_split(const DeltaStats& pre_small, const DeltaStats& pre_large,
                                   const DeltaStats& post_large) {
  require_same_n(pre_small.n, pre_large.n, "attribution_split");
  require_same_n(pre_large.n, post_large.n, "attribution_split");
  AttributionSplit s;
  s.base_scaling_bl = pre_large.pass_bl - pre_small.pass_bl;
  s.base_scaling_cu = pre_large.pass_cu - pre_small.pass_cu;
  s.sft_bl = post_large.pass_bl - pre_large.pass_bl;
  s.sft_cu = post_large.pass_cu - pre_large.pass_cu;
  s.total_bl = post_large.pass_bl - pre_small.pass_bl;
  s.total_cu = post_large.pass_cu - pre_small.pass_cu;
  s.delta_lift_sft = s.sft_cu - s.sft_bl;
  return s;
}

std::vector<RejudgeShiftRow> rejudge_shift(
    const std::vector<std::pair<std::string, DeltaStats>>& det_view,
    const std::vector<std::pair<std::string, DeltaStats>>& llm_view) {
  if (det_view.size() != llm_view.size())
    throw ValidationError("rejudge_shift: config mismatch (" + std::to_string(det_view.size()) +
                          " vs " + std::to_string(llm_view.size()) + " configs)");
  std::vector<RejudgeShiftRow> rows;
  rows.reserve(det_view.size());
  for (std::size_t i = 0; i < det_view.size(); ++i) {
    const auto& [det_id, det] = det_view[i];
    const auto& [llm_id, llm] = llm_view[i];
    if (det_id != llm_id)
      throw ValidationError("rejudge_shift: config mismatch at position " + std::to_string(i) +
                            " ('" + det_id + "' vs '" + llm_id + "')");
    RejudgeShiftRow row;
    row.config_id = det_id;
    row.shift_bl = llm.pass_bl - det.pass_bl;
    row.shift_cu = llm.pass_cu - det.pass_cu;
    row.shift_delta_delta = row.shift_cu - row.shift_bl;
    rows.push_back(std::move(row));
  }
  return rows;
}

PerSkillResult per_skill(const VerdictSet& verdicts, const TaskSet& tasks,
                         const std::string& config_id) {
  PairedOutcomes pairs = pair(verdicts, config_id);
  struct SkillAcc {
    std::int64_t n{0}, bl_pass{0}, cu_pass{0};
  };
  std::map<std::string, SkillAcc> by_skill;
  for (std::size_t i = 0; i < pairs.task_uids.size(); ++i) {
    const Task* task = tasks.find(pairs.task_uids[i]);
    if (task == nullptr)
      throw ValidationError("per_skill: task '" + pairs.task_uids[i] +
                            "' has no skill mapping in the task set");
    SkillAcc& acc = by_skill[task->skill_id];
    ++acc.n;
    PairCell cell = pairs.cells[i];
    if (cell == PairCell::kBothPass || cell == PairCell::kOnlyBaseline) ++acc.bl_pass;
    if (cell == PairCell::kBothPass || cell == PairCell::kOnlyCurated) ++acc.cu_pass;
  }
  PerSkillResult result;
  struct ClusterAcc {
    std::int64_t count{0};
    Rational bl_sum;
  };
  ClusterAcc lift, flat, regress;
  for (const auto& [skill_id, acc] : by_skill) {
    SkillReport report;
    report.skill_id = skill_id;
    report.n_tasks = acc.n;
    report.bl_rate = Rational(acc.bl_pass, acc.n);
    report.cu_rate = Rational(acc.cu_pass, acc.n);
    report.delta = report.cu_rate - report.bl_rate;
    int sign = report.delta.sign();
    report.cluster = sign > 0   ? SkillCluster::kLift
                     : sign < 0 ? SkillCluster::kRegress
                                : SkillCluster::kFlat;
    ClusterAcc& cluster_acc = sign > 0 ? lift : sign < 0 ? regress : flat;
    ++cluster_acc.count;
    cluster_acc.bl_sum = cluster_acc.bl_sum + report.bl_rate;
    result.total_tasks += acc.n;
    result.reports.push_back(std::move(report));
  }
  result.census.lift = lift.count;
  result.census.flat = flat.count;
  result.census.regress = regress.count;
  auto mean = [](const ClusterAcc& acc) -> std::optional<Rational> {
    if (acc.count == 0) return std::nullopt;
    return acc.bl_sum / Rational(acc.count);
  };
  result.census.mean_bl_lift = mean(lift);
  result.census.mean_bl_flat = mean(flat);
  result.census.mean_bl_regress = mean(regress);
  return result;
}

SkillCorrelation skill_delta_vs_baseline(const std::vector<SkillReport>& reports) {
  if (reports.size() < 2)
    throw ValidationError("skill_delta_vs_baseline: need >= 2 skills, got " +
                          std::to_string(reports.size()));
  std::vector<double> bl_all, delta_all, bl_sub, delta_sub;
  for (const SkillReport& r : reports) {
    bl_all.push_back(r.bl_rate.to_double());
    delta_all.push_back(r.delta.to_double());
    if (r.bl_rate < Rational(1)) {
      bl_sub.push_back(r.bl_rate.to_double());
      delta_sub.push_back(r.delta.to_double());
    }
  }
  SkillCorrelation corr;
  corr.n_all = static_cast<std::int64_t>(bl_all.size());
  corr.n_sub_ceiling = static_cast<std::int64_t>(bl_sub.size());
  corr.rho_all = spearman(delta_all, bl_all);
  if (bl_sub.size() >= 2) corr.rho_sub_ceiling = spearman(delta_sub, bl_sub);
  return corr;
}

DeltaSequence delta_sequence(const std::vector<std::pair<std::string, DeltaStats>>& configs) {
  DeltaSequence seq;
  int prev_sign = 0;
  for (const auto& [config_id, stats] : configs) {
    int sign = stats.delta.sign();
    if (sign != 0) {
      if (prev_sign != 0 && sign != prev_sign) ++seq.sign_changes;
      prev_sign = sign;
    }
    seq.deltas.emplace_back(config_id, stats.delta);
  }
  return seq;
}

}  // namespace pairbench
