/// @file judge_router.hpp
/// Dispatch between the deterministic extractor and an LLM judge, the judge
/// run / re-judge workflows, and mixed-view recomposition.
#pragma once

#include <string>
#include <vector>

#include "pairbench/judge_client.hpp"
#include "pairbench/model.hpp"
#include "pairbench/store.hpp"

namespace pairbench {

enum class DispatchPolicy {
  kDeterministicMixed,  ///< YES_NO / SINGLE_WORD / RANKING deterministic, FREE_FORM via LLM
  kLlmOnly,             ///< every query type via LLM
};

std::string to_string(DispatchPolicy policy);
DispatchPolicy parse_policy(const std::string& text);

/// Pure routing decision.
JudgePath dispatch(DispatchPolicy policy, QueryType query_type);

/// Outcome of a judge run: the verdicts collected plus the episodes the
/// client could not judge (retry budget spent). A run is complete iff
/// `unjudged` is empty; statistics refuse incomplete sets.
struct JudgeRunResult {
  VerdictSet verdicts;
  std::vector<EpisodeKey> unjudged;
  bool complete() const { return unjudged.empty(); }
};

/// Judges every episode under `policy`. Verdicts are collected concurrently
/// up to the client's parallelism cap, then canonically ordered so output is
/// independent of completion order.
JudgeRunResult judge_run(const EpisodeSet& episodes, const TaskSet& tasks, DispatchPolicy policy,
                         JudgeClient& client);

/// Fresh verdicts for previously judged episodes under a (possibly different)
/// policy, over the same response texts. Alias of judge_run; the new
/// judge_id / judge_path distinguish the result from the original set.
JudgeRunResult rejudge(const EpisodeSet& episodes, const TaskSet& tasks, DispatchPolicy new_policy,
                       JudgeClient& client);

/// Reconstructs the DETERMINISTIC_MIXED view from two part-runs: FREE_FORM
/// episodes take the LLM verdict, every other episode takes the deterministic
/// verdict. Throws CoverageError naming the first missing episode.
VerdictSet compose_mixed_verdicts(const VerdictSet& det_verdicts, const VerdictSet& llm_verdicts,
                                  const TaskSet& tasks);

}  // namespace pairbench
