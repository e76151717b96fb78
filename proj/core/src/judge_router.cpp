#include "pairbench/judge_router.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <set>
#include <thread>

#include "pairbench/det_judge.hpp"
#include "pairbench/errors.hpp"

namespace pairbench {

std::string to_string(DispatchPolicy policy) {
  switch (policy) {
    case DispatchPolicy::kDeterministicMixed: return "deterministic-mixed";
    case DispatchPolicy::kLlmOnly: return "llm-only";
  }
  throw ValidationError("unknown dispatch policy");
}

DispatchPolicy parse_policy(const std::string& text) {
  if (text == "deterministic-mixed") return DispatchPolicy::kDeterministicMixed;
  if (text == "llm-only") return DispatchPolicy::kLlmOnly;
  throw UsageError("unknown policy '" + text + "' (expected deterministic-mixed or llm-only)");
}

JudgePath dispatch(DispatchPolicy policy, QueryType query_type) {
  if (policy == DispatchPolicy::kLlmOnly) return JudgePath::kLlm;
  return query_type == QueryType::kFreeForm ? JudgePath::kLlm : JudgePath::kDeterministic;
}

namespace {

struct LlmJob {
  const Episode* episode;
  const Task* task;
  std::optional<JudgeDecision> decision;
};

/// Runs client.judge over all jobs, at most `cap` concurrent calls. Each
/// worker writes only its own job slots; collection happens after join.
void run_llm_jobs(std::vector<LlmJob>& jobs, JudgeClient& client, int cap) {
  if (jobs.empty()) return;
  int workers = std::max(1, std::min<int>(cap, static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&jobs, &client, &next] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        jobs[i].decision = client.judge(*jobs[i].task, *jobs[i].episode);
      } catch (const std::exception&) {
        jobs[i].decision = std::nullopt;  // treated as client exhaustion
      }
    }
  };
  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

void sort_canonical(VerdictSet& set) {
  std::sort(set.verdicts.begin(), set.verdicts.end(), [](const Verdict& a, const Verdict& b) {
    EpisodeKey ka{a.config_id, a.task_uid, a.condition};
    EpisodeKey kb{b.config_id, b.task_uid, b.condition};
    if (!(ka == kb)) return ka < kb;
    return a.judge_id < b.judge_id;
  });
}

}  // namespace

JudgeRunResult judge_run(const EpisodeSet& episodes, const TaskSet& tasks, DispatchPolicy policy,
                         JudgeClient& client) {
  EpisodeSet validated = ingest_episodes(episodes.episodes, tasks);
  JudgeRunResult result;
  std::vector<LlmJob> llm_jobs;
  for (const Episode& episode : validated.episodes) {
    const Task* task = tasks.find(episode.task_uid);
    if (dispatch(policy, task->query_type) == JudgePath::kDeterministic)
      result.verdicts.verdicts.push_back(judge_deterministic(episode, *task));
    else
      llm_jobs.push_back(LlmJob{&episode, task, std::nullopt});
  }
  run_llm_jobs(llm_jobs, client, client.parallelism());
  for (LlmJob& job : llm_jobs) {
    if (!job.decision) {
      result.unjudged.push_back(
          EpisodeKey{job.episode->config_id, job.episode->task_uid, job.episode->condition});
      continue;
    }
    Verdict v;
    v.task_uid = job.episode->task_uid;
    v.config_id = job.episode->config_id;
    v.condition = job.episode->condition;
    v.pass = job.decision->pass;
    v.judge_path = JudgePath::kLlm;
    v.judge_id = job.decision->judge_id.empty() ? client.judge_id() : job.decision->judge_id;
    v.detail = job.decision->detail;
    result.verdicts.verdicts.push_back(std::move(v));
  }
  sort_canonical(result.verdicts);
  std::sort(result.unjudged.begin(), result.unjudged.end());
  return result;
}

JudgeRunResult rejudge(const EpisodeSet& episodes, const TaskSet& tasks, DispatchPolicy new_policy,
                       JudgeClient& client) {
  // Episodes are immutable; a re-judge is just a fresh run under the new
  // policy. The new verdicts carry their own judge_id / judge_path.
  return judge_run(episodes, tasks, new_policy, client);
}

VerdictSet compose_mixed_verdicts(const VerdictSet& det_verdicts, const VerdictSet& llm_verdicts,
                                  const TaskSet& tasks) {
  auto index = [](const VerdictSet& set, const char* which) {
    std::map<EpisodeKey, const Verdict*> out;
    for (const Verdict& v : set.verdicts) {
      EpisodeKey key{v.config_id, v.task_uid, v.condition};
      if (!out.emplace(key, &v).second)
        throw ValidationError(std::string("compose_mixed_verdicts: duplicate ") + which +
                              " verdict for (" + v.config_id + ", " + v.task_uid + ", " +
                              to_string(v.condition) + ")");
    }
    return out;
  };
  auto det = index(det_verdicts, "deterministic-path");
  auto llm = index(llm_verdicts, "LLM-path");

  // The mixed view is complete by construction: every config seen in either
  // input must cover every task under both conditions.
  std::set<std::string> configs;
  for (const auto& [key, v] : det) {
    if (tasks.find(key.task_uid) == nullptr)
      throw ValidationError("compose_mixed_verdicts: unknown task '" + key.task_uid + "'");
    configs.insert(key.config_id);
  }
  for (const auto& [key, v] : llm) {
    if (tasks.find(key.task_uid) == nullptr)
      throw ValidationError("compose_mixed_verdicts: unknown task '" + key.task_uid + "'");
    configs.insert(key.config_id);
  }

  VerdictSet composed;
  for (const std::string& config_id : configs) {
    for (const Task& task : tasks.tasks()) {
      for (Condition condition : {Condition::kBaseline, Condition::kCurated}) {
        EpisodeKey key{config_id, task.task_uid, condition};
        bool wants_llm = task.query_type == QueryType::kFreeForm;
        const auto& source = wants_llm ? llm : det;
        auto it = source.find(key);
        if (it == source.end())
          throw CoverageError("compose_mixed_verdicts: missing " +
                              std::string(wants_llm ? "LLM" : "deterministic") + " verdict for (" +
                              key.config_id + ", " + key.task_uid + ", " +
                              to_string(key.condition) + ")");
        composed.verdicts.push_back(*it->second);
      }
    }
  }
  sort_canonical(composed);
  return composed;
}

}  // namespace pairbench
