/// @file store.hpp
/// @brief Ingestion, validation, and line-delimited persistence.
///
/// File format: UTF-8, one JSON object per line. The first line is a header
/// object carrying "format" ("pairbench/tasks" | "pairbench/episodes" |
/// "pairbench/verdicts"), "version" (currently 1), and optionally "note"
/// (free-text provenance, e.g. a fixture derivation note). Record fields are
/// lower_snake_case; unknown fields are preserved on round-trip. Files are
/// written in canonical order — tasks by task_uid, episodes and verdicts by
/// (config_id, task_uid, condition) — so a store/load cycle is byte-stable.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pairbench/errors.hpp"
#include "pairbench/model.hpp"

namespace pairbench {

constexpr int kSchemaVersion = 1;

struct TypeMix {
  std::map<QueryType, std::int64_t> counts;
  std::int64_t total{0};

  /// Percentage of one type, e.g. "61%" or "16.5%" (at most one decimal).
  std::string percent(QueryType t) const;
};

class TaskSet {
 public:
  TaskSet() = default;
  explicit TaskSet(std::vector<Task> tasks);  // validates invariants

  const std::vector<Task>& tasks() const { return tasks_; }
  const Task* find(const std::string& task_uid) const;
  std::size_t size() const { return tasks_.size(); }
  TypeMix type_mix() const;

 private:
  std::vector<Task> tasks_;
  std::map<std::string, std::size_t> by_uid_;
};

struct EpisodeSet {
  std::vector<Episode> episodes;
};

struct VerdictSet {
  std::vector<Verdict> verdicts;
  std::string note;  // header note carried through load/save
};

/// Which (task, condition) cells are missing, per config. Missing cells are a
/// warning at ingest time and a hard error at statistics time.
struct CompletenessReport {
  std::map<std::string, std::vector<EpisodeKey>> missing_by_config;
  bool complete() const { return missing_by_config.empty(); }
  std::string summary() const;
};

/// Validates referential integrity and key uniqueness against `tasks`.
EpisodeSet ingest_episodes(std::vector<Episode> episodes, const TaskSet& tasks);

CompletenessReport completeness(const EpisodeSet& episodes, const TaskSet& tasks);

/// Uniqueness over (task_uid, config_id, condition, judge_id).
VerdictSet ingest_verdicts(std::vector<Verdict> verdicts);

TaskSet load_tasks(const std::filesystem::path& path);
EpisodeSet load_episodes(const std::filesystem::path& path, const TaskSet& tasks);
VerdictSet load_verdicts(const std::filesystem::path& path);

void save_tasks(const TaskSet& set, const std::filesystem::path& path,
                const std::string& note = "");
void save_episodes(const EpisodeSet& set, const std::filesystem::path& path,
                   const std::string& note = "");
void save_verdicts(const VerdictSet& set, const std::filesystem::path& path,
                   const std::string& note = "");

}  // namespace pairbench
