/// @file model.hpp
/// @brief Domain types: tasks, gold specs, episodes, verdicts.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pairbench {

enum class QueryType { kYesNo, kSingleWord, kRanking, kFreeForm };
enum class Condition { kBaseline, kCurated };
enum class JudgePath { kDeterministic, kLlm };

std::string to_string(QueryType t);
std::string to_string(Condition c);
std::string to_string(JudgePath p);
std::optional<QueryType> parse_query_type(const std::string& s);
std::optional<Condition> parse_condition(const std::string& s);
std::optional<JudgePath> parse_judge_path(const std::string& s);

struct YesNoGold {
  bool expected_yes{};
};
struct SingleWordGold {
  std::string expected;
};
struct RankingGold {
  std::vector<std::string> expected;  // >= 2 distinct labels, order significant
};
struct FreeFormGold {
  std::string rubric;
};

using GoldSpec = std::variant<YesNoGold, SingleWordGold, RankingGold, FreeFormGold>;

/// The QueryType a gold variant belongs with.
QueryType gold_query_type(const GoldSpec& gold);

struct Task {
  std::string task_uid;
  std::string skill_id;
  QueryType query_type{};
  std::string prompt;
  GoldSpec gold;
  std::string extras_json;  // unknown record fields, preserved verbatim on round-trip
};

struct Episode {
  std::string task_uid;
  std::string config_id;  // free-form configuration label; never interpreted
  Condition condition{};
  std::string response_text;
  std::map<std::string, std::string> meta;
  std::string extras_json;
};

struct Verdict {
  std::string task_uid;
  std::string config_id;
  Condition condition{};
  bool pass{};
  JudgePath judge_path{};
  std::string judge_id;
  std::string detail;  // extraction note or judge rationale; optional
  std::string extras_json;
};

struct EpisodeKey {
  std::string config_id;
  std::string task_uid;
  Condition condition{};

  friend bool operator==(const EpisodeKey&, const EpisodeKey&) = default;
  friend bool operator<(const EpisodeKey& a, const EpisodeKey& b) {
    if (a.config_id != b.config_id) return a.config_id < b.config_id;
    if (a.task_uid != b.task_uid) return a.task_uid < b.task_uid;
    return static_cast<int>(a.condition) < static_cast<int>(b.condition);
  }
};

}  // namespace pairbench
