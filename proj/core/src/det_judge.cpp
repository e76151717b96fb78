#include "pairbench/det_judge.hpp"

#include <algorithm>
#include <cctype>

#include "pairbench/errors.hpp"

namespace pairbench {

namespace {

std::string fold(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_punct_char(char c) {
  return std::string_view(".,!?;:\"'()[]{}").find(c) != std::string_view::npos;
}

std::string strip_trailing_punct(std::string s) {
  while (!s.empty() && is_punct_char(s.back())) s.pop_back();
  return s;
}

std::string strip_surrounding_punct(std::string s) {
  while (!s.empty() && is_punct_char(s.back())) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && is_punct_char(s[b])) ++b;
  return s.substr(b);
}

/// If `line` starts (after leading whitespace) with the marker `ANSWER:`,
/// returns the payload after the colon; otherwise nullopt.
std::optional<std::string> marker_payload(const std::string& line) {
  static constexpr std::string_view kMarker = "answer";
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string::npos) return std::nullopt;
  for (char mc : kMarker) {
    if (i >= line.size() || std::tolower(static_cast<unsigned char>(line[i])) != mc)
      return std::nullopt;
    ++i;
  }
  if (i >= line.size() || line[i] != ':') return std::nullopt;
  return line.substr(i + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    std::string piece = trim(pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start));
    if (!piece.empty()) items.push_back(fold(piece));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return items;
}

std::vector<std::string> normalize_payload(const std::string& payload, QueryType query_type) {
  switch (query_type) {
    case QueryType::kYesNo: {
      std::string token = fold(strip_trailing_punct(trim(payload)));
      if (token == "yes") return {"YES"};
      if (token == "no") return {"NO"};
      return {token};  // non-empty but will never match gold
    }
    case QueryType::kSingleWord:
      return {strip_surrounding_punct(fold(trim(payload)))};
    case QueryType::kRanking: {
      // split on '>' or ',' — whichever yields >= 2 items
      std::vector<std::string> by_gt = split_on(payload, '>');
      if (by_gt.size() >= 2) return by_gt;
      std::vector<std::string> by_comma = split_on(payload, ',');
      if (by_comma.size() >= 2) return by_comma;
      return {strip_surrounding_punct(fold(trim(payload)))};
    }
    case QueryType::kFreeForm:
      break;
  }
  throw ValidationError("extract_answer: FREE_FORM never routes to the deterministic judge");
}

}  // namespace

std::optional<ExtractedAnswer> extract_answer(const std::string& response_text,
                                              QueryType query_type) {
  std::optional<ExtractedAnswer> best;
  std::size_t line_index = 0;
  std::size_t start = 0;
  while (start <= response_text.size()) {
    std::size_t nl = response_text.find('\n', start);
    std::string line = nl == std::string::npos ? response_text.substr(start)
                                               : response_text.substr(start, nl - start);
    if (auto payload = marker_payload(line)) {
      if (!trim(*payload).empty()) {
        std::vector<std::string> canonical = normalize_payload(*payload, query_type);
        if (!canonical.empty() && !canonical.front().empty())
          best = ExtractedAnswer{trim(line), std::move(canonical), line_index};
      }
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
    ++line_index;
  }
  return best;
}

namespace {

bool matches_gold(const ExtractedAnswer& answer, const Task& task) {
  switch (task.query_type) {
    case QueryType::kYesNo: {
      const auto& gold = std::get<YesNoGold>(task.gold);
      return answer.canonical.size() == 1 &&
             answer.canonical.front() == (gold.expected_yes ? "YES" : "NO");
    }
    case QueryType::kSingleWord: {
      const auto& gold = std::get<SingleWordGold>(task.gold);
      return answer.canonical.size() == 1 &&
             answer.canonical.front() == strip_surrounding_punct(fold(trim(gold.expected)));
    }
    case QueryType::kRanking: {
      const auto& gold = std::get<RankingGold>(task.gold);
      if (answer.canonical.size() != gold.expected.size()) return false;
      for (std::size_t i = 0; i < gold.expected.size(); ++i)
        if (answer.canonical[i] != fold(trim(gold.expected[i]))) return false;
      return true;
    }
    case QueryType::kFreeForm:
      break;
  }
  return false;
}

}  // namespace

Verdict judge_deterministic(const Episode& episode, const Task& task) {
  if (task.query_type == QueryType::kFreeForm)
    throw ValidationError("judge_deterministic: FREE_FORM episode dispatched to the deterministic "
                          "judge (router bug) for task '" + task.task_uid + "'");
  Verdict v;
  v.task_uid = episode.task_uid;
  v.config_id = episode.config_id;
  v.condition = episode.condition;
  v.judge_path = JudgePath::kDeterministic;
  v.judge_id = kDetJudgeId;
  auto answer = extract_answer(episode.response_text, task.query_type);
  if (!answer) {
    v.pass = false;
    v.detail = verdict_detail::kNoAnswerLine;
  } else if (matches_gold(*answer, task)) {
    v.pass = true;
    v.detail = verdict_detail::kMatch;
  } else {
    v.pass = false;
    v.detail = verdict_detail::kWrongAnswer;
  }
  return v;
}

}  // namespace pairbench
