/// @file det_judge.hpp
/// @brief Deterministic ANSWER-line extraction and verdict computation.
///
/// The extractor is deliberately strict — it is the bench's native scorer for
/// the structured query types and the mechanism behind the format-compliance
/// under-count: a correct answer not expressed on a literal `ANSWER:` line is
/// a FAIL here, by design. Tolerance belongs to the LLM judge path.
///
/// Matching contract:
///  - line-anchored: the marker must open the line (leading whitespace allowed);
///    "THE ANSWER: X" mid-sentence does not match;
///  - the marker is the literal word ANSWER (its own case ignored) followed
///    immediately by ':';
///  - a matching line with an empty payload is not a valid answer line;
///  - when several valid answer lines exist, the last one wins.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pairbench/model.hpp"

namespace pairbench {

inline constexpr const char* kDetJudgeId = "answer-line";

namespace verdict_detail {
inline constexpr const char* kMatch = "match";
inline constexpr const char* kWrongAnswer = "wrong_answer";
inline constexpr const char* kNoAnswerLine = "no_answer_line";
}  // namespace verdict_detail

struct ExtractedAnswer {
  std::string raw_line;
  /// Normalized payload: one token for YES_NO / SINGLE_WORD, the ordered label
  /// sequence for RANKING. Non-empty whenever extraction succeeds.
  std::vector<std::string> canonical;
  std::size_t line_index{};
};

/// Pure function of (response_text, query_type); absence is a value, not an
/// error — it becomes a FAIL verdict downstream. Never called for FREE_FORM.
std::optional<ExtractedAnswer> extract_answer(const std::string& response_text,
                                              QueryType query_type);

/// pass = extraction succeeded AND the canonical payload equals gold under the
/// same normalization. detail is one of verdict_detail::{kMatch, kWrongAnswer,
/// kNoAnswerLine}. Throws ValidationError for FREE_FORM (router bug).
Verdict judge_deterministic(const Episode& episode, const Task& task);

}  // namespace pairbench
