/// @file errors.hpp
/// @brief Error taxonomy; each class maps to one CLI exit code.
#pragma once

#include <stdexcept>
#include <string>

namespace pairbench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown flag, missing argument, malformed flag value. Exit 64.
struct UsageError : Error {
  using Error::Error;
};

/// Malformed or inconsistent data: schema violations, duplicate ids,
/// gold/query-type mismatches, undefined statistics. Exit 65.
struct ValidationError : Error {
  using Error::Error;
};

/// Incomplete inputs: missing (task, condition) cells, pairing gaps,
/// verdict-coverage gaps between inputs that must align. Exit 66.
struct CoverageError : Error {
  using Error::Error;
};

/// Remote judge failure after the retry budget is spent. Exit 69.
struct JudgeClientError : Error {
  using Error::Error;
};

namespace exit_code {
constexpr int kOk = 0;
constexpr int kUsage = 64;
constexpr int kValidation = 65;
constexpr int kCoverage = 66;
constexpr int kJudgeClient = 69;
}  // namespace exit_code

}  // namespace pairbench
