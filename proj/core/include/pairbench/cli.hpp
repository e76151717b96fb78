/// @file cli.hpp
/// @brief Command-line surface: fixtures, judge, stats, compare-judges, report.
#pragma once

namespace pairbench {

/// Parses and runs one invocation; returns the process exit code (see
/// errors.hpp: 0 ok, 64 usage, 65 validation, 66 coverage, 69 judge client).
/// Usable in-process by tests; never throws, never calls exit().
int run_cli(int argc, const char* const* argv);

}  // namespace pairbench
