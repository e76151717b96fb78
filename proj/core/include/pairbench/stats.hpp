/// @file stats.hpp
/// @brief Paired estimators and tests: Δ, McNemar, bootstrap CIs, the
/// cross-model saturation test, Cohen's κ, Spearman ρ, Bonferroni.
///
/// Counts and rates are exact rationals throughout; floating point enters only
/// in the χ²/binomial tail evaluations and in bootstrap percentiles.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pairbench/errors.hpp"
#include "pairbench/model.hpp"
#include "pairbench/rational.hpp"
#include "pairbench/store.hpp"

namespace pairbench {

/// Outcome of one task's (baseline, curated) verdict pair.
enum class PairCell { kBothPass, kOnlyCurated, kOnlyBaseline, kBothFail };

struct PairedTable {
  std::int64_t both_pass{0};
  std::int64_t only_curated{0};   // "b": curated pass, baseline fail
  std::int64_t only_baseline{0};  // "c": baseline pass, curated fail
  std::int64_t both_fail{0};

  std::int64_t n() const { return both_pass + only_curated + only_baseline + both_fail; }
  std::int64_t discordant() const { return only_curated + only_baseline; }
};

/// Per-task cells in task_uid order, with uids retained for resampling audit.
struct PairedOutcomes {
  std::vector<std::string> task_uids;
  std::vector<PairCell> cells;

  PairedTable table() const;
};

/// Pairs one configuration's verdicts. Requires a paired-complete set: exactly
/// one verdict per (task, condition); a second verdict for the same episode
/// (e.g. two judges' outputs mixed in one input) is a pairing error.
PairedOutcomes pair(const VerdictSet& verdicts, const std::string& config_id);

struct DeltaStats {
  std::int64_t n{0};
  Rational pass_bl;
  Rational pass_cu;
  Rational delta;  // pass_cu - pass_bl == (only_curated - only_baseline)/n
};

DeltaStats delta(const PairedTable& table);

enum class McNemarVariant { kChi2Continuity, kExactBinomial };

struct McNemarResult {
  McNemarVariant variant{};
  std::optional<Rational> statistic;  // χ² value; absent for the exact variant
  double p_value{};
  std::pair<std::int64_t, std::int64_t> discordant;  // (only_curated, only_baseline)
};

/// Discordant-count threshold for the χ² variant (exact binomial below it).
constexpr std::int64_t kMcnemarChi2Threshold = 25;

/// b + c == 0 (no discordance to test) throws ValidationError.
McNemarResult mcnemar(const PairedTable& table);

/// Upper-tail probability of the χ² distribution with one degree of freedom,
/// via the complementary error function.
double chi2_tail_1df(double x);

struct BootstrapCI {
  Rational point;  // Δ of the original sample
  double lo{};
  double hi{};
  int n_resamples{};
  std::uint64_t seed{};
};

constexpr int kDefaultResamples = 10000;

/// Percentile bootstrap over tasks resampled with replacement. Deterministic
/// for fixed (pairs, seed, n_resamples) and parallelism-invariant.
BootstrapCI paired_bootstrap_ci(const PairedOutcomes& pairs, int n_resamples = kDefaultResamples,
                                std::uint64_t seed = 0);

struct SaturationTest {
  Rational delta_diff;  // Δ_A − Δ_B on the original samples
  double ci_lo{};
  double ci_hi{};
  double p_one_sided{};  // fraction of resamples with Δ_A − Δ_B <= 0 (ties count)
  int n_resamples{};
  std::uint64_t seed{};
};

/// Independent resampling of A and B per resample; one-sided test of
/// H0: Δ_A <= Δ_B against the observed Δ_A > Δ_B direction. Ties (diff = 0)
/// count toward the null.
SaturationTest saturation_test(const PairedOutcomes& pairs_a, const PairedOutcomes& pairs_b,
                               int n_resamples = kDefaultResamples, std::uint64_t seed = 0);

struct KappaResult {
  std::int64_t n{0};
  Rational p_o;  // observed agreement
  Rational p_e;  // expected agreement from the two marginal pass rates
  Rational kappa;

  /// Agreement as a percentage string, e.g. "98.50%".
  std::string agreement_percent() const;
};

/// Binary-class κ over episodes pooled across both conditions of one config.
/// Coverage of the two verdict sets must be identical. p_e == 1 (both judges
/// constant and equal) throws ValidationError carrying p_o in its message.
KappaResult cohen_kappa(const VerdictSet& judge1, const VerdictSet& judge2,
                        const std::string& config_id);

/// Spearman rank correlation with average ranks for ties.
/// Zero variance in either rank vector throws ValidationError.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

inline double bonferroni(double p, int m) {
  if (m < 1) throw ValidationError("bonferroni: test count must be >= 1");
  double adjusted = p * m;
  return adjusted > 1.0 ? 1.0 : adjusted;
}

/// Report rendering conventions: rates at 3 decimals; p-values at 2
/// significant figures below 0.01 and 3 decimals otherwise; χ² at 2 decimals.
std::string render_rate(const Rational& r);
std::string render_p(double p);
std::string render_chi2(const Rational& statistic);

}  // namespace pairbench
