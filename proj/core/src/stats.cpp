#include "pairbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "pairbench/rng.hpp"

namespace pairbench {

PairedTable PairedOutcomes::table() const {
  PairedTable t;
  for (PairCell cell : cells) {
    switch (cell) {
      case PairCell::kBothPass: ++t.both_pass; break;
      case PairCell::kOnlyCurated: ++t.only_curated; break;
      case PairCell::kOnlyBaseline: ++t.only_baseline; break;
      case PairCell::kBothFail: ++t.both_fail; break;
    }
  }
  return t;
}

PairedOutcomes pair(const VerdictSet& verdicts, const std::string& config_id) {
  struct Slot {
    std::optional<bool> bl, cu;
  };
  std::map<std::string, Slot> by_task;
  for (const Verdict& v : verdicts.verdicts) {
    if (v.config_id != config_id) continue;
    Slot& slot = by_task[v.task_uid];
    std::optional<bool>& cell = v.condition == Condition::kBaseline ? slot.bl : slot.cu;
    if (cell.has_value())
      throw CoverageError("pair: task '" + v.task_uid + "' has more than one " +
                          to_string(v.condition) + " verdict for config '" + config_id +
                          "' (mixed judge outputs in one input?)");
    cell = v.pass;
  }
  if (by_task.empty())
    throw CoverageError("pair: no verdicts for config '" + config_id + "'");
  PairedOutcomes out;
  for (const auto& [uid, slot] : by_task) {
    if (!slot.bl.has_value() || !slot.cu.has_value())
      throw CoverageError("pair: task '" + uid + "' is missing its " +
                          to_string(slot.bl ? Condition::kCurated : Condition::kBaseline) +
                          " verdict for config '" + config_id + "'");
    out.task_uids.push_back(uid);
    if (*slot.bl && *slot.cu)
      out.cells.push_back(PairCell::kBothPass);
    else if (*slot.cu)
      out.cells.push_back(PairCell::kOnlyCurated);
    else if (*slot.bl)
      out.cells.push_back(PairCell::kOnlyBaseline);
    else
      out.cells.push_back(PairCell::kBothFail);
  }
  return out;
}

DeltaStats delta(const PairedTable& table) {
  std::int64_t n = table.n();
  if (n == 0) throw ValidationError("delta: empty paired table");
  DeltaStats d;
  d.n = n;
  d.pass_bl = Rational(table.both_pass + table.only_baseline, n);
  d.pass_cu = Rational(table.both_pass + table.only_curated, n);
  d.delta = d.pass_cu - d.pass_bl;
  return d;
}

double chi2_tail_1df(double x) { return std::erfc(std::sqrt(x / 2.0)); }

namespace {

/// Exact two-sided binomial p: min(1, 2·P(Bin(n, 1/2) <= k)). Only reached for
/// n < kMcnemarChi2Threshold, so the binomial sums fit comfortably in 64 bits.
Rational exact_binomial_two_sided(std::int64_t n, std::int64_t k) {
  std::uint64_t cumulative = 0;
  std::uint64_t coeff = 1;  // C(n, 0)
  for (std::int64_t i = 0; i <= k; ++i) {
    cumulative += coeff;
    coeff = coeff * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  }
  Rational p = Rational(2, 1) * Rational(static_cast<std::int64_t>(cumulative),
                                         static_cast<std::int64_t>(1ull << n));
  return p > Rational(1) ? Rational(1) : p;
}

}  // namespace

McNemarResult mcnemar(const PairedTable& table) {
  std::int64_t b = table.only_curated;
  std::int64_t c = table.only_baseline;
  if (b + c == 0)
    throw ValidationError("mcnemar: degenerate table, no discordant pairs to test");
  McNemarResult r;
  r.discordant = {b, c};
  if (b + c >= kMcnemarChi2Threshold) {
    r.variant = McNemarVariant::kChi2Continuity;
    std::int64_t d = b > c ? b - c : c - b;
    std::int64_t corrected = d >= 1 ? d - 1 : 0;
    r.statistic = Rational(corrected * corrected, b + c);
    r.p_value = chi2_tail_1df(r.statistic->to_double());
  } else {
    r.variant = McNemarVariant::kExactBinomial;
    r.p_value = exact_binomial_two_sided(b + c, std::min(b, c)).to_double();
  }
  return r;
}

namespace {

struct CellCounts {
  std::int64_t b{0}, c{0};
};

/// One bootstrap resample of `cells`, drawn from its own deterministic stream.
CellCounts resample_cells(const std::vector<PairCell>& cells, std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  CellCounts counts;
  auto n = static_cast<std::uint64_t>(cells.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    PairCell cell = cells[rng.bounded(n)];
    if (cell == PairCell::kOnlyCurated) ++counts.b;
    else if (cell == PairCell::kOnlyBaseline) ++counts.c;
  }
  return counts;
}

}  // namespace

BootstrapCI paired_bootstrap_ci(const PairedOutcomes& pairs, int n_resamples, std::uint64_t seed) {
  if (pairs.cells.empty()) throw ValidationError("paired_bootstrap_ci: no pairs");
  if (n_resamples < 1) throw ValidationError("paired_bootstrap_ci: n_resamples must be >= 1");
  auto n = static_cast<std::int64_t>(pairs.cells.size());
  std::vector<double> deltas(static_cast<std::size_t>(n_resamples));
  for (int i = 0; i < n_resamples; ++i) {
    CellCounts counts = resample_cells(pairs.cells, resample_stream_seed(seed, i));
    deltas[static_cast<std::size_t>(i)] =
        static_cast<double>(counts.b - counts.c) / static_cast<double>(n);
  }
  std::sort(deltas.begin(), deltas.end());
  BootstrapCI ci;
  ci.point = delta(pairs.table()).delta;
  ci.lo = percentile_sorted(deltas, 0.025);
  ci.hi = percentile_sorted(deltas, 0.975);
  ci.n_resamples = n_resamples;
  ci.seed = seed;
  return ci;
}

SaturationTest saturation_test(const PairedOutcomes& pairs_a, const PairedOutcomes& pairs_b,
                               int n_resamples, std::uint64_t seed) {
  if (pairs_a.cells.empty() || pairs_b.cells.empty())
    throw ValidationError("saturation_test: empty pair set");
  if (n_resamples < 1) throw ValidationError("saturation_test: n_resamples must be >= 1");
  auto na = static_cast<std::int64_t>(pairs_a.cells.size());
  auto nb = static_cast<std::int64_t>(pairs_b.cells.size());
  std::vector<double> diffs(static_cast<std::size_t>(n_resamples));
  std::int64_t null_side = 0;
  for (int i = 0; i < n_resamples; ++i) {
    // one stream per resample: A's indices first, then B's
    Rng rng(resample_stream_seed(seed, i));
    CellCounts a, b;
    for (std::int64_t j = 0; j < na; ++j) {
      PairCell cell = pairs_a.cells[rng.bounded(static_cast<std::uint64_t>(na))];
      if (cell == PairCell::kOnlyCurated) ++a.b;
      else if (cell == PairCell::kOnlyBaseline) ++a.c;
    }
    for (std::int64_t j = 0; j < nb; ++j) {
      PairCell cell = pairs_b.cells[rng.bounded(static_cast<std::uint64_t>(nb))];
      if (cell == PairCell::kOnlyCurated) ++b.b;
      else if (cell == PairCell::kOnlyBaseline) ++b.c;
    }
    // Δ_A − Δ_B <= 0 compared exactly in integers; ties count toward the null
    if ((a.b - a.c) * nb <= (b.b - b.c) * na) ++null_side;
    diffs[static_cast<std::size_t>(i)] = static_cast<double>(a.b - a.c) / static_cast<double>(na) -
                                         static_cast<double>(b.b - b.c) / static_cast<double>(nb);
  }
  std::sort(diffs.begin(), diffs.end());
  SaturationTest t;
  t.delta_diff = delta(pairs_a.table()).delta - delta(pairs_b.table()).delta;
  t.ci_lo = percentile_sorted(diffs, 0.025);
  t.ci_hi = percentile_sorted(diffs, 0.975);
  t.p_one_sided = static_cast<double>(null_side) / static_cast<double>(n_resamples);
  t.n_resamples = n_resamples;
  t.seed = seed;
  return t;
}

std::string KappaResult::agreement_percent() const {
  return (p_o * Rational(100)).to_fixed(2) + "%";
}

KappaResult cohen_kappa(const VerdictSet& judge1, const VerdictSet& judge2,
                        const std::string& config_id) {
  auto collect = [&config_id](const VerdictSet& set) {
    std::map<std::pair<std::string, Condition>, bool> out;
    for (const Verdict& v : set.verdicts) {
      if (v.config_id != config_id) continue;
      if (!out.emplace(std::make_pair(v.task_uid, v.condition), v.pass).second)
        throw CoverageError("cohen_kappa: duplicate verdict for (" + v.task_uid + ", " +
                            to_string(v.condition) + ") in one judge's set");
    }
    return out;
  };
  auto a = collect(judge1);
  auto b = collect(judge2);
  if (a.empty()) throw CoverageError("cohen_kappa: no verdicts for config '" + config_id + "'");
  if (a.size() != b.size())
    throw CoverageError("cohen_kappa: episode coverage differs between judges (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  std::int64_t n = 0, agree = 0, pass1 = 0, pass2 = 0;
  for (const auto& [key, pass_a] : a) {
    auto it = b.find(key);
    if (it == b.end())
      throw CoverageError("cohen_kappa: judge 2 is missing (" + key.first + ", " +
                          to_string(key.second) + ")");
    ++n;
    if (pass_a == it->second) ++agree;
    if (pass_a) ++pass1;
    if (it->second) ++pass2;
  }
  KappaResult r;
  r.n = n;
  r.p_o = Rational(agree, n);
  Rational p1(pass1, n), p2(pass2, n);
  r.p_e = p1 * p2 + (Rational(1) - p1) * (Rational(1) - p2);
  if (r.p_e == Rational(1))
    throw ValidationError("cohen_kappa: undefined (both judges constant and equal; p_o = " +
                          r.p_o.to_fixed(3) + ")");
  r.kappa = (r.p_o - r.p_e) / (Rational(1) - r.p_e);
  return r;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
  if (x.size() < 2) throw ValidationError("spearman: need >= 2 observations");
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  auto n = static_cast<double>(x.size());
  double mean = (n + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ValidationError("spearman: undefined, zero variance in a rank vector");
  return sxy / std::sqrt(sxx * syy);
}

std::string render_rate(const Rational& r) { return r.to_fixed(3); }

std::string render_p(double p) {
  char buf[48];
  if (p >= 0.01) {
    std::snprintf(buf, sizeof buf, "%.3f", p);
    return buf;
  }
  if (p <= 0.0) return "0.000";
  // below 0.01: two significant figures, fixed notation
  std::snprintf(buf, sizeof buf, "%.1e", p);
  double rounded = 0;
  std::sscanf(buf, "%lf", &rounded);
  if (rounded >= 0.01) {  // rounding crossed the threshold, e.g. 0.00999
    std::snprintf(buf, sizeof buf, "%.3f", rounded);
    return buf;
  }
  int decimals = 1 - static_cast<int>(std::floor(std::log10(rounded)));
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
  return buf;
}

std::string render_chi2(const Rational& statistic) { return statistic.to_fixed(2); }

}  // namespace pairbench
