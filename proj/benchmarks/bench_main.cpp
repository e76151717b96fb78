/// Microbenchmarks for the two hot paths: bootstrap resampling and
/// answer-line extraction.
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "pairbench/det_judge.hpp"
#include "pairbench/model.hpp"
#include "pairbench/stats.hpp"

namespace {

pairbench::PairedOutcomes make_pairs(int n) {
  pairbench::PairedOutcomes pairs;
  for (int i = 0; i < n; ++i) {
    pairs.task_uids.push_back("t" + std::to_string(i));
    // fixed 70/15/5/10 mix of cells
    int slot = i % 20;
    pairbench::PairCell cell = pairbench::PairCell::kBothPass;
    if (slot >= 14 && slot < 17) cell = pairbench::PairCell::kOnlyCurated;
    if (slot == 17) cell = pairbench::PairCell::kOnlyBaseline;
    if (slot >= 18) cell = pairbench::PairCell::kBothFail;
    pairs.cells.push_back(cell);
  }
  return pairs;
}

void BM_PairedBootstrap(benchmark::State& state) {
  pairbench::PairedOutcomes pairs = make_pairs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    pairbench::BootstrapCI ci = pairbench::paired_bootstrap_ci(pairs, 1000, 42);
    benchmark::DoNotOptimize(ci.lo);
  }
  state.SetItemsProcessed(state.iterations() * 1000 * state.range(0));
}
BENCHMARK(BM_PairedBootstrap)->Arg(200)->Arg(1000);

void BM_SaturationTest(benchmark::State& state) {
  pairbench::PairedOutcomes a = make_pairs(static_cast<int>(state.range(0)));
  pairbench::PairedOutcomes b = make_pairs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    pairbench::SaturationTest s = pairbench::saturation_test(a, b, 1000, 42);
    benchmark::DoNotOptimize(s.p_one_sided);
  }
  state.SetItemsProcessed(state.iterations() * 1000 * 2 * state.range(0));
}
BENCHMARK(BM_SaturationTest)->Arg(200);

void BM_ExtractAnswer(benchmark::State& state) {
  std::string response =
      "Working through the options one by one.\n"
      "The first candidate contradicts the premise, so it is out.\n"
      "ANSWER: maybe\n"
      "On reflection the second reading holds after all.\n"
      "Some more deliberation text padding this response out a little.\n"
      "ANSWER: yes\n";
  for (auto _ : state) {
    auto extracted = pairbench::extract_answer(response, pairbench::QueryType::kYesNo);
    benchmark::DoNotOptimize(extracted);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(response.size()));
}
BENCHMARK(BM_ExtractAnswer);

void BM_JudgeDeterministic(benchmark::State& state) {
  pairbench::Task task;
  task.task_uid = "t1";
  task.skill_id = "s";
  task.query_type = pairbench::QueryType::kRanking;
  task.gold = pairbench::RankingGold{{"alpha", "beta", "gamma", "delta"}};
  pairbench::Episode episode;
  episode.task_uid = "t1";
  episode.config_id = "bench";
  episode.condition = pairbench::Condition::kBaseline;
  episode.response_text =
      "Considering the pairwise comparisons in turn before committing.\n"
      "ANSWER: Alpha > Beta > Gamma > Delta\n";
  for (auto _ : state) {
    pairbench::Verdict v = pairbench::judge_deterministic(episode, task);
    benchmark::DoNotOptimize(v.pass);
  }
}
BENCHMARK(BM_JudgeDeterministic);

}  // namespace

BENCHMARK_MAIN();
