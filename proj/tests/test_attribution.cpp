#include <doctest.h>

#include <string>
#include <vector>

#include "pairbench/attribution.hpp"
#include "pairbench/errors.hpp"

using namespace pairbench;

namespace {

DeltaStats ds(std::int64_t n, std::int64_t bl, std::int64_t cu) {
  DeltaStats d;
  d.n = n;
  d.pass_bl = Rational(bl, n);
  d.pass_cu = Rational(cu, n);
  d.delta = d.pass_cu - d.pass_bl;
  return d;
}

Verdict v(const std::string& uid, Condition cond, bool pass) {
  Verdict verdict;
  verdict.task_uid = uid;
  verdict.config_id = "m";
  verdict.condition = cond;
  verdict.pass = pass;
  verdict.judge_path = JudgePath::kDeterministic;
  verdict.judge_id = "answer-line";
  return verdict;
}

Task task_of(const std::string& uid, const std::string& skill) {
  Task t;
  t.task_uid = uid;
  t.skill_id = skill;
  t.query_type = QueryType::kYesNo;
  t.gold = YesNoGold{true};
  t.prompt = "p";
  return t;
}

}  // namespace

TEST_CASE("delta lift subtracts pre from post") {
  CHECK(delta_lift(ds(200, 151, 163), ds(200, 163, 183)) == Rational(8, 200));
  CHECK(delta_lift(ds(200, 151, 163), ds(200, 163, 183)).to_signed_fixed(3) == "+0.040");
  CHECK_THROWS_AS(delta_lift(ds(100, 50, 60), ds(200, 100, 120)), ValidationError);
}

TEST_CASE("attribution split reproduces the scaling/tuning decomposition") {
  SUBCASE("deterministic-extraction view") {
    AttributionSplit s = attribution_split(ds(200, 125, 102), ds(200, 137, 142),
                                           ds(200, 150, 165));
    CHECK(s.base_scaling_bl.to_signed_fixed(3) == "+0.060");
    CHECK(s.base_scaling_cu.to_signed_fixed(3) == "+0.200");
    CHECK(s.sft_bl.to_signed_fixed(3) == "+0.065");
    CHECK(s.sft_cu.to_signed_fixed(3) == "+0.115");
    CHECK(s.total_bl.to_signed_fixed(3) == "+0.125");
    CHECK(s.total_cu.to_signed_fixed(3) == "+0.315");
    CHECK(s.delta_lift_sft.to_signed_fixed(3) == "+0.050");
    // split components add to totals exactly
    CHECK(s.base_scaling_bl + s.sft_bl == s.total_bl);
    CHECK(s.base_scaling_cu + s.sft_cu == s.total_cu);
  }
  SUBCASE("llm-judge view") {
    AttributionSplit s = attribution_split(ds(200, 133, 118), ds(200, 151, 163),
                                           ds(200, 163, 183));
    CHECK(s.base_scaling_bl.to_signed_fixed(3) == "+0.090");
    CHECK(s.base_scaling_cu.to_signed_fixed(3) == "+0.225");
    CHECK(s.sft_bl.to_signed_fixed(3) == "+0.060");
    CHECK(s.sft_cu.to_signed_fixed(3) == "+0.100");
    CHECK(s.total_bl.to_signed_fixed(3) == "+0.150");
    CHECK(s.total_cu.to_signed_fixed(3) == "+0.325");
    CHECK(s.delta_lift_sft.to_signed_fixed(3) == "+0.040");
  }
  SUBCASE("mismatched task counts refuse") {
    CHECK_THROWS_AS(attribution_split(ds(100, 10, 20), ds(200, 10, 20), ds(200, 10, 20)),
                    ValidationError);
    CHECK_THROWS_AS(attribution_split(ds(200, 10, 20), ds(200, 10, 20), ds(100, 10, 20)),
                    ValidationError);
  }
}

TEST_CASE("rejudge shift is the per-condition judge disagreement delta") {
  std::vector<std::pair<std::string, DeltaStats>> det{
      {"v1", ds(200, 127, 117)}, {"v1.9", ds(200, 150, 165)}, {"v2.0", ds(200, 167, 176)},
      {"frontier", ds(200, 157, 160)}};
  std::vector<std::pair<std::string, DeltaStats>> llm{
      {"v1", ds(200, 142, 141)}, {"v1.9", ds(200, 163, 183)}, {"v2.0", ds(200, 184, 197)},
      {"frontier", ds(200, 191, 197)}};
  std::vector<RejudgeShiftRow> rows = rejudge_shift(det, llm);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].shift_bl.to_signed_fixed(3) == "+0.075");
  CHECK(rows[0].shift_cu.to_signed_fixed(3) == "+0.120");
  CHECK(rows[0].shift_delta_delta.to_signed_fixed(3) == "+0.045");
  CHECK(rows[1].shift_bl.to_signed_fixed(3) == "+0.065");
  CHECK(rows[1].shift_cu.to_signed_fixed(3) == "+0.090");
  CHECK(rows[1].shift_delta_delta.to_signed_fixed(3) == "+0.025");
  CHECK(rows[2].shift_bl.to_signed_fixed(3) == "+0.085");
  CHECK(rows[2].shift_cu.to_signed_fixed(3) == "+0.105");
  CHECK(rows[2].shift_delta_delta.to_signed_fixed(3) == "+0.020");
  CHECK(rows[3].shift_bl.to_signed_fixed(3) == "+0.170");
  CHECK(rows[3].shift_cu.to_signed_fixed(3) == "+0.185");
  CHECK(rows[3].shift_delta_delta.to_signed_fixed(3) == "+0.015");
  CHECK(rows[3].config_id == "frontier");

  std::vector<std::pair<std::string, DeltaStats>> short_list{{"v1", ds(200, 1, 2)}};
  CHECK_THROWS_AS(rejudge_shift(det, short_list), ValidationError);
  std::vector<std::pair<std::string, DeltaStats>> renamed = llm;
  renamed[2].first = "other";
  CHECK_THROWS_AS(rejudge_shift(det, renamed), ValidationError);
}

TEST_CASE("per-skill clustering by exact delta sign") {
  std::vector<Task> tasks;
  std::vector<Verdict> verdicts;
  auto add = [&tasks, &verdicts](const std::string& skill, int idx, bool bl, bool cu) {
    std::string uid = skill + "-" + std::to_string(idx);
    tasks.push_back(task_of(uid, skill));
    verdicts.push_back(v(uid, Condition::kBaseline, bl));
    verdicts.push_back(v(uid, Condition::kCurated, cu));
  };
  // lift skill: 1/2 -> 2/2; flat skill: 2/2 -> 2/2; regress skill: 2/2 -> 1/2
  add("skill-lift", 1, false, true);
  add("skill-lift", 2, true, true);
  add("skill-flat", 1, true, true);
  add("skill-flat", 2, true, true);
  add("skill-regress", 1, true, false);
  add("skill-regress", 2, true, true);
  // flat by offsetting flips is still flat
  add("skill-churn", 1, true, false);
  add("skill-churn", 2, false, true);
  TaskSet task_set(tasks);
  VerdictSet verdict_set = ingest_verdicts(verdicts);

  PerSkillResult result = per_skill(verdict_set, task_set, "m");
  CHECK(result.total_tasks == 8);
  REQUIRE(result.reports.size() == 4);
  // reports are sorted by skill_id
  CHECK(result.reports[0].skill_id == "skill-churn");
  CHECK(result.reports[1].skill_id == "skill-flat");
  CHECK(result.reports[2].skill_id == "skill-lift");
  CHECK(result.reports[3].skill_id == "skill-regress");
  CHECK(result.reports[0].cluster == SkillCluster::kFlat);
  CHECK(result.reports[1].cluster == SkillCluster::kFlat);
  CHECK(result.reports[2].cluster == SkillCluster::kLift);
  CHECK(result.reports[3].cluster == SkillCluster::kRegress);
  CHECK(result.reports[2].bl_rate == Rational(1, 2));
  CHECK(result.reports[2].cu_rate == Rational(1));
  CHECK(result.reports[2].delta == Rational(1, 2));
  CHECK(result.census.lift == 1);
  CHECK(result.census.flat == 2);
  CHECK(result.census.regress == 1);
  REQUIRE(result.census.mean_bl_lift.has_value());
  CHECK(*result.census.mean_bl_lift == Rational(1, 2));
  REQUIRE(result.census.mean_bl_flat.has_value());
  CHECK(*result.census.mean_bl_flat == Rational(3, 4));  // mean of 1 and 1/2
  CHECK(to_string(SkillCluster::kLift) == "LIFT");
  CHECK(to_string(SkillCluster::kFlat) == "FLAT");
  CHECK(to_string(SkillCluster::kRegress) == "REGRESS");
}

TEST_CASE("per-skill requires a skill mapping for every paired task") {
  TaskSet tasks(std::vector<Task>{task_of("known", "s")});
  VerdictSet verdicts = ingest_verdicts({v("mystery", Condition::kBaseline, true),
                                         v("mystery", Condition::kCurated, true)});
  CHECK_THROWS_AS(per_skill(verdicts, tasks, "m"), ValidationError);
}

TEST_CASE("skill correlation excludes ceiling skills from the subset rho") {
  std::vector<SkillReport> reports;
  auto add = [&reports](const std::string& id, const Rational& bl, const Rational& delta) {
    SkillReport r;
    r.skill_id = id;
    r.n_tasks = 5;
    r.bl_rate = bl;
    r.cu_rate = bl + delta;
    r.delta = delta;
    r.cluster = delta.sign() > 0 ? SkillCluster::kLift
                : delta.sign() < 0 ? SkillCluster::kRegress
                                   : SkillCluster::kFlat;
    reports.push_back(std::move(r));
  };
  add("a", Rational(1, 5), Rational(3, 5));
  add("b", Rational(2, 5), Rational(2, 5));
  add("c", Rational(3, 5), Rational(1, 5));
  add("d", Rational(1), Rational(0));   // at ceiling
  add("e", Rational(1), Rational(0));   // at ceiling
  SkillCorrelation corr = skill_delta_vs_baseline(reports);
  CHECK(corr.n_all == 5);
  CHECK(corr.n_sub_ceiling == 3);
  CHECK(corr.rho_all < 0.0);  // higher baseline, smaller delta
  REQUIRE(corr.rho_sub_ceiling.has_value());
  CHECK(*corr.rho_sub_ceiling == doctest::Approx(-1.0));

  std::vector<SkillReport> one(reports.begin(), reports.begin() + 1);
  CHECK_THROWS_AS(skill_delta_vs_baseline(one), ValidationError);
}

TEST_CASE("delta sequence counts strict sign alternations, zeros transparent") {
  auto seq = [](std::vector<Rational> deltas) {
    std::vector<std::pair<std::string, DeltaStats>> configs;
    int i = 0;
    for (const Rational& d : deltas) {
      DeltaStats s;
      s.n = 200;
      s.delta = d;
      configs.emplace_back("c" + std::to_string(++i), s);
    }
    return delta_sequence(configs);
  };
  // the characteristic W-shape across scales: -, +, -, +
  DeltaSequence w = seq({Rational(-15, 200), Rational(12, 200), Rational(-2, 200),
                         Rational(6, 200)});
  CHECK(w.sign_changes == 3);
  REQUIRE(w.deltas.size() == 4);
  CHECK(w.deltas[0].first == "c1");
  CHECK(w.deltas[0].second == Rational(-15, 200));
  CHECK(seq({Rational(1, 10), Rational(0), Rational(2, 10)}).sign_changes == 0);
  CHECK(seq({Rational(1, 10), Rational(0), Rational(-2, 10)}).sign_changes == 1);
  CHECK(seq({}).sign_changes == 0);
  CHECK(seq({Rational(1, 10)}).sign_changes == 0);
}
