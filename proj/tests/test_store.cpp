#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pairbench/errors.hpp"
#include "pairbench/store.hpp"
#include "temp_dir.hpp"

using namespace pairbench;
using pairbench::testing::TempDir;

namespace {

Task make_task(std::string uid, std::string skill, GoldSpec gold) {
  Task t;
  t.task_uid = std::move(uid);
  t.skill_id = std::move(skill);
  t.gold = std::move(gold);
  t.query_type = gold_query_type(t.gold);
  t.prompt = "prompt for " + t.task_uid;
  return t;
}

TaskSet small_task_set() {
  std::vector<Task> tasks;
  tasks.push_back(make_task("t1", "s-a", YesNoGold{true}));
  tasks.push_back(make_task("t2", "s-a", SingleWordGold{"premise"}));
  tasks.push_back(make_task("t3", "s-b", RankingGold{{"alpha", "beta", "gamma"}}));
  tasks.push_back(make_task("t4", "s-b", FreeFormGold{"rubric text"}));
  return TaskSet(std::move(tasks));
}

Episode make_episode(std::string uid, std::string config, Condition cond, std::string text) {
  Episode e;
  e.task_uid = std::move(uid);
  e.config_id = std::move(config);
  e.condition = cond;
  e.response_text = std::move(text);
  return e;
}

Verdict make_verdict(std::string uid, std::string config, Condition cond, bool pass,
                     std::string judge = "answer-line") {
  Verdict v;
  v.task_uid = std::move(uid);
  v.config_id = std::move(config);
  v.condition = cond;
  v.pass = pass;
  v.judge_path = judge == "answer-line" ? JudgePath::kDeterministic : JudgePath::kLlm;
  v.judge_id = std::move(judge);
  v.detail = pass ? "match" : "no_answer_line";
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("enum round trips") {
  for (QueryType t : {QueryType::kYesNo, QueryType::kSingleWord, QueryType::kRanking,
                      QueryType::kFreeForm})
    CHECK(parse_query_type(to_string(t)) == t);
  for (Condition c : {Condition::kBaseline, Condition::kCurated})
    CHECK(parse_condition(to_string(c)) == c);
  for (JudgePath p : {JudgePath::kDeterministic, JudgePath::kLlm})
    CHECK(parse_judge_path(to_string(p)) == p);
  CHECK(!parse_query_type("YESNO").has_value());
  CHECK(!parse_condition("baseline").has_value());
  CHECK(!parse_judge_path("auto").has_value());
}

TEST_CASE("type mix renders integer and fractional percentages") {
  std::vector<Task> tasks;
  for (int i = 0; i < 122; ++i)
    tasks.push_back(make_task("y" + std::to_string(i), "s", YesNoGold{true}));
  for (int i = 0; i < 33; ++i)
    tasks.push_back(make_task("f" + std::to_string(i), "s", FreeFormGold{"r"}));
  for (int i = 0; i < 23; ++i)
    tasks.push_back(make_task("w" + std::to_string(i), "s", SingleWordGold{"w"}));
  for (int i = 0; i < 22; ++i)
    tasks.push_back(make_task("r" + std::to_string(i), "s", RankingGold{{"a", "b"}}));
  TaskSet set(std::move(tasks));
  TypeMix mix = set.type_mix();
  CHECK(mix.total == 200);
  CHECK(mix.percent(QueryType::kYesNo) == "61%");
  CHECK(mix.percent(QueryType::kFreeForm) == "16.5%");
  CHECK(mix.percent(QueryType::kSingleWord) == "11.5%");
  CHECK(mix.percent(QueryType::kRanking) == "11%");
}

TEST_CASE("task set validation") {
  SUBCASE("duplicate uid") {
    std::vector<Task> tasks;
    tasks.push_back(make_task("t1", "s", YesNoGold{true}));
    tasks.push_back(make_task("t1", "s", YesNoGold{false}));
    CHECK_THROWS_AS(TaskSet(std::move(tasks)), ValidationError);
  }
  SUBCASE("gold variant must match the declared query type") {
    Task t = make_task("t1", "s", YesNoGold{true});
    t.query_type = QueryType::kSingleWord;
    std::vector<Task> tasks{t};
    CHECK_THROWS_AS(TaskSet(std::move(tasks)), ValidationError);
  }
  SUBCASE("ranking gold needs at least two distinct labels") {
    std::vector<Task> one_label{make_task("t1", "s", RankingGold{{"solo"}})};
    CHECK_THROWS_AS(TaskSet(std::move(one_label)), ValidationError);
    std::vector<Task> dup{make_task("t2", "s", RankingGold{{"a", "a"}})};
    CHECK_THROWS_AS(TaskSet(std::move(dup)), ValidationError);
  }
  SUBCASE("find") {
    TaskSet set = small_task_set();
    REQUIRE(set.find("t3") != nullptr);
    CHECK(set.find("t3")->skill_id == "s-b");
    CHECK(set.find("nope") == nullptr);
  }
}

TEST_CASE("episode ingest rejects unknown tasks and duplicates") {
  TaskSet tasks = small_task_set();
  CHECK_THROWS_AS(
      ingest_episodes({make_episode("ghost", "m", Condition::kBaseline, "x")}, tasks),
      ValidationError);
  std::vector<Episode> dup{make_episode("t1", "m", Condition::kBaseline, "x"),
                           make_episode("t1", "m", Condition::kBaseline, "y")};
  CHECK_THROWS_AS(ingest_episodes(std::move(dup), tasks), ValidationError);
  // same task + condition under another config is fine
  std::vector<Episode> ok{make_episode("t1", "m", Condition::kBaseline, "x"),
                          make_episode("t1", "m2", Condition::kBaseline, "y"),
                          make_episode("t1", "m", Condition::kCurated, "z")};
  CHECK(ingest_episodes(std::move(ok), tasks).episodes.size() == 3);
}

TEST_CASE("completeness reports missing cells per config") {
  TaskSet tasks = small_task_set();
  std::vector<Episode> episodes;
  for (const Task& t : tasks.tasks())
    for (Condition c : {Condition::kBaseline, Condition::kCurated})
      episodes.push_back(make_episode(t.task_uid, "full", c, "x"));
  episodes.push_back(make_episode("t1", "partial", Condition::kBaseline, "x"));
  EpisodeSet set = ingest_episodes(std::move(episodes), tasks);
  CompletenessReport report = completeness(set, tasks);
  CHECK(!report.complete());
  REQUIRE(report.missing_by_config.count("partial") == 1);
  CHECK(report.missing_by_config.count("full") == 0);
  CHECK(report.missing_by_config.at("partial").size() == 7);  // 4*2 - 1
  CHECK(report.summary().find("partial") != std::string::npos);
}

TEST_CASE("verdict ingest keys uniqueness on (task, config, condition, judge)") {
  std::vector<Verdict> dup{make_verdict("t1", "m", Condition::kBaseline, true),
                           make_verdict("t1", "m", Condition::kBaseline, false)};
  CHECK_THROWS_AS(ingest_verdicts(std::move(dup)), ValidationError);
  std::vector<Verdict> two_judges{make_verdict("t1", "m", Condition::kBaseline, true, "judge-a"),
                                  make_verdict("t1", "m", Condition::kBaseline, true, "judge-b")};
  CHECK(ingest_verdicts(std::move(two_judges)).verdicts.size() == 2);
}

TEST_CASE("jsonl round trip is byte stable and canonically ordered") {
  TempDir dir("store");
  TaskSet tasks = small_task_set();

  SUBCASE("tasks") {
    save_tasks(tasks, dir / "tasks.jsonl", "demo note");
    TaskSet loaded = load_tasks(dir / "tasks.jsonl");
    CHECK(loaded.size() == tasks.size());
    save_tasks(loaded, dir / "tasks2.jsonl", "demo note");
    CHECK(slurp(dir / "tasks.jsonl") == slurp(dir / "tasks2.jsonl"));
    std::string first_line = slurp(dir / "tasks.jsonl");
    first_line.resize(first_line.find('\n'));
    CHECK(first_line.find("pairbench/tasks") != std::string::npos);
    CHECK(first_line.find("demo note") != std::string::npos);
  }

  SUBCASE("episodes sort by (config, task, condition) regardless of input order") {
    std::vector<Episode> episodes{
        make_episode("t2", "m", Condition::kCurated, "b"),
        make_episode("t1", "m", Condition::kCurated, "a\nmultiline \"quoted\""),
        make_episode("t1", "m", Condition::kBaseline, "c"),
    };
    episodes[0].meta["temp"] = "0.2";
    EpisodeSet set = ingest_episodes(std::move(episodes), tasks);
    save_episodes(set, dir / "eps.jsonl", "ep note");
    EpisodeSet loaded = load_episodes(dir / "eps.jsonl", tasks);
    REQUIRE(loaded.episodes.size() == 3);
    save_episodes(loaded, dir / "eps2.jsonl", "ep note");
    CHECK(slurp(dir / "eps.jsonl") == slurp(dir / "eps2.jsonl"));
    // canonical order in the file: t1/BASELINE, t1/CURATED, t2/CURATED
    std::string text = slurp(dir / "eps.jsonl");
    CHECK(text.find("\"c\"") < text.find("multiline"));
    CHECK(text.find("multiline") < text.find("\"b\""));
  }

  SUBCASE("verdicts keep their note and 'detail' field") {
    std::vector<Verdict> verdicts{make_verdict("t1", "m", Condition::kBaseline, true),
                                  make_verdict("t1", "m", Condition::kCurated, false)};
    VerdictSet set = ingest_verdicts(std::move(verdicts));
    set.note = "derivation: demo";
    save_verdicts(set, dir / "v.jsonl");
    VerdictSet loaded = load_verdicts(dir / "v.jsonl");
    CHECK(loaded.note == "derivation: demo");
    REQUIRE(loaded.verdicts.size() == 2);
    CHECK(loaded.verdicts[0].detail == "match");
    save_verdicts(loaded, dir / "v2.jsonl");
    CHECK(slurp(dir / "v.jsonl") == slurp(dir / "v2.jsonl"));
  }
}

TEST_CASE("loaders reject malformed files") {
  TempDir dir("store-bad");
  auto write = [&dir](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name);
    out << content;
    return dir / name;
  };
  CHECK_THROWS_AS(load_verdicts(write("empty.jsonl", "")), ValidationError);
  CHECK_THROWS_AS(
      load_verdicts(write("wrong-kind.jsonl",
                          R"({"format":"pairbench/tasks","version":1})" "\n")),
      ValidationError);
  CHECK_THROWS_AS(
      load_verdicts(write("bad-version.jsonl",
                          R"({"format":"pairbench/verdicts","version":99})" "\n")),
      ValidationError);
  CHECK_THROWS_AS(load_tasks(write("not-json.jsonl",
                                   R"({"format":"pairbench/tasks","version":1})" "\n"
                                   "{oops\n")),
                  ValidationError);
  CHECK_THROWS_AS(
      load_tasks(write("missing-field.jsonl",
                       R"({"format":"pairbench/tasks","version":1})" "\n"
                       R"({"task_uid":"t1"})" "\n")),
      ValidationError);
  TaskSet tasks = small_task_set();
  CHECK_THROWS_AS(
      load_episodes(write("bad-cond.jsonl",
                          R"({"format":"pairbench/episodes","version":1})" "\n"
                          R"({"task_uid":"t1","config_id":"m","condition":"MIDDLE","response_text":"x"})" "\n"),
                    tasks),
      ValidationError);
}

TEST_CASE("unknown fields survive a round trip via extras") {
  TempDir dir("store-extras");
  std::ofstream out(dir / "v.jsonl");
  out << R"({"format":"pairbench/verdicts","version":1})" << "\n"
      << R"({"task_uid":"t1","config_id":"m","condition":"BASELINE","pass":true,)"
      << R"("judge_path":"DETERMINISTIC","judge_id":"answer-line","custom":"kept"})" << "\n";
  out.close();
  VerdictSet set = load_verdicts(dir / "v.jsonl");
  REQUIRE(set.verdicts.size() == 1);
  CHECK(set.verdicts[0].extras_json.find("kept") != std::string::npos);
  save_verdicts(set, dir / "v2.jsonl");
  CHECK(slurp(dir / "v2.jsonl").find("\"custom\":\"kept\"") != std::string::npos);
}
