#include "pairbench/fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairbench/errors.hpp"
#include "pairbench/judge_client.hpp"
#include "pairbench/judge_router.hpp"
#include "pairbench/store.hpp"

namespace pairbench {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Inversion oracle

PairedTable invert_cells(std::int64_t n, std::int64_t pass_bl, std::int64_t pass_cu,
                         const ReportedTest& reported) {
  if (pass_bl < 0 || pass_cu < 0 || pass_bl > n || pass_cu > n)
    throw ValidationError("invert_cells: pass counts out of range");
  std::vector<PairedTable> matches;
  std::int64_t c_lo = std::max<std::int64_t>(0, pass_bl - pass_cu);
  std::int64_t c_hi = std::min(pass_bl, n - pass_cu);
  for (std::int64_t c = c_lo; c <= c_hi; ++c) {
    PairedTable t;
    t.only_baseline = c;
    t.only_curated = pass_cu - pass_bl + c;
    t.both_pass = pass_bl - c;
    t.both_fail = n - t.both_pass - t.only_curated - t.only_baseline;
    if (t.discordant() == 0) continue;  // a reported test implies discordance
    McNemarResult r = mcnemar(t);
    if (reported.kind == ReportedTest::Kind::kChi2) {
      if (r.variant != McNemarVariant::kChi2Continuity) continue;
      if (render_chi2(*r.statistic) != reported.rendered) continue;
    } else {
      if (r.variant != McNemarVariant::kExactBinomial) continue;
      if (render_p(r.p_value) != reported.rendered) continue;
    }
    matches.push_back(t);
  }
  if (matches.size() == 1) return matches.front();
  std::string what = reported.kind == ReportedTest::Kind::kChi2 ? "chi-square " : "exact p ";
  if (matches.empty())
    throw ValidationError("invert_cells: no discordant split of pass counts " +
                          std::to_string(pass_bl) + "/" + std::to_string(pass_cu) + " of " +
                          std::to_string(n) + " reproduces " + what + reported.rendered);
  std::string listing;
  for (const PairedTable& t : matches)
    listing += " (b=" + std::to_string(t.only_curated) + ", c=" + std::to_string(t.only_baseline) +
               ")";
  throw ValidationError("invert_cells: ambiguous inversion for " + what + reported.rendered +
                        "; candidates:" + listing);
}

PairedTable minimal_discordance_cells(std::int64_t n, std::int64_t pass_bl,
                                      std::int64_t pass_cu) {
  if (pass_bl < 0 || pass_cu < 0 || pass_bl > n || pass_cu > n)
    throw ValidationError("minimal_discordance_cells: pass counts out of range");
  PairedTable t;
  t.both_pass = std::min(pass_bl, pass_cu);
  t.only_curated = pass_cu - t.both_pass;
  t.only_baseline = pass_bl - t.both_pass;
  t.both_fail = n - t.both_pass - t.only_curated - t.only_baseline;
  return t;
}

// ---------------------------------------------------------------------------
// Static bundle data

namespace {

constexpr int kTaskCount = 200;
constexpr int kSkillCount = 40;
constexpr int kSlots = 5;
constexpr int kFreeFormSkills = 33;  // slot 1 of the first 33 skills is FREE_FORM

/// Slot codes per skill and judge view: 'T' both conditions pass, 'b' curated
/// only, 'c' baseline only, 'f' both fail.
struct SkillLayout {
  const char* name;
  const char* det;  // deterministic-mixed view
  const char* llm;  // LLM-only view
};

constexpr SkillLayout kSkillLayouts[kSkillCount] = {
    {"accident-fallacy", "TTTbb", "TTTbb"},
    {"spatial-reasoning", "TTTbb", "TTTbb"},
    {"false-dilemma", "TTTTb", "TTTTb"},
    {"confirmation-bias", "TTTTb", "TTTTb"},
    {"anchoring-bias", "TTTTb", "TTTTb"},
    {"appeal-to-emotion", "TTTTb", "TTTTb"},
    {"base-rate-neglect", "TTTTb", "TTTTb"},
    {"transitive-inference", "TTTTb", "TTTTb"},
    {"necessary-and-sufficient-conditions", "TTTbf", "TTTbb"},
    {"metaphor", "TTTbf", "TTTbf"},
    {"emotional-self-regulation", "TTTbf", "TTTbf"},
    {"modus-ponens", "TTTTT", "TTTTT"},
    {"modus-tollens", "TTTTT", "TTTTT"},
    {"disjunctive-syllogism", "TTTTT", "TTTTT"},
    {"contrapositive-reasoning", "TTTTT", "TTTTT"},
    {"affirming-the-consequent", "TTTTT", "TTTTT"},
    {"denying-the-antecedent", "TTTTT", "TTTTT"},
    {"ad-hominem", "TTTTT", "TTTTT"},
    {"straw-man", "TTTTT", "TTTTT"},
    {"red-herring", "TTTTT", "TTTTT"},
    {"circular-reasoning", "TTTTT", "TTTTT"},
    {"appeal-to-authority", "TTTTT", "TTTTT"},
    {"bandwagon-effect", "TTTTT", "TTTTT"},
    {"slippery-slope", "TTTTf", "TTTTT"},
    {"hasty-generalization", "TTTTf", "TTTTT"},
    {"post-hoc-ergo-propter-hoc", "TTTTf", "TTTTT"},
    {"sunk-cost-fallacy", "TTTTf", "TTTTT"},
    {"availability-heuristic", "TTTTf", "TTTTT"},
    {"halo-effect", "TTTTf", "TTTTT"},
    {"gamblers-fallacy", "TTTTf", "TTTTT"},
    {"irony-detection", "TTTTf", "TTTTT"},
    {"perspective-taking", "TTTTf", "TTTTT"},
    {"counterfactual-reasoning", "TTTTf", "TTTTT"},
    {"analogy-mapping", "TTTff", "TTTTT"},
    {"sarcasm-detection", "TTTff", "TTTTT"},
    {"double-negation", "TTfff", "TTTTT"},
    {"complex-question", "TTTTc", "TTTTT"},
    {"hypothetical-syllogism", "TTTTc", "TTTTT"},
    {"framing-effect", "TTTTc", "TTTTT"},
    {"equivocation", "TTTTc", "TTTTc"},
};

/// Per-config marginals and, where one exists, the reported paired test the
/// cells are inverted from. Judge-b overlay flips are fixed episode counts
/// applied in (condition asc, task_uid asc) order.
struct ConfigSpec {
  const char* config_id;
  const char* scale;
  bool post_sft;
  int llm_bl, llm_cu;  // LLM-only (judge-a) pass counts of 200
  int det_bl, det_cu;  // deterministic-mixed pass counts of 200
  bool det_artifact;   // det view recorded as the all-fail extraction row
  const ReportedTest* det_test;
  const ReportedTest* llm_test;
  int bl_p2f, bl_f2p, cu_p2f, cu_f2p;  // judge-b flips
};

const ReportedTest kDetV19{ReportedTest::Kind::kChi2, "5.60"};
const ReportedTest kLlmV19{ReportedTest::Kind::kChi2, "9.03"};
const ReportedTest kDetV20{ReportedTest::Kind::kExactP, "0.049"};
const ReportedTest kLlmV20{ReportedTest::Kind::kExactP, "0.00098"};

const ConfigSpec kConfigs[] = {
    {"base-0.8b", "0.8b", false, 133, 118, 125, 102, false, nullptr, nullptr, 1, 2, 2, 1},
    {"base-2b", "2b", false, 151, 163, 137, 142, false, nullptr, nullptr, 1, 0, 0, 4},
    {"base-4b", "4b", false, 170, 168, 0, 0, true, nullptr, nullptr, 10, 10, 7, 0},
    {"ref-frontier", "frontier", false, 191, 197, 157, 160, false, nullptr, nullptr, 0, 0, 2, 0},
    {"student-v1", "0.8b", true, 142, 141, 127, 117, false, nullptr, nullptr, 2, 0, 1, 0},
    {"student-v1.9", "2b", true, 163, 183, 150, 165, false, &kDetV19, &kLlmV19, 0, 0, 0, 0},
    {"student-v2.0", "4b", true, 184, 197, 167, 176, false, &kDetV20, &kLlmV20, 0, 0, 1, 0},
};

constexpr const char* kDetJudge = "answer-line";
constexpr const char* kLlmJudgeA = "judge-a";
constexpr const char* kLlmJudgeB = "judge-b";
constexpr const char* kV20 = "student-v2.0";

// ---------------------------------------------------------------------------
// Task synthesis

std::string task_uid(int index) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "t%03d", index + 1);
  return buf;
}

bool is_free_form_index(int index) {
  return index % kSlots == 0 && index / kSlots < kFreeFormSkills;
}

const char* const kWords[] = {"premise",   "fallacy", "bias",    "inference",
                              "heuristic", "analogy", "framing", "contrast"};

const char* const kPermutations[][3] = {
    {"alpha", "beta", "gamma"}, {"alpha", "gamma", "beta"}, {"beta", "alpha", "gamma"},
    {"beta", "gamma", "alpha"}, {"gamma", "alpha", "beta"}, {"gamma", "beta", "alpha"},
};

std::vector<Task> make_tasks() {
  std::vector<Task> tasks;
  tasks.reserve(kTaskCount);
  int non_ff_seen = 0;
  for (int i = 0; i < kTaskCount; ++i) {
    Task t;
    t.task_uid = task_uid(i);
    t.skill_id = kSkillLayouts[i / kSlots].name;
    if (is_free_form_index(i)) {
      t.query_type = QueryType::kFreeForm;
      t.prompt = "Scenario " + t.task_uid + ": explain how the " + t.skill_id +
                 " procedure applies here and state your conclusion.";
      t.gold = FreeFormGold{"The response applies the " + t.skill_id +
                            " procedure and reaches a conclusion consistent with it."};
    } else {
      // non-free-form tasks in uid order: 122 YES_NO, 23 SINGLE_WORD, 22 RANKING
      if (non_ff_seen < 122) {
        t.query_type = QueryType::kYesNo;
        t.prompt = "Scenario " + t.task_uid +
                   ": does the conclusion follow from the premises? Reply with ANSWER: YES "
                   "or ANSWER: NO.";
        t.gold = YesNoGold{i % 2 == 0};
      } else if (non_ff_seen < 145) {
        t.query_type = QueryType::kSingleWord;
        t.prompt = "Scenario " + t.task_uid +
                   ": name the reasoning pattern in one word. Reply with ANSWER: <word>.";
        t.gold = SingleWordGold{kWords[i % 8]};
      } else {
        t.query_type = QueryType::kRanking;
        const auto& order = kPermutations[i % 6];
        t.prompt = "Scenario " + t.task_uid +
                   ": rank the options alpha, beta, gamma from strongest to weakest. Reply "
                   "with ANSWER: first > second > third.";
        t.gold = RankingGold{{order[0], order[1], order[2]}};
      }
      ++non_ff_seen;
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

// ---------------------------------------------------------------------------
// Cell layouts -> paired cells, verdicts, episodes

PairCell cell_from_code(char code) {
  switch (code) {
    case 'T': return PairCell::kBothPass;
    case 'b': return PairCell::kOnlyCurated;
    case 'c': return PairCell::kOnlyBaseline;
    case 'f': return PairCell::kBothFail;
    default: throw ValidationError(std::string("unknown slot code '") + code + "'");
  }
}

bool bl_pass(PairCell c) { return c == PairCell::kBothPass || c == PairCell::kOnlyBaseline; }
bool cu_pass(PairCell c) { return c == PairCell::kBothPass || c == PairCell::kOnlyCurated; }

std::vector<PairCell> layout_cells(bool llm_view) {
  std::vector<PairCell> cells(kTaskCount);
  for (int k = 0; k < kSkillCount; ++k) {
    const char* codes = llm_view ? kSkillLayouts[k].llm : kSkillLayouts[k].det;
    for (int s = 0; s < kSlots; ++s) cells[k * kSlots + s] = cell_from_code(codes[s]);
  }
  return cells;
}

PairedTable table_from_cells(const std::vector<PairCell>& cells) {
  PairedTable t;
  for (PairCell c : cells) {
    switch (c) {
      case PairCell::kBothPass: ++t.both_pass; break;
      case PairCell::kOnlyCurated: ++t.only_curated; break;
      case PairCell::kOnlyBaseline: ++t.only_baseline; break;
      case PairCell::kBothFail: ++t.both_fail; break;
    }
  }
  return t;
}

bool same_table(const PairedTable& a, const PairedTable& b) {
  return a.both_pass == b.both_pass && a.only_curated == b.only_curated &&
         a.only_baseline == b.only_baseline && a.both_fail == b.both_fail;
}

std::string table_str(const PairedTable& t) {
  return "(" + std::to_string(t.both_pass) + "," + std::to_string(t.only_curated) + "," +
         std::to_string(t.only_baseline) + "," + std::to_string(t.both_fail) + ")";
}

/// Fills 200 cells from a table: the 33 free-form slots take both-pass, the
/// remaining task uids in order take the remaining both-pass count, then
/// only-curated, only-baseline, both-fail.
std::vector<PairCell> generic_cells(const PairedTable& t) {
  if (t.both_pass < kFreeFormSkills)
    throw ValidationError("fixture layout needs >= " + std::to_string(kFreeFormSkills) +
                          " both-pass tasks to cover the free-form subset, got " +
                          std::to_string(t.both_pass));
  std::vector<PairCell> cells(kTaskCount, PairCell::kBothPass);
  std::int64_t tt = t.both_pass - kFreeFormSkills;
  std::int64_t b = t.only_curated, c = t.only_baseline;
  for (int i = 0; i < kTaskCount; ++i) {
    if (is_free_form_index(i)) continue;
    if (tt > 0) { --tt; continue; }
    if (b > 0) { cells[i] = PairCell::kOnlyCurated; --b; continue; }
    if (c > 0) { cells[i] = PairCell::kOnlyBaseline; --c; continue; }
    cells[i] = PairCell::kBothFail;
  }
  return cells;
}

Verdict make_verdict(const std::string& config_id, const std::string& uid, Condition cond,
                     bool pass, JudgePath path, const std::string& judge_id,
                     const std::string& detail) {
  Verdict v;
  v.task_uid = uid;
  v.config_id = config_id;
  v.condition = cond;
  v.pass = pass;
  v.judge_path = path;
  v.judge_id = judge_id;
  v.detail = detail;
  return v;
}

VerdictSet llm_view_verdicts(const std::string& config_id, const std::vector<PairCell>& cells) {
  VerdictSet set;
  for (int i = 0; i < kTaskCount; ++i) {
    std::string uid = task_uid(i);
    set.verdicts.push_back(make_verdict(config_id, uid, Condition::kBaseline, bl_pass(cells[i]),
                                        JudgePath::kLlm, kLlmJudgeA, "llm_verdict"));
    set.verdicts.push_back(make_verdict(config_id, uid, Condition::kCurated, cu_pass(cells[i]),
                                        JudgePath::kLlm, kLlmJudgeA, "llm_verdict"));
  }
  return set;
}

/// Synthesized deterministic-mixed view: free-form slots carry the judge-a
/// verdicts (identical records to the LLM view), everything else carries
/// answer-line verdicts realizing `cells`.
VerdictSet det_view_verdicts(const std::string& config_id, const std::vector<PairCell>& cells) {
  VerdictSet set;
  for (int i = 0; i < kTaskCount; ++i) {
    std::string uid = task_uid(i);
    bool ff = is_free_form_index(i);
    JudgePath path = ff ? JudgePath::kLlm : JudgePath::kDeterministic;
    std::string judge = ff ? kLlmJudgeA : kDetJudge;
    bool bl = bl_pass(cells[i]), cu = cu_pass(cells[i]);
    auto detail = [ff](bool pass) {
      return ff ? "llm_verdict" : (pass ? "match" : "no_answer_line");
    };
    set.verdicts.push_back(
        make_verdict(config_id, uid, Condition::kBaseline, bl, path, judge, detail(bl)));
    set.verdicts.push_back(
        make_verdict(config_id, uid, Condition::kCurated, cu, path, judge, detail(cu)));
  }
  return set;
}

VerdictSet artifact_det_verdicts(const std::string& config_id) {
  VerdictSet set;
  for (int i = 0; i < kTaskCount; ++i) {
    std::string uid = task_uid(i);
    for (Condition cond : {Condition::kBaseline, Condition::kCurated})
      set.verdicts.push_back(make_verdict(config_id, uid, cond, false, JudgePath::kDeterministic,
                                          kDetJudge, "no_answer_line"));
  }
  return set;
}

/// Judge-b overlay: flips fixed counts of episodes, scanned in (condition
/// asc, task_uid asc) order over the judge-a verdicts.
VerdictSet judge_b_overlay(const VerdictSet& llm, const ConfigSpec& spec) {
  VerdictSet out = llm;
  std::vector<std::size_t> order(out.verdicts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&out](std::size_t a, std::size_t b) {
    const Verdict& va = out.verdicts[a];
    const Verdict& vb = out.verdicts[b];
    if (va.condition != vb.condition)
      return static_cast<int>(va.condition) < static_cast<int>(vb.condition);
    return va.task_uid < vb.task_uid;
  });
  auto flip = [&out, &order](Condition cond, bool from_pass, int count) {
    for (std::size_t idx : order) {
      if (count == 0) return;
      Verdict& v = out.verdicts[idx];
      // scan against the judge-a value; an episode is flipped at most once
      if (v.condition == cond && v.pass == from_pass && v.judge_id != kLlmJudgeB) {
        v.pass = !v.pass;
        v.judge_id = kLlmJudgeB;
        --count;
      }
    }
    if (count != 0) throw ValidationError("judge-b overlay: not enough episodes to flip");
  };
  flip(Condition::kBaseline, true, spec.bl_p2f);
  flip(Condition::kBaseline, false, spec.bl_f2p);
  flip(Condition::kCurated, true, spec.cu_p2f);
  flip(Condition::kCurated, false, spec.cu_f2p);
  for (Verdict& v : out.verdicts) v.judge_id = kLlmJudgeB;
  return out;
}

// ---------------------------------------------------------------------------
// student-v2.0 episode synthesis

std::string ranking_payload(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += " > ";
    out += labels[i];
  }
  return out;
}

std::string answer_payload(const Task& task, bool correct) {
  switch (task.query_type) {
    case QueryType::kYesNo: {
      bool yes = std::get<YesNoGold>(task.gold).expected_yes;
      return (correct ? yes : !yes) ? "YES" : "NO";
    }
    case QueryType::kSingleWord:
      return correct ? std::get<SingleWordGold>(task.gold).expected : "mismatch";
    case QueryType::kRanking: {
      std::vector<std::string> labels = std::get<RankingGold>(task.gold).expected;
      if (!correct) std::rotate(labels.begin(), labels.begin() + 1, labels.end());
      return ranking_payload(labels);
    }
    case QueryType::kFreeForm: break;
  }
  throw ValidationError("answer_payload: free-form task has no answer line");
}

/// Mechanical response text realizing a (deterministic pass, LLM pass) pair.
std::string response_text(const Task& task, bool det_p, bool llm_p) {
  if (task.query_type == QueryType::kFreeForm)
    return "Applying the " + task.skill_id +
           " procedure step by step leads to the stated conclusion.";
  if (det_p) return "ANSWER: " + answer_payload(task, true);
  if (llm_p) return "Final Answer: " + answer_payload(task, true);  // no ANSWER line
  return "ANSWER: " + answer_payload(task, false);
}

EpisodeSet make_v20_episodes(const std::vector<Task>& tasks, const std::vector<PairCell>& det,
                             const std::vector<PairCell>& llm) {
  EpisodeSet set;
  for (int i = 0; i < kTaskCount; ++i) {
    const Task& task = tasks[static_cast<std::size_t>(i)];
    for (Condition cond : {Condition::kBaseline, Condition::kCurated}) {
      bool det_p = cond == Condition::kBaseline ? bl_pass(det[i]) : cu_pass(det[i]);
      bool llm_p = cond == Condition::kBaseline ? bl_pass(llm[i]) : cu_pass(llm[i]);
      if (det_p && !llm_p && task.query_type != QueryType::kFreeForm)
        throw ValidationError("fixture layout: deterministic pass with LLM fail at " +
                              task.task_uid + " is not realizable by one response text");
      Episode e;
      e.task_uid = task.task_uid;
      e.config_id = kV20;
      e.condition = cond;
      e.response_text = response_text(task, det_p, llm_p);
      set.episodes.push_back(std::move(e));
    }
  }
  return set;
}

// ---------------------------------------------------------------------------

std::string counts_str(int bl, int cu) {
  return std::to_string(bl) + "/" + std::to_string(cu) + " of 200";
}

std::string flips_str(const ConfigSpec& s) {
  return "BL " + std::to_string(s.bl_p2f) + " pass->fail + " + std::to_string(s.bl_f2p) +
         " fail->pass, CU " + std::to_string(s.cu_p2f) + " pass->fail + " +
         std::to_string(s.cu_f2p) + " fail->pass";
}

}  // namespace

FixtureBundle build_fixtures(const std::filesystem::path& out_dir) {
  FixtureBundle bundle;
  bundle.root = out_dir / "v1";
  std::filesystem::create_directories(bundle.root / "verdicts");
  std::filesystem::create_directories(bundle.root / "episodes");

  std::vector<Task> task_list = make_tasks();
  TaskSet tasks(task_list);
  bundle.tasks = bundle.root / "tasks.jsonl";
  save_tasks(tasks, bundle.tasks,
             "synthetic 200-task holdout: 40 skills x 5 tasks; type mix 122 YES_NO / 33 "
             "FREE_FORM / 23 SINGLE_WORD / 22 RANKING; the free-form subset is the fixed "
             "first slot of the first 33 skills (not determined by the reported aggregates; "
             "documented bundle choice)");

  // student-v2.0 per-skill layout, checked against the inverted cells
  std::vector<PairCell> v20_det = layout_cells(/*llm_view=*/false);
  std::vector<PairCell> v20_llm = layout_cells(/*llm_view=*/true);

  json bundle_json;
  bundle_json["format"] = "pairbench/bundle";
  bundle_json["version"] = 1;
  bundle_json["tasks"] = "tasks.jsonl";
  bundle_json["judges"] = {{"det", kDetJudge}, {"llm", kLlmJudgeA}, {"llm_b", kLlmJudgeB}};
  bundle_json["configs"] = json::array();

  for (const ConfigSpec& spec : kConfigs) {
    std::string id = spec.config_id;
    bool is_v20 = id == kV20;

    // --- cells per view, inverted where a test pins them -------------------
    PairedTable llm_table =
        spec.llm_test ? invert_cells(kTaskCount, spec.llm_bl, spec.llm_cu, *spec.llm_test)
                      : minimal_discordance_cells(kTaskCount, spec.llm_bl, spec.llm_cu);
    std::vector<PairCell> llm_cells = is_v20 ? v20_llm : generic_cells(llm_table);
    if (!same_table(table_from_cells(llm_cells), llm_table))
      throw ValidationError("fixture build: " + id + " LLM layout " +
                            table_str(table_from_cells(llm_cells)) +
                            " disagrees with inverted cells " + table_str(llm_table));

    std::string llm_note;
    if (spec.llm_test) {
      llm_note = "LLM-only view, judge-a: cells " + table_str(llm_table) +
                 " inverted from pass counts " + counts_str(spec.llm_bl, spec.llm_cu) +
                 (spec.llm_test->kind == ReportedTest::Kind::kChi2
                      ? " and continuity-corrected chi-square "
                      : " and exact binomial p ") +
                 spec.llm_test->rendered + "; unique solution over all consistent splits";
    } else {
      llm_note = "LLM-only view, judge-a: marginal pass counts " +
                 counts_str(spec.llm_bl, spec.llm_cu) +
                 " with no reported paired test; minimal-discordance realization " +
                 table_str(llm_table) + " - not for paired-test reproduction";
    }
    VerdictSet llm_set = llm_view_verdicts(id, llm_cells);
    bundle.llm[id] = bundle.root / "verdicts" / (id + ".llm.jsonl");
    save_verdicts(llm_set, bundle.llm[id], llm_note);

    // --- deterministic-mixed view ------------------------------------------
    VerdictSet det_set;
    std::string det_note;
    bool det_stats = spec.det_test != nullptr;
    if (spec.det_artifact) {
      det_set = artifact_det_verdicts(id);
      det_note =
          "recorded format-compliance artifact row: the answer-line extractor fails every "
          "episode (pass counts 0/0 of 200); retained verbatim and excluded from statistics";
    } else {
      PairedTable det_table =
          spec.det_test ? invert_cells(kTaskCount, spec.det_bl, spec.det_cu, *spec.det_test)
                        : minimal_discordance_cells(kTaskCount, spec.det_bl, spec.det_cu);
      if (is_v20) {
        if (!same_table(table_from_cells(v20_det), det_table))
          throw ValidationError("fixture build: " + id + " det layout " +
                                table_str(table_from_cells(v20_det)) +
                                " disagrees with inverted cells " + table_str(det_table));
        // judge the synthesized episode log with the real router: answer-line
        // extraction for 334 episodes, replayed judge-a verdicts for the 66
        // free-form episodes
        EpisodeSet episodes = make_v20_episodes(task_list, v20_det, v20_llm);
        bundle.episodes = bundle.root / "episodes" / (id + ".jsonl");
        save_episodes(episodes, bundle.episodes,
                      "synthetic response log for " + id +
                          ": passing episodes end with a literal ANSWER line, format-miss "
                          "episodes state the answer without one, failing episodes carry a "
                          "wrong ANSWER line; free-form episodes are graded via replayed "
                          "judge-a verdicts");
        ReplayClient replay(llm_set);
        JudgeRunResult run =
            judge_run(episodes, tasks, DispatchPolicy::kDeterministicMixed, replay);
        if (!run.complete())
          throw ValidationError("fixture build: incomplete deterministic-mixed run for " + id);
        det_set = std::move(run.verdicts);
        PairedTable produced = pair(det_set, id).table();
        if (!same_table(produced, det_table))
          throw ValidationError("fixture build: " + id + " episode log judged to " +
                                table_str(produced) + ", expected " + table_str(det_table));
        det_note = "deterministic-mixed view judged from the episode log (answer-line "
                   "extractor + replayed judge-a verdicts for free-form): cells " +
                   table_str(det_table) + " inverted from pass counts " +
                   counts_str(spec.det_bl, spec.det_cu) + " and exact binomial p " +
                   spec.det_test->rendered + "; unique solution";
      } else {
        std::vector<PairCell> det_cells = generic_cells(det_table);
        det_set = det_view_verdicts(id, det_cells);
        if (spec.det_test) {
          det_note = "deterministic-mixed view: cells " + table_str(det_table) +
                     " inverted from pass counts " + counts_str(spec.det_bl, spec.det_cu) +
                     " and continuity-corrected chi-square " + spec.det_test->rendered +
                     "; unique solution; free-form slots carry judge-a verdicts";
        } else {
          det_note = "deterministic-mixed view: marginal pass counts " +
                     counts_str(spec.det_bl, spec.det_cu) +
                     " with no reported paired test; minimal-discordance realization " +
                     table_str(det_table) +
                     " - not for paired-test reproduction; free-form slots carry judge-a "
                     "verdicts";
        }
      }
    }
    bundle.det[id] = bundle.root / "verdicts" / (id + ".det.jsonl");
    save_verdicts(det_set, bundle.det[id], det_note);

    // --- judge-b overlay ----------------------------------------------------
    VerdictSet b_set = judge_b_overlay(llm_set, spec);
    int b_bl = 0, b_cu = 0, agree = 0;
    for (std::size_t i = 0; i < b_set.verdicts.size(); ++i) {
      const Verdict& v = b_set.verdicts[i];
      if (v.pass) (v.condition == Condition::kBaseline ? b_bl : b_cu) += 1;
      if (v.pass == llm_set.verdicts[i].pass) ++agree;
    }
    bundle.llm_b[id] = bundle.root / "verdicts" / (id + ".llm-b.jsonl");
    save_verdicts(b_set, bundle.llm_b[id],
                  "cross-family overlay, judge-b: judge-a view with fixed flips (" +
                      flips_str(spec) + ", scanned in condition-then-uid order) realizing "
                      "pass counts " +
                      counts_str(b_bl, b_cu) + " and " + std::to_string(agree) +
                      "/400 agreement");

    json config_entry;
    config_entry["config_id"] = id;
    config_entry["scale"] = spec.scale;
    config_entry["role"] = spec.post_sft ? "post-sft" : "pre-sft";
    config_entry["det"] = "verdicts/" + id + ".det.jsonl";
    config_entry["llm"] = "verdicts/" + id + ".llm.jsonl";
    config_entry["llm_b"] = "verdicts/" + id + ".llm-b.jsonl";
    config_entry["det_artifact"] = spec.det_artifact;
    config_entry["det_test"] = det_stats;
    config_entry["llm_test"] = spec.llm_test != nullptr;
    if (is_v20) config_entry["episodes"] = "episodes/" + id + ".jsonl";
    bundle_json["configs"].push_back(std::move(config_entry));
  }

  bundle_json["scale_pairs"] = json::array({
      {{"scale", "0.8b"}, {"pre", "base-0.8b"}, {"post", "student-v1"}},
      {{"scale", "2b"}, {"pre", "base-2b"}, {"post", "student-v1.9"}},
      {{"scale", "4b"}, {"pre", "base-4b"}, {"post", "student-v2.0"}},
  });
  bundle_json["w_order"] =
      json::array({"base-0.8b", "base-2b", "base-4b", "ref-frontier"});
  bundle_json["shift_order"] =
      json::array({"student-v1", "student-v1.9", "student-v2.0", "ref-frontier"});
  bundle_json["saturation"] = {{"a", "student-v1.9"}, {"b", "student-v2.0"}};
  bundle_json["attribution"] = {
      {"pre_small", "base-0.8b"}, {"pre_large", "base-2b"}, {"post", "student-v1.9"}};
  bundle_json["per_skill_config"] = kV20;

  bundle.bundle_json = bundle.root / "bundle.json";
  std::ofstream out(bundle.bundle_json);
  if (!out) throw ValidationError("cannot write " + bundle.bundle_json.string());
  out << bundle_json.dump(2) << "\n";
  return bundle;
}

}  // namespace pairbench
