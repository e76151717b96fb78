#include "pairbench/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairbench/det_judge.hpp"
#include "pairbench/errors.hpp"
#include "pairbench/fixtures.hpp"
#include "pairbench/judge_client.hpp"
#include "pairbench/judge_router.hpp"
#include "pairbench/report.hpp"
#include "pairbench/stats.hpp"
#include "pairbench/store.hpp"

namespace pairbench {
namespace {

std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (r.size() > width.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line.append(width[i] - r[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string signed3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%+.3f", v);
  return buf;
}

std::string ci_str(double lo, double hi) {
  return "[" + signed3(lo) + ", " + signed3(hi) + "]";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

/// Placeholder for runs whose dispatch never reaches the LLM path.
struct NullClient : JudgeClient {
  std::string judge_id() const override { return "none"; }
  std::optional<JudgeDecision> judge(const Task&, const Episode&) override {
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------

struct FixturesArgs {
  std::string out = "fixtures";
};

int cmd_fixtures(const FixturesArgs& args) {
  FixtureBundle bundle = build_fixtures(args.out);
  std::vector<std::pair<std::string, std::string>> inputs;
  auto add = [&](const std::filesystem::path& path) {
    inputs.emplace_back(std::filesystem::relative(path, bundle.root).string(),
                        sha256_file(path));
  };
  add(bundle.tasks);
  add(bundle.episodes);
  for (const auto& [id, path] : bundle.det) add(path);
  for (const auto& [id, path] : bundle.llm) add(path);
  for (const auto& [id, path] : bundle.llm_b) add(path);
  add(bundle.bundle_json);
  RunManifest manifest = make_manifest(std::move(inputs), "fixtures", "-", 0, 0);
  save_manifest(manifest, bundle.root / "manifest.json");
  std::cout << "fixture bundle written to " << bundle.root.string() << " ("
            << manifest.inputs.size() << " files)\n"
            << "manifest " << manifest.run_id << "\n";
  return exit_code::kOk;
}

// ---------------------------------------------------------------------------

struct JudgeArgs {
  std::string tasks;
  std::string episodes;
  std::string policy = "deterministic-mixed";
  bool force_llm = false;
  std::string client;  // replay:<file> | http:<config>; empty = none
  std::string out = ".";
};

int cmd_judge(const JudgeArgs& args) {
  DispatchPolicy policy =
      args.force_llm ? DispatchPolicy::kLlmOnly : parse_policy(args.policy);
  TaskSet tasks = load_tasks(args.tasks);
  EpisodeSet episodes = load_episodes(args.episodes, tasks);

  bool needs_llm = policy == DispatchPolicy::kLlmOnly;
  for (const Episode& episode : episodes.episodes) {
    if (needs_llm) break;
    const Task* task = tasks.find(episode.task_uid);
    if (task && dispatch(policy, task->query_type) == JudgePath::kLlm) needs_llm = true;
  }
  std::unique_ptr<JudgeClient> client;
  NullClient null_client;
  JudgeClient* judge = &null_client;
  if (!args.client.empty()) {
    client = make_client(args.client);
    judge = client.get();
  } else if (needs_llm) {
    throw UsageError("--client is required: policy " + to_string(policy) +
                     " routes episodes to the LLM judge");
  }

  JudgeRunResult run = judge_run(episodes, tasks, policy, *judge);

  std::filesystem::create_directories(args.out);
  std::filesystem::path verdicts_path = std::filesystem::path(args.out) / "verdicts.jsonl";
  std::string judge_desc = policy == DispatchPolicy::kLlmOnly
                               ? judge->judge_id()
                               : std::string(kDetJudgeId) +
                                     (needs_llm ? "+" + judge->judge_id() : "");
  save_verdicts(run.verdicts, verdicts_path,
                "judge run: policy " + to_string(policy) + ", judge " + judge_desc);
  RunManifest manifest = make_manifest({{args.tasks, sha256_file(args.tasks)},
                                        {args.episodes, sha256_file(args.episodes)}},
                                       to_string(policy), judge_desc, 0, 0);
  save_manifest(manifest, std::filesystem::path(args.out) / "manifest.json");

  struct Counts {
    std::int64_t bl_pass = 0, bl_n = 0, cu_pass = 0, cu_n = 0;
  };
  std::map<std::string, Counts> per_config;
  for (const Verdict& v : run.verdicts.verdicts) {
    Counts& c = per_config[v.config_id];
    if (v.condition == Condition::kBaseline) {
      ++c.bl_n;
      c.bl_pass += v.pass ? 1 : 0;
    } else {
      ++c.cu_n;
      c.cu_pass += v.pass ? 1 : 0;
    }
  }
  std::cout << "judged " << episodes.episodes.size() << " episodes under "
            << to_string(policy) << " -> " << run.verdicts.verdicts.size() << " verdicts\n";
  for (const auto& [config_id, c] : per_config)
    std::cout << "config " << config_id << ": baseline " << c.bl_pass << "/" << c.bl_n
              << ", curated " << c.cu_pass << "/" << c.cu_n << "\n";
  std::cout << "verdicts " << verdicts_path.string() << "\nmanifest " << manifest.run_id
            << "\n";

  if (!run.complete()) {
    std::cout << run.unjudged.size() << " episodes unjudged:\n";
    std::size_t shown = 0;
    for (const EpisodeKey& key : run.unjudged) {
      if (shown++ == 5) {
        std::cout << "  ...\n";
        break;
      }
      std::cout << "  (" << key.config_id << ", " << key.task_uid << ", "
                << to_string(key.condition) << ")\n";
    }
    return exit_code::kJudgeClient;
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> verdicts;
  std::vector<std::string> saturation;  // empty or exactly two config ids
  std::uint64_t seed = 0;
  int resamples = kDefaultResamples;
  std::string out;  // optional directory
};

int cmd_stats(const StatsArgs& args) {
  std::vector<Verdict> merged;
  std::vector<std::pair<std::string, std::string>> inputs;
  for (const std::string& file : args.verdicts) {
    VerdictSet set = load_verdicts(file);
    merged.insert(merged.end(), set.verdicts.begin(), set.verdicts.end());
    inputs.emplace_back(file, sha256_file(file));
  }
  VerdictSet all = ingest_verdicts(std::move(merged));

  std::set<std::string> config_ids, judge_ids;
  for (const Verdict& v : all.verdicts) {
    config_ids.insert(v.config_id);
    judge_ids.insert(v.judge_id);
  }
  if (config_ids.empty()) throw ValidationError("no verdicts in the given files");
  std::string judges;
  for (const std::string& id : judge_ids) judges += (judges.empty() ? "" : "+") + id;
  RunManifest manifest =
      make_manifest(std::move(inputs), "stats", judges, args.seed, args.resamples);

  std::string text = "## stats (per config)\n";
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"config", "n", "bl", "cu", "delta", "test", "p", "ci95"});
  std::vector<std::string> notices;
  std::map<std::string, PairedOutcomes> outcomes;
  for (const std::string& config_id : config_ids) {
    PairedOutcomes pairs = pair(all, config_id);
    PairedTable table = pairs.table();
    DeltaStats d = delta(table);
    std::string test = "-", p = "-", ci = "-";
    if (table.discordant() == 0) {
      notices.push_back("note: " + config_id +
                        " has no discordant pairs (degenerate table); McNemar omitted");
    } else {
      McNemarResult m = mcnemar(table);
      BootstrapCI b = paired_bootstrap_ci(pairs, args.resamples, args.seed);
      test = m.variant == McNemarVariant::kChi2Continuity
                 ? "chi2=" + render_chi2(*m.statistic)
                 : "exact";
      p = render_p(m.p_value);
      ci = ci_str(b.lo, b.hi);
    }
    rows.push_back({config_id, std::to_string(d.n), render_rate(d.pass_bl),
                    render_rate(d.pass_cu), d.delta.to_signed_fixed(3), test, p, ci});
    outcomes.emplace(config_id, std::move(pairs));
  }
  text += align(rows);
  for (const std::string& notice : notices) text += notice + "\n";

  if (!args.saturation.empty()) {
    const std::string& a = args.saturation[0];
    const std::string& b = args.saturation[1];
    for (const std::string& id : {a, b})
      if (!outcomes.count(id))
        throw ValidationError("saturation: config \"" + id + "\" is not in the inputs");
    SaturationTest s =
        saturation_test(outcomes.at(a), outcomes.at(b), args.resamples, args.seed);
    text += "saturation " + a + " vs " + b + ": delta_diff " +
            s.delta_diff.to_signed_fixed(3) + ", ci95 " + ci_str(s.ci_lo, s.ci_hi) +
            ", p_one_sided " + render_p(s.p_one_sided) + "\n";
  }
  text += "manifest " + manifest.run_id + "; seed " + std::to_string(args.seed) +
          "; resamples " + std::to_string(args.resamples) + "\n";
  std::cout << text;
  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    write_text(std::filesystem::path(args.out) / "stats.txt", text);
    save_manifest(manifest, std::filesystem::path(args.out) / "manifest.json");
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::string a, b;
  std::string out;
};

int cmd_compare_judges(const CompareArgs& args) {
  VerdictSet set_a = load_verdicts(args.a);
  VerdictSet set_b = load_verdicts(args.b);
  auto configs_of = [](const VerdictSet& set) {
    std::set<std::string> ids;
    for (const Verdict& v : set.verdicts) ids.insert(v.config_id);
    return ids;
  };
  std::set<std::string> configs_a = configs_of(set_a), configs_b = configs_of(set_b);
  if (configs_a != configs_b) {
    std::string only;
    for (const std::string& id : configs_a)
      if (!configs_b.count(id)) only += " " + id + " (A only)";
    for (const std::string& id : configs_b)
      if (!configs_a.count(id)) only += " " + id + " (B only)";
    throw CoverageError("judge views cover different configs:" + only);
  }
  if (configs_a.empty()) throw ValidationError("no verdicts in the given files");

  std::string text = "## compare-judges\n";
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"config", "n", "agreement", "kappa"});
  std::vector<std::string> notices;
  for (const std::string& config_id : configs_a) {
    try {
      KappaResult k = cohen_kappa(set_a, set_b, config_id);
      rows.push_back({config_id, std::to_string(k.n), k.agreement_percent(),
                      k.kappa.to_fixed(3)});
    } catch (const ValidationError& e) {
      // both judges constant and identical: agreement defined, kappa not
      rows.push_back({config_id, "-", "-", "undefined"});
      notices.push_back(std::string("note: ") + e.what());
    }
  }
  text += align(rows);
  for (const std::string& notice : notices) text += notice + "\n";
  RunManifest manifest = make_manifest(
      {{args.a, sha256_file(args.a)}, {args.b, sha256_file(args.b)}}, "compare-judges",
      "-", 0, 0);
  text += "manifest " + manifest.run_id + "\n";
  std::cout << text;
  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    write_text(std::filesystem::path(args.out) / "compare-judges.txt", text);
    save_manifest(manifest, std::filesystem::path(args.out) / "manifest.json");
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string bundle;
  std::string out = "report";
  std::uint64_t seed = 0;
  int resamples = kDefaultResamples;
};

int cmd_report(const ReportArgs& args) {
  BundleView bundle = load_bundle(args.bundle);
  std::vector<std::pair<std::string, std::string>> inputs;
  for (const auto& [label, path] : bundle.files)
    inputs.emplace_back(label, sha256_file(path));
  RunManifest manifest =
      make_manifest(std::move(inputs), "report",
                    bundle.det_judge + "+" + bundle.llm_judge, args.seed, args.resamples);
  ReportOptions options;
  options.seed = args.seed;
  options.resamples = args.resamples;
  ReportDocument doc = render_report(bundle, options, manifest);

  std::filesystem::create_directories(args.out);
  std::filesystem::path out_dir(args.out);
  write_text(out_dir / "report.txt", doc.text);
  write_text(out_dir / "report.tsv", doc.tsv);
  save_manifest(manifest, out_dir / "manifest.json");
  std::cout << doc.text;
  std::cout << "report written to " << out_dir.string() << " (report.txt, report.tsv, "
            << "manifest.json)\n";
  return exit_code::kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"pairbench: paired-condition benchmark judging and statistics"};
  app.require_subcommand(1);

  FixturesArgs fixtures_args;
  CLI::App* fixtures = app.add_subcommand("fixtures", "emit the reconstructed fixture bundle");
  fixtures->add_option("--out", fixtures_args.out, "output directory")
      ->capture_default_str();

  JudgeArgs judge_args;
  CLI::App* judge = app.add_subcommand("judge", "judge an episode log into verdicts");
  judge->add_option("--tasks", judge_args.tasks, "tasks file")
      ->required()
      ->check(CLI::ExistingFile);
  judge->add_option("--episodes", judge_args.episodes, "episodes file")
      ->required()
      ->check(CLI::ExistingFile);
  judge->add_option("--policy", judge_args.policy, "deterministic-mixed | llm-only")
      ->capture_default_str();
  judge->add_flag("--force-llm-judge", judge_args.force_llm,
                  "route every episode to the LLM judge (alias for --policy llm-only)");
  judge->add_option("--client", judge_args.client,
                    "LLM judge client: replay:<verdicts-file> or http:<config-file>");
  judge->add_option("--out", judge_args.out, "output directory")->capture_default_str();

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "paired statistics over verdict files");
  stats->add_option("--verdicts", stats_args.verdicts, "verdict files")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--saturation", stats_args.saturation,
                    "two config ids for the cross-model saturation test")
      ->expected(2);
  stats->add_option("--seed", stats_args.seed, "bootstrap seed")->capture_default_str();
  stats->add_option("--resamples", stats_args.resamples, "bootstrap resamples")
      ->capture_default_str();
  stats->add_option("--out", stats_args.out, "optional output directory");

  CompareArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare-judges", "agreement and Cohen's kappa per config");
  compare->add_option("--a", compare_args.a, "first judge's verdicts")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--b", compare_args.b, "second judge's verdicts")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--out", compare_args.out, "optional output directory");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "consolidated report from a bundle");
  report->add_option("--bundle", report_args.bundle, "bundle.json path")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", report_args.out, "output directory")->capture_default_str();
  report->add_option("--seed", report_args.seed, "bootstrap seed")->capture_default_str();
  report->add_option("--resamples", report_args.resamples, "bootstrap resamples")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (fixtures->parsed()) return cmd_fixtures(fixtures_args);
    if (judge->parsed()) return cmd_judge(judge_args);
    if (stats->parsed()) return cmd_stats(stats_args);
    if (compare->parsed()) return cmd_compare_judges(compare_args);
    if (report->parsed()) return cmd_report(report_args);
    throw UsageError("no subcommand given");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const CoverageError& e) {
    std::cerr << "coverage error: " << e.what() << "\n";
    return exit_code::kCoverage;
  } catch (const JudgeClientError& e) {
    std::cerr << "judge client error: " << e.what() << "\n";
    return exit_code::kJudgeClient;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return exit_code::kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kValidation;
  }
}

}  // namespace pairbench
