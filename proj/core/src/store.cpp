#include "pairbench/store.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pairbench {

using json = nlohmann::json;

std::string to_string(QueryType t) {
  switch (t) {
    case QueryType::kYesNo: return "YES_NO";
    case QueryType::kSingleWord: return "SINGLE_WORD";
    case QueryType::kRanking: return "RANKING";
    case QueryType::kFreeForm: return "FREE_FORM";
  }
  return "?";
}

std::string to_string(Condition c) {
  return c == Condition::kBaseline ? "BASELINE" : "CURATED";
}

std::string to_string(JudgePath p) {
  return p == JudgePath::kDeterministic ? "DETERMINISTIC" : "LLM";
}

std::optional<QueryType> parse_query_type(const std::string& s) {
  if (s == "YES_NO") return QueryType::kYesNo;
  if (s == "SINGLE_WORD") return QueryType::kSingleWord;
  if (s == "RANKING") return QueryType::kRanking;
  if (s == "FREE_FORM") return QueryType::kFreeForm;
  return std::nullopt;
}

std::optional<Condition> parse_condition(const std::string& s) {
  if (s == "BASELINE") return Condition::kBaseline;
  if (s == "CURATED") return Condition::kCurated;
  return std::nullopt;
}

std::optional<JudgePath> parse_judge_path(const std::string& s) {
  if (s == "DETERMINISTIC") return JudgePath::kDeterministic;
  if (s == "LLM") return JudgePath::kLlm;
  return std::nullopt;
}

QueryType gold_query_type(const GoldSpec& gold) {
  switch (gold.index()) {
    case 0: return QueryType::kYesNo;
    case 1: return QueryType::kSingleWord;
    case 2: return QueryType::kRanking;
    default: return QueryType::kFreeForm;
  }
}

std::string TypeMix::percent(QueryType t) const {
  auto it = counts.find(t);
  std::int64_t c = it == counts.end() ? 0 : it->second;
  if (total == 0) return "0%";
  // one decimal, trailing ".0" dropped (61% rather than 61.0%)
  std::int64_t tenths = (c * 1000 + total / 2) / total;
  std::ostringstream os;
  os << tenths / 10;
  if (tenths % 10 != 0) os << '.' << tenths % 10;
  os << '%';
  return os.str();
}

TaskSet::TaskSet(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (!by_uid_.emplace(t.task_uid, i).second)
      throw ValidationError("duplicate task_uid '" + t.task_uid + "'");
    if (gold_query_type(t.gold) != t.query_type)
      throw ValidationError("task '" + t.task_uid + "': gold variant does not match query_type " +
                            to_string(t.query_type));
    if (const auto* r = std::get_if<RankingGold>(&t.gold)) {
      if (r->expected.size() < 2)
        throw ValidationError("task '" + t.task_uid + "': ranking gold needs >= 2 labels");
      std::set<std::string> uniq(r->expected.begin(), r->expected.end());
      if (uniq.size() != r->expected.size())
        throw ValidationError("task '" + t.task_uid + "': ranking gold has duplicate labels");
    }
  }
}

const Task* TaskSet::find(const std::string& task_uid) const {
  auto it = by_uid_.find(task_uid);
  return it == by_uid_.end() ? nullptr : &tasks_[it->second];
}

TypeMix TaskSet::type_mix() const {
  TypeMix mix;
  for (const Task& t : tasks_) ++mix.counts[t.query_type];
  mix.total = static_cast<std::int64_t>(tasks_.size());
  return mix;
}

EpisodeSet ingest_episodes(std::vector<Episode> episodes, const TaskSet& tasks) {
  std::set<EpisodeKey> seen;
  for (const Episode& e : episodes) {
    if (tasks.find(e.task_uid) == nullptr)
      throw ValidationError("episode references unknown task_uid '" + e.task_uid + "'");
    if (!seen.insert({e.config_id, e.task_uid, e.condition}).second)
      throw ValidationError("duplicate episode (" + e.task_uid + ", " + e.config_id + ", " +
                            to_string(e.condition) + ")");
  }
  return EpisodeSet{std::move(episodes)};
}

CompletenessReport completeness(const EpisodeSet& episodes, const TaskSet& tasks) {
  std::set<std::string> configs;
  std::set<EpisodeKey> present;
  for (const Episode& e : episodes.episodes) {
    configs.insert(e.config_id);
    present.insert({e.config_id, e.task_uid, e.condition});
  }
  CompletenessReport report;
  for (const std::string& config : configs) {
    std::vector<EpisodeKey> missing;
    for (const Task& t : tasks.tasks())
      for (Condition c : {Condition::kBaseline, Condition::kCurated})
        if (!present.count({config, t.task_uid, c})) missing.push_back({config, t.task_uid, c});
    if (!missing.empty()) report.missing_by_config[config] = std::move(missing);
  }
  return report;
}

std::string CompletenessReport::summary() const {
  if (complete()) return "complete";
  std::ostringstream os;
  for (const auto& [config, missing] : missing_by_config) {
    os << config << ": " << missing.size() << " missing cell(s), first (" << missing.front().task_uid
       << ", " << to_string(missing.front().condition) << ")\n";
  }
  return os.str();
}

VerdictSet ingest_verdicts(std::vector<Verdict> verdicts) {
  std::set<std::tuple<std::string, std::string, Condition, std::string>> seen;
  for (const Verdict& v : verdicts) {
    if (!seen.insert({v.config_id, v.task_uid, v.condition, v.judge_id}).second)
      throw ValidationError("duplicate verdict (" + v.task_uid + ", " + v.config_id + ", " +
                            to_string(v.condition) + ", " + v.judge_id + ")");
  }
  return VerdictSet{std::move(verdicts), ""};
}

namespace {

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& what) {
  throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

json parse_line(const std::filesystem::path& path, std::size_t line_no, const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail_line(path, line_no, "malformed record");
  return j;
}

std::string take_string(const std::filesystem::path& path, std::size_t line_no, json& j,
                        const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    fail_line(path, line_no, std::string("missing or non-string field '") + key + "'");
  std::string value = it->get<std::string>();
  j.erase(it);
  return value;
}

/// Reads the header line and the record lines of one file; checks format kind
/// and schema version. Returns (records with line numbers, header note).
struct RawFile {
  std::vector<std::pair<std::size_t, json>> records;
  std::string note;
};

RawFile read_jsonl(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  RawFile out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(path, line_no, line);
    if (!have_header) {
      have_header = true;
      std::string format = j.value("format", "");
      if (format != "pairbench/" + kind)
        fail_line(path, line_no, "expected header with format 'pairbench/" + kind + "', got '" +
                                     format + "'");
      if (!j.contains("version") || !j["version"].is_number_integer() ||
          j["version"].get<int>() != kSchemaVersion)
        fail_line(path, line_no,
                  "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
      out.note = j.value("note", "");
      continue;
    }
    out.records.emplace_back(line_no, std::move(j));
  }
  if (!have_header) throw ValidationError(path.string() + ": empty file, missing header line");
  return out;
}

GoldSpec parse_gold(const std::filesystem::path& path, std::size_t line_no, const json& g) {
  if (!g.is_object()) fail_line(path, line_no, "gold must be an object");
  std::string kind = g.value("kind", "");
  if (kind == "yes_no") {
    std::string expected = g.value("expected", "");
    if (expected != "YES" && expected != "NO")
      fail_line(path, line_no, "yes_no gold expected must be YES or NO");
    return YesNoGold{expected == "YES"};
  }
  if (kind == "single_word") {
    if (!g.contains("expected") || !g["expected"].is_string())
      fail_line(path, line_no, "single_word gold needs string 'expected'");
    return SingleWordGold{g["expected"].get<std::string>()};
  }
  if (kind == "ranking") {
    if (!g.contains("expected") || !g["expected"].is_array())
      fail_line(path, line_no, "ranking gold needs array 'expected'");
    std::vector<std::string> labels;
    for (const auto& item : g["expected"]) {
      if (!item.is_string()) fail_line(path, line_no, "ranking gold labels must be strings");
      labels.push_back(item.get<std::string>());
    }
    return RankingGold{std::move(labels)};
  }
  if (kind == "free_form") return FreeFormGold{g.value("rubric", "")};
  fail_line(path, line_no, "unknown gold kind '" + kind + "'");
}

json gold_to_json(const GoldSpec& gold) {
  json g;
  if (const auto* y = std::get_if<YesNoGold>(&gold)) {
    g["kind"] = "yes_no";
    g["expected"] = y->expected_yes ? "YES" : "NO";
  } else if (const auto* w = std::get_if<SingleWordGold>(&gold)) {
    g["kind"] = "single_word";
    g["expected"] = w->expected;
  } else if (const auto* r = std::get_if<RankingGold>(&gold)) {
    g["kind"] = "ranking";
    g["expected"] = r->expected;
  } else {
    g["kind"] = "free_form";
    g["rubric"] = std::get<FreeFormGold>(gold).rubric;
  }
  return g;
}

json merge_extras(const std::string& extras_json) {
  if (extras_json.empty()) return json::object();
  json j = json::parse(extras_json, nullptr, false);
  return j.is_object() ? j : json::object();
}

void write_file(const std::filesystem::path& path, const std::string& kind,
                const std::string& note, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  json header;
  header["format"] = "pairbench/" + kind;
  header["version"] = kSchemaVersion;
  if (!note.empty()) header["note"] = note;
  out << header.dump() << '\n';
  for (const json& r : records) out << r.dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

TaskSet load_tasks(const std::filesystem::path& path) {
  RawFile raw = read_jsonl(path, "tasks");
  std::vector<Task> tasks;
  tasks.reserve(raw.records.size());
  for (auto& [line_no, j] : raw.records) {
    Task t;
    t.task_uid = take_string(path, line_no, j, "task_uid");
    t.skill_id = take_string(path, line_no, j, "skill_id");
    std::string qt = take_string(path, line_no, j, "query_type");
    auto parsed_qt = parse_query_type(qt);
    if (!parsed_qt) fail_line(path, line_no, "unknown query_type '" + qt + "'");
    t.query_type = *parsed_qt;
    t.prompt = take_string(path, line_no, j, "prompt");
    auto git = j.find("gold");
    if (git == j.end()) fail_line(path, line_no, "missing field 'gold'");
    t.gold = parse_gold(path, line_no, *git);
    j.erase(git);
    if (!j.empty()) t.extras_json = j.dump();
    tasks.push_back(std::move(t));
  }
  try {
    return TaskSet(std::move(tasks));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

EpisodeSet load_episodes(const std::filesystem::path& path, const TaskSet& tasks) {
  RawFile raw = read_jsonl(path, "episodes");
  std::vector<Episode> episodes;
  episodes.reserve(raw.records.size());
  for (auto& [line_no, j] : raw.records) {
    Episode e;
    e.task_uid = take_string(path, line_no, j, "task_uid");
    e.config_id = take_string(path, line_no, j, "config_id");
    std::string cond = take_string(path, line_no, j, "condition");
    auto parsed = parse_condition(cond);
    if (!parsed) fail_line(path, line_no, "unknown condition tag '" + cond + "'");
    e.condition = *parsed;
    e.response_text = take_string(path, line_no, j, "response_text");
    if (auto it = j.find("meta"); it != j.end()) {
      if (!it->is_object()) fail_line(path, line_no, "meta must be an object");
      for (auto& [k, v] : it->items()) {
        if (!v.is_string()) fail_line(path, line_no, "meta values must be strings");
        e.meta[k] = v.get<std::string>();
      }
      j.erase(it);
    }
    if (!j.empty()) e.extras_json = j.dump();
    episodes.push_back(std::move(e));
  }
  try {
    return ingest_episodes(std::move(episodes), tasks);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

VerdictSet load_verdicts(const std::filesystem::path& path) {
  RawFile raw = read_jsonl(path, "verdicts");
  std::vector<Verdict> verdicts;
  verdicts.reserve(raw.records.size());
  for (auto& [line_no, j] : raw.records) {
    Verdict v;
    v.task_uid = take_string(path, line_no, j, "task_uid");
    v.config_id = take_string(path, line_no, j, "config_id");
    std::string cond = take_string(path, line_no, j, "condition");
    auto parsed_cond = parse_condition(cond);
    if (!parsed_cond) fail_line(path, line_no, "unknown condition tag '" + cond + "'");
    v.condition = *parsed_cond;
    auto pit = j.find("pass");
    if (pit == j.end() || !pit->is_boolean()) fail_line(path, line_no, "missing boolean 'pass'");
    v.pass = pit->get<bool>();
    j.erase(pit);
    std::string jp = take_string(path, line_no, j, "judge_path");
    auto parsed_path = parse_judge_path(jp);
    if (!parsed_path) fail_line(path, line_no, "unknown judge_path '" + jp + "'");
    v.judge_path = *parsed_path;
    v.judge_id = take_string(path, line_no, j, "judge_id");
    if (auto it = j.find("detail"); it != j.end()) {
      if (!it->is_string()) fail_line(path, line_no, "detail must be a string");
      v.detail = it->get<std::string>();
      j.erase(it);
    }
    if (!j.empty()) v.extras_json = j.dump();
    verdicts.push_back(std::move(v));
  }
  try {
    VerdictSet set = ingest_verdicts(std::move(verdicts));
    set.note = raw.note;
    return set;
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_tasks(const TaskSet& set, const std::filesystem::path& path, const std::string& note) {
  std::vector<const Task*> order;
  for (const Task& t : set.tasks()) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Task* a, const Task* b) { return a->task_uid < b->task_uid; });
  std::vector<json> records;
  records.reserve(order.size());
  for (const Task* t : order) {
    json j = merge_extras(t->extras_json);
    j["task_uid"] = t->task_uid;
    j["skill_id"] = t->skill_id;
    j["query_type"] = to_string(t->query_type);
    j["prompt"] = t->prompt;
    j["gold"] = gold_to_json(t->gold);
    records.push_back(std::move(j));
  }
  write_file(path, "tasks", note, records);
}

void save_episodes(const EpisodeSet& set, const std::filesystem::path& path,
                   const std::string& note) {
  std::vector<const Episode*> order;
  for (const Episode& e : set.episodes) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Episode* a, const Episode* b) {
    return EpisodeKey{a->config_id, a->task_uid, a->condition} <
           EpisodeKey{b->config_id, b->task_uid, b->condition};
  });
  std::vector<json> records;
  records.reserve(order.size());
  for (const Episode* e : order) {
    json j = merge_extras(e->extras_json);
    j["task_uid"] = e->task_uid;
    j["config_id"] = e->config_id;
    j["condition"] = to_string(e->condition);
    j["response_text"] = e->response_text;
    if (!e->meta.empty()) j["meta"] = e->meta;
    records.push_back(std::move(j));
  }
  write_file(path, "episodes", note, records);
}

void save_verdicts(const VerdictSet& set, const std::filesystem::path& path,
                   const std::string& note) {
  std::vector<const Verdict*> order;
  for (const Verdict& v : set.verdicts) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](const Verdict* a, const Verdict* b) {
    if (auto ka = EpisodeKey{a->config_id, a->task_uid, a->condition},
        kb = EpisodeKey{b->config_id, b->task_uid, b->condition};
        !(ka == kb))
      return ka < kb;
    return a->judge_id < b->judge_id;
  });
  std::vector<json> records;
  records.reserve(order.size());
  for (const Verdict* v : order) {
    json j = merge_extras(v->extras_json);
    j["task_uid"] = v->task_uid;
    j["config_id"] = v->config_id;
    j["condition"] = to_string(v->condition);
    j["pass"] = v->pass;
    j["judge_path"] = to_string(v->judge_path);
    j["judge_id"] = v->judge_id;
    if (!v->detail.empty()) j["detail"] = v->detail;
    records.push_back(std::move(j));
  }
  write_file(path, "verdicts", note.empty() ? set.note : note, records);
}

}  // namespace pairbench
