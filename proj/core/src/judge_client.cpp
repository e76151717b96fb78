#include "pairbench/judge_client.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pairbench/errors.hpp"

namespace pairbench {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// ReplayClient

ReplayClient::ReplayClient(VerdictSet verdicts) : verdicts_(std::move(verdicts)) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < verdicts_.verdicts.size(); ++i) {
    const Verdict& v = verdicts_.verdicts[i];
    EpisodeKey key{v.config_id, v.task_uid, v.condition};
    if (!by_key_.emplace(key, i).second)
      throw ValidationError("replay client: duplicate verdict for (" + v.config_id + ", " +
                            v.task_uid + ", " + to_string(v.condition) + ")");
    ids.insert(v.judge_id);
  }
  judge_id_ = ids.size() == 1 ? *ids.begin() : "replay";
}

ReplayClient ReplayClient::from_file(const std::string& path) {
  return ReplayClient(load_verdicts(path));
}

std::optional<JudgeDecision> ReplayClient::judge(const Task& task, const Episode& episode) {
  (void)task;
  auto it = by_key_.find(EpisodeKey{episode.config_id, episode.task_uid, episode.condition});
  if (it == by_key_.end()) return std::nullopt;
  const Verdict& v = verdicts_.verdicts[it->second];
  JudgeDecision d;
  d.pass = v.pass;
  d.detail = v.detail;
  d.judge_id = v.judge_id;
  return d;
}

// ---------------------------------------------------------------------------
// Config file

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_positive_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    int parsed = std::stoi(value, &used);
    if (used != value.size() || parsed < 0) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ValidationError("judge config: key '" + key + "' needs a non-negative integer, got '" +
                          value + "'");
  }
}

}  // namespace

HttpJudgeConfig HttpJudgeConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("judge config: cannot open '" + path + "'");
  HttpJudgeConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "endpoint") cfg.endpoint = value;
    else if (key == "model") cfg.model = value;
    else if (key == "api_key_env") cfg.api_key_env = value;
    else if (key == "timeout_seconds") cfg.timeout_seconds = parse_positive_int(value, key);
    else if (key == "retries") cfg.retries = parse_positive_int(value, key);
    else if (key == "parallel") cfg.parallel = parse_positive_int(value, key);
    else if (key == "backoff_ms") cfg.backoff_ms = parse_positive_int(value, key);
    else
      throw ValidationError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (cfg.endpoint.empty()) throw ValidationError("judge config: 'endpoint' is required");
  if (cfg.model.empty()) throw ValidationError("judge config: 'model' is required");
  if (cfg.parallel < 1) throw ValidationError("judge config: 'parallel' must be >= 1");
  return cfg;
}

// ---------------------------------------------------------------------------
// Judge prompt and reply parsing

JudgeMessages render_judge_messages(const Task& task, const Episode& episode) {
  JudgeMessages m;
  m.system =
      "You are a strict benchmark grader. Judge whether the model response answers "
      "the task correctly according to the grading target. Reply with a brief "
      "justification, then end with a line containing exactly 'VERDICT: PASS' or "
      "'VERDICT: FAIL'.";
  std::ostringstream user;
  user << "Task (" << to_string(task.query_type) << "):\n" << task.prompt << "\n\n";
  std::visit(
      [&user](const auto& gold) {
        using G = std::decay_t<decltype(gold)>;
        if constexpr (std::is_same_v<G, YesNoGold>) {
          user << "Expected answer: " << (gold.expected_yes ? "YES" : "NO") << "\n";
        } else if constexpr (std::is_same_v<G, SingleWordGold>) {
          user << "Expected answer: " << gold.expected << "\n";
        } else if constexpr (std::is_same_v<G, RankingGold>) {
          user << "Expected ranking (best to worst): ";
          for (std::size_t i = 0; i < gold.expected.size(); ++i) {
            if (i) user << " > ";
            user << gold.expected[i];
          }
          user << "\n";
        } else {
          user << "Grading rubric:\n" << gold.rubric << "\n";
        }
      },
      task.gold);
  user << "\nModel response:\n" << episode.response_text << "\n";
  m.user = user.str();
  return m;
}

namespace {

/// If the line is a verdict marker line, returns the payload after the colon.
std::optional<std::string> verdict_payload(const std::string& line) {
  static constexpr const char* kMarker = "verdict";
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  for (const char* m = kMarker; *m != '\0'; ++m, ++i) {
    if (i >= line.size() ||
        std::tolower(static_cast<unsigned char>(line[i])) != *m)
      return std::nullopt;
  }
  if (i >= line.size() || line[i] != ':') return std::nullopt;
  return line.substr(i + 1);
}

}  // namespace

std::optional<bool> parse_verdict_reply(const std::string& reply) {
  std::optional<bool> verdict;
  std::size_t start = 0;
  while (start <= reply.size()) {
    std::size_t end = reply.find('\n', start);
    std::string line =
        reply.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (auto payload = verdict_payload(line)) {
      std::string token = trim(*payload);
      while (!token.empty() && (token.back() == '.' || token.back() == '!')) token.pop_back();
      for (char& ch : token) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (token == "pass") verdict = true;
      else if (token == "fail") verdict = false;
      // anything else is not a valid verdict line; earlier verdicts stand
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// HttpJudgeClient

HttpJudgeClient::HttpJudgeClient(HttpJudgeConfig config) : config_(std::move(config)) {
  std::size_t scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ValidationError("judge config: endpoint needs a scheme, got '" + config_.endpoint + "'");
  std::size_t path_start = config_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_ = config_.endpoint;
    path_ = "/";
  } else {
    scheme_host_ = config_.endpoint.substr(0, path_start);
    path_ = config_.endpoint.substr(path_start);
  }
  if (!config_.api_key_env.empty()) {
    const char* value = std::getenv(config_.api_key_env.c_str());
    if (value == nullptr || *value == '\0')
      throw JudgeClientError("judge credential env var '" + config_.api_key_env + "' is not set");
    bearer_ = value;
  }
}

std::optional<std::string> HttpJudgeClient::post_once(const std::string& body) {
  httplib::Client client(scheme_host_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res || res->status != 200) return std::nullopt;
  json reply = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (reply.is_discarded()) return std::nullopt;
  const json* content = nullptr;
  if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
    const json& first = reply["choices"][0];
    if (first.contains("message") && first["message"].contains("content"))
      content = &first["message"]["content"];
  }
  if (content == nullptr || !content->is_string()) return std::nullopt;
  return content->get<std::string>();
}

std::optional<JudgeDecision> HttpJudgeClient::judge(const Task& task, const Episode& episode) {
  JudgeMessages messages = render_judge_messages(task, episode);
  json body = {
      {"model", config_.model},
      {"temperature", 0},
      {"messages",
       {{{"role", "system"}, {"content", messages.system}},
        {{"role", "user"}, {"content", messages.user}}}},
  };
  std::string payload = body.dump();
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(config_.backoff_ms) << (attempt - 1)));
    std::optional<std::string> reply = post_once(payload);
    if (!reply) continue;
    std::optional<bool> verdict = parse_verdict_reply(*reply);
    if (!verdict) continue;  // judge ignored the reply contract; retry
    JudgeDecision d;
    d.pass = *verdict;
    d.detail = "llm_verdict";
    d.judge_id = config_.model;
    return d;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::unique_ptr<JudgeClient> make_client(const std::string& locator) {
  constexpr const char* kReplay = "replay:";
  constexpr const char* kHttp = "http:";
  if (locator.rfind(kReplay, 0) == 0)
    return std::make_unique<ReplayClient>(ReplayClient::from_file(locator.substr(7)));
  if (locator.rfind(kHttp, 0) == 0)
    return std::make_unique<HttpJudgeClient>(HttpJudgeConfig::from_file(locator.substr(5)));
  throw UsageError("unknown judge client locator '" + locator +
                   "' (expected replay:<verdicts-file> or http:<config-file>)");
}

}  // namespace pairbench
