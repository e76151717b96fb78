/// @file judge_client.hpp
/// Judge clients: the LLM-judge interface, an offline replay client that
/// serves verdicts from a stored file, and an HTTP client speaking the
/// chat-completions protocol.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "pairbench/model.hpp"
#include "pairbench/store.hpp"

namespace pairbench {

/// One judged outcome from a client. `judge_id` names the judge that produced
/// it (a replay client passes through the stored id).
struct JudgeDecision {
  bool pass{false};
  std::string detail;
  std::string judge_id;
};

/// A judge that grades one episode at a time. Returns nullopt when the
/// episode cannot be judged (missing replay entry, exhausted retries); the
/// router records such episodes as unjudged.
class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string judge_id() const = 0;
  /// Maximum concurrent judge() calls the client supports.
  virtual int parallelism() const { return 1; }
  virtual std::optional<JudgeDecision> judge(const Task& task, const Episode& episode) = 0;
};

/// Serves verdicts verbatim from a previously saved verdict file, keyed by
/// (config_id, task_uid, condition). Keeps the statistics pipeline fully
/// offline and reproducible.
class ReplayClient : public JudgeClient {
 public:
  explicit ReplayClient(VerdictSet verdicts);
  static ReplayClient from_file(const std::string& path);

  std::string judge_id() const override { return judge_id_; }
  int parallelism() const override { return 4; }
  std::optional<JudgeDecision> judge(const Task& task, const Episode& episode) override;

 private:
  std::map<EpisodeKey, std::size_t> by_key_;  ///< index into verdicts_.verdicts
  VerdictSet verdicts_;
  std::string judge_id_;
};

/// Connection settings for HttpJudgeClient, loaded from a plain-text
/// `key = value` config file. Recognized keys: endpoint, model, api_key_env,
/// timeout_seconds, retries, parallel, backoff_ms.
struct HttpJudgeConfig {
  std::string endpoint;     ///< e.g. http://localhost:8080/v1/chat/completions
  std::string model;        ///< judge model name, doubles as judge_id
  std::string api_key_env;  ///< env var holding the bearer token; empty = none
  int timeout_seconds{30};
  int retries{3};
  int parallel{4};
  int backoff_ms{500};  ///< base for exponential backoff: backoff_ms * 2^attempt

  static HttpJudgeConfig from_file(const std::string& path);
};

/// The two messages sent to an LLM judge for one episode. The prompt
/// instructs the judge to end its reply with `VERDICT: PASS` or
/// `VERDICT: FAIL`.
struct JudgeMessages {
  std::string system;
  std::string user;
};

JudgeMessages render_judge_messages(const Task& task, const Episode& episode);

/// Parses a judge reply: line-anchored `VERDICT:` marker (case-insensitive,
/// colon immediately after the marker), last valid line wins. Returns nullopt
/// when no line carries a PASS/FAIL verdict.
std::optional<bool> parse_verdict_reply(const std::string& reply);

/// Chat-completions judge over HTTP. Transient failures (transport errors,
/// non-200 responses, unparseable replies) are retried with exponential
/// backoff; an exhausted budget yields nullopt, never an exception.
class HttpJudgeClient : public JudgeClient {
 public:
  explicit HttpJudgeClient(HttpJudgeConfig config);

  std::string judge_id() const override { return config_.model; }
  int parallelism() const override { return config_.parallel; }
  std::optional<JudgeDecision> judge(const Task& task, const Episode& episode) override;

 private:
  /// One request attempt; returns the reply body text or nullopt.
  std::optional<std::string> post_once(const std::string& body);

  HttpJudgeConfig config_;
  std::string scheme_host_;  ///< scheme://host[:port]
  std::string path_;         ///< request path
  std::string bearer_;       ///< resolved credential, possibly empty
};

/// Builds a client from a CLI locator: `replay:<verdicts-file>` or
/// `http:<config-file>`.
std::unique_ptr<JudgeClient> make_client(const std::string& locator);

}  // namespace pairbench
