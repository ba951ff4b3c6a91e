#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "citeval/error.hpp"

// Chat-completion clients. The HTTP client speaks the OpenAI-compatible
// /chat/completions wire format (docs/wire.md) with the whole rendered
// prompt as a single user message; the mock client scripts responses for
// tests and offline runs. Both retry transient failures with exponential
// backoff and are safe to call from several threads at once.

namespace citeval {

struct GenerationConfig {
  int max_tokens = 2000;
  double temperature = 0.0;  // sampling off
  std::vector<std::string> stop_sequences;
  std::optional<long> seed;
  double timeout_s = 60.0;
  int max_retries = 3;
  double backoff_initial_s = 1.0;
  double backoff_multiplier = 2.0;
};

struct CompletionResult {
  std::string text;
  bool truncated = false;  // generation stopped at max_tokens
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual CompletionResult complete(const std::string& prompt,
                                    const GenerationConfig& config) = 0;
};

// Injectable so tests can observe the backoff schedule instead of sleeping.
using Sleeper = std::function<void(double seconds)>;

// Transport errors, timeouts, HTTP 429 and HTTP 5xx are worth retrying;
// other HTTP statuses, auth and context-overflow failures are not.
bool is_retriable(const Error& error);

// Runs `attempt` up to config.max_retries + 1 times, sleeping
// backoff_initial_s * multiplier^i between tries. `retry_counter` (optional)
// is incremented once per retry.
CompletionResult run_with_retries(
    const std::function<CompletionResult()>& attempt,
    const GenerationConfig& config, const Sleeper& sleep,
    std::atomic<long>* retry_counter);

// Replaces every occurrence of `secret` with "[redacted]"; no-op for an
// empty secret. Every error message that might echo request or response
// content passes through this.
std::string redact(std::string text, const std::string& secret);

struct HttpClientConfig {
  std::string endpoint;  // e.g. https://api.example.com/v1
  std::string model;
  // Credentials come from this environment variable only; never from flags
  // or config files. Empty/unset is an error unless allow_anonymous.
  std::string api_key_env = "LLM_API_KEY";
  bool allow_anonymous = false;  // local inference servers need no key
};

class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(HttpClientConfig config, Sleeper sleeper = {});
  CompletionResult complete(const std::string& prompt,
                            const GenerationConfig& config) override;

  long total_requests() const { return requests_.load(); }
  long total_retries() const { return retries_.load(); }

 private:
  CompletionResult attempt_once(const std::string& prompt,
                                const GenerationConfig& config);

  HttpClientConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // anything after the origin
  std::string api_key_;
  Sleeper sleeper_;
  std::atomic<long> requests_{0};
  std::atomic<long> retries_{0};
};

// Scripted client. The responder receives the exact prompt and may throw
// Error to simulate failures. Optional fault injection draws per prompt and
// attempt from a seeded hash, so outcomes are deterministic regardless of
// scheduling: a retried prompt redraws and may then succeed.
class MockCompletionClient : public CompletionClient {
 public:
  using Responder = std::function<std::string(const std::string& prompt)>;

  explicit MockCompletionClient(Responder responder, Sleeper sleeper = {});

  void set_fault_injection(double failure_rate, double malformed_rate,
                           uint64_t seed);

  CompletionResult complete(const std::string& prompt,
                            const GenerationConfig& config) override;

  long calls() const { return calls_.load(); }
  long total_retries() const { return retries_.load(); }
  int max_in_flight_seen() const { return max_in_flight_.load(); }

 private:
  Responder responder_;
  Sleeper sleeper_;
  bool inject_ = false;
  double failure_rate_ = 0.0;
  double malformed_rate_ = 0.0;
  uint64_t seed_ = 0;
  std::atomic<long> calls_{0};
  std::atomic<long> retries_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

struct CompletionOutcome {
  std::optional<std::string> text;
  bool truncated = false;
  std::optional<ErrorKind> error;
  std::string error_message;
};

// Completes all prompts with at most `max_in_flight` concurrent requests.
// Results keep prompt order; one failed prompt never affects the others.
std::vector<CompletionOutcome> batch_complete(
    CompletionClient& client, const std::vector<std::string>& prompts,
    const GenerationConfig& config, int max_in_flight);

}  // namespace citeval
