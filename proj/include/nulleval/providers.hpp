#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nulleval/compose.hpp"

namespace nulleval {

enum class ProviderMode { Text, Chat };

std::string_view provider_mode_name(ProviderMode m);
ProviderMode provider_mode_from_name(std::string_view name);

// Deterministic-by-configuration sampling settings. Chat requests always
// start from an empty history with the prompt as the first user message.
struct GenerationParams {
    double temperature = 0.0;
    std::optional<std::int64_t> seed;
    std::optional<int> max_output_tokens;
    ProviderMode mode = ProviderMode::Chat;
};

struct ModelResponse {
    std::string record_id;
    std::string raw_text;  // provider text verbatim, never trimmed
    bool empty = false;    // true iff raw_text is empty or whitespace-only
    std::optional<std::string> blocked_hint;  // provider-reported safety category
    std::int64_t latency_ms = 0;
    int attempt = 1;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::vector<int> backoff_ms = {500, 2000, 8000};  // clamped to the last entry
};

struct ProviderProfile {
    std::string name;
    std::string family;  // refusal-pattern family key, e.g. "gpt" or "gemini"
    std::string base_url;
    std::string model;
    ProviderMode mode = ProviderMode::Chat;
    std::string auth_env;  // name of the env var holding the secret; never the value
    double rate_limit_per_min = 60.0;
    RetryPolicy retry;
    int timeout_s = 120;

    // Mock profiles: respond from a record_id -> response fixture instead of
    // the network. fail_after_calls simulates a transport outage after N
    // calls on one provider instance (used by resume drills).
    std::optional<std::filesystem::path> fixture;
    std::optional<std::size_t> fail_after_calls;

    bool is_mock() const { return fixture.has_value(); }
};

// Thread-safe token bucket, refilled continuously at per_minute/60 tokens
// per second with a one-minute burst capacity. The clock and sleeper are
// injectable for tests.
class RateLimiter {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit RateLimiter(double permits_per_minute, Clock clock = {}, Sleeper sleeper = {});
    void acquire();

private:
    double capacity_;
    double per_second_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    Clock clock_;
    Sleeper sleeper_;
    std::mutex mutex_;
};

class Provider {
public:
    virtual ~Provider() = default;
    // One completion for one composed prompt. Retries happen only on
    // transport-class failures, never on response content. Throws
    // TransportError / AuthError / QuotaError, each carrying the record id.
    virtual ModelResponse generate(const ComposedPrompt& prompt,
                                   const GenerationParams& params) = 0;
    virtual const ProviderProfile& profile() const = 0;
};

// Pure table lookup keyed by record_id. Fixture format: JSONL lines of
// {"record_id": ..., "response": ...}; an optional {"default": ...} line
// answers unknown records. A line may carry a "technique" field to pin the
// response to one composition technique; lookups try (record_id, technique)
// first, then record_id alone, then the default.
class MockProvider : public Provider {
public:
    static std::unique_ptr<MockProvider> from_fixture(const ProviderProfile& profile);
    MockProvider(ProviderProfile profile, std::map<std::string, std::string> table,
                 std::optional<std::string> default_response);

    ModelResponse generate(const ComposedPrompt& prompt, const GenerationParams& params) override;
    const ProviderProfile& profile() const override { return profile_; }

private:
    ProviderProfile profile_;
    std::map<std::string, std::string> table_;
    std::optional<std::string> default_response_;
    std::size_t calls_ = 0;
    std::mutex mutex_;
};

// OpenAI-compatible HTTP JSON client. Chat mode posts to
// {base}/chat/completions, text mode to {base}/completions.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderProfile profile);

    ModelResponse generate(const ComposedPrompt& prompt, const GenerationParams& params) override;
    const ProviderProfile& profile() const override { return profile_; }

private:
    ProviderProfile profile_;
    std::string host_;         // scheme://host:port
    std::string path_prefix_;  // e.g. "/v1"
    RateLimiter limiter_;
};

std::unique_ptr<Provider> make_provider(const ProviderProfile& profile);

bool is_whitespace_only(std::string_view s);

}  // namespace nulleval
