#include "nulleval/providers.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nulleval/errors.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

namespace {

using nlohmann::json;

std::chrono::steady_clock::time_point default_clock() { return std::chrono::steady_clock::now(); }

void default_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

int backoff_for(const RetryPolicy& retry, int attempt) {
    if (retry.backoff_ms.empty()) return 0;
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(attempt) - 1,
                                           retry.backoff_ms.size() - 1);
    return retry.backoff_ms[idx];
}

}  // namespace

std::string_view provider_mode_name(ProviderMode m) {
    return m == ProviderMode::Chat ? "chat" : "text";
}

ProviderMode provider_mode_from_name(std::string_view name) {
    if (name == "chat") return ProviderMode::Chat;
    if (name == "text") return ProviderMode::Text;
    throw ConfigError("unknown provider mode: " + std::string(name));
}

bool is_whitespace_only(std::string_view s) { return text::trim(s).empty(); }

RateLimiter::RateLimiter(double permits_per_minute, Clock clock, Sleeper sleeper)
    : capacity_(permits_per_minute > 0 ? permits_per_minute : 1.0),
      per_second_(capacity_ / 60.0),
      tokens_(capacity_),
      clock_(clock ? std::move(clock) : default_clock),
      sleeper_(sleeper ? std::move(sleeper) : default_sleep) {
    last_ = clock_();
}

void RateLimiter::acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = clock_();
        const auto elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(capacity_, tokens_ + elapsed * per_second_);
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double deficit = 1.0 - tokens_;
        const auto wait =
            std::chrono::milliseconds(static_cast<std::int64_t>(deficit / per_second_ * 1000.0) + 1);
        lock.unlock();
        sleeper_(wait);
        lock.lock();
    }
}

// ---------------------------------------------------------------------------
// Mock provider
// ---------------------------------------------------------------------------

std::unique_ptr<MockProvider> MockProvider::from_fixture(const ProviderProfile& profile) {
    if (!profile.fixture) throw FixtureMissing("mock profile has no fixture path");
    std::ifstream in(*profile.fixture, std::ios::binary);
    if (!in) throw FixtureMissing("cannot open fixture: " + profile.fixture->string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string contents = buf.str();

    std::map<std::string, std::string> table;
    std::optional<std::string> default_response;
    std::size_t line_no = 0;
    for (auto line : text::split_lines(contents)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError("fixture " + profile.fixture->string() + ": " + e.what(), line_no);
        }
        if (j.contains("default")) {
            default_response = j["default"].get<std::string>();
            continue;
        }
        std::string key = j.at("record_id").get<std::string>();
        if (j.contains("technique")) {
            key += '\x1f';
            key += j["technique"].get<std::string>();
        }
        table[std::move(key)] = j.at("response").get<std::string>();
    }
    return std::make_unique<MockProvider>(profile, std::move(table), std::move(default_response));
}

MockProvider::MockProvider(ProviderProfile profile, std::map<std::string, std::string> table,
                           std::optional<std::string> default_response)
    : profile_(std::move(profile)),
      table_(std::move(table)),
      default_response_(std::move(default_response)) {}

ModelResponse MockProvider::generate(const ComposedPrompt& prompt, const GenerationParams&) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        if (profile_.fail_after_calls && calls_ > *profile_.fail_after_calls) {
            throw TransportError("simulated transport outage", prompt.record_id);
        }
    }
    ModelResponse response;
    response.record_id = prompt.record_id;
    response.latency_ms = 0;
    response.attempt = 1;
    auto it = table_.find(prompt.record_id + '\x1f' +
                          std::string(technique_name(prompt.technique)));
    if (it == table_.end()) it = table_.find(prompt.record_id);
    if (it != table_.end()) {
        response.raw_text = it->second;
    } else if (default_response_) {
        response.raw_text = *default_response_;
    } else {
        throw UnknownRecord("no fixture response for record " + prompt.record_id);
    }
    response.empty = is_whitespace_only(response.raw_text);
    return response;
}

// ---------------------------------------------------------------------------
// HTTP provider
// ---------------------------------------------------------------------------

HttpProvider::HttpProvider(ProviderProfile profile)
    : profile_(std::move(profile)), limiter_(profile_.rate_limit_per_min) {
    // Split "scheme://host:port/prefix" into the client target and the path
    // prefix httplib needs separately.
    const auto& url = profile_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("provider base_url must carry a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = url;
    } else {
        host_ = url.substr(0, path_start);
        auto prefix = url.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        path_prefix_ = prefix;
    }
}

ModelResponse HttpProvider::generate(const ComposedPrompt& prompt,
                                     const GenerationParams& params) {
    json body;
    body["model"] = profile_.model;
    body["temperature"] = params.temperature;
    if (params.seed) body["seed"] = *params.seed;
    if (params.max_output_tokens) body["max_tokens"] = *params.max_output_tokens;

    // The profile describes the endpoint, so its mode wins over the params
    // default when both are set.
    const ProviderMode mode = profile_.mode;
    std::string path = path_prefix_;
    if (mode == ProviderMode::Chat) {
        body["messages"] = json::array({json{{"role", "user"}, {"content", prompt.text}}});
        path += "/chat/completions";
    } else {
        body["prompt"] = prompt.text;
        path += "/completions";
    }
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!profile_.auth_env.empty()) {
        if (const char* secret = std::getenv(profile_.auth_env.c_str()); secret && *secret) {
            headers.emplace("Authorization", std::string("Bearer ") + secret);
        }
    }

    bool saw_quota_error = false;
    std::string last_error;
    for (int attempt = 1; attempt <= profile_.retry.max_attempts; ++attempt) {
        limiter_.acquire();
        httplib::Client client(host_);
        client.set_connection_timeout(profile_.timeout_s, 0);
        client.set_read_timeout(profile_.timeout_s, 0);
        client.set_write_timeout(profile_.timeout_s, 0);

        const auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(path, headers, payload, "application/json");
        const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();

        if (!res) {
            last_error = "connection failure (" + httplib::to_string(res.error()) + ")";
        } else if (res->status == 429) {
            saw_quota_error = true;
            last_error = "rate limited (429)";
        } else if (res->status == 401 || res->status == 403) {
            throw AuthError("authentication rejected (" + std::to_string(res->status) + ")",
                            prompt.record_id);
        } else if (res->status >= 500) {
            last_error = "server error (" + std::to_string(res->status) + ")";
        } else if (res->status != 200) {
            throw TransportError("unexpected status " + std::to_string(res->status) + ": " +
                                     res->body.substr(0, 200),
                                 prompt.record_id);
        } else {
            json reply;
            try {
                reply = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw TransportError(std::string("malformed response body: ") + e.what(),
                                     prompt.record_id);
            }
            if (!reply.contains("choices") || !reply["choices"].is_array() ||
                reply["choices"].empty()) {
                throw TransportError("response carries no choices", prompt.record_id);
            }
            const auto& choice = reply["choices"][0];

            ModelResponse response;
            response.record_id = prompt.record_id;
            response.latency_ms = latency;
            response.attempt = attempt;
            if (mode == ProviderMode::Chat) {
                if (choice.contains("message") && choice["message"].contains("content") &&
                    choice["message"]["content"].is_string()) {
                    response.raw_text = choice["message"]["content"].get<std::string>();
                }
            } else if (choice.contains("text") && choice["text"].is_string()) {
                response.raw_text = choice["text"].get<std::string>();
            }
            response.empty = is_whitespace_only(response.raw_text);
            if (response.empty && choice.contains("finish_reason") &&
                choice["finish_reason"].is_string()) {
                const std::string reason = choice["finish_reason"].get<std::string>();
                if (reason != "stop" && reason != "length") response.blocked_hint = reason;
            }
            return response;
        }

        if (attempt < profile_.retry.max_attempts) {
            default_sleep(std::chrono::milliseconds(backoff_for(profile_.retry, attempt)));
        }
    }
    if (saw_quota_error) {
        throw QuotaError("retries exhausted: " + last_error, prompt.record_id);
    }
    throw TransportError("retries exhausted: " + last_error, prompt.record_id);
}

std::unique_ptr<Provider> make_provider(const ProviderProfile& profile) {
    if (profile.is_mock()) return MockProvider::from_fixture(profile);
    return std::make_unique<HttpProvider>(profile);
}

}  // namespace nulleval
