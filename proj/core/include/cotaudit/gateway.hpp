#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotaudit/endpoint.hpp"
#include "cotaudit/intervention_type.hpp"
#include "cotaudit/templates.hpp"
#include "cotaudit/trace.hpp"

namespace cotaudit {

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    SamplingParams sampling;
};

/// OpenAI-compatible chat-completions request body.
nlohmann::json to_wire(const ChatRequest& request);
/// Extracts choices[0].message.content. Throws GatewayError on any other shape.
std::string content_from_wire(std::string_view body);

/// What a call is about, independent of the rendered prompt. Mock backends key
/// their scripted replies on this; real backends ignore it.
struct CallContext {
    std::string template_id;
    std::string query_id;
    std::vector<std::string> parts;
};

/// Stable 64-bit FNV-1a over the length-prefixed template id, query id and
/// parts, as 16 lowercase hex chars.
std::string fingerprint(const CallContext& context);

/// One backend round trip. status 0 means the request never got an HTTP
/// answer (connection refused, timeout); a negative status is a permanent
/// client-side failure that must not be retried.
struct BackendReply {
    int status = 0;
    std::string content;
    std::string error;
};

class MockScript;

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual BackendReply send(const ChatRequest& request, const CallContext& context) = 0;
};

/// Talks to `<base_url>/chat/completions` over HTTP(S), bearer token read
/// from the endpoint's auth variable at call time.
class HttpBackend : public ChatBackend {
public:
    explicit HttpBackend(ModelEndpoint endpoint, std::chrono::seconds timeout = std::chrono::seconds(120));
    BackendReply send(const ChatRequest& request, const CallContext& context) override;

private:
    ModelEndpoint endpoint_;
    ParsedUrl url_;
    std::chrono::seconds timeout_;
};

/// Exponential backoff: delay before retry i (0-based) is base * factor^i,
/// scaled by a uniform jitter in [0.5, 1] when enabled.
struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base{1000};
    double factor = 2.0;
    bool jitter = true;

    std::chrono::milliseconds delay(int retry_index, double unit_jitter) const;
};

struct GatewayOptions {
    RetryPolicy retry;
    /// Concurrent requests allowed per endpoint (base_url + model).
    std::size_t max_in_flight_per_endpoint = 4;
    std::chrono::seconds http_timeout{120};
    /// Replaces std::this_thread::sleep_for between retries (tests).
    std::function<void(std::chrono::milliseconds)> sleep;
    /// Sees every request before it is sent.
    std::function<void(const ModelEndpoint&, const ChatRequest&, const CallContext&)> observer;
};

struct GatewayStats {
    std::uint64_t requests = 0;  // attempts, including retries
    std::uint64_t retries = 0;
    std::size_t in_flight = 0;
    std::size_t max_in_flight = 0;
};

/// The resumed part of a counterfactual run: regenerated steps after the
/// intervention point (possibly none) and the counterfactual answer.
struct Continuation {
    std::vector<ReasoningStep> downstream;
    Answer answer;
};

/// Extra instruction for a re-prompt after a rejected reply.
struct RetryNote {
    int attempt = 0;  // 1-based re-prompt counter
    std::string previous_reply;
    std::string problem;
};

/// All model I/O of an audit. Thread-safe; shared by concurrent audits.
class Gateway {
public:
    Gateway(TemplateSet templates, GatewayOptions options = {});
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Overrides the backend otherwise derived from the endpoint URL.
    void set_backend(const ModelEndpoint& endpoint, std::shared_ptr<ChatBackend> backend);

    /// Runs the agent on the query and segments the reply.
    /// Throws GatewayError, RateLimited or MalformedTrace.
    ReasoningTrace generate_trace(const Query& query, const ModelEndpoint& agent);

    /// Re-runs the agent with prefix + counterfactual pre-filled as its own
    /// reasoning. Requires counterfactual.index == prefix.size().
    Continuation resume_from(const Query& query, const std::vector<ReasoningStep>& prefix,
                             const ReasoningStep& counterfactual, const ModelEndpoint& agent);

    /// Raw critic rewrite of one step; validation is the caller's job.
    std::string critic_call(std::string_view query_id, std::string_view step_text, InterventionType type,
                            const ModelEndpoint& critic, const RetryNote* retry = nullptr);

    /// Raw judge reply comparing text_a (original) to text_b (counterfactual).
    std::string judge_call(std::string_view query_id, std::string_view text_a, std::string_view text_b,
                           const ModelEndpoint& judge, const RetryNote* retry = nullptr);

    /// Sends one rendered prompt with throttling and retries.
    std::string complete(const ModelEndpoint& endpoint, std::vector<ChatMessage> messages,
                         const CallContext& context);

    const TemplateSet& templates() const noexcept { return templates_; }
    GatewayStats stats() const;

    /// Template id used for a given resume/generate/critic/judge call.
    std::string template_id(std::string_view name) const { return templates_.get(name).id(); }

private:
    class Throttle;

    std::shared_ptr<ChatBackend> backend_for(const ModelEndpoint& endpoint);
    Throttle& throttle_for(const ModelEndpoint& endpoint);

    TemplateSet templates_;
    GatewayOptions options_;

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<ChatBackend>> backends_;
    std::map<std::string, std::unique_ptr<Throttle>> throttles_;
    std::map<std::string, std::shared_ptr<MockScript>> scripts_;

    std::atomic<std::uint64_t> requests_{0};
    std::atomic<std::uint64_t> retries_{0};
    std::atomic<std::size_t> in_flight_{0};
    std::atomic<std::size_t> max_in_flight_{0};
};

}  // namespace cotaudit
