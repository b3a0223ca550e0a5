#include "cotaudit/gateway.hpp"

#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <random>
#include <thread>

#include "cotaudit/errors.hpp"
#include "cotaudit/mock_backend.hpp"

namespace cotaudit {

using json = nlohmann::json;

json to_wire(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", message.role}, {"content", message.content}});
    }
    json body = {
        {"model", request.model},
        {"messages", std::move(messages)},
        {"temperature", request.sampling.temperature},
        {"top_p", request.sampling.top_p},
        {"max_tokens", request.sampling.max_tokens},
    };
    if (request.sampling.seed) body["seed"] = *request.sampling.seed;
    return body;
}

std::string content_from_wire(std::string_view body) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) throw GatewayError("response is not JSON");
    const auto& choices = parsed.value("choices", json::array());
    if (!choices.is_array() || choices.empty()) throw GatewayError("response has no choices");
    const auto& message = choices[0].value("message", json::object());
    if (!message.contains("content")) throw GatewayError("choices[0].message has no content");
    const auto& content = message["content"];
    if (content.is_null()) return {};
    if (!content.is_string()) throw GatewayError("choices[0].message.content is not a string");
    return content.get<std::string>();
}

std::string fingerprint(const CallContext& context) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&hash](std::string_view bytes) {
        for (unsigned char c : bytes) {
            hash ^= c;
            hash *= 0x100000001b3ULL;
        }
    };
    auto mix_field = [&](std::string_view field) {
        std::uint64_t n = field.size();
        char len[8];
        for (int i = 0; i < 8; ++i) len[i] = static_cast<char>((n >> (8 * i)) & 0xff);
        mix_bytes(std::string_view(len, 8));
        mix_bytes(field);
    };
    mix_field(context.template_id);
    mix_field(context.query_id);
    mix_field(std::to_string(context.parts.size()));
    for (const auto& part : context.parts) mix_field(part);

    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

std::chrono::milliseconds RetryPolicy::delay(int retry_index, double unit_jitter) const {
    double ms = static_cast<double>(base.count()) * std::pow(factor, retry_index);
    if (jitter) ms *= 0.5 + 0.5 * unit_jitter;
    return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

class Gateway::Throttle {
public:
    explicit Throttle(std::size_t limit) : available_(limit) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t available_;
};

namespace {

double unit_jitter() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

std::vector<std::string> texts_of(const std::vector<ReasoningStep>& steps) {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto& step : steps) out.push_back(step.text);
    return out;
}

}  // namespace

Gateway::Gateway(TemplateSet templates, GatewayOptions options)
    : templates_(std::move(templates)), options_(std::move(options)) {
    if (options_.max_in_flight_per_endpoint == 0) throw ConfigError("per-endpoint parallelism must be >= 1");
    if (options_.retry.max_attempts < 1) throw ConfigError("retry attempts must be >= 1");
}

Gateway::~Gateway() = default;

void Gateway::set_backend(const ModelEndpoint& endpoint, std::shared_ptr<ChatBackend> backend) {
    std::lock_guard lock(mutex_);
    backends_[endpoint.key()] = std::move(backend);
}

std::shared_ptr<ChatBackend> Gateway::backend_for(const ModelEndpoint& endpoint) {
    std::lock_guard lock(mutex_);
    auto it = backends_.find(endpoint.key());
    if (it != backends_.end()) return it->second;

    ParsedUrl url = parse_url(endpoint.base_url);
    std::shared_ptr<ChatBackend> backend;
    if (url.scheme == "mock") {
        // Endpoints naming the same script share one script instance.
        auto& script = scripts_[url.path];
        if (!script) script = MockScript::load(url.path, templates_);
        std::chrono::milliseconds latency{0};
        constexpr std::string_view kLatency = "latency_ms=";
        if (auto pos = url.query.find(kLatency); pos != std::string::npos) {
            latency = std::chrono::milliseconds(std::atoll(url.query.c_str() + pos + kLatency.size()));
        }
        backend = std::make_shared<MockBackend>(script, latency);
    } else {
        backend = std::make_shared<HttpBackend>(endpoint, options_.http_timeout);
    }
    backends_.emplace(endpoint.key(), backend);
    return backend;
}

Gateway::Throttle& Gateway::throttle_for(const ModelEndpoint& endpoint) {
    std::lock_guard lock(mutex_);
    auto& slot = throttles_[endpoint.key()];
    if (!slot) slot = std::make_unique<Throttle>(options_.max_in_flight_per_endpoint);
    return *slot;
}

std::string Gateway::complete(const ModelEndpoint& endpoint, std::vector<ChatMessage> messages,
                              const CallContext& context) {
    auto backend = backend_for(endpoint);
    Throttle& throttle = throttle_for(endpoint);
    ChatRequest request{endpoint.model_name, std::move(messages), endpoint.sampling};

    BackendReply last;
    for (int attempt = 0; attempt < options_.retry.max_attempts; ++attempt) {
        if (attempt > 0) {
            ++retries_;
            auto wait = options_.retry.delay(attempt - 1, unit_jitter());
            if (options_.sleep) {
                options_.sleep(wait);
            } else {
                std::this_thread::sleep_for(wait);
            }
        }

        struct InFlight {
            Gateway& gw;
            Throttle& throttle;
            InFlight(Gateway& g, Throttle& t) : gw(g), throttle(t) {
                throttle.acquire();
                auto now = ++gw.in_flight_;
                auto seen = gw.max_in_flight_.load();
                while (now > seen && !gw.max_in_flight_.compare_exchange_weak(seen, now)) {
                }
            }
            ~InFlight() {
                --gw.in_flight_;
                throttle.release();
            }
        };

        {
            InFlight guard(*this, throttle);
            ++requests_;
            if (options_.observer) options_.observer(endpoint, request, context);
            last = backend->send(request, context);
        }
        if (last.status >= 200 && last.status < 300) return std::move(last.content);
        if (!retryable(last.status)) {
            throw GatewayError(std::string(to_string(endpoint.role)) + " endpoint failed: " +
                               (last.error.empty() ? "HTTP " + std::to_string(last.status) : last.error));
        }
    }
    if (last.status == 429) {
        throw RateLimited(std::string(to_string(endpoint.role)) + " endpoint still rate limited after " +
                          std::to_string(options_.retry.max_attempts) + " attempts");
    }
    throw GatewayError(std::string(to_string(endpoint.role)) + " endpoint failed after " +
                       std::to_string(options_.retry.max_attempts) + " attempts: " +
                       (last.error.empty() ? "HTTP " + std::to_string(last.status) : last.error));
}

ReasoningTrace Gateway::generate_trace(const Query& query, const ModelEndpoint& agent) {
    auto messages = templates_.get(template_names::kAgentGenerate).render({{"query", query.text}});
    std::string raw = complete(agent, std::move(messages), generate_context(templates_, query.id));
    return bind(query.id, segment_trace(raw));
}

Continuation Gateway::resume_from(const Query& query, const std::vector<ReasoningStep>& prefix,
                                  const ReasoningStep& counterfactual, const ModelEndpoint& agent) {
    if (counterfactual.index != prefix.size()) {
        throw DomainError("counterfactual step index " + std::to_string(counterfactual.index) +
                          " does not follow a prefix of " + std::to_string(prefix.size()));
    }
    std::vector<ReasoningStep> so_far = prefix;
    so_far.push_back(counterfactual);
    const std::size_t next_step = counterfactual.index + 2;

    auto messages = templates_.get(template_names::kAgentResume)
                        .render({{"query", query.text},
                                 {"reasoning_so_far", render_steps(so_far)},
                                 {"next_step", std::to_string(next_step)}});
    std::string raw = complete(agent, std::move(messages),
                               resume_context(templates_, query.id, texts_of(prefix), counterfactual.text));
    TraceBody body = segment_continuation(raw, next_step);
    return {std::move(body.steps), std::move(body.answer)};
}

std::string Gateway::critic_call(std::string_view query_id, std::string_view step_text, InterventionType type,
                                 const ModelEndpoint& critic, const RetryNote* retry) {
    auto messages = templates_.get(template_names::critic(type)).render({{"step", std::string(step_text)}});
    if (retry != nullptr) {
        messages.push_back({"assistant", retry->previous_reply});
        auto extra = templates_.get(template_names::kCriticRetry)
                         .render({{"problem", retry->problem},
                                  {"attempt", std::to_string(retry->attempt + 1)},
                                  {"step", std::string(step_text)}});
        messages.insert(messages.end(), extra.begin(), extra.end());
    }
    return complete(critic, std::move(messages),
                    critic_context(templates_, query_id, type, step_text, retry ? retry->attempt : 0));
}

std::string Gateway::judge_call(std::string_view query_id, std::string_view text_a, std::string_view text_b,
                                const ModelEndpoint& judge, const RetryNote* retry) {
    auto messages = templates_.get(template_names::kJudgeSimilarity)
                        .render({{"text_a", std::string(text_a)}, {"text_b", std::string(text_b)}});
    if (retry != nullptr) {
        messages.push_back({"assistant", retry->previous_reply});
        auto extra = templates_.get(template_names::kJudgeRetry).render({{"attempt", std::to_string(retry->attempt + 1)}});
        messages.insert(messages.end(), extra.begin(), extra.end());
    }
    return complete(judge, std::move(messages),
                    judge_context(templates_, query_id, text_a, text_b, retry ? retry->attempt : 0));
}

GatewayStats Gateway::stats() const {
    return {requests_.load(), retries_.load(), in_flight_.load(), max_in_flight_.load()};
}

}  // namespace cotaudit
