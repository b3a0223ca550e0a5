#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cotaudit/gateway.hpp"

namespace cotaudit {

// Call contexts, shared by the gateway (when calling) and by mock scripts
// (when keying replies), so both sides fingerprint identically.
CallContext generate_context(const TemplateSet& templates, std::string_view query_id);
CallContext resume_context(const TemplateSet& templates, std::string_view query_id,
                           const std::vector<std::string>& prefix, std::string_view counterfactual);
CallContext critic_context(const TemplateSet& templates, std::string_view query_id, InterventionType type,
                           std::string_view step_text, int attempt);
CallContext judge_context(const TemplateSet& templates, std::string_view query_id, std::string_view text_a,
                          std::string_view text_b, int attempt);

struct MockReply {
    int status = 200;
    std::string content;
};

/// Scripted replies keyed by (query id, context fingerprint). Each key holds a
/// reply sequence; calls walk it and stay on the last entry once exhausted.
///
/// On disk a script is JSONL, one entry per line:
///
///     {"call":"generate","query_id":"q1","response":"Step 1: ...\nAnswer: ..."}
///     {"call":"resume","query_id":"q1","prefix":[],"counterfactual":"...","response":"Answer: ..."}
///     {"call":"critic","query_id":"q1","itype":"FactReversal","step":"...","response":"..."}
///     {"call":"judge","query_id":"q1","a":"...","b":"...","response":"0.97"}
///
/// "attempt" (critic, judge) defaults to 0; "replies":[{"status":429},{"content":"..."}]
/// replaces "response" to script transport failures.
class MockScript {
public:
    using Key = std::pair<std::string, std::string>;

    /// Throws ConfigError on unreadable files, bad entries or duplicate keys.
    static std::shared_ptr<MockScript> load(const std::filesystem::path& path, const TemplateSet& templates);

    void add(const CallContext& context, std::vector<MockReply> replies);
    void add(const CallContext& context, std::string response) { add(context, {MockReply{200, std::move(response)}}); }

    /// Next reply for the context. Throws MockScriptMiss when unscripted.
    MockReply next(const CallContext& context);

    std::size_t size() const;
    /// Number of next() calls served so far, across all keys.
    std::size_t calls() const;

private:
    struct Entry {
        std::vector<MockReply> replies;
        std::size_t cursor = 0;
    };

    mutable std::mutex mutex_;
    std::map<Key, Entry> entries_;
    std::size_t calls_ = 0;
};

/// Deterministic offline backend driven by a MockScript.
class MockBackend : public ChatBackend {
public:
    explicit MockBackend(std::shared_ptr<MockScript> script,
                         std::chrono::milliseconds latency = std::chrono::milliseconds(0));

    BackendReply send(const ChatRequest& request, const CallContext& context) override;

    MockScript& script() noexcept { return *script_; }

private:
    std::shared_ptr<MockScript> script_;
    std::chrono::milliseconds latency_;
};

}  // namespace cotaudit
