#include "cotaudit/mock_backend.hpp"

#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cotaudit/errors.hpp"

namespace cotaudit {

using json = nlohmann::json;

CallContext generate_context(const TemplateSet& templates, std::string_view query_id) {
    return {templates.get(template_names::kAgentGenerate).id(), std::string(query_id), {}};
}

CallContext resume_context(const TemplateSet& templates, std::string_view query_id,
                           const std::vector<std::string>& prefix, std::string_view counterfactual) {
    CallContext context{templates.get(template_names::kAgentResume).id(), std::string(query_id), prefix};
    context.parts.emplace_back(counterfactual);
    return context;
}

CallContext critic_context(const TemplateSet& templates, std::string_view query_id, InterventionType type,
                           std::string_view step_text, int attempt) {
    return {templates.get(template_names::critic(type)).id(),
            std::string(query_id),
            {std::string(step_text), "attempt:" + std::to_string(attempt)}};
}

CallContext judge_context(const TemplateSet& templates, std::string_view query_id, std::string_view text_a,
                          std::string_view text_b, int attempt) {
    return {templates.get(template_names::kJudgeSimilarity).id(),
            std::string(query_id),
            {std::string(text_a), std::string(text_b), "attempt:" + std::to_string(attempt)}};
}

namespace {

std::string required_string(const json& entry, const char* field, std::size_t line) {
    if (!entry.contains(field) || !entry[field].is_string()) {
        throw ConfigError("mock script line " + std::to_string(line) + ": missing string field '" + field + "'");
    }
    return entry[field].get<std::string>();
}

CallContext context_of(const json& entry, const TemplateSet& templates, std::size_t line) {
    const std::string call = required_string(entry, "call", line);
    const std::string query_id = required_string(entry, "query_id", line);
    const int attempt = entry.value("attempt", 0);
    CallContext context;
    if (call == "generate") {
        context = generate_context(templates, query_id);
    } else if (call == "resume") {
        std::vector<std::string> prefix;
        if (entry.contains("prefix")) prefix = entry["prefix"].get<std::vector<std::string>>();
        context = resume_context(templates, query_id, prefix, required_string(entry, "counterfactual", line));
    } else if (call == "critic") {
        context = critic_context(templates, query_id, parse_intervention_type(required_string(entry, "itype", line)),
                                 required_string(entry, "step", line), attempt);
    } else if (call == "judge") {
        context = judge_context(templates, query_id, required_string(entry, "a", line),
                                required_string(entry, "b", line), attempt);
    } else {
        throw ConfigError("mock script line " + std::to_string(line) + ": unknown call '" + call + "'");
    }
    if (entry.contains("template")) context.template_id = entry["template"].get<std::string>();
    return context;
}

std::vector<MockReply> replies_of(const json& entry, std::size_t line) {
    if (entry.contains("response")) return {MockReply{200, entry["response"].get<std::string>()}};
    if (!entry.contains("replies") || !entry["replies"].is_array() || entry["replies"].empty()) {
        throw ConfigError("mock script line " + std::to_string(line) + ": needs 'response' or 'replies'");
    }
    std::vector<MockReply> replies;
    for (const auto& reply : entry["replies"]) {
        replies.push_back({reply.value("status", 200), reply.value("content", std::string())});
    }
    return replies;
}

}  // namespace

std::shared_ptr<MockScript> MockScript::load(const std::filesystem::path& path, const TemplateSet& templates) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read mock script " + path.string());
    auto script = std::make_shared<MockScript>();
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        json entry;
        try {
            entry = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError("mock script " + path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
        try {
            CallContext context = context_of(entry, templates, line);
            Key key{context.query_id, fingerprint(context)};
            if (script->entries_.contains(key)) {
                throw ConfigError("mock script line " + std::to_string(line) + ": duplicate entry");
            }
            script->entries_.emplace(std::move(key), Entry{replies_of(entry, line), 0});
        } catch (const json::exception& e) {
            throw ConfigError("mock script " + path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
    }
    return script;
}

void MockScript::add(const CallContext& context, std::vector<MockReply> replies) {
    if (replies.empty()) throw ConfigError("mock entry needs at least one reply");
    std::lock_guard lock(mutex_);
    entries_[Key{context.query_id, fingerprint(context)}] = Entry{std::move(replies), 0};
}

MockReply MockScript::next(const CallContext& context) {
    std::lock_guard lock(mutex_);
    ++calls_;
    auto it = entries_.find(Key{context.query_id, fingerprint(context)});
    if (it == entries_.end()) {
        std::string detail = context.template_id + " for query '" + context.query_id + "'";
        for (const auto& part : context.parts) detail += " | " + part.substr(0, 60);
        throw MockScriptMiss("no scripted reply: " + detail);
    }
    Entry& entry = it->second;
    MockReply reply = entry.replies[entry.cursor];
    if (entry.cursor + 1 < entry.replies.size()) ++entry.cursor;
    return reply;
}

std::size_t MockScript::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::size_t MockScript::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

MockBackend::MockBackend(std::shared_ptr<MockScript> script, std::chrono::milliseconds latency)
    : script_(std::move(script)), latency_(latency) {}

BackendReply MockBackend::send(const ChatRequest& /*request*/, const CallContext& context) {
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    MockReply reply = script_->next(context);
    BackendReply out;
    out.status = reply.status;
    if (reply.status >= 200 && reply.status < 300) {
        out.content = std::move(reply.content);
    } else {
        out.error = "scripted HTTP " + std::to_string(reply.status);
    }
    return out;
}

}  // namespace cotaudit
