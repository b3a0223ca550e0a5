#include "cotaudit/templates.hpp"

#include <cstdlib>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cotaudit/errors.hpp"
#include "cotaudit/trace.hpp"

#ifndef COTAUDIT_TEMPLATE_DIR
#define COTAUDIT_TEMPLATE_DIR "templates"
#endif

namespace cotaudit {

namespace {

bool is_role_header(std::string_view line, std::string& role) {
    line = trim(line);
    if (line == "[system]" || line == "[user]" || line == "[assistant]") {
        role = std::string(line.substr(1, line.size() - 2));
        return true;
    }
    return false;
}

const std::vector<std::string>& required_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out{std::string(template_names::kAgentGenerate),
                                     std::string(template_names::kAgentResume),
                                     std::string(template_names::kCriticRetry),
                                     std::string(template_names::kJudgeSimilarity),
                                     std::string(template_names::kJudgeRetry)};
        for (auto type : kAllInterventionTypes) out.push_back(template_names::critic(type));
        return out;
    }();
    return names;
}

}  // namespace

std::string_view to_string(InterventionType type) noexcept {
    switch (type) {
        case InterventionType::LogicFlip: return "LogicFlip";
        case InterventionType::FactReversal: return "FactReversal";
        case InterventionType::PremiseNegation: return "PremiseNegation";
        case InterventionType::CausalInversion: return "CausalInversion";
    }
    return "LogicFlip";
}

std::string_view to_flag(InterventionType type) noexcept {
    switch (type) {
        case InterventionType::LogicFlip: return "logic_flip";
        case InterventionType::FactReversal: return "fact_reversal";
        case InterventionType::PremiseNegation: return "premise_negation";
        case InterventionType::CausalInversion: return "causal_inversion";
    }
    return "logic_flip";
}

InterventionType parse_intervention_type(std::string_view name) {
    for (auto type : kAllInterventionTypes) {
        if (name == to_string(type) || name == to_flag(type)) return type;
    }
    throw ConfigError("unknown intervention type '" + std::string(name) + "'");
}

std::string template_names::critic(InterventionType type) { return "critic_" + std::string(to_flag(type)); }

PromptTemplate::PromptTemplate(std::string name, int version, std::string_view source)
    : name_(std::move(name)), version_(version) {
    std::istringstream in{std::string(source)};
    std::string line;
    std::string role;
    std::string body;
    bool open = false;
    auto flush = [&]() {
        if (!open) return;
        messages_.push_back({role, std::string(trim(body))});
        body.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string next_role;
        if (is_role_header(line, next_role)) {
            flush();
            role = next_role;
            open = true;
            continue;
        }
        if (!open) {
            if (!trim(line).empty()) throw ConfigError("template " + id() + ": text before the first [role] header");
            continue;
        }
        body += line;
        body.push_back('\n');
    }
    flush();
    if (messages_.empty()) throw ConfigError("template " + id() + " has no messages");
}

std::vector<ChatMessage> PromptTemplate::render(const TemplateVars& vars) const {
    std::vector<ChatMessage> out;
    out.reserve(messages_.size());
    for (const auto& message : messages_) {
        std::string text;
        std::string_view src = message.content;
        std::size_t pos = 0;
        while (true) {
            auto open = src.find("{{", pos);
            if (open == std::string_view::npos) {
                text.append(src.substr(pos));
                break;
            }
            auto close = src.find("}}", open + 2);
            if (close == std::string_view::npos) throw ConfigError("template " + id() + ": unterminated placeholder");
            text.append(src.substr(pos, open - pos));
            auto key = trim(src.substr(open + 2, close - open - 2));
            auto it = vars.find(key);
            if (it == vars.end()) throw ConfigError("template " + id() + ": no value for {{" + std::string(key) + "}}");
            text.append(it->second);
            pos = close + 2;
        }
        out.push_back({message.role, std::move(text)});
    }
    return out;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
    TemplateSet set;
    set.dir_ = dir;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        // <name>.v<N>.txt
        std::string stem = entry.path().stem().string();
        auto dot = stem.rfind(".v");
        if (dot == std::string::npos) continue;
        int version = 0;
        std::string_view digits(stem.data() + dot + 2, stem.size() - dot - 2);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), version);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) continue;
        std::string name = stem.substr(0, dot);

        auto existing = set.templates_.find(name);
        if (existing != set.templates_.end() && existing->second.version() >= version) continue;

        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        PromptTemplate loaded(name, version, buffer.str());
        if (existing != set.templates_.end()) {
            existing->second = std::move(loaded);
        } else {
            set.templates_.emplace(name, std::move(loaded));
        }
    }
    for (const auto& name : required_names()) {
        if (!set.contains(name)) throw ConfigError("template directory " + dir.string() + " lacks '" + name + "'");
    }
    return set;
}

const PromptTemplate& TemplateSet::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw ConfigError("no template named '" + std::string(name) + "'");
    return it->second;
}

bool TemplateSet::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

std::vector<std::string> TemplateSet::ids() const {
    std::vector<std::string> out;
    for (const auto& [name, tpl] : templates_) out.push_back(tpl.id());
    return out;
}

std::filesystem::path default_template_dir() {
    if (const char* env = std::getenv("COTAUDIT_TEMPLATE_DIR"); env != nullptr && *env != '\0') return env;
    // the source tree when running from a build, the share dir once installed
    const std::filesystem::path build_tree = COTAUDIT_TEMPLATE_DIR;
    if (std::filesystem::is_directory(build_tree)) return build_tree;
    return COTAUDIT_INSTALLED_TEMPLATE_DIR;
}

}  // namespace cotaudit
