#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cotaudit/intervention_type.hpp"

namespace cotaudit {

struct ChatMessage {
    std::string role;  // "system", "user" or "assistant"
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using TemplateVars = std::map<std::string, std::string, std::less<>>;

/// A versioned prompt loaded from `<name>.v<N>.txt`. The file is split into
/// chat messages by `[system]`, `[user]` and `[assistant]` header lines;
/// `{{var}}` placeholders are substituted at render time.
class PromptTemplate {
public:
    PromptTemplate(std::string name, int version, std::string_view source);

    const std::string& name() const noexcept { return name_; }
    int version() const noexcept { return version_; }
    /// "<name>.v<N>", recorded in audit logs and mixed into mock fingerprints.
    std::string id() const { return name_ + ".v" + std::to_string(version_); }

    /// Throws ConfigError when a placeholder has no value.
    std::vector<ChatMessage> render(const TemplateVars& vars) const;

private:
    std::string name_;
    int version_;
    std::vector<ChatMessage> messages_;
};

namespace template_names {
inline constexpr std::string_view kAgentGenerate = "agent_generate";
inline constexpr std::string_view kAgentResume = "agent_resume";
inline constexpr std::string_view kCriticRetry = "critic_retry";
inline constexpr std::string_view kJudgeSimilarity = "judge_similarity";
inline constexpr std::string_view kJudgeRetry = "judge_retry";
/// "critic_<flag>", e.g. critic_logic_flip.
std::string critic(InterventionType type);
}  // namespace template_names

/// The full set of prompts the engine needs, loaded from one directory.
/// When a name exists in several versions the highest version wins.
class TemplateSet {
public:
    /// Throws ConfigError when the directory or any required template is missing.
    static TemplateSet load(const std::filesystem::path& dir);

    /// Throws ConfigError for an unknown name.
    const PromptTemplate& get(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::vector<std::string> ids() const;
    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

/// $COTAUDIT_TEMPLATE_DIR, else the repository templates/ when present, else
/// the installed share/cotaudit/templates.
std::filesystem::path default_template_dir();

}  // namespace cotaudit
