#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cotaudit {

enum class Role { Agent, Critic, Judge };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view name);

/// Sampling configuration. This is the only handle the engine has on the
/// per-step sampling noise of the agent.
struct SamplingParams {
    double temperature = 0.0;
    double top_p = 1.0;
    std::optional<std::int64_t> seed;
    int max_tokens = 1024;

    friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

/// Throws ConfigError when a field is out of range.
void validate(const SamplingParams& params);

/// Agent 0.7, critic and judge 0.0.
SamplingParams default_sampling(Role role);

struct ParsedUrl {
    std::string scheme;  // "http", "https" or "mock"
    std::string host;    // empty for mock
    int port = 0;
    std::string path;    // path component (for mock: the script file)
    std::string query;   // raw text after '?', may be empty
};

/// Accepts http://, https:// and mock: URLs. Throws ConfigError otherwise.
ParsedUrl parse_url(std::string_view url);

struct ModelEndpoint {
    Role role = Role::Agent;
    std::string base_url;
    std::string model_name;
    /// Name of the environment variable holding the bearer token. Empty means
    /// no Authorization header. Never the token itself.
    std::string auth_env;
    SamplingParams sampling;

    /// base_url + model, the identity used for per-endpoint throttling.
    std::string key() const { return base_url + "#" + model_name; }

    friend bool operator==(const ModelEndpoint&, const ModelEndpoint&) = default;
};

/// Throws ConfigError on an unparseable URL, an empty model name, or an auth
/// field that does not look like an environment variable name.
void validate(const ModelEndpoint& endpoint);

}  // namespace cotaudit
