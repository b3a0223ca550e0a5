#include "cotaudit/endpoint.hpp"

#include <cctype>
#include <charconv>

#include "cotaudit/errors.hpp"

namespace cotaudit {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::Agent: return "agent";
        case Role::Critic: return "critic";
        case Role::Judge: return "judge";
    }
    return "agent";
}

Role parse_role(std::string_view name) {
    if (name == "agent") return Role::Agent;
    if (name == "critic") return Role::Critic;
    if (name == "judge") return Role::Judge;
    throw ConfigError("unknown endpoint role '" + std::string(name) + "'");
}

void validate(const SamplingParams& params) {
    if (!(params.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (!(params.top_p > 0.0 && params.top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
    if (params.max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

SamplingParams default_sampling(Role role) {
    SamplingParams params;
    params.temperature = role == Role::Agent ? 0.7 : 0.0;
    return params;
}

ParsedUrl parse_url(std::string_view url) {
    ParsedUrl parsed;
    auto colon = url.find(':');
    if (colon == std::string_view::npos || colon == 0) throw ConfigError("not a URL: '" + std::string(url) + "'");
    for (char c : url.substr(0, colon)) parsed.scheme.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::string_view rest = url.substr(colon + 1);

    auto split_query = [&](std::string_view& part) {
        auto q = part.find('?');
        if (q != std::string_view::npos) {
            parsed.query = std::string(part.substr(q + 1));
            part = part.substr(0, q);
        }
    };

    if (parsed.scheme == "mock") {
        // mock:relative/path, mock:/abs/path or mock:///abs/path
        if (rest.starts_with("//")) rest.remove_prefix(2);
        split_query(rest);
        if (rest.empty()) throw ConfigError("mock URL needs a script path: '" + std::string(url) + "'");
        parsed.path = std::string(rest);
        return parsed;
    }
    if (parsed.scheme != "http" && parsed.scheme != "https") {
        throw ConfigError("unsupported URL scheme '" + parsed.scheme + "'");
    }
    if (!rest.starts_with("//")) throw ConfigError("not a URL: '" + std::string(url) + "'");
    rest.remove_prefix(2);
    split_query(rest);
    auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    parsed.path = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
    while (!parsed.path.empty() && parsed.path.back() == '/') parsed.path.pop_back();

    auto port_colon = authority.rfind(':');
    if (port_colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        std::string_view port_text = authority.substr(port_colon + 1);
        int port = 0;
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port <= 0 || port > 65535) {
            throw ConfigError("bad port in URL '" + std::string(url) + "'");
        }
        parsed.port = port;
        authority = authority.substr(0, port_colon);
    } else {
        parsed.port = parsed.scheme == "https" ? 443 : 80;
    }
    if (authority.empty()) throw ConfigError("URL has no host: '" + std::string(url) + "'");
    parsed.host = std::string(authority);
    return parsed;
}

void validate(const ModelEndpoint& endpoint) {
    parse_url(endpoint.base_url);
    if (endpoint.model_name.empty()) throw ConfigError("model_name must be non-empty");
    for (char c : endpoint.auth_env) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            throw ConfigError("auth must name an environment variable, got something else");
        }
    }
    validate(endpoint.sampling);
}

}  // namespace cotaudit
