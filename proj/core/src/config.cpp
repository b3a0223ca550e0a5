#include "cotaudit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "cotaudit/errors.hpp"

namespace cotaudit {

using json = nlohmann::json;

ScorerKind parse_scorer_kind(std::string_view name) {
    if (name == "lexical") return ScorerKind::Lexical;
    if (name == "judge") return ScorerKind::Judge;
    throw ConfigError("scorer must be 'judge' or 'lexical', got '" + std::string(name) + "'");
}

std::string_view to_string(ScorerKind kind) noexcept { return kind == ScorerKind::Judge ? "judge" : "lexical"; }

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return (base / p).lexically_normal();
}

ModelEndpoint endpoint_at(const json& j, Role role, const std::filesystem::path& base) {
    ModelEndpoint endpoint = endpoint_from_json(j, role);
    endpoint.role = role;
    ParsedUrl url = parse_url(endpoint.base_url);
    if (url.scheme == "mock" && !base.empty() && !std::filesystem::path(url.path).is_absolute()) {
        endpoint.base_url = "mock:" + (base / url.path).lexically_normal().string();
        if (!url.query.empty()) endpoint.base_url += "?" + url.query;
    }
    return endpoint;
}

std::filesystem::path with_suffix(const std::filesystem::path& log, const std::string& suffix) {
    auto out = log;
    out.replace_filename(log.stem().string() + suffix);
    return out;
}

}  // namespace

std::filesystem::path RunConfig::effective_report_json() const {
    return report_json_path.empty() ? with_suffix(output_path, ".report.json") : report_json_path;
}

std::filesystem::path RunConfig::effective_report_markdown() const {
    return report_markdown_path.empty() ? with_suffix(output_path, ".report.md") : report_markdown_path;
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    static const std::set<std::string> known = {
        "corpus",    "output", "report_json", "report_markdown", "templates", "agent",   "critic",
        "judge",     "scorer", "tau_sim",     "lambda",          "target",    "itype",   "parallelism",
        "endpoint_parallelism", "seed", "retry", "serve_addr", "static_dir"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    RunConfig config;
    try {
        if (j.contains("corpus")) config.corpus_path = resolve(base_dir, j["corpus"].get<std::string>());
        if (j.contains("output")) config.output_path = resolve(base_dir, j["output"].get<std::string>());
        if (j.contains("report_json")) config.report_json_path = resolve(base_dir, j["report_json"].get<std::string>());
        if (j.contains("report_markdown")) {
            config.report_markdown_path = resolve(base_dir, j["report_markdown"].get<std::string>());
        }
        if (j.contains("templates")) config.template_dir = resolve(base_dir, j["templates"].get<std::string>());
        if (j.contains("static_dir")) config.static_dir = resolve(base_dir, j["static_dir"].get<std::string>());
        if (j.contains("agent")) config.agent = endpoint_at(j["agent"], Role::Agent, base_dir);
        if (j.contains("critic")) config.critic = endpoint_at(j["critic"], Role::Critic, base_dir);
        if (j.contains("judge") && !j["judge"].is_null()) config.judge = endpoint_at(j["judge"], Role::Judge, base_dir);
        if (j.contains("scorer")) config.scorer = parse_scorer_kind(j["scorer"].get<std::string>());
        if (j.contains("tau_sim")) config.thresholds.tau_sim = j["tau_sim"].get<double>();
        if (j.contains("lambda")) config.thresholds.lambda = j["lambda"].get<double>();
        if (j.contains("target")) config.target = TargetPolicy::parse(j["target"].get<std::string>());
        if (j.contains("itype")) config.itype = parse_intervention_type(j["itype"].get<std::string>());
        if (j.contains("parallelism")) config.parallelism = j["parallelism"].get<std::size_t>();
        if (j.contains("endpoint_parallelism")) config.endpoint_parallelism = j["endpoint_parallelism"].get<std::size_t>();
        if (j.contains("seed") && !j["seed"].is_null()) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("retry")) {
            config.retry_attempts = j["retry"].value("attempts", config.retry_attempts);
            config.retry_base_ms = j["retry"].value("base_ms", config.retry_base_ms);
        }
        if (j.contains("serve_addr")) config.serve_addr = j["serve_addr"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
    return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

void validate(const RunConfig& config, bool need_corpus, bool need_output) {
    if (need_corpus && config.corpus_path.empty()) throw ConfigError("no corpus path");
    if (need_output && config.output_path.empty()) throw ConfigError("no output path");
    if (!config.agent) throw ConfigError("no agent endpoint configured");
    if (!config.critic) throw ConfigError("no critic endpoint configured");
    if (config.scorer == ScorerKind::Judge && !config.judge) throw ConfigError("judge scorer needs a judge endpoint");
    if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (config.endpoint_parallelism < 1) throw ConfigError("endpoint parallelism must be >= 1");
    if (config.retry_attempts < 1) throw ConfigError("retry attempts must be >= 1");
    if (config.retry_base_ms < 0) throw ConfigError("retry base delay must be >= 0");
    try {
        validate(config.thresholds);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    auto check = [](const ModelEndpoint& endpoint) {
        validate(endpoint);
        ParsedUrl url = parse_url(endpoint.base_url);
        if (url.scheme == "mock") {
            if (!std::filesystem::exists(url.path)) throw ConfigError("mock script not found: " + url.path);
            return;
        }
        if (!endpoint.auth_env.empty()) {
            const char* value = std::getenv(endpoint.auth_env.c_str());
            if (value == nullptr || *value == '\0') {
                throw ConfigError(std::string(to_string(endpoint.role)) + " endpoint needs environment variable " +
                                  endpoint.auth_env);
            }
        }
    };
    check(*config.agent);
    check(*config.critic);
    if (config.judge && config.scorer == ScorerKind::Judge) check(*config.judge);
}

}  // namespace cotaudit
