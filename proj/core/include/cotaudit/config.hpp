#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cotaudit/audit.hpp"
#include "cotaudit/endpoint.hpp"
#include "cotaudit/intervention.hpp"

namespace cotaudit {

enum class ScorerKind { Lexical, Judge };

ScorerKind parse_scorer_kind(std::string_view name);
std::string_view to_string(ScorerKind kind) noexcept;

/// Everything a batch or a server needs. Defaults follow the reference
/// protocol: a LogicFlip on the first step, tau_sim 0.85, lambda 0.5.
struct RunConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path output_path;
    /// Report files; empty means "<output stem>.report.json/.md" next to the log.
    std::filesystem::path report_json_path;
    std::filesystem::path report_markdown_path;
    std::filesystem::path template_dir;

    std::optional<ModelEndpoint> agent;
    std::optional<ModelEndpoint> critic;
    std::optional<ModelEndpoint> judge;

    ScorerKind scorer = ScorerKind::Lexical;
    Thresholds thresholds;
    TargetPolicy target = TargetPolicy::first();
    InterventionType itype = InterventionType::LogicFlip;
    std::size_t parallelism = 4;
    std::size_t endpoint_parallelism = 4;
    std::optional<std::uint64_t> seed;
    int retry_attempts = 5;
    std::int64_t retry_base_ms = 1000;

    std::string serve_addr = "127.0.0.1:8080";
    std::filesystem::path static_dir;

    std::filesystem::path effective_report_json() const;
    std::filesystem::path effective_report_markdown() const;
};

/// Parses a JSON config document. Relative paths (including mock script
/// paths inside mock: URLs) resolve against `base_dir`. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& json, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError on missing endpoints, bad thresholds, zero parallelism,
/// empty paths, or an unset auth environment variable of an HTTP endpoint.
/// `need_corpus` / `need_output` select which paths must be present.
void validate(const RunConfig& config, bool need_corpus = true, bool need_output = true);

}  // namespace cotaudit
