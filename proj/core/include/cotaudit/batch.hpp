#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cotaudit/analytics.hpp"
#include "cotaudit/config.hpp"
#include "cotaudit/gateway.hpp"

namespace cotaudit {

class AuditEngine;

struct BatchSummary {
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;
    std::filesystem::path report_json;
    std::filesystem::path report_markdown;
    std::vector<std::string> warnings;
    GatewayStats gateway;
    std::size_t max_audits_in_flight = 0;
};

struct BatchHooks {
    /// Called after each record has been appended to the log.
    std::function<void(const AuditRecord&)> on_record;
};

/// Audits every corpus query that has no terminal record in the output log.
/// Records are appended in corpus order as soon as all earlier ones are done,
/// so logs are reproducible whatever the scheduling. At most
/// `config.parallelism` audits run at once. The report over the whole log is
/// written at the end.
///
/// Throws ConfigError (before any model call) on configuration or corpus
/// problems; per-query failures become Failed records.
BatchSummary run_batch(const RunConfig& config, const BatchHooks& hooks = {});
/// Same, with a caller-owned engine (tests inject backends through it).
BatchSummary run_batch(AuditEngine& engine, const BatchHooks& hooks = {});

/// Recomputes the report from a log and writes both renderings. Returns it.
AggregateReport write_report(const std::filesystem::path& log, const std::filesystem::path& json_path,
                             const std::filesystem::path& markdown_path);

}  // namespace cotaudit
