#pragma once

#include <memory>
#include <string>

#include "cotaudit/audit.hpp"
#include "cotaudit/config.hpp"
#include "cotaudit/gateway.hpp"

namespace cotaudit {

/// Gateway, scorer and audit settings assembled from a RunConfig.
class AuditEngine {
public:
    /// Validates endpoints and loads templates. `options.retry` and the
    /// per-endpoint limit are taken from the config unless `keep_retry` is set.
    explicit AuditEngine(const RunConfig& config, GatewayOptions options = {}, bool keep_retry = false);

    Gateway& gateway() noexcept { return *gateway_; }
    const AuditSettings& settings() const noexcept { return settings_; }
    const AuditIdGenerator& ids() const noexcept { return ids_; }
    const RunConfig& config() const noexcept { return config_; }

    /// Salt used for a batch audit id: stable per query and protocol.
    std::string batch_salt(const Query& query) const;

private:
    RunConfig config_;
    std::unique_ptr<Gateway> gateway_;
    std::unique_ptr<SimilarityScorer> scorer_;
    AuditSettings settings_;
    AuditIdGenerator ids_;
};

}  // namespace cotaudit
