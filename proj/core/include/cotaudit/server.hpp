#pragma once

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cotaudit/audit_log.hpp"
#include "cotaudit/engine.hpp"

namespace httplib {
class Server;
}

namespace cotaudit {

/// JSON HTTP API over an engine and its audit log.
///
///   POST /audits                       {query_id} or {query_text, category[, query_id]} -> 202 {audit_id}
///   GET  /audits/{id}                  200 record, 202 while running, 404
///   GET  /audits?category=...          {audits: [...]}
///   POST /audits/{id}/interventions    {target_index, itype} -> 202 {audit_id, parent_audit_id}
///   GET  /report                       aggregate report over every stored record
///   GET  /traces/{id}                  {audit_id, query, trace}
///
/// Audits run in the background, at most `parallelism` at once, and are
/// appended to the same log the batch runner uses.
class AuditService {
public:
    /// `corpus` may be empty; then POST /audits needs query_text.
    AuditService(AuditEngine& engine, std::vector<Query> corpus, std::optional<std::filesystem::path> static_dir = {});
    ~AuditService();

    AuditService(const AuditService&) = delete;
    AuditService& operator=(const AuditService&) = delete;

    /// Binds and starts serving on a background thread. Port 0 picks a free
    /// port. Returns the bound port; throws BindError.
    int start(const std::string& host, int port);
    /// Blocks until stop() is called from elsewhere.
    void wait();
    /// Stops accepting requests and waits for running audits.
    void stop();

    /// Number of stored records (for tests).
    std::size_t record_count() const;

private:
    void install_routes();
    std::string submit_audit(Query query);
    std::string submit_intervention(const AuditRecord& parent, const InterventionSpec& spec);
    void launch(std::string audit_id, std::function<AuditRecord()> work);
    void store(AuditRecord record);

    AuditEngine& engine_;
    std::map<std::string, Query> corpus_;
    std::optional<std::filesystem::path> static_dir_;
    AuditLog log_;
    std::unique_ptr<httplib::Server> http_;
    std::thread listener_;

    mutable std::mutex mutex_;
    std::condition_variable slots_;
    std::size_t running_ = 0;
    std::size_t submitted_ = 0;
    std::map<std::string, AuditRecord> records_;
    std::vector<std::string> order_;
    std::set<std::string> pending_;
    std::map<std::string, std::string> errors_;  // audits that threw instead of failing
    std::vector<std::thread> jobs_;
    bool stopping_ = false;
};

/// Splits "host:port". Throws ConfigError.
std::pair<std::string, int> parse_bind_address(const std::string& address);

}  // namespace cotaudit
