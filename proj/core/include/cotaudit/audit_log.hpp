#pragma once

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "cotaudit/audit.hpp"

namespace cotaudit {

struct LogScan {
    std::vector<AuditRecord> records;
    /// Byte length of the intact prefix (every complete, valid line).
    std::uintmax_t valid_bytes = 0;
    bool truncated_tail = false;
    std::vector<std::string> warnings;
};

/// Reads an append-only JSONL audit log. A missing file is an empty log. An
/// unparseable final line is a torn write: reported in `warnings` and ignored.
/// Any earlier unparseable or self-inconsistent line throws CorruptLog.
LogScan scan_log(const std::filesystem::path& path);

/// Query ids that already have a terminal (completed or failed) record.
std::set<std::string> resume_scan(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// The single append point of a log. Opening it cuts a torn final line so
/// new records start on a fresh line. Each append is flushed and synced
/// before returning. Thread-safe.
class AuditLog {
public:
    explicit AuditLog(const std::filesystem::path& path);
    ~AuditLog();

    AuditLog(const AuditLog&) = delete;
    AuditLog& operator=(const AuditLog&) = delete;

    void append(const AuditRecord& record);
    const std::filesystem::path& path() const noexcept { return path_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
    std::mutex mutex_;
    std::vector<std::string> warnings_;
};

}  // namespace cotaudit
