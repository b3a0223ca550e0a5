#include "cotaudit/audit_log.hpp"

#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cotaudit/errors.hpp"

namespace cotaudit {

LogScan scan_log(const std::filesystem::path& path) {
    LogScan scan;
    if (!std::filesystem::exists(path)) return scan;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptLog("cannot read log " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', start);
        const bool terminated = end != std::string::npos;
        if (!terminated) end = text.size();
        const std::string_view line(text.data() + start, end - start);
        const bool last = !terminated || end + 1 >= text.size();

        if (trim(line).empty()) {
            if (terminated) scan.valid_bytes = end + 1;
            start = end + 1;
            continue;
        }
        try {
            AuditRecord record = record_from_json(nlohmann::json::parse(line));
            verify_record(record);
            scan.records.push_back(std::move(record));
            scan.valid_bytes = terminated ? end + 1 : end;
        } catch (const std::exception& e) {
            if (!last) {
                throw CorruptLog(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            scan.truncated_tail = true;
            scan.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                    ": ignoring truncated final line (" + std::to_string(line.size()) + " bytes)");
        }
        start = end + 1;
    }
    return scan;
}

std::set<std::string> resume_scan(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    LogScan scan = scan_log(path);
    if (warnings != nullptr) warnings->insert(warnings->end(), scan.warnings.begin(), scan.warnings.end());
    std::set<std::string> ids;
    for (const auto& record : scan.records) ids.insert(record.query.id);
    return ids;
}

AuditLog::AuditLog(const std::filesystem::path& path) : path_(path) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    LogScan scan = scan_log(path_);
    warnings_ = scan.warnings;
    if (std::filesystem::exists(path_)) {
        const auto size = std::filesystem::file_size(path_);
        if (scan.valid_bytes < size) std::filesystem::resize_file(path_, scan.valid_bytes);
    }
    file_ = std::fopen(path_.c_str(), "ab");
    if (file_ == nullptr) throw ConfigError("cannot open log for appending: " + path_.string());
    // A last record without its newline still needs one before the next append.
    if (scan.valid_bytes > 0) {
        std::ifstream in(path_, std::ios::binary);
        in.seekg(static_cast<std::streamoff>(scan.valid_bytes - 1));
        char last = '\n';
        in.get(last);
        if (last != '\n') std::fputc('\n', file_);
    }
}

AuditLog::~AuditLog() {
    if (file_ != nullptr) std::fclose(file_);
}

void AuditLog::append(const AuditRecord& record) {
    const std::string line = to_json(record).dump() + "\n";
    std::lock_guard lock(mutex_);
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
        throw ConfigError("failed to append to " + path_.string());
    }
    ::fsync(::fileno(file_));
}

}  // namespace cotaudit
