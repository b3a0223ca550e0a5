#include "cotaudit/batch.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "cotaudit/audit_log.hpp"
#include "cotaudit/corpus.hpp"
#include "cotaudit/engine.hpp"
#include "cotaudit/errors.hpp"

namespace cotaudit {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

}  // namespace

AggregateReport write_report(const std::filesystem::path& log, const std::filesystem::path& json_path,
                             const std::filesystem::path& markdown_path) {
    LogScan scan = scan_log(log);
    AggregateReport report = category_report(scan.records);
    write_text(json_path, to_json(report).dump(2) + "\n");
    write_text(markdown_path, to_markdown(report));
    return report;
}

BatchSummary run_batch(const RunConfig& config, const BatchHooks& hooks) {
    validate(config, true, true);
    AuditEngine engine(config);
    return run_batch(engine, hooks);
}

BatchSummary run_batch(AuditEngine& engine, const BatchHooks& hooks) {
    const RunConfig& config = engine.config();
    validate(config, true, true);
    const std::vector<Query> corpus = load_corpus(config.corpus_path);

    BatchSummary summary;
    summary.report_json = config.effective_report_json();
    summary.report_markdown = config.effective_report_markdown();

    AuditLog log(config.output_path);
    summary.warnings = log.warnings();
    const std::set<std::string> done = resume_scan(config.output_path);

    std::vector<const Query*> pending;
    for (const auto& query : corpus) {
        if (done.count(query.id) != 0) {
            ++summary.skipped;
        } else {
            pending.push_back(&query);
        }
    }

    std::vector<std::optional<AuditRecord>> results(pending.size());
    std::mutex mutex;
    std::condition_variable ready;
    std::exception_ptr fatal;
    std::atomic<std::size_t> next{0};
    std::size_t in_flight = 0;
    bool abort = false;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            {
                std::lock_guard lock(mutex);
                if (abort) return;
                ++in_flight;
                summary.max_audits_in_flight = std::max(summary.max_audits_in_flight, in_flight);
            }
            try {
                const Query& query = *pending[i];
                AuditRecord record =
                    run_audit(engine.gateway(), query, engine.settings(), engine.ids().next(engine.batch_salt(query)));
                std::lock_guard lock(mutex);
                --in_flight;
                results[i] = std::move(record);
            } catch (...) {
                std::lock_guard lock(mutex);
                --in_flight;
                if (!fatal) fatal = std::current_exception();
                abort = true;
            }
            ready.notify_all();
        }
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism),
                                                      std::max<std::size_t>(pending.size(), 1));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

    // Commit in corpus order; stop at the first gap left by a fatal error.
    std::size_t committed = 0;
    try {
        while (committed < pending.size()) {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return results[committed].has_value() || abort; });
            if (!results[committed]) break;
            AuditRecord record = std::move(*results[committed]);
            results[committed].reset();
            lock.unlock();
            log.append(record);
            if (record.completed()) {
                ++summary.completed;
            } else {
                ++summary.failed;
            }
            if (hooks.on_record) hooks.on_record(record);
            ++committed;
        }
    } catch (...) {
        {
            std::lock_guard lock(mutex);
            abort = true;
            if (!fatal) fatal = std::current_exception();
        }
    }
    for (auto& t : pool) t.join();
    if (fatal) {
        // Keep whatever finished ahead of the failure.
        try {
            for (; committed < pending.size() && results[committed]; ++committed) log.append(*results[committed]);
        } catch (...) {
        }
        std::rethrow_exception(fatal);
    }

    summary.gateway = engine.gateway().stats();
    write_report(config.output_path, summary.report_json, summary.report_markdown);
    return summary;
}

}  // namespace cotaudit
