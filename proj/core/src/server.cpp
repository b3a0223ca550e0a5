#include "cotaudit/server.hpp"

#include <httplib.h>

#include "cotaudit/analytics.hpp"
#include "cotaudit/errors.hpp"

namespace cotaudit {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view kind, std::string_view message) {
    reply(res, status, json{{"error", kind}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw ConfigError("request body must be a JSON object");
    return body;
}

}  // namespace

std::pair<std::string, int> parse_bind_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0) throw ConfigError("bind address must be host:port, got '" + address + "'");
    const std::string host = address.substr(0, colon);
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(address.substr(colon + 1), &used);
        if (used != address.size() - colon - 1) throw std::invalid_argument("port");
    } catch (const std::exception&) {
        throw ConfigError("bad port in bind address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw ConfigError("port out of range in '" + address + "'");
    return {host, port};
}

AuditService::AuditService(AuditEngine& engine, std::vector<Query> corpus, std::optional<std::filesystem::path> static_dir)
    : engine_(engine), static_dir_(std::move(static_dir)), log_(engine.config().output_path),
      http_(std::make_unique<httplib::Server>()) {
    // no SO_REUSEPORT: a second server on the same port must fail to bind
    http_->set_socket_options([](int sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    for (auto& query : corpus) corpus_.emplace(query.id, std::move(query));
    for (auto& record : scan_log(engine_.config().output_path).records) {
        order_.push_back(record.audit_id);
        records_.insert_or_assign(record.audit_id, std::move(record));
    }
    install_routes();
}

AuditService::~AuditService() { stop(); }

std::size_t AuditService::record_count() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

void AuditService::store(AuditRecord record) {
    log_.append(record);
    std::lock_guard lock(mutex_);
    pending_.erase(record.audit_id);
    order_.push_back(record.audit_id);
    records_.insert_or_assign(record.audit_id, std::move(record));
}

void AuditService::launch(std::string audit_id, std::function<AuditRecord()> work) {
    std::lock_guard lock(mutex_);
    if (stopping_) throw ConfigError("service is stopping");
    pending_.insert(audit_id);
    jobs_.emplace_back([this, audit_id, work = std::move(work)] {
        {
            std::unique_lock slot(mutex_);
            slots_.wait(slot, [&] { return running_ < static_cast<std::size_t>(engine_.config().parallelism); });
            ++running_;
        }
        try {
            store(work());
        } catch (const std::exception& e) {
            std::lock_guard guard(mutex_);
            pending_.erase(audit_id);
            const auto* typed = dynamic_cast<const Error*>(&e);
            errors_[audit_id] = std::string(typed != nullptr ? typed->kind() : "Error") + ": " + e.what();
        }
        {
            std::lock_guard guard(mutex_);
            --running_;
        }
        slots_.notify_one();
    });
}

std::string AuditService::submit_audit(Query query) {
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = engine_.ids().next("serve|" + query.id + "|" + std::to_string(submitted_++));
    }
    launch(id, [this, query = std::move(query), id] {
        return run_audit(engine_.gateway(), query, engine_.settings(), id);
    });
    return id;
}

std::string AuditService::submit_intervention(const AuditRecord& parent, const InterventionSpec& spec) {
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = engine_.ids().next("serve|" + parent.audit_id + "|" + std::to_string(submitted_++));
    }
    AuditSettings settings = engine_.settings();
    settings.itype = spec.itype;
    settings.target = TargetPolicy::index(spec.target_index);
    launch(id, [this, query = parent.query, trace = *parent.original_trace, spec, settings, id,
                parent_id = parent.audit_id] {
        return run_audit_on_trace(engine_.gateway(), query, trace, spec, settings, id, parent_id);
    });
    return id;
}

void AuditService::install_routes() {
    auto& svr = *http_;

    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            reply_error(res, 500, e.kind(), e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "Error", e.what());
        }
    });

    svr.Post("/audits", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json body = parse_body(req);
            Query query;
            if (body.contains("query_text")) {
                query.text = body.at("query_text").get<std::string>();
                query.category = TaskCategory::parse(body.value("category", std::string("other")));
                if (body.contains("query_id")) {
                    query.id = body.at("query_id").get<std::string>();
                } else {
                    query.id = "adhoc_" + fingerprint({"adhoc", query.text, {query.category.name()}}).substr(0, 8);
                }
                validate(query);
            } else if (body.contains("query_id")) {
                const auto id = body.at("query_id").get<std::string>();
                auto it = corpus_.find(id);
                if (it == corpus_.end()) return reply_error(res, 404, "NotFound", "unknown query id '" + id + "'");
                query = it->second;
            } else {
                return reply_error(res, 400, "ConfigError", "need query_id or query_text");
            }
            const std::string audit_id = submit_audit(std::move(query));
            reply(res, 202, json{{"audit_id", audit_id}, {"status", "pending"}});
        } catch (const json::exception& e) {
            reply_error(res, 400, "ConfigError", e.what());
        } catch (const ConfigError& e) {
            reply_error(res, 400, e.kind(), e.what());
        } catch (const DomainError& e) {
            reply_error(res, 400, e.kind(), e.what());
        }
    });

    svr.Get(R"(/audits/([A-Za-z0-9_]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        std::lock_guard lock(mutex_);
        if (auto it = records_.find(id); it != records_.end()) return reply(res, 200, to_json(it->second));
        if (pending_.count(id) != 0) return reply(res, 202, json{{"audit_id", id}, {"status", "pending"}});
        if (auto it = errors_.find(id); it != errors_.end()) {
            return reply(res, 500, json{{"audit_id", id}, {"status", "error"}, {"message", it->second}});
        }
        reply_error(res, 404, "NotFound", "unknown audit id '" + id + "'");
    });

    svr.Get("/audits", [this](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> category;
        if (req.has_param("category")) category = TaskCategory::parse(req.get_param_value("category")).name();
        json audits = json::array();
        std::lock_guard lock(mutex_);
        for (const auto& id : order_) {
            const auto& record = records_.at(id);
            if (category && record.query.category.name() != *category) continue;
            audits.push_back(to_json(record));
        }
        reply(res, 200, json{{"audits", std::move(audits)}});
    });

    svr.Post(R"(/audits/([A-Za-z0-9_]+)/interventions)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        std::optional<AuditRecord> parent;
        {
            std::lock_guard lock(mutex_);
            if (auto it = records_.find(id); it != records_.end()) parent = it->second;
        }
        if (!parent) return reply_error(res, 404, "NotFound", "unknown audit id '" + id + "'");
        if (!parent->original_trace) {
            return reply_error(res, 409, "Conflict", "audit '" + id + "' has no stored trace");
        }
        try {
            json body = parse_body(req);
            InterventionSpec spec;
            const auto index = body.at("target_index").get<long long>();
            spec.itype = parse_intervention_type(body.at("itype").get<std::string>());
            if (index < 0 || static_cast<std::size_t>(index) >= parent->original_trace->length()) {
                return reply_error(res, 400, "IndexOutOfBounds",
                                   "target_index " + std::to_string(index) + " outside trace of length " +
                                       std::to_string(parent->original_trace->length()));
            }
            spec.target_index = static_cast<std::size_t>(index);
            const std::string audit_id = submit_intervention(*parent, spec);
            reply(res, 202, json{{"audit_id", audit_id}, {"parent_audit_id", id}, {"status", "pending"}});
        } catch (const json::exception& e) {
            reply_error(res, 400, "ConfigError", e.what());
        } catch (const ConfigError& e) {
            reply_error(res, 400, e.kind(), e.what());
        }
    });

    svr.Get("/report", [this](const httplib::Request&, httplib::Response& res) {
        std::vector<AuditRecord> records;
        {
            std::lock_guard lock(mutex_);
            records.reserve(order_.size());
            for (const auto& id : order_) records.push_back(records_.at(id));
        }
        reply(res, 200, to_json(category_report(records)));
    });

    svr.Get(R"(/traces/([A-Za-z0-9_]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        std::lock_guard lock(mutex_);
        auto it = records_.find(id);
        if (it == records_.end() || !it->second.original_trace) {
            return reply_error(res, 404, "NotFound", "no trace for audit '" + id + "'");
        }
        reply(res, 200,
              json{{"audit_id", id}, {"query", to_json(it->second.query)}, {"trace", to_json(*it->second.original_trace)}});
    });

    if (static_dir_ && !svr.set_mount_point("/", static_dir_->string())) {
        throw ConfigError("static directory not found: " + static_dir_->string());
    }
}

int AuditService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = http_->bind_to_any_port(host);
        if (bound < 0) throw BindError("cannot bind " + host + ":0");
    } else if (!http_->bind_to_port(host, port)) {
        throw BindError("cannot bind " + host + ":" + std::to_string(port));
    }
    listener_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return bound;
}

void AuditService::wait() {
    if (listener_.joinable()) listener_.join();
}

void AuditService::stop() {
    if (http_) http_->stop();
    if (listener_.joinable()) listener_.join();
    std::vector<std::thread> jobs;
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
        jobs.swap(jobs_);
    }
    for (auto& job : jobs) job.join();
}

}  // namespace cotaudit
