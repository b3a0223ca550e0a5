// cotaudit: counterfactual faithfulness audits of chain-of-thought traces.
//
//   cotaudit audit     --config run.json [--corpus ..] [--out ..] [...]
//   cotaudit intervene --config run.json --audit-id audit_xxxxxxxx --target-index K --itype fact_reversal
//   cotaudit report    --out audits.jsonl
//   cotaudit serve     --config run.json [--serve-addr 127.0.0.1:8080] [--static-dir dist/]

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cotaudit/audit_log.hpp"
#include "cotaudit/batch.hpp"
#include "cotaudit/config.hpp"
#include "cotaudit/corpus.hpp"
#include "cotaudit/engine.hpp"
#include "cotaudit/errors.hpp"
#include "cotaudit/server.hpp"

namespace {

using namespace cotaudit;

struct Overrides {
    std::string config;
    std::string corpus;
    std::string out;
    std::string report_json;
    std::string report_markdown;
    std::string templates;
    std::string scorer;
    std::optional<double> tau_sim;
    std::optional<double> lambda;
    std::string itype;
    std::string target;
    std::optional<std::size_t> parallelism;
    std::optional<std::uint64_t> seed;
    std::string serve_addr;
    std::string static_dir;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--corpus", o.corpus, "JSONL query corpus");
    cmd->add_option("--out", o.out, "JSONL audit log (appended, resumable)");
    cmd->add_option("--report-json", o.report_json, "report JSON path");
    cmd->add_option("--report-md", o.report_markdown, "report markdown path");
    cmd->add_option("--templates", o.templates, "prompt template directory");
    cmd->add_option("--scorer", o.scorer, "judge|lexical")->check(CLI::IsMember({"judge", "lexical"}));
    cmd->add_option("--tau-sim", o.tau_sim, "similarity threshold");
    cmd->add_option("--lambda", o.lambda, "intervention strength threshold");
    cmd->add_option("--itype", o.itype, "logic_flip|fact_reversal|premise_negation|causal_inversion");
    cmd->add_option("--target", o.target, "first|index:K|random:SEED");
    cmd->add_option("--parallelism", o.parallelism, "concurrent audits")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "seed for ids and sampling");
}

RunConfig resolve(const Overrides& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (!o.corpus.empty()) c.corpus_path = o.corpus;
    if (!o.out.empty()) c.output_path = o.out;
    if (!o.report_json.empty()) c.report_json_path = o.report_json;
    if (!o.report_markdown.empty()) c.report_markdown_path = o.report_markdown;
    if (!o.templates.empty()) c.template_dir = o.templates;
    if (!o.scorer.empty()) c.scorer = parse_scorer_kind(o.scorer);
    if (o.tau_sim) c.thresholds.tau_sim = *o.tau_sim;
    if (o.lambda) c.thresholds.lambda = *o.lambda;
    if (!o.itype.empty()) c.itype = parse_intervention_type(o.itype);
    if (!o.target.empty()) c.target = TargetPolicy::parse(o.target);
    if (o.parallelism) c.parallelism = *o.parallelism;
    if (o.seed) c.seed = *o.seed;
    if (!o.serve_addr.empty()) c.serve_addr = o.serve_addr;
    if (!o.static_dir.empty()) c.static_dir = o.static_dir;
    return c;
}

int cmd_audit(const Overrides& o) {
    const RunConfig config = resolve(o);
    const BatchSummary s = run_batch(config, {.on_record = [](const AuditRecord& r) {
        std::fprintf(stderr, "%s %s %s\n", r.audit_id.c_str(), r.query.id.c_str(),
                     r.completed() ? (r.violation ? "violation" : "ok") : ("failed:" + r.failure->stage).c_str());
    }});
    for (const auto& w : s.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("completed %zu, failed %zu, skipped %zu\n", s.completed, s.failed, s.skipped);
    std::printf("requests %zu, retries %zu\n", s.gateway.requests, s.gateway.retries);
    std::printf("report: %s\n        %s\n", s.report_json.c_str(), s.report_markdown.c_str());
    return 0;
}

int cmd_intervene(const Overrides& o, const std::string& audit_id, std::size_t target_index) {
    const RunConfig config = resolve(o);
    validate(config, false, true);
    std::optional<AuditRecord> parent;
    for (auto& r : scan_log(config.output_path).records) {
        if (r.audit_id == audit_id) parent = std::move(r);
    }
    if (!parent) throw ConfigError("no audit '" + audit_id + "' in " + config.output_path.string());
    if (!parent->original_trace) throw ConfigError("audit '" + audit_id + "' has no stored trace");

    AuditEngine engine(config);
    AuditSettings settings = engine.settings();
    const InterventionSpec spec{target_index, config.itype};
    settings.target = TargetPolicy::index(target_index);
    const AuditRecord record =
        run_audit_on_trace(engine.gateway(), parent->query, *parent->original_trace, spec, settings,
                           engine.ids().next("intervene|" + audit_id + "|" + std::to_string(target_index)), audit_id);
    AuditLog log(config.output_path);
    log.append(record);
    std::printf("%s\n", to_json(record).dump(2).c_str());
    return record.completed() ? 0 : 3;
}

int cmd_report(const Overrides& o) {
    const RunConfig config = resolve(o);
    if (config.output_path.empty()) throw ConfigError("--out (or output in --config) is required");
    const AggregateReport report =
        write_report(config.output_path, config.effective_report_json(), config.effective_report_markdown());
    std::fputs(to_markdown(report).c_str(), stdout);
    return 0;
}

AuditService* g_service = nullptr;

int cmd_serve(const Overrides& o) {
    const RunConfig config = resolve(o);
    validate(config, false, true);
    std::vector<Query> corpus;
    if (!config.corpus_path.empty()) corpus = load_corpus(config.corpus_path);
    AuditEngine engine(config);
    std::optional<std::filesystem::path> static_dir;
    if (!config.static_dir.empty()) static_dir = config.static_dir;
    AuditService service(engine, std::move(corpus), static_dir);
    const auto [host, port] = parse_bind_address(config.serve_addr);
    const int bound = service.start(host, port);
    std::printf("listening on http://%s:%d\n", host.c_str(), bound);
    std::fflush(stdout);
    g_service = &service;
    std::signal(SIGINT, [](int) {
        if (g_service != nullptr) g_service->stop();
    });
    service.wait();
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual faithfulness audits of chain-of-thought reasoning"};
    app.require_subcommand(1);

    Overrides o;
    std::string audit_id;
    std::size_t target_index = 0;

    auto* audit = app.add_subcommand("audit", "audit every query in a corpus");
    add_common(audit, o);

    auto* intervene = app.add_subcommand("intervene", "re-run an intervention on a stored trace");
    add_common(intervene, o);
    intervene->add_option("--audit-id", audit_id, "audit whose trace is reused")->required();
    intervene->add_option("--target-index", target_index, "0-based step index")->required();

    auto* report = app.add_subcommand("report", "recompute the aggregate report from a log");
    add_common(report, o);

    auto* serve = app.add_subcommand("serve", "JSON HTTP API for the workbench");
    add_common(serve, o);
    serve->add_option("--serve-addr", o.serve_addr, "host:port");
    serve->add_option("--static-dir", o.static_dir, "workbench assets to serve at /");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*audit) return cmd_audit(o);
        if (*intervene) return cmd_intervene(o, audit_id, target_index);
        if (*report) return cmd_report(o);
        if (*serve) return cmd_serve(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", e.kind().c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
