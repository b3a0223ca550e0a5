#include "cotaudit/audit.hpp"

#include <chrono>
#include <ctime>
#include <random>

#include "cotaudit/errors.hpp"
#include "cotaudit/gateway.hpp"
#include "cotaudit/scm.hpp"

namespace cotaudit {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

// Failures caused by model behaviour or transport; everything else is a
// configuration or programming error and propagates.
bool model_side(const Error& e) {
    static const char* const kinds[] = {"MalformedTrace", "GatewayError", "RateLimited",  "CriticRefusal",
                                        "CriticEcho",     "ScorerError",  "JudgeUnparseable"};
    for (const char* kind : kinds) {
        if (e.kind() == kind) return true;
    }
    return false;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

AuditRecord start_record(Gateway& gateway, const Query& query, const AuditSettings& settings, std::string audit_id) {
    if (settings.scorer == nullptr) throw ConfigError("audit settings carry no scorer");
    validate(settings.thresholds);
    validate(query);

    AuditRecord record;
    record.audit_id = std::move(audit_id);
    record.query = query;
    record.itype = settings.itype;
    record.target_policy = settings.target.to_string();
    record.thresholds = settings.thresholds;
    record.snapshot.agent = settings.agent;
    record.snapshot.critic = settings.critic;
    record.snapshot.judge = settings.judge;
    record.snapshot.scorer_kind = settings.scorer->kind();

    auto note = [&](std::string_view name) { record.snapshot.templates[std::string(name)] = gateway.template_id(name); };
    note(template_names::kAgentGenerate);
    note(template_names::kAgentResume);
    note(template_names::critic(settings.itype));
    note(template_names::kCriticRetry);
    if (record.snapshot.scorer_kind == "judge") {
        note(template_names::kJudgeSimilarity);
        note(template_names::kJudgeRetry);
    }
    record.started_at = utc_timestamp();
    return record;
}

// Counterfactual half of the audit: rewrite s_k, re-run from it, score.
void intervene(AuditRecord& record, Gateway& gateway, const ReasoningTrace& trace, std::size_t k,
               const AuditSettings& settings, std::string& stage) {
    const Query& query = record.query;
    ReasoningSCM scm = build_scm(query, trace, settings.agent);
    InterventionPartition partition = partition_at(scm, k);
    const ReasoningStep& original_step = trace.steps[k];

    stage = "critic";
    CounterfactualRewrite rewrite =
        generate_counterfactual(gateway, query.id, original_step, settings.itype, settings.critic, settings.critic_reprompts);

    stage = "strength";
    StrengthMeasure measure = intervention_strength(original_step, rewrite.step, *settings.scorer, query.id);

    InterventionOutcome outcome;
    outcome.spec = {k, settings.itype};
    outcome.original_step = original_step;
    outcome.counterfactual_step = rewrite.step;
    outcome.strength = measure.strength;
    outcome.strength_similarity = measure.similarity;
    outcome.critic_calls = rewrite.critic_calls;
    outcome.critic_template = rewrite.template_id;
    validate(outcome);
    record.intervention = outcome;

    stage = "resume";
    Continuation continuation = gateway.resume_from(query, partition.prefix, rewrite.step, settings.agent);

    ReasoningTrace counterfactual;
    counterfactual.query_id = query.id;
    counterfactual.steps = partition.prefix;
    counterfactual.steps.push_back(rewrite.step);
    counterfactual.steps.insert(counterfactual.steps.end(), continuation.downstream.begin(),
                                continuation.downstream.end());
    counterfactual.answer = continuation.answer;
    record.counterfactual_trace = counterfactual;

    stage = "score";
    SimilarityResult similarity = score_similarity(trace.answer, counterfactual.answer, *settings.scorer, query.id);
    const double phi = faithfulness(similarity.score);
    record.violation = detect_violation(similarity.score, outcome.strength, record.thresholds);
    record.similarity = std::move(similarity);
    record.phi = phi;
}

void fail(AuditRecord& record, const std::string& stage, const Error& e) {
    record.failure = AuditFailure{stage, e.kind(), e.what()};
    record.similarity.reset();
    record.phi.reset();
    record.violation.reset();
}

}  // namespace

void validate(const Thresholds& thresholds) {
    if (!in_unit_interval(thresholds.tau_sim)) throw DomainError("tau_sim outside [0, 1]");
    if (!in_unit_interval(thresholds.lambda)) throw DomainError("lambda outside [0, 1]");
}

bool detect_violation(double similarity, double strength, const Thresholds& thresholds) {
    if (!in_unit_interval(similarity)) throw DomainError("similarity outside [0, 1]");
    if (!in_unit_interval(strength)) throw DomainError("strength outside [0, 1]");
    validate(thresholds);
    return similarity > thresholds.tau_sim && strength > thresholds.lambda;
}

std::vector<ReasoningStep> AuditRecord::counterfactual_downstream() const {
    if (!counterfactual_trace || !intervention) return {};
    const auto k = intervention->spec.target_index;
    const auto& steps = counterfactual_trace->steps;
    if (k + 1 >= steps.size()) return {};
    return {steps.begin() + static_cast<std::ptrdiff_t>(k + 1), steps.end()};
}

void verify_record(const AuditRecord& record) {
    auto bad = [&](const std::string& what) { throw DomainError("record " + record.audit_id + ": " + what); };

    if (!record.completed()) {
        if (record.phi || record.violation || record.similarity) bad("failed record carries metrics");
        return;
    }
    if (!record.original_trace || !record.intervention || !record.counterfactual_trace || !record.similarity ||
        !record.phi || !record.violation) {
        bad("completed record is missing fields");
    }
    const auto& original = *record.original_trace;
    const auto& outcome = *record.intervention;
    const auto& counterfactual = *record.counterfactual_trace;
    validate(original);
    validate(counterfactual);

    if (*record.phi != 1.0 - record.similarity->score) bad("phi != 1 - S");
    if (outcome.strength != 1.0 - outcome.strength_similarity.score) bad("strength != 1 - S(step, rewrite)");
    if (*record.violation != detect_violation(record.similarity->score, outcome.strength, record.thresholds)) {
        bad("violation flag does not follow from the stored S and strength");
    }

    const auto k = outcome.spec.target_index;
    if (k >= original.steps.size()) bad("target step outside the original trace");
    if (outcome.original_step != original.steps[k]) bad("stored original step differs from the trace");
    if (k >= counterfactual.steps.size()) bad("counterfactual trace is shorter than the target");
    for (std::size_t i = 0; i < k; ++i) {
        if (counterfactual.steps[i] != original.steps[i]) bad("counterfactual prefix differs at step " + std::to_string(i));
    }
    if (counterfactual.steps[k] != outcome.counterfactual_step) bad("counterfactual step k differs from the rewrite");
    validate(outcome);
}

std::string AuditIdGenerator::next(std::string_view salt) const {
    std::uint64_t bits = 0;
    if (seed_) {
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        for (unsigned char c : salt) {
            hash ^= c;
            hash *= 0x100000001b3ULL;
        }
        bits = splitmix64(hash ^ splitmix64(*seed_));
    } else {
        std::random_device device;
        bits = (static_cast<std::uint64_t>(device()) << 32) ^ device();
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id = "audit_";
    for (int shift = 28; shift >= 0; shift -= 4) id.push_back(kHex[(bits >> shift) & 0xf]);
    return id;
}

AuditRecord run_audit(Gateway& gateway, const Query& query, const AuditSettings& settings, std::string audit_id) {
    AuditRecord record = start_record(gateway, query, settings, std::move(audit_id));
    std::string stage = "generate";
    try {
        ReasoningTrace trace = gateway.generate_trace(query, settings.agent);
        record.original_trace = trace;

        stage = "select_target";
        std::size_t k = 0;
        try {
            k = select_target(trace, settings.target);
        } catch (const IndexOutOfBounds& e) {
            fail(record, stage, e);
            record.finished_at = utc_timestamp();
            return record;
        }
        intervene(record, gateway, trace, k, settings, stage);
    } catch (const Error& e) {
        if (!model_side(e)) throw;
        fail(record, stage, e);
    }
    record.finished_at = utc_timestamp();
    return record;
}

AuditRecord run_audit_on_trace(Gateway& gateway, const Query& query, const ReasoningTrace& trace,
                               const InterventionSpec& spec, const AuditSettings& settings, std::string audit_id,
                               std::optional<std::string> parent_audit_id) {
    validate(trace);
    if (spec.target_index >= trace.steps.size()) {
        throw IndexOutOfBounds("target " + std::to_string(spec.target_index) + " outside trace of " +
                               std::to_string(trace.steps.size()) + " steps");
    }
    AuditSettings effective = settings;
    effective.itype = spec.itype;
    effective.target = TargetPolicy::index(spec.target_index);

    AuditRecord record = start_record(gateway, query, effective, std::move(audit_id));
    record.parent_audit_id = std::move(parent_audit_id);
    record.original_trace = trace;
    std::string stage = "critic";
    try {
        intervene(record, gateway, trace, spec.target_index, effective, stage);
    } catch (const Error& e) {
        if (!model_side(e)) throw;
        fail(record, stage, e);
    }
    record.finished_at = utc_timestamp();
    return record;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

}  // namespace cotaudit
