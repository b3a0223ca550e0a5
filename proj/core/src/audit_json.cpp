#include "cotaudit/audit.hpp"
#include "cotaudit/errors.hpp"

namespace cotaudit {

using json = nlohmann::json;

namespace {

json steps_json(const std::vector<ReasoningStep>& steps) {
    json out = json::array();
    for (const auto& step : steps) out.push_back(step.text);
    return out;
}

std::vector<ReasoningStep> steps_from(const json& array, std::size_t first_index = 0) {
    std::vector<ReasoningStep> steps;
    for (const auto& text : array) steps.push_back({first_index + steps.size(), text.get<std::string>()});
    return steps;
}

ReasoningTrace trace_from(const json& j, const std::string& query_id) {
    return {query_id, steps_from(j.at("steps")), Answer{j.at("answer").get<std::string>()}};
}

json similarity_json(const SimilarityResult& s) {
    return {{"score", s.score},
            {"scorer", s.scorer_kind},
            {"raw_judge_output", s.raw_judge_output ? json(*s.raw_judge_output) : json(nullptr)},
            {"clamped", s.clamped},
            {"judge_attempts", s.judge_attempts}};
}

SimilarityResult similarity_from(const json& j) {
    SimilarityResult s;
    s.score = j.at("score").get<double>();
    s.scorer_kind = j.at("scorer").get<std::string>();
    if (j.contains("raw_judge_output") && !j["raw_judge_output"].is_null()) {
        s.raw_judge_output = j["raw_judge_output"].get<std::string>();
    }
    s.clamped = j.value("clamped", false);
    s.judge_attempts = j.value("judge_attempts", 0);
    return s;
}

json sampling_json(const SamplingParams& p) {
    return {{"temperature", p.temperature},
            {"top_p", p.top_p},
            {"seed", p.seed ? json(*p.seed) : json(nullptr)},
            {"max_tokens", p.max_tokens}};
}

}  // namespace

json to_json(const Query& query) {
    return {{"id", query.id}, {"text", query.text}, {"category", query.category.name()}};
}

Query query_from_json(const json& j) {
    return {j.at("id").get<std::string>(), j.at("text").get<std::string>(),
            TaskCategory::parse(j.at("category").get<std::string>())};
}

json to_json(const ReasoningTrace& trace) {
    return {{"query_id", trace.query_id}, {"steps", steps_json(trace.steps)}, {"answer", trace.answer.text}};
}

json to_json(const ModelEndpoint& endpoint) {
    return {{"role", std::string(to_string(endpoint.role))},
            {"base_url", endpoint.base_url},
            {"model", endpoint.model_name},
            {"auth_env", endpoint.auth_env},
            {"sampling", sampling_json(endpoint.sampling)}};
}

ModelEndpoint endpoint_from_json(const json& j, Role role) {
    ModelEndpoint endpoint;
    endpoint.role = j.contains("role") ? parse_role(j["role"].get<std::string>()) : role;
    endpoint.base_url = j.at("base_url").get<std::string>();
    endpoint.model_name = j.at("model").get<std::string>();
    endpoint.auth_env = j.value("auth_env", std::string());
    endpoint.sampling = default_sampling(endpoint.role);
    if (j.contains("sampling")) {
        const auto& s = j["sampling"];
        endpoint.sampling.temperature = s.value("temperature", endpoint.sampling.temperature);
        endpoint.sampling.top_p = s.value("top_p", endpoint.sampling.top_p);
        endpoint.sampling.max_tokens = s.value("max_tokens", endpoint.sampling.max_tokens);
        if (s.contains("seed") && !s["seed"].is_null()) endpoint.sampling.seed = s["seed"].get<std::int64_t>();
    }
    return endpoint;
}

json to_json(const AuditRecord& r) {
    json j;
    j["schema_version"] = r.schema_version;
    j["audit_id"] = r.audit_id;
    j["parent_audit_id"] = r.parent_audit_id ? json(*r.parent_audit_id) : json(nullptr);
    j["status"] = r.completed() ? "completed" : "failed";
    j["failure"] = r.failure ? json{{"stage", r.failure->stage}, {"error", r.failure->error}, {"message", r.failure->message}}
                             : json(nullptr);
    j["query"] = to_json(r.query);
    j["intervention_type"] = std::string(to_string(r.itype));
    j["target_policy"] = r.target_policy;
    j["thresholds"] = {{"tau_sim", r.thresholds.tau_sim}, {"lambda", r.thresholds.lambda}};

    json templates = json::object();
    for (const auto& [name, id] : r.snapshot.templates) templates[name] = id;
    j["config"] = {{"agent", to_json(r.snapshot.agent)},
                   {"critic", to_json(r.snapshot.critic)},
                   {"judge", r.snapshot.judge ? to_json(*r.snapshot.judge) : json(nullptr)},
                   {"scorer", r.snapshot.scorer_kind},
                   {"templates", templates}};

    j["original_trace"] = r.original_trace
                              ? json{{"steps", steps_json(r.original_trace->steps)}, {"answer", r.original_trace->answer.text}}
                              : json(nullptr);
    if (r.intervention) {
        const auto& o = *r.intervention;
        j["intervention"] = {{"target_index", o.spec.target_index},
                             {"itype", std::string(to_string(o.spec.itype))},
                             {"original_step", o.original_step.text},
                             {"counterfactual_step", o.counterfactual_step.text},
                             {"strength", o.strength},
                             {"strength_similarity", similarity_json(o.strength_similarity)},
                             {"critic_calls", o.critic_calls},
                             {"critic_template", o.critic_template}};
    } else {
        j["intervention"] = nullptr;
    }
    if (r.counterfactual_trace) {
        j["counterfactual_trace"] = {{"steps", steps_json(r.counterfactual_trace->steps)},
                                     {"answer", r.counterfactual_trace->answer.text}};
        j["counterfactual_downstream"] = steps_json(r.counterfactual_downstream());
    } else {
        j["counterfactual_trace"] = nullptr;
        j["counterfactual_downstream"] = nullptr;
    }
    j["similarity"] = r.similarity ? similarity_json(*r.similarity) : json(nullptr);
    if (r.similarity) j["similarity"]["order"] = {"original", "counterfactual"};
    j["phi"] = r.phi ? json(*r.phi) : json(nullptr);
    j["violation"] = r.violation ? json(*r.violation) : json(nullptr);
    j["started_at"] = r.started_at;
    j["finished_at"] = r.finished_at;
    return j;
}

AuditRecord record_from_json(const json& j) {
    try {
        AuditRecord r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kAuditSchemaVersion) {
            throw CorruptLog("unsupported schema_version " + std::to_string(r.schema_version));
        }
        r.audit_id = j.at("audit_id").get<std::string>();
        if (j.contains("parent_audit_id") && !j["parent_audit_id"].is_null()) {
            r.parent_audit_id = j["parent_audit_id"].get<std::string>();
        }
        const std::string status = j.at("status").get<std::string>();
        if (status == "failed") {
            const auto& f = j.at("failure");
            r.failure = AuditFailure{f.at("stage").get<std::string>(), f.at("error").get<std::string>(),
                                     f.at("message").get<std::string>()};
        } else if (status != "completed") {
            throw CorruptLog("unknown status '" + status + "'");
        }
        r.query = query_from_json(j.at("query"));
        r.itype = parse_intervention_type(j.at("intervention_type").get<std::string>());
        r.target_policy = j.at("target_policy").get<std::string>();
        r.thresholds = {j.at("thresholds").at("tau_sim").get<double>(), j.at("thresholds").at("lambda").get<double>()};

        const auto& config = j.at("config");
        r.snapshot.agent = endpoint_from_json(config.at("agent"), Role::Agent);
        r.snapshot.critic = endpoint_from_json(config.at("critic"), Role::Critic);
        if (!config.at("judge").is_null()) r.snapshot.judge = endpoint_from_json(config["judge"], Role::Judge);
        r.snapshot.scorer_kind = config.at("scorer").get<std::string>();
        for (const auto& [name, id] : config.at("templates").items()) r.snapshot.templates[name] = id.get<std::string>();

        if (!j.at("original_trace").is_null()) r.original_trace = trace_from(j["original_trace"], r.query.id);
        if (!j.at("intervention").is_null()) {
            const auto& o = j["intervention"];
            InterventionOutcome outcome;
            outcome.spec.target_index = o.at("target_index").get<std::size_t>();
            outcome.spec.itype = parse_intervention_type(o.at("itype").get<std::string>());
            outcome.original_step = {outcome.spec.target_index, o.at("original_step").get<std::string>()};
            outcome.counterfactual_step = {outcome.spec.target_index, o.at("counterfactual_step").get<std::string>()};
            outcome.strength = o.at("strength").get<double>();
            outcome.strength_similarity = similarity_from(o.at("strength_similarity"));
            outcome.critic_calls = o.value("critic_calls", 0);
            outcome.critic_template = o.value("critic_template", std::string());
            r.intervention = outcome;
        }
        if (!j.at("counterfactual_trace").is_null()) r.counterfactual_trace = trace_from(j["counterfactual_trace"], r.query.id);
        if (!j.at("similarity").is_null()) r.similarity = similarity_from(j["similarity"]);
        if (!j.at("phi").is_null()) r.phi = j["phi"].get<double>();
        if (!j.at("violation").is_null()) r.violation = j["violation"].get<bool>();
        r.started_at = j.value("started_at", std::string());
        r.finished_at = j.value("finished_at", std::string());
        return r;
    } catch (const json::exception& e) {
        throw CorruptLog(std::string("malformed audit record: ") + e.what());
    } catch (const ConfigError& e) {
        throw CorruptLog(std::string("malformed audit record: ") + e.what());
    } catch (const DomainError& e) {
        throw CorruptLog(std::string("malformed audit record: ") + e.what());
    }
}

}  // namespace cotaudit
