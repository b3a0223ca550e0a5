#include "cotaudit/engine.hpp"

#include "cotaudit/errors.hpp"

namespace cotaudit {

namespace {

ModelEndpoint seeded(ModelEndpoint endpoint, std::optional<std::uint64_t> seed) {
    if (seed && !endpoint.sampling.seed) endpoint.sampling.seed = static_cast<std::int64_t>(*seed & 0x7fffffffffffffffULL);
    return endpoint;
}

}  // namespace

AuditEngine::AuditEngine(const RunConfig& config, GatewayOptions options, bool keep_retry)
    : config_(config), ids_(config.seed) {
    validate(config_, false, false);
    if (!keep_retry) {
        options.retry.max_attempts = config_.retry_attempts;
        options.retry.base = std::chrono::milliseconds(config_.retry_base_ms);
    }
    options.max_in_flight_per_endpoint = config_.endpoint_parallelism;

    auto dir = config_.template_dir.empty() ? default_template_dir() : config_.template_dir;
    gateway_ = std::make_unique<Gateway>(TemplateSet::load(dir), std::move(options));

    settings_.agent = seeded(*config_.agent, config_.seed);
    settings_.critic = seeded(*config_.critic, config_.seed);
    if (config_.judge) settings_.judge = seeded(*config_.judge, config_.seed);
    if (config_.scorer == ScorerKind::Judge) {
        scorer_ = std::make_unique<JudgeScorer>(*gateway_, *settings_.judge);
    } else {
        scorer_ = std::make_unique<LexicalScorer>();
    }
    settings_.scorer = scorer_.get();
    settings_.thresholds = config_.thresholds;
    settings_.target = config_.target;
    settings_.itype = config_.itype;
}

std::string AuditEngine::batch_salt(const Query& query) const {
    return "batch|" + query.id + "|" + std::string(to_string(settings_.itype)) + "|" + settings_.target.to_string();
}

}  // namespace cotaudit
