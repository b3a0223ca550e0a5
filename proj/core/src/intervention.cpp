#include "cotaudit/intervention.hpp"

#include <cctype>
#include <charconv>
#include <random>

#include "cotaudit/errors.hpp"
#include "cotaudit/gateway.hpp"

namespace cotaudit {

namespace {

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

bool is_terminal_punct(char c) {
    return c == '.' || c == '!' || c == '?' || c == ';' || c == ':' || c == ',' || c == '"' || c == '\'';
}

// Strips a leading "Step N:" the critic may have copied from the grammar.
std::string strip_step_marker(std::string_view text) {
    std::string_view body = trim(text);
    if (!body.starts_with("Step ")) return std::string(body);
    std::size_t i = 5;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
    if (i == 5 || i >= body.size() || body[i] != ':') return std::string(body);
    return std::string(trim(body.substr(i + 1)));
}

bool breaks_grammar(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(start, end - start));
        if (line.starts_with("Answer:")) return true;
        if (line.starts_with("Step ")) {
            std::size_t i = 5;
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
            if (i > 5 && i < line.size() && line[i] == ':') return true;
        }
        start = end + 1;
    }
    return false;
}

}  // namespace

TargetPolicy TargetPolicy::parse(std::string_view text) {
    if (text == "first") return first();
    if (text.starts_with("index:")) return index(parse_u64(text.substr(6), "target index"));
    if (text.starts_with("random:")) return uniform_random(parse_u64(text.substr(7), "target seed"));
    throw ConfigError("target policy must be first, index:K or random:SEED, got '" + std::string(text) + "'");
}

std::string TargetPolicy::to_string() const {
    switch (kind_) {
        case Kind::First: return "first";
        case Kind::Index: return "index:" + std::to_string(value_);
        case Kind::UniformRandom: return "random:" + std::to_string(value_);
    }
    return "first";
}

std::size_t select_target(const ReasoningTrace& trace, const TargetPolicy& policy) {
    const std::size_t n = trace.steps.size();
    if (n == 0) throw DomainError("cannot select a target in an empty trace");
    switch (policy.kind()) {
        case TargetPolicy::Kind::First:
            return 0;
        case TargetPolicy::Kind::Index:
            if (policy.value() >= n) {
                throw IndexOutOfBounds("target " + std::to_string(policy.value()) + " outside trace of " +
                                       std::to_string(n) + " steps");
            }
            return static_cast<std::size_t>(policy.value());
        case TargetPolicy::Kind::UniformRandom: {
            const std::uint64_t mixed = fnv1a(trace.query_id);
            std::seed_seq seq{static_cast<std::uint32_t>(policy.value()), static_cast<std::uint32_t>(policy.value() >> 32),
                              static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
            std::mt19937_64 rng(seq);
            // Rejection sampling keeps the draw uniform and independent of the
            // standard library's distribution implementation.
            const std::uint64_t bound = static_cast<std::uint64_t>(n);
            const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
            std::uint64_t draw = rng();
            while (draw >= limit) draw = rng();
            return static_cast<std::size_t>(draw % bound);
        }
    }
    return 0;
}

std::string normalize_for_echo(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char ch : trim(text)) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    while (!out.empty() && (is_terminal_punct(out.back()) || out.back() == ' ')) out.pop_back();
    return out;
}

CounterfactualRewrite generate_counterfactual(Gateway& gateway, std::string_view query_id,
                                              const ReasoningStep& step, InterventionType type,
                                              const ModelEndpoint& critic, int max_reprompts) {
    if (step.text.empty()) throw DomainError("cannot rewrite an empty step");
    const std::string original = normalize_for_echo(step.text);

    std::string reply;
    std::string problem;
    bool echoed = false;
    for (int attempt = 0; attempt <= max_reprompts; ++attempt) {
        if (attempt == 0) {
            reply = gateway.critic_call(query_id, step.text, type, critic);
        } else {
            RetryNote note{attempt, reply, problem};
            reply = gateway.critic_call(query_id, step.text, type, critic, &note);
        }
        std::string candidate = strip_step_marker(reply);
        if (candidate.empty()) {
            problem = "the reply was empty";
            echoed = false;
        } else if (breaks_grammar(candidate)) {
            problem = "the reply contains step or answer markers";
            echoed = false;
        } else if (normalize_for_echo(candidate) == original) {
            problem = "the reply repeats the original step";
            echoed = true;
        } else {
            return {ReasoningStep{step.index, std::move(candidate)}, attempt + 1,
                    gateway.template_id(template_names::critic(type))};
        }
    }
    const std::string detail = problem + " after " + std::to_string(max_reprompts + 1) + " critic calls";
    if (echoed) throw CriticEcho(detail);
    throw CriticRefusal(detail);
}

StrengthMeasure intervention_strength(const ReasoningStep& original, const ReasoningStep& counterfactual,
                                      const SimilarityScorer& scorer, std::string_view query_id) {
    if (original.text.empty() || counterfactual.text.empty()) throw DomainError("cannot measure an empty step");
    StrengthMeasure measure;
    measure.similarity = scorer.score(original.text, counterfactual.text, query_id);
    measure.strength = 1.0 - measure.similarity.score;
    return measure;
}

void validate(const InterventionOutcome& outcome) {
    if (outcome.counterfactual_step.index != outcome.original_step.index) {
        throw DomainError("counterfactual step index differs from the original");
    }
    if (outcome.spec.target_index != outcome.original_step.index) {
        throw DomainError("intervention target differs from the original step index");
    }
    if (!(outcome.strength >= 0.0 && outcome.strength <= 1.0)) throw DomainError("strength outside [0, 1]");
    if (outcome.counterfactual_step.text == outcome.original_step.text) {
        throw DomainError("counterfactual step repeats the original");
    }
}

}  // namespace cotaudit
