#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "cotaudit/endpoint.hpp"
#include "cotaudit/intervention_type.hpp"
#include "cotaudit/scoring.hpp"
#include "cotaudit/trace.hpp"

namespace cotaudit {

class Gateway;

struct InterventionSpec {
    std::size_t target_index = 0;
    InterventionType itype = InterventionType::LogicFlip;

    friend bool operator==(const InterventionSpec&, const InterventionSpec&) = default;
};

/// How the target step is chosen for an audit.
class TargetPolicy {
public:
    enum class Kind { First, Index, UniformRandom };

    static TargetPolicy first() { return {Kind::First, 0}; }
    static TargetPolicy index(std::size_t k) { return {Kind::Index, k}; }
    static TargetPolicy uniform_random(std::uint64_t seed) { return {Kind::UniformRandom, seed}; }
    /// "first", "index:K" or "random:SEED". Throws ConfigError otherwise.
    static TargetPolicy parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    std::uint64_t value() const noexcept { return value_; }
    std::string to_string() const;

    friend bool operator==(const TargetPolicy&, const TargetPolicy&) = default;

private:
    TargetPolicy(Kind kind, std::uint64_t value) : kind_(kind), value_(value) {}

    Kind kind_;
    std::uint64_t value_;
};

/// First -> 0. Index(k) -> k, or IndexOutOfBounds. UniformRandom(seed) ->
/// a uniform index that depends only on the seed, the query id and the length.
std::size_t select_target(const ReasoningTrace& trace, const TargetPolicy& policy);

/// Lowercase, collapse whitespace runs, drop trailing punctuation. Two critic
/// texts that normalize equal count as the same step.
std::string normalize_for_echo(std::string_view text);

struct CounterfactualRewrite {
    ReasoningStep step;
    int critic_calls = 0;
    std::string template_id;
};

/// Asks the critic to rewrite `step` in the given mode, re-prompting up to
/// `max_reprompts` times when the reply is empty, breaks the step grammar, or
/// echoes the input. Throws CriticRefusal or CriticEcho once retries run out;
/// transport errors propagate unchanged.
CounterfactualRewrite generate_counterfactual(Gateway& gateway, std::string_view query_id,
                                              const ReasoningStep& step, InterventionType type,
                                              const ModelEndpoint& critic, int max_reprompts = 2);

struct StrengthMeasure {
    double strength = 0.0;
    SimilarityResult similarity;
};

/// 1 - S(original, counterfactual) under the given scorer.
StrengthMeasure intervention_strength(const ReasoningStep& original, const ReasoningStep& counterfactual,
                                      const SimilarityScorer& scorer, std::string_view query_id = {});

/// The applied intervention with its measured strength.
struct InterventionOutcome {
    InterventionSpec spec;
    ReasoningStep original_step;
    ReasoningStep counterfactual_step;
    double strength = 0.0;
    SimilarityResult strength_similarity;
    int critic_calls = 0;
    std::string critic_template;

    friend bool operator==(const InterventionOutcome&, const InterventionOutcome&) = default;
};

/// Throws DomainError when the outcome breaks its invariants.
void validate(const InterventionOutcome& outcome);

}  // namespace cotaudit
