#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotaudit/endpoint.hpp"
#include "cotaudit/trace.hpp"

namespace cotaudit {

class Gateway;

struct SimilarityResult {
    double score = 0.0;  // in [0, 1]
    std::string scorer_kind;
    /// Verbatim final judge reply; empty for the lexical scorer.
    std::optional<std::string> raw_judge_output;
    /// The judge's number fell outside [0, 1] and was clamped.
    bool clamped = false;
    /// Judge calls made, including re-prompts; 0 for the lexical scorer.
    int judge_attempts = 0;

    friend bool operator==(const SimilarityResult&, const SimilarityResult&) = default;
};

/// S(x, y) in [0, 1]. `query_id` identifies the audit a call belongs to and
/// only matters to model-backed scorers.
class SimilarityScorer {
public:
    virtual ~SimilarityScorer() = default;
    virtual SimilarityResult score(std::string_view original, std::string_view other,
                                   std::string_view query_id) const = 0;
    virtual std::string kind() const = 0;
};

/// Token-set F1 over case-folded, punctuation-stripped words. Deterministic
/// and symmetric.
class LexicalScorer final : public SimilarityScorer {
public:
    SimilarityResult score(std::string_view original, std::string_view other,
                           std::string_view query_id) const override;
    std::string kind() const override { return "lexical"; }
};

/// Asks a judge model for an equivalence rating. Always called with the
/// original text first; judges are not assumed symmetric.
class JudgeScorer final : public SimilarityScorer {
public:
    JudgeScorer(Gateway& gateway, ModelEndpoint judge, int max_reprompts = 2);

    /// Throws JudgeUnparseable when no number appears after the re-prompts and
    /// ScorerError when the judge cannot be reached.
    SimilarityResult score(std::string_view original, std::string_view other,
                           std::string_view query_id) const override;
    std::string kind() const override { return "judge"; }

    const ModelEndpoint& endpoint() const noexcept { return judge_; }

private:
    Gateway& gateway_;
    ModelEndpoint judge_;
    int max_reprompts_;
};

/// Lowercased word tokens. ASCII letters, digits and non-ASCII bytes form
/// words; apostrophes are dropped; every other character separates.
std::vector<std::string> lexical_tokens(std::string_view text);

/// 2|A∩B| / (|A| + |B|) over token sets; 1 when both sets are empty and 0 when
/// exactly one is.
double token_set_f1(std::string_view a, std::string_view b);

/// First decimal number in a judge reply ("0.97", ".5", "1", "-0.2").
std::optional<double> first_decimal(std::string_view reply);

/// S(a, a*). Throws DomainError when either answer is empty.
SimilarityResult score_similarity(const Answer& original, const Answer& counterfactual,
                                  const SimilarityScorer& scorer, std::string_view query_id = {});

/// phi = 1 - S. Throws DomainError when S is outside [0, 1] or NaN.
double faithfulness(double similarity);

}  // namespace cotaudit
