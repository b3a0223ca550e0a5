#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotaudit {

/// Task domain of a query. The three named domains are closed; anything
/// else is carried as a free-form, non-empty label.
class TaskCategory {
public:
    enum class Kind { GeneralKnowledge, ScientificReasoning, MathematicalLogic, Other };

    TaskCategory() = default;
    static TaskCategory general_knowledge() { return TaskCategory(Kind::GeneralKnowledge, {}); }
    static TaskCategory scientific_reasoning() { return TaskCategory(Kind::ScientificReasoning, {}); }
    static TaskCategory mathematical_logic() { return TaskCategory(Kind::MathematicalLogic, {}); }
    /// Throws DomainError on an empty label. A label spelling one of the named
    /// domains yields that domain rather than an Other.
    static TaskCategory other(std::string label);

    /// Accepts the serialized names ("GeneralKnowledge", ...) and the
    /// snake_case spellings ("general_knowledge", ...); anything else is Other.
    static TaskCategory parse(std::string_view name);

    Kind kind() const noexcept { return kind_; }
    /// Serialized name: the enumerator name, or the label for Other.
    std::string name() const;
    /// Human-readable row title used in reports.
    std::string display_name() const;

    friend bool operator==(const TaskCategory&, const TaskCategory&) = default;
    friend auto operator<=>(const TaskCategory&, const TaskCategory&) = default;

private:
    TaskCategory(Kind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

    Kind kind_ = Kind::GeneralKnowledge;
    std::string label_;
};

struct Query {
    std::string id;
    std::string text;
    TaskCategory category;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Throws DomainError when the query text is blank or the id empty.
void validate(const Query& query);

struct ReasoningStep {
    std::size_t index = 0;
    std::string text;

    friend bool operator==(const ReasoningStep&, const ReasoningStep&) = default;
};

struct Answer {
    std::string text;

    friend bool operator==(const Answer&, const Answer&) = default;
};

/// Steps plus answer, not yet bound to a query.
struct TraceBody {
    std::vector<ReasoningStep> steps;
    Answer answer;

    friend bool operator==(const TraceBody&, const TraceBody&) = default;
};

struct ReasoningTrace {
    std::string query_id;
    std::vector<ReasoningStep> steps;
    Answer answer;

    std::size_t length() const noexcept { return steps.size(); }
    TraceBody body() const { return {steps, answer}; }

    friend bool operator==(const ReasoningTrace&, const ReasoningTrace&) = default;
};

ReasoningTrace bind(std::string query_id, TraceBody body);

/// Throws DomainError unless steps are non-empty, contiguously indexed from 0,
/// and every step and the answer carry text.
void validate(const ReasoningTrace& trace);

/// Strict parse of the step grammar:
///
///     Step 1: <text>
///     <optional continuation lines>
///     Step 2: <text>
///     Answer: <text>
///
/// Step and answer text are trimmed; interior newlines are kept. Throws
/// MalformedTrace (with the 1-based offending line) on any deviation.
TraceBody segment_trace(std::string_view raw_text);

/// Parses a resumed run. Numbering starts at `first_step_number` (1-based,
/// as in the grammar) and zero steps before the answer are allowed. Returned
/// step indices start at `first_step_number - 1`.
TraceBody segment_continuation(std::string_view raw_text, std::size_t first_step_number);

/// Emits "Step i: ..." lines only, numbering from each step's index + 1.
std::string render_steps(const std::vector<ReasoningStep>& steps);

/// Inverse of segment_trace for traces whose texts hold no line that itself
/// starts with a step or answer marker.
std::string render_trace(const std::vector<ReasoningStep>& steps, const Answer& answer);

/// Trims ASCII whitespace at both ends.
std::string_view trim(std::string_view text) noexcept;

}  // namespace cotaudit
