#include "cotaudit/trace.hpp"

#include <cctype>

#include "cotaudit/errors.hpp"

namespace cotaudit {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string lower_snake(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (c == '_' || c == '-' || c == ' ') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

enum class Marker { None, Step, Answer };

struct LineInfo {
    Marker marker = Marker::None;
    std::size_t number = 0;
    std::string_view rest;
};

// "Step <digits>:" or "Answer:" at the start of a line (leading blanks allowed).
LineInfo classify(std::string_view line) {
    std::size_t pos = 0;
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::string_view body = line.substr(pos);

    constexpr std::string_view kAnswer = "Answer:";
    if (body.starts_with(kAnswer)) {
        return {Marker::Answer, 0, body.substr(kAnswer.size())};
    }
    constexpr std::string_view kStep = "Step";
    if (!body.starts_with(kStep)) return {};
    std::size_t i = kStep.size();
    if (i >= body.size() || (body[i] != ' ' && body[i] != '\t')) return {};
    while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
    std::size_t digits_begin = i;
    std::size_t number = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        number = number * 10 + static_cast<std::size_t>(body[i] - '0');
        ++i;
    }
    if (i == digits_begin || i - digits_begin > 9) return {};
    while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
    if (i >= body.size() || body[i] != ':') return {};
    return {Marker::Step, number, body.substr(i + 1)};
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

struct OpenBlock {
    std::string text;
    std::size_t line = 0;
};

TraceBody parse(std::string_view raw_text, std::size_t first_number, bool allow_zero_steps) {
    TraceBody body;
    auto lines = split_lines(raw_text);

    std::optional<OpenBlock> step;
    std::optional<OpenBlock> answer;
    std::size_t expected = first_number;

    auto close_step = [&]() {
        if (!step) return;
        std::string text(trim(step->text));
        if (text.empty()) throw MalformedTrace("step " + std::to_string(expected - 1) + " has no text", step->line);
        body.steps.push_back({body.steps.size(), std::move(text)});
        step.reset();
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        LineInfo info = classify(lines[i]);
        switch (info.marker) {
            case Marker::Step:
                if (answer) throw MalformedTrace("step marker after the answer", line_no);
                if (info.number != expected) {
                    throw MalformedTrace("expected Step " + std::to_string(expected) + ", found Step " +
                                             std::to_string(info.number),
                                         line_no);
                }
                close_step();
                step = OpenBlock{std::string(info.rest), line_no};
                ++expected;
                break;
            case Marker::Answer:
                if (answer) throw MalformedTrace("second answer marker", line_no);
                close_step();
                answer = OpenBlock{std::string(info.rest), line_no};
                break;
            case Marker::None:
                if (step) {
                    step->text.push_back('\n');
                    step->text.append(lines[i]);
                } else if (answer) {
                    answer->text.push_back('\n');
                    answer->text.append(lines[i]);
                } else if (!trim(lines[i]).empty()) {
                    throw MalformedTrace("text before the first step marker", line_no);
                }
                break;
        }
    }
    close_step();

    if (!answer) throw MalformedTrace("no Answer line", lines.size());
    if (body.steps.empty() && !allow_zero_steps) throw MalformedTrace("no steps precede the answer", answer->line);
    body.answer.text = std::string(trim(answer->text));
    if (body.answer.text.empty()) throw MalformedTrace("answer has no text", answer->line);
    return body;
}

}  // namespace

TaskCategory TaskCategory::other(std::string label) {
    return parse(label);
}

TaskCategory TaskCategory::parse(std::string_view name) {
    std::string key = lower_snake(name);
    if (key == "generalknowledge") return general_knowledge();
    if (key == "scientificreasoning") return scientific_reasoning();
    if (key == "mathematicallogic") return mathematical_logic();
    std::string label(trim(name));
    if (label.empty()) throw DomainError("category label must be non-empty");
    return TaskCategory(Kind::Other, std::move(label));
}

std::string TaskCategory::name() const {
    switch (kind_) {
        case Kind::GeneralKnowledge: return "GeneralKnowledge";
        case Kind::ScientificReasoning: return "ScientificReasoning";
        case Kind::MathematicalLogic: return "MathematicalLogic";
        case Kind::Other: return label_;
    }
    return label_;
}

std::string TaskCategory::display_name() const {
    switch (kind_) {
        case Kind::GeneralKnowledge: return "General Knowledge";
        case Kind::ScientificReasoning: return "Scientific Reasoning";
        case Kind::MathematicalLogic: return "Mathematical Logic";
        case Kind::Other: return label_;
    }
    return label_;
}

void validate(const Query& query) {
    if (query.id.empty()) throw DomainError("query id must be non-empty");
    if (trim(query.text).empty()) throw DomainError("query '" + query.id + "' has blank text");
}

ReasoningTrace bind(std::string query_id, TraceBody body) {
    return {std::move(query_id), std::move(body.steps), std::move(body.answer)};
}

void validate(const ReasoningTrace& trace) {
    if (trace.steps.empty()) throw DomainError("trace for '" + trace.query_id + "' has no steps");
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        if (trace.steps[i].index != i) throw DomainError("step indices are not contiguous from 0");
        if (trace.steps[i].text.empty()) throw DomainError("step " + std::to_string(i) + " is empty");
    }
    if (trace.answer.text.empty()) throw DomainError("trace answer is empty");
}

TraceBody segment_trace(std::string_view raw_text) {
    TraceBody body = parse(raw_text, 1, false);
    for (std::size_t i = 0; i < body.steps.size(); ++i) body.steps[i].index = i;
    return body;
}

TraceBody segment_continuation(std::string_view raw_text, std::size_t first_step_number) {
    if (first_step_number == 0) throw DomainError("step numbering is 1-based");
    TraceBody body = parse(raw_text, first_step_number, true);
    for (std::size_t i = 0; i < body.steps.size(); ++i) body.steps[i].index = first_step_number - 1 + i;
    return body;
}

std::string render_steps(const std::vector<ReasoningStep>& steps) {
    std::string out;
    for (const auto& step : steps) {
        if (!out.empty()) out.push_back('\n');
        out += "Step " + std::to_string(step.index + 1) + ": " + step.text;
    }
    return out;
}

std::string render_trace(const std::vector<ReasoningStep>& steps, const Answer& answer) {
    std::string out = render_steps(steps);
    if (!out.empty()) out.push_back('\n');
    out += "Answer: " + answer.text;
    return out;
}

std::string_view trim(std::string_view text) noexcept {
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return text;
}

}  // namespace cotaudit
