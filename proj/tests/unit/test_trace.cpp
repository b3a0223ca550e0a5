#include <gtest/gtest.h>

#include <random>

#include "cotaudit/errors.hpp"
#include "cotaudit/trace.hpp"

using namespace cotaudit;

namespace {

std::size_t malformed_line(std::string_view raw) {
    try {
        segment_trace(raw);
    } catch (const MalformedTrace& e) {
        EXPECT_EQ(e.kind(), "MalformedTrace");
        return e.line();
    }
    ADD_FAILURE() << "no MalformedTrace for:\n" << raw;
    return 0;
}

}  // namespace

TEST(SegmentTrace, ParsesStepsAndAnswer) {
    auto body = segment_trace("Step 1: France is in Europe.\nStep 2: Its capital is Paris.\nAnswer: Paris");
    ASSERT_EQ(body.steps.size(), 2u);
    EXPECT_EQ(body.steps[0], (ReasoningStep{0, "France is in Europe."}));
    EXPECT_EQ(body.steps[1], (ReasoningStep{1, "Its capital is Paris."}));
    EXPECT_EQ(body.answer.text, "Paris");
}

TEST(SegmentTrace, ContinuationLinesStayWithTheirStep) {
    auto body = segment_trace("Step 1: first line\n  second line\n\nStep 2: b\nAnswer: x\nbecause b");
    EXPECT_EQ(body.steps[0].text, "first line\n  second line");
    EXPECT_EQ(body.answer.text, "x\nbecause b");
}

TEST(SegmentTrace, ToleratesIndentAndCrlfAndBlankLead) {
    auto body = segment_trace("\n  Step 1:  a  \r\n\tStep 2:b\r\n  Answer:  c \r\n");
    ASSERT_EQ(body.steps.size(), 2u);
    EXPECT_EQ(body.steps[0].text, "a");
    EXPECT_EQ(body.steps[1].text, "b");
    EXPECT_EQ(body.answer.text, "c");
}

TEST(SegmentTrace, MarkerLookalikesAreText) {
    auto body = segment_trace("Step 1: see Steps 2: and Answers\nStepwise: not a marker\nAnswer: ok");
    ASSERT_EQ(body.steps.size(), 1u);
    EXPECT_EQ(body.steps[0].text, "see Steps 2: and Answers\nStepwise: not a marker");
}

TEST(SegmentTrace, RejectsGrammarViolations) {
    EXPECT_EQ(malformed_line("Preamble\nStep 1: a\nAnswer: b"), 1u);
    EXPECT_EQ(malformed_line("Step 1: a\nStep 3: b\nAnswer: c"), 2u);
    EXPECT_EQ(malformed_line("Step 2: a\nAnswer: c"), 1u);
    EXPECT_EQ(malformed_line("Step 1: a\nAnswer: b\nStep 2: c"), 3u);
    EXPECT_EQ(malformed_line("Step 1: a\nAnswer: b\nAnswer: c"), 3u);
    EXPECT_EQ(malformed_line("Step 1: a\nStep 2: b"), 2u);
    EXPECT_EQ(malformed_line("Answer: only"), 1u);
    EXPECT_EQ(malformed_line("Step 1:   \nAnswer: b"), 1u);
    EXPECT_EQ(malformed_line("Step 1: a\nAnswer:  "), 2u);
    malformed_line("");
    malformed_line("   \n\n");
}

TEST(SegmentContinuation, NumbersFromResumePoint) {
    auto body = segment_continuation("Step 3: c\nStep 4: d\nAnswer: e", 3);
    ASSERT_EQ(body.steps.size(), 2u);
    EXPECT_EQ(body.steps[0].index, 2u);
    EXPECT_EQ(body.steps[1].index, 3u);
    EXPECT_THROW(segment_continuation("Step 1: c\nAnswer: e", 3), MalformedTrace);
}

TEST(SegmentContinuation, AllowsAnswerOnly) {
    auto body = segment_continuation("Answer: still Paris", 2);
    EXPECT_TRUE(body.steps.empty());
    EXPECT_EQ(body.answer.text, "still Paris");
    EXPECT_THROW(segment_continuation("Answer: x", 0), DomainError);
}

TEST(SegmentTrace, RenderRoundTripProperty) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> words = {"alpha", "Beta", "the", "sum", "3", "is", "Paris", "×", "=", "capital"};
    auto sentence = [&] {
        std::string s;
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            if (i > 0) s += (rng() % 9 == 0) ? "\nthen " : " ";
            s += words[rng() % words.size()];
        }
        return s;
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ReasoningStep> steps;
        const std::size_t n = 1 + rng() % 12;
        for (std::size_t i = 0; i < n; ++i) steps.push_back({i, sentence()});
        Answer answer{sentence()};
        const auto body = segment_trace(render_trace(steps, answer));
        ASSERT_EQ(body.steps, steps);
        ASSERT_EQ(body.answer, answer);
    }
}

TEST(Trace, RenderStepsUsesOneBasedNumbers) {
    EXPECT_EQ(render_steps({{0, "a"}, {1, "b"}}), "Step 1: a\nStep 2: b");
    EXPECT_EQ(render_steps({{3, "d"}}), "Step 4: d");
    EXPECT_EQ(render_trace({{0, "a"}}, {"x"}), "Step 1: a\nAnswer: x");
}

TEST(Trace, ValidateAndBind) {
    auto trace = bind("q1", segment_trace("Step 1: a\nAnswer: b"));
    EXPECT_EQ(trace.query_id, "q1");
    EXPECT_EQ(trace.length(), 1u);
    EXPECT_NO_THROW(validate(trace));
    trace.steps[0].index = 4;
    EXPECT_THROW(validate(trace), DomainError);
    EXPECT_THROW(validate(ReasoningTrace{"q", {}, {"a"}}), DomainError);
    EXPECT_THROW(validate(ReasoningTrace{"q", {{0, "s"}}, {""}}), DomainError);
}

TEST(Query, Validate) {
    EXPECT_NO_THROW(validate(Query{"q", "text", TaskCategory::general_knowledge()}));
    EXPECT_THROW(validate(Query{"", "text", {}}), DomainError);
    EXPECT_THROW(validate(Query{"q", " \n ", {}}), DomainError);
}

TEST(TaskCategory, ParseAndNames) {
    EXPECT_EQ(TaskCategory::parse("general_knowledge"), TaskCategory::general_knowledge());
    EXPECT_EQ(TaskCategory::parse("ScientificReasoning"), TaskCategory::scientific_reasoning());
    EXPECT_EQ(TaskCategory::parse("Mathematical Logic"), TaskCategory::mathematical_logic());
    auto other = TaskCategory::parse("legal");
    EXPECT_EQ(other.kind(), TaskCategory::Kind::Other);
    EXPECT_EQ(other.name(), "legal");
    EXPECT_EQ(TaskCategory::other("general-knowledge"), TaskCategory::general_knowledge());
    EXPECT_EQ(TaskCategory::mathematical_logic().display_name(), "Mathematical Logic");
    EXPECT_THROW(TaskCategory::other(" "), DomainError);
    EXPECT_LT(TaskCategory::general_knowledge(), TaskCategory::mathematical_logic());
    EXPECT_LT(TaskCategory::mathematical_logic(), other);
}

TEST(Trim, Basics) {
    EXPECT_EQ(trim("  a b \n"), "a b");
    EXPECT_EQ(trim(""), "");
    EXPECT_EQ(trim(" \t\r\n"), "");
}
