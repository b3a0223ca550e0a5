#include <gtest/gtest.h>

#include "cotaudit/errors.hpp"
#include "cotaudit/scm.hpp"
#include "test_support.hpp"

using namespace cotaudit;

namespace {

ReasoningTrace trace_of(std::size_t n, std::string qid = "q") {
    ReasoningTrace t{std::move(qid), {}, {"a"}};
    for (std::size_t i = 0; i < n; ++i) t.steps.push_back({i, "step " + std::to_string(i)});
    return t;
}

ReasoningSCM scm_of(std::size_t n) {
    return build_scm(Query{"q", "text", TaskCategory::general_knowledge()}, trace_of(n),
                     test::endpoint(Role::Agent));
}

}  // namespace

TEST(Scm, TwoStepChain) {
    auto scm = scm_of(2);
    EXPECT_EQ(scm.parents(NodeRef::step(1)), (std::vector{NodeRef::query(), NodeRef::step(0)}));
    EXPECT_EQ(scm.parents(NodeRef::answer()), (std::vector{NodeRef::query(), NodeRef::step(0), NodeRef::step(1)}));
    EXPECT_EQ(scm.parents(NodeRef::step(0)), std::vector{NodeRef::query()});
}

TEST(Scm, ChainInvariantsForAllLengths) {
    for (std::size_t n = 1; n <= 20; ++n) {
        auto scm = scm_of(n);
        const auto nodes = scm.endogenous();
        ASSERT_EQ(nodes.size(), n + 1);
        EXPECT_EQ(nodes.back(), NodeRef::answer());
        EXPECT_EQ(scm.parents(NodeRef::answer()).size(), n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            auto parents = scm.parents(NodeRef::step(i));
            ASSERT_EQ(parents.size(), i + 1);
            EXPECT_EQ(parents.front(), NodeRef::query());
            for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(parents[j + 1], NodeRef::step(j));
        }
    }
}

TEST(Scm, RejectsForeignTraceAndBadNodes) {
    Query q{"q1", "text", TaskCategory::general_knowledge()};
    EXPECT_THROW(build_scm(q, trace_of(2, "other"), test::endpoint(Role::Agent)), DomainError);
    auto scm = scm_of(3);
    EXPECT_THROW(scm.parents(NodeRef::step(3)), IndexOutOfBounds);
    EXPECT_THROW(scm.parents(NodeRef::theta()), DomainError);
    EXPECT_EQ(scm.exogenous().size(), 2u);
    EXPECT_EQ(NodeRef::step(2).label(), "s2");
}

TEST(Partition, FirstAndLastStep) {
    auto scm = scm_of(5);
    auto first = partition_at(scm, 0);
    EXPECT_TRUE(first.prefix.empty());
    EXPECT_EQ(first.downstream_count, 4u);
    auto last = partition_at(scm, 4);
    EXPECT_EQ(last.prefix.size(), 4u);
    EXPECT_EQ(last.downstream_count, 0u);
    EXPECT_THROW(partition_at(scm, 7), IndexOutOfBounds);
    EXPECT_THROW(partition_at(scm, 5), IndexOutOfBounds);
}

TEST(Partition, CoversIndicesWithoutOverlap) {
    for (std::size_t n = 1; n <= 12; ++n) {
        auto scm = scm_of(n);
        for (std::size_t k = 0; k < n; ++k) {
            auto p = partition_at(scm, k);
            ASSERT_EQ(p.prefix.size(), k);
            ASSERT_EQ(p.prefix.size() + 1 + p.downstream_count, n);
            for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(p.prefix[i], scm.trace().steps[i]);
        }
    }
}
