#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cotaudit/endpoint.hpp"
#include "cotaudit/trace.hpp"

namespace cotaudit {

/// A variable of the reasoning SCM. Query and Theta are exogenous; steps and
/// the answer are endogenous.
struct NodeRef {
    enum class Kind { Query, Theta, Step, Answer };

    Kind kind = Kind::Query;
    std::size_t index = 0;  // meaningful for Step only

    static NodeRef query() { return {Kind::Query, 0}; }
    static NodeRef theta() { return {Kind::Theta, 0}; }
    static NodeRef step(std::size_t i) { return {Kind::Step, i}; }
    static NodeRef answer() { return {Kind::Answer, 0}; }

    bool exogenous() const noexcept { return kind == Kind::Query || kind == Kind::Theta; }
    std::string label() const;

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
    friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// Read-only causal view of one factual trace: every step depends on the query
/// and all earlier steps, and the answer on the query and every step.
class ReasoningSCM {
public:
    ReasoningSCM(Query query, ReasoningTrace trace, ModelEndpoint agent);

    const Query& query() const noexcept { return query_; }
    const ReasoningTrace& trace() const noexcept { return trace_; }
    const ModelEndpoint& agent() const noexcept { return agent_; }

    std::size_t step_count() const noexcept { return trace_.steps.size(); }
    /// Endogenous nodes in causal order: s_0 .. s_{n-1}, a.
    std::vector<NodeRef> endogenous() const;
    std::vector<NodeRef> exogenous() const { return {NodeRef::query(), NodeRef::theta()}; }
    /// Sorted parent set of an endogenous node. Throws IndexOutOfBounds for a
    /// step past the end and DomainError for exogenous nodes.
    std::vector<NodeRef> parents(const NodeRef& node) const;

private:
    Query query_;
    ReasoningTrace trace_;
    ModelEndpoint agent_;
};

ReasoningSCM build_scm(const Query& query, const ReasoningTrace& trace, const ModelEndpoint& agent);

/// Split of a trace around an intervention target. The prefix is reused
/// verbatim; the downstream steps are regenerated, so only their count is kept.
struct InterventionPartition {
    std::vector<ReasoningStep> prefix;
    std::size_t target_index = 0;
    std::size_t downstream_count = 0;
};

/// Throws IndexOutOfBounds when k >= step count.
InterventionPartition partition_at(const ReasoningSCM& scm, std::size_t k);

}  // namespace cotaudit
