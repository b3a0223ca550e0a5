#include "cotaudit/scm.hpp"

#include "cotaudit/errors.hpp"

namespace cotaudit {

std::string NodeRef::label() const {
    switch (kind) {
        case Kind::Query: return "q";
        case Kind::Theta: return "theta";
        case Kind::Step: return "s" + std::to_string(index);
        case Kind::Answer: return "a";
    }
    return "?";
}

ReasoningSCM::ReasoningSCM(Query query, ReasoningTrace trace, ModelEndpoint agent)
    : query_(std::move(query)), trace_(std::move(trace)), agent_(std::move(agent)) {
    if (trace_.query_id != query_.id) {
        throw DomainError("trace belongs to '" + trace_.query_id + "', not '" + query_.id + "'");
    }
    validate(trace_);
}

std::vector<NodeRef> ReasoningSCM::endogenous() const {
    std::vector<NodeRef> nodes;
    nodes.reserve(step_count() + 1);
    for (std::size_t i = 0; i < step_count(); ++i) nodes.push_back(NodeRef::step(i));
    nodes.push_back(NodeRef::answer());
    return nodes;
}

std::vector<NodeRef> ReasoningSCM::parents(const NodeRef& node) const {
    std::size_t upto = 0;
    switch (node.kind) {
        case NodeRef::Kind::Query:
        case NodeRef::Kind::Theta:
            throw DomainError("exogenous node " + node.label() + " has no parents");
        case NodeRef::Kind::Step:
            if (node.index >= step_count()) {
                throw IndexOutOfBounds("step " + std::to_string(node.index) + " of " + std::to_string(step_count()));
            }
            upto = node.index;
            break;
        case NodeRef::Kind::Answer:
            upto = step_count();
            break;
    }
    std::vector<NodeRef> out;
    out.reserve(upto + 1);
    out.push_back(NodeRef::query());
    for (std::size_t i = 0; i < upto; ++i) out.push_back(NodeRef::step(i));
    return out;
}

ReasoningSCM build_scm(const Query& query, const ReasoningTrace& trace, const ModelEndpoint& agent) {
    return ReasoningSCM(query, trace, agent);
}

InterventionPartition partition_at(const ReasoningSCM& scm, std::size_t k) {
    const auto n = scm.step_count();
    if (k >= n) {
        throw IndexOutOfBounds("target step " + std::to_string(k) + " outside trace of " + std::to_string(n) + " steps");
    }
    const auto& steps = scm.trace().steps;
    InterventionPartition partition;
    partition.prefix.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(k));
    partition.target_index = k;
    partition.downstream_count = n - k - 1;
    return partition;
}

}  // namespace cotaudit
