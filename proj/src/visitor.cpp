#include "bdg/visitor.hpp"

#include <deque>
#include <numeric>
#include <queue>

#include "bdg/errors.hpp"

namespace bdg {

VisitResult GraphVisitor::visit(const ModelGraph& graph, int node) {
    const NodeRecord& record = graph.node(node);
    if (record.is_subsystem) return visit_subsystem(graph, node);
    return visit_block(graph, node);
}

std::vector<int> topological_order(const ModelGraph& graph) {
    int n = graph.node_count();
    std::vector<int> indegree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        indegree[static_cast<std::size_t>(i)] = static_cast<int>(graph.in_edges(i).size());
    }

    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int i = 0; i < n; ++i) {
        if (indegree[static_cast<std::size_t>(i)] == 0) ready.push(i);
    }

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        int node = ready.top();
        ready.pop();
        order.push_back(node);
        for (int e : graph.out_edges(node)) {
            int dst = graph.edge(e).dst_node;
            if (--indegree[static_cast<std::size_t>(dst)] == 0) ready.push(dst);
        }
    }
    if (static_cast<int>(order.size()) != n) {
        throw CycleError("level contains a cycle, no topological order exists");
    }
    return order;
}

namespace {

void visit_level(const ModelGraph& graph, GraphVisitor& visitor, Traversal::Order order,
                 TraversalSummary& summary);

void apply(const ModelGraph& graph, int node, GraphVisitor& visitor, Traversal::Order nested_order,
           TraversalSummary& summary) {
    const NodeRecord& record = graph.node(node);
    VisitResult result = visitor.visit(graph, node);
    summary.total += result.value;
    if (record.is_subsystem) {
        ++summary.subsystem_visits;
    } else {
        ++summary.block_visits;
    }
    if (result.descend && record.nested) {
        visit_level(*record.nested, visitor, nested_order, summary);
    }
}

void visit_level(const ModelGraph& graph, GraphVisitor& visitor, Traversal::Order order,
                 TraversalSummary& summary) {
    std::vector<int> sequence;
    if (order == Traversal::Order::Topological) {
        sequence = topological_order(graph);
    } else {
        sequence.resize(static_cast<std::size_t>(graph.node_count()));
        std::iota(sequence.begin(), sequence.end(), 0);
    }
    for (int node : sequence) apply(graph, node, visitor, order, summary);
}

} // namespace

TraversalSummary run_visitor(const ModelGraph& graph, GraphVisitor& visitor,
                             const Traversal& traversal) {
    TraversalSummary summary;
    if (traversal.order != Traversal::Order::BreadthFirst) {
        visit_level(graph, visitor, traversal.order, summary);
        return summary;
    }

    graph.node(traversal.start);
    std::vector<char> seen(static_cast<std::size_t>(graph.node_count()), 0);
    std::deque<int> queue{traversal.start};
    seen[static_cast<std::size_t>(traversal.start)] = 1;
    while (!queue.empty()) {
        int node = queue.front();
        queue.pop_front();
        apply(graph, node, visitor, Traversal::Order::Document, summary);
        for (const auto& next : successors(graph, node)) {
            if (!seen[static_cast<std::size_t>(next.node)]) {
                seen[static_cast<std::size_t>(next.node)] = 1;
                queue.push_back(next.node);
            }
        }
    }
    return summary;
}

} // namespace bdg
