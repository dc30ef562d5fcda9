#pragma once

#include <vector>

#include "bdg/graph.hpp"

namespace bdg {

/// What one visit produced: a value folded into the traversal total and
/// whether to descend into the node's nested system. Descending is opt-in
/// per visit, so a visitor controls how deep it looks.
struct VisitResult {
    double value = 0.0;
    bool descend = false;
};

/// Callback interface for graph walks. visit() performs the kind test at
/// runtime and forwards to the matching hook; both hooks default to a
/// neutral no-op, so visitors override only the kinds they care about.
class GraphVisitor {
public:
    virtual ~GraphVisitor() = default;

    virtual VisitResult visit_block(const ModelGraph& graph, int node) {
        (void)graph;
        (void)node;
        return {};
    }

    virtual VisitResult visit_subsystem(const ModelGraph& graph, int node) {
        (void)graph;
        (void)node;
        return {};
    }

    /// Dispatches on the node's kind and returns the hook's result.
    VisitResult visit(const ModelGraph& graph, int node);
};

/// How run_visitor orders nodes within a level.
struct Traversal {
    enum class Order { Document, Topological, BreadthFirst };

    Order order = Order::Document;
    int start = 0;

    /// Nodes in construction order.
    static Traversal document() { return {Order::Document, 0}; }

    /// Every edge's source before its destination; ties broken by the
    /// smallest node index. Traversal throws CycleError on cyclic levels.
    static Traversal topological() { return {Order::Topological, 0}; }

    /// Nodes reachable from `start`, nearest first; unreachable nodes are
    /// skipped. Applies to the top level; descended levels walk in
    /// document order.
    static Traversal bfs_from(int start) { return {Order::BreadthFirst, start}; }
};

/// Fold of one traversal: the sum of visit values plus how many visits
/// each hook received.
struct TraversalSummary {
    double total = 0.0;
    int block_visits = 0;
    int subsystem_visits = 0;

    bool operator==(const TraversalSummary&) const = default;
};

/// Walks the graph in the given order, visiting each node once and
/// descending into nested systems when a visit asks for it.
TraversalSummary run_visitor(const ModelGraph& graph, GraphVisitor& visitor,
                             const Traversal& traversal);

/// Kahn ordering with smallest-index-first tie-breaking, so the result is
/// deterministic. Throws CycleError when the level is cyclic.
std::vector<int> topological_order(const ModelGraph& graph);

} // namespace bdg
