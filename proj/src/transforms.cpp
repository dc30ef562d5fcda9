#include "bdg/transforms.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "bdg/analyses.hpp"
#include "bdg/errors.hpp"
#include "transform_util.hpp"

namespace bdg {

std::string_view to_string(ChangeKind kind) {
    switch (kind) {
        case ChangeKind::AddedBlock: return "added-block";
        case ChangeKind::RemovedBlock: return "removed-block";
        case ChangeKind::AddedEdge: return "added-edge";
        case ChangeKind::RemovedEdge: return "removed-edge";
        case ChangeKind::Rewired: return "rewired";
        case ChangeKind::ParameterChanged: return "parameter-changed";
    }
    return "unknown";
}

// ─── connection normalization ────────────────────────────────────────────────

namespace {

ModelGraph normalize_level(const ModelGraph& graph, const std::string& prefix, ChangeLog& log) {
    if (!graph.connections_normalized()) {
        const auto& edges = graph.edges();
        std::size_t i = 0;
        while (i < edges.size()) {
            std::size_t j = i;
            while (j < edges.size() && edges[j].src_node == edges[i].src_node &&
                   edges[j].src_port == edges[i].src_port &&
                   edges[j].parameters == edges[i].parameters) {
                ++j;
            }
            if (j - i >= 2) {
                std::ostringstream detail;
                detail << "1:" << j - i << " line split into " << j - i << " 1:1 lines";
                log.add(ChangeKind::Rewired,
                        detail::port_subject(prefix, graph.node(edges[i].src_node).name,
                                             edges[i].src_port),
                        detail.str());
            }
            i = j;
        }
    }

    std::vector<NodeRecord> nodes = graph.nodes();
    for (auto& record : nodes) {
        if (record.nested) {
            record.nested = std::make_shared<const ModelGraph>(
                normalize_level(*record.nested, prefix + record.name + "/", log));
        }
    }
    return ModelGraph::from_parts(std::move(nodes), graph.edges(), true);
}

} // namespace

TransformResult normalize_connections(const ModelGraph& graph) {
    ChangeLog log;
    ModelGraph out = normalize_level(graph, "", log);
    return {std::move(out), std::move(log)};
}

// ─── cycle breaking ──────────────────────────────────────────────────────────

namespace {

bool acyclic_without(const ModelGraph& graph, const std::vector<char>& removed) {
    int n = graph.node_count();
    std::vector<int> indegree(static_cast<std::size_t>(n), 0);
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (!removed[static_cast<std::size_t>(e)]) {
            ++indegree[static_cast<std::size_t>(graph.edge(e).dst_node)];
        }
    }
    std::vector<int> stack;
    for (int v = 0; v < n; ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) stack.push_back(v);
    }
    int seen = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++seen;
        for (int e : graph.out_edges(v)) {
            if (removed[static_cast<std::size_t>(e)]) continue;
            int dst = graph.edge(e).dst_node;
            if (--indegree[static_cast<std::size_t>(dst)] == 0) stack.push_back(dst);
        }
    }
    return seen == n;
}

int delay_destinations(const ModelGraph& graph, const std::vector<int>& edges) {
    int count = 0;
    for (int e : edges) {
        if (graph.node(graph.edge(e).dst_node).block_type == "UnitDelay") ++count;
    }
    return count;
}

double combination_count(std::size_t n, std::size_t k) {
    double total = 1.0;
    for (std::size_t i = 0; i < k; ++i) total *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    return total;
}

/// Searches subsets of the cycle-edge candidates by increasing size and
/// returns the smallest acyclic-making set, preferring sets that end at
/// UnitDelay blocks and then the lexicographically first. Sizes past
/// `cap` (or past the enumeration budget) are left to the greedy pass.
std::optional<std::vector<int>> exact_minimum_removal(const ModelGraph& graph,
                                                      const std::vector<int>& candidates,
                                                      std::size_t cap) {
    constexpr double kBudget = 2e6;
    std::vector<char> removed(static_cast<std::size_t>(graph.edge_count()), 0);

    for (std::size_t k = 1; k <= cap && k <= candidates.size(); ++k) {
        if (combination_count(candidates.size(), k) > kBudget) return std::nullopt;

        std::optional<std::vector<int>> best;
        int best_delays = -1;
        std::vector<int> combo;
        std::function<void(std::size_t)> enumerate = [&](std::size_t from) {
            if (combo.size() == k) {
                if (acyclic_without(graph, removed)) {
                    int delays = delay_destinations(graph, combo);
                    if (delays > best_delays) {
                        best_delays = delays;
                        best = combo;
                    }
                }
                return;
            }
            for (std::size_t i = from; i + (k - combo.size()) <= candidates.size(); ++i) {
                combo.push_back(candidates[i]);
                removed[static_cast<std::size_t>(candidates[i])] = 1;
                enumerate(i + 1);
                removed[static_cast<std::size_t>(candidates[i])] = 0;
                combo.pop_back();
            }
        };
        enumerate(0);
        if (best) return best;
    }
    return std::nullopt;
}

/// Breaks the first canonical cycle of the remaining graph, preferring
/// its edge into a UnitDelay, until no cycle is left.
std::vector<int> greedy_removal(const ModelGraph& graph) {
    std::vector<char> removed(static_cast<std::size_t>(graph.edge_count()), 0);
    std::vector<int> picked;
    for (;;) {
        std::vector<Edge> remaining;
        std::vector<int> original_index;
        for (int e = 0; e < graph.edge_count(); ++e) {
            if (!removed[static_cast<std::size_t>(e)]) {
                remaining.push_back(graph.edge(e));
                original_index.push_back(e);
            }
        }
        ModelGraph trimmed = ModelGraph::from_parts(graph.nodes(), std::move(remaining));
        auto cycles = detect_cycles(trimmed);
        if (cycles.empty()) break;

        const Cycle& cycle = cycles.front();
        int choice = cycle.edges.back();
        for (int e : cycle.edges) {
            if (trimmed.node(trimmed.edge(e).dst_node).block_type == "UnitDelay") {
                choice = e;
                break;
            }
        }
        int original = original_index[static_cast<std::size_t>(choice)];
        removed[static_cast<std::size_t>(original)] = 1;
        picked.push_back(original);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

ModelGraph break_level(const ModelGraph& graph, const std::string& prefix, ChangeLog& log,
                       std::vector<EdgeEndpoints>& removed_out) {
    std::vector<int> removal;
    auto cycles = detect_cycles(graph);
    if (!cycles.empty()) {
        std::set<int> candidate_set;
        for (const auto& cycle : cycles) {
            candidate_set.insert(cycle.edges.begin(), cycle.edges.end());
        }
        std::vector<int> candidates(candidate_set.begin(), candidate_set.end());
        auto exact = exact_minimum_removal(graph, candidates, 5);
        removal = exact ? *exact : greedy_removal(graph);
    }

    for (int e : removal) {
        const Edge& edge = graph.edge(e);
        log.add(ChangeKind::RemovedEdge, detail::edge_subject(prefix, graph, edge),
                "feedback edge removed");
        removed_out.push_back({prefix + graph.node(edge.src_node).name, edge.src_port,
                               prefix + graph.node(edge.dst_node).name, edge.dst_port});
    }

    std::vector<NodeRecord> nodes = graph.nodes();
    for (auto& record : nodes) {
        if (record.nested) {
            record.nested = std::make_shared<const ModelGraph>(
                break_level(*record.nested, prefix + record.name + "/", log, removed_out));
        }
    }

    std::vector<char> drop(static_cast<std::size_t>(graph.edge_count()), 0);
    for (int e : removal) drop[static_cast<std::size_t>(e)] = 1;
    std::vector<Edge> kept;
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (!drop[static_cast<std::size_t>(e)]) kept.push_back(graph.edge(e));
    }
    return ModelGraph::from_parts(std::move(nodes), std::move(kept),
                                  graph.connections_normalized());
}

} // namespace

BreakCyclesResult break_cycles(const ModelGraph& graph) {
    ChangeLog log;
    std::vector<EdgeEndpoints> removed;
    ModelGraph out = break_level(graph, "", log, removed);
    return {std::move(out), std::move(log), std::move(removed)};
}

} // namespace bdg
