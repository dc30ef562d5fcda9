#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "bdg/errors.hpp"
#include "bdg/transforms.hpp"
#include "transform_util.hpp"

namespace bdg {

namespace {

/// is_new marks edges created by the splice currently in progress; they
/// are logged as additions once the splice's port contractions settle.
struct WorkEdge {
    Edge edge;
    bool is_new = false;
};

struct LevelData {
    std::vector<NodeRecord> nodes;
    std::vector<WorkEdge> edges;
};

bool eligible(const NodeRecord& record, bool include_atomic) {
    return record.is_subsystem && (record.virtual_subsystem || include_atomic);
}

LevelData flatten_level(const ModelGraph& graph, const std::string& prefix, bool include_atomic,
                        ChangeLog& log);

std::string work_edge_subject(const std::string& prefix, const std::vector<NodeRecord>& nodes,
                              const Edge& edge) {
    return detail::port_subject(prefix, nodes[static_cast<std::size_t>(edge.src_node)].name,
                                edge.src_port) +
           " -> " +
           detail::port_subject(prefix, nodes[static_cast<std::size_t>(edge.dst_node)].name,
                                edge.dst_port);
}

/// Logs the interior of a subsystem that rides along unchanged while its
/// path changes, so a changelog replay tracks the whole subtree and not
/// just the subsystem node itself.
void log_carried_level(const ModelGraph& graph, const std::string& prefix, bool removed,
                       const std::string& owner, ChangeLog& log) {
    ChangeKind block_kind = removed ? ChangeKind::RemovedBlock : ChangeKind::AddedBlock;
    ChangeKind edge_kind = removed ? ChangeKind::RemovedEdge : ChangeKind::AddedEdge;
    for (const NodeRecord& node : graph.nodes()) {
        log.add(block_kind, prefix + node.name, node.block_type);
        if (node.nested) {
            log_carried_level(*node.nested, prefix + node.name + "/", removed, owner, log);
        }
    }
    for (const Edge& edge : graph.edges()) {
        log.add(edge_kind,
                detail::port_subject(prefix,
                                     graph.node(edge.src_node).name, edge.src_port) +
                    " -> " +
                    detail::port_subject(prefix, graph.node(edge.dst_node).name, edge.dst_port),
                "carried inside \"" + owner + "\"");
    }
}

/// Splices the first eligible subsystem into `level`. Returns false when
/// none is left.
bool splice_first(LevelData& level, const std::string& prefix, bool include_atomic,
                  ChangeLog& log) {
    int s = -1;
    for (std::size_t i = 0; i < level.nodes.size(); ++i) {
        if (eligible(level.nodes[i], include_atomic)) {
            s = static_cast<int>(i);
            break;
        }
    }
    if (s < 0) return false;

    const NodeRecord sub = level.nodes[static_cast<std::size_t>(s)];
    if (!sub.nested) {
        throw PortMismatchError(prefix + sub.name + ": subsystem has no nested system");
    }
    LevelData inner = flatten_level(*sub.nested, prefix + sub.name + "/", include_atomic, log);

    std::vector<int> inport_of;
    std::vector<int> outport_of;
    std::vector<char> is_port(inner.nodes.size(), 0);
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
        if (inner.nodes[j].block_type == "Inport") {
            inport_of.push_back(static_cast<int>(j));
            is_port[j] = 1;
        } else if (inner.nodes[j].block_type == "Outport") {
            outport_of.push_back(static_cast<int>(j));
            is_port[j] = 1;
        }
    }
    if (static_cast<int>(inport_of.size()) != sub.in_ports ||
        static_cast<int>(outport_of.size()) != sub.out_ports) {
        throw PortMismatchError(prefix + sub.name + ": declares " + std::to_string(sub.in_ports) +
                                "/" + std::to_string(sub.out_ports) + " ports but holds " +
                                std::to_string(inport_of.size()) + " Inport and " +
                                std::to_string(outport_of.size()) + " Outport blocks");
    }

    // Names the lifted blocks will take, unique against the rest of the level.
    std::set<std::string> taken;
    for (std::size_t i = 0; i < level.nodes.size(); ++i) {
        if (static_cast<int>(i) != s) taken.insert(level.nodes[i].name);
    }
    std::vector<std::string> lifted_name(inner.nodes.size());
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
        if (is_port[j]) continue;
        lifted_name[j] = detail::unique_name(taken, sub.name + "." + inner.nodes[j].name);
        taken.insert(lifted_name[j]);
    }

    log.add(ChangeKind::RemovedBlock, prefix + sub.name, "SubSystem");
    for (const auto& record : inner.nodes) {
        log.add(ChangeKind::RemovedBlock, prefix + sub.name + "/" + record.name,
                record.block_type);
        if (record.nested) {
            log_carried_level(*record.nested, prefix + sub.name + "/" + record.name + "/", true,
                              record.name, log);
        }
    }
    for (const auto& we : level.edges) {
        if (we.edge.src_node == s || we.edge.dst_node == s) {
            log.add(ChangeKind::RemovedEdge, work_edge_subject(prefix, level.nodes, we.edge),
                    "crossed the boundary of \"" + sub.name + "\"");
        }
    }
    for (const auto& we : inner.edges) {
        log.add(ChangeKind::RemovedEdge,
                work_edge_subject(prefix + sub.name + "/", inner.nodes, we.edge),
                "lifted out of \"" + sub.name + "\"");
    }

    // Combined level: nodes before the subsystem, the whole inner level
    // (port blocks included, they are contracted away below), the rest.
    std::vector<NodeRecord> nodes;
    std::vector<int> map_old(level.nodes.size(), -1);
    std::vector<int> map_inner(inner.nodes.size(), -1);
    for (std::size_t i = 0; i < static_cast<std::size_t>(s); ++i) {
        map_old[i] = static_cast<int>(nodes.size());
        nodes.push_back(level.nodes[i]);
    }
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
        map_inner[j] = static_cast<int>(nodes.size());
        NodeRecord record = inner.nodes[j];
        if (!is_port[j]) record.name = lifted_name[j];
        nodes.push_back(std::move(record));
    }
    for (std::size_t i = static_cast<std::size_t>(s) + 1; i < level.nodes.size(); ++i) {
        map_old[i] = static_cast<int>(nodes.size());
        nodes.push_back(level.nodes[i]);
    }

    std::vector<WorkEdge> edges;
    for (const auto& we : level.edges) {
        Edge e = we.edge;
        bool is_new = we.is_new;
        if (e.src_node == s) {
            e.src_node = map_inner[static_cast<std::size_t>(outport_of[static_cast<std::size_t>(
                e.src_port - 1)])];
            e.src_port = 1;
            is_new = true;
        } else {
            e.src_node = map_old[static_cast<std::size_t>(e.src_node)];
        }
        if (e.dst_node == s) {
            e.dst_node = map_inner[static_cast<std::size_t>(inport_of[static_cast<std::size_t>(
                e.dst_port - 1)])];
            e.dst_port = 1;
            is_new = true;
        } else {
            e.dst_node = map_old[static_cast<std::size_t>(e.dst_node)];
        }
        edges.push_back({e, is_new});
    }
    for (const auto& we : inner.edges) {
        Edge e = we.edge;
        e.src_node = map_inner[static_cast<std::size_t>(e.src_node)];
        e.dst_node = map_inner[static_cast<std::size_t>(e.dst_node)];
        edges.push_back({e, true});
    }

    // Contract every port block: each incoming/outgoing edge pair joins
    // into one edge carrying the incoming (driving) edge's parameters.
    std::vector<int> ports;
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
        if (is_port[j]) ports.push_back(map_inner[j]);
    }
    std::sort(ports.rbegin(), ports.rend());
    for (int p : ports) {
        std::vector<const WorkEdge*> preds;
        std::vector<const WorkEdge*> succs;
        for (const auto& we : edges) {
            // A self-loop on a port block is a closed wire loop (an outer
            // feedback edge composed with an inner pass-through wire). It
            // connects no real blocks, so it joins nothing; it is still
            // dropped with the port's other edges below.
            if (we.edge.src_node == p && we.edge.dst_node == p) continue;
            if (we.edge.dst_node == p) preds.push_back(&we);
            if (we.edge.src_node == p) succs.push_back(&we);
        }
        std::vector<WorkEdge> joined;
        for (const auto* pred : preds) {
            for (const auto* succ : succs) {
                joined.push_back({Edge{pred->edge.src_node, pred->edge.src_port,
                                       succ->edge.dst_node, succ->edge.dst_port,
                                       pred->edge.parameters},
                                  true});
            }
        }
        std::vector<WorkEdge> next;
        bool inserted = false;
        for (const auto& we : edges) {
            if (we.edge.src_node == p || we.edge.dst_node == p) {
                if (!inserted) {
                    next.insert(next.end(), joined.begin(), joined.end());
                    inserted = true;
                }
                continue;
            }
            next.push_back(we);
        }
        edges = std::move(next);
        nodes.erase(nodes.begin() + p);
        for (auto& we : edges) {
            if (we.edge.src_node > p) --we.edge.src_node;
            if (we.edge.dst_node > p) --we.edge.dst_node;
        }
    }

    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
        if (!is_port[j]) {
            log.add(ChangeKind::AddedBlock, prefix + lifted_name[j], inner.nodes[j].block_type);
            if (inner.nodes[j].nested) {
                log_carried_level(*inner.nodes[j].nested, prefix + lifted_name[j] + "/", false,
                                  lifted_name[j], log);
            }
        }
    }
    for (auto& we : edges) {
        if (we.is_new) {
            log.add(ChangeKind::AddedEdge, work_edge_subject(prefix, nodes, we.edge),
                    "spliced from \"" + sub.name + "\"");
            we.is_new = false;
        }
    }

    level.nodes = std::move(nodes);
    level.edges = std::move(edges);
    return true;
}

LevelData flatten_level(const ModelGraph& graph, const std::string& prefix, bool include_atomic,
                        ChangeLog& log) {
    LevelData level;
    level.nodes = graph.nodes();
    for (const Edge& e : graph.edges()) level.edges.push_back({e, false});
    while (splice_first(level, prefix, include_atomic, log)) {
    }
    return level;
}

} // namespace

TransformResult flatten_hierarchy(const ModelGraph& graph, bool include_atomic) {
    ChangeLog log;
    LevelData data = flatten_level(graph, "", include_atomic, log);
    std::vector<Edge> edges;
    edges.reserve(data.edges.size());
    for (auto& we : data.edges) edges.push_back(std::move(we.edge));
    return {ModelGraph::from_parts(std::move(data.nodes), std::move(edges),
                                   graph.connections_normalized()),
            std::move(log)};
}

} // namespace bdg
