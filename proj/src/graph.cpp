#include "bdg/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bdg/errors.hpp"

namespace bdg {

bool NodeRecord::operator==(const NodeRecord& other) const {
    if (name != other.name || block_type != other.block_type ||
        is_subsystem != other.is_subsystem || virtual_subsystem != other.virtual_subsystem ||
        in_ports != other.in_ports || out_ports != other.out_ports ||
        parameters != other.parameters) {
        return false;
    }
    if (!nested != !other.nested) return false;
    return !nested || *nested == *other.nested;
}

namespace {

void check_edge_ranges(const std::vector<NodeRecord>& nodes, const std::vector<Edge>& edges) {
    int n = static_cast<int>(nodes.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        std::ostringstream at;
        at << "edge " << i << ": ";
        if (e.src_node < 0 || e.src_node >= n) {
            throw InconsistentGraphError(at.str() + "source node " + std::to_string(e.src_node) +
                                         " outside the node table");
        }
        if (e.dst_node < 0 || e.dst_node >= n) {
            throw InconsistentGraphError(at.str() + "destination node " +
                                         std::to_string(e.dst_node) + " outside the node table");
        }
        const NodeRecord& src = nodes[static_cast<std::size_t>(e.src_node)];
        const NodeRecord& dst = nodes[static_cast<std::size_t>(e.dst_node)];
        if (e.src_port < 1 || e.src_port > src.out_ports) {
            throw InconsistentGraphError(at.str() + "source port " + std::to_string(e.src_port) +
                                         " outside 1.." + std::to_string(src.out_ports) + " of " +
                                         src.name);
        }
        if (e.dst_port < 1 || e.dst_port > dst.in_ports) {
            throw InconsistentGraphError(at.str() + "destination port " +
                                         std::to_string(e.dst_port) + " outside 1.." +
                                         std::to_string(dst.in_ports) + " of " + dst.name);
        }
    }
}

} // namespace

ModelGraph ModelGraph::from_parts(std::vector<NodeRecord> nodes, std::vector<Edge> edges,
                                  bool normalized) {
    check_edge_ranges(nodes, edges);
    ModelGraph g;
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    g.normalized_ = normalized;
    g.out_edges_.resize(g.nodes_.size());
    g.in_edges_.resize(g.nodes_.size());
    for (int i = 0; i < g.edge_count(); ++i) {
        g.out_edges_[static_cast<std::size_t>(g.edges_[static_cast<std::size_t>(i)].src_node)]
            .push_back(i);
        g.in_edges_[static_cast<std::size_t>(g.edges_[static_cast<std::size_t>(i)].dst_node)]
            .push_back(i);
    }
    return g;
}

ModelGraph ModelGraph::from_raw_parts(std::vector<NodeRecord> nodes, std::vector<Edge> edges,
                                      std::vector<std::vector<int>> out_edges,
                                      std::vector<std::vector<int>> in_edges, bool normalized) {
    ModelGraph g;
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    g.out_edges_ = std::move(out_edges);
    g.in_edges_ = std::move(in_edges);
    g.normalized_ = normalized;
    return g;
}

const NodeRecord& ModelGraph::node(int index) const {
    if (index < 0 || index >= node_count()) {
        throw std::out_of_range("node index " + std::to_string(index) + " outside 0.." +
                                std::to_string(node_count() - 1));
    }
    return nodes_[static_cast<std::size_t>(index)];
}

const Edge& ModelGraph::edge(int index) const {
    if (index < 0 || index >= edge_count()) {
        throw std::out_of_range("edge index " + std::to_string(index) + " outside 0.." +
                                std::to_string(edge_count() - 1));
    }
    return edges_[static_cast<std::size_t>(index)];
}

const std::vector<int>& ModelGraph::out_edges(int node) const {
    if (node < 0 || node >= node_count()) {
        throw std::out_of_range("node index " + std::to_string(node) + " outside 0.." +
                                std::to_string(node_count() - 1));
    }
    return out_edges_[static_cast<std::size_t>(node)];
}

const std::vector<int>& ModelGraph::in_edges(int node) const {
    if (node < 0 || node >= node_count()) {
        throw std::out_of_range("node index " + std::to_string(node) + " outside 0.." +
                                std::to_string(node_count() - 1));
    }
    return in_edges_[static_cast<std::size_t>(node)];
}

std::optional<int> ModelGraph::find_node(std::string_view name) const {
    for (int i = 0; i < node_count(); ++i) {
        if (nodes_[static_cast<std::size_t>(i)].name == name) return i;
    }
    return std::nullopt;
}

std::optional<ModelGraph::Resolved> ModelGraph::resolve(std::string_view path) const {
    const ModelGraph* level = this;
    for (;;) {
        auto slash = path.find('/');
        std::string_view head = slash == std::string_view::npos ? path : path.substr(0, slash);
        auto index = level->find_node(head);
        if (!index) return std::nullopt;
        if (slash == std::string_view::npos) return Resolved{level, *index};
        const NodeRecord& record = level->nodes_[static_cast<std::size_t>(*index)];
        if (!record.nested) return std::nullopt;
        level = record.nested.get();
        path = path.substr(slash + 1);
    }
}

void ModelGraph::verify_consistent() const {
    check_edge_ranges(nodes_, edges_);
    if (out_edges_.size() != nodes_.size() || in_edges_.size() != nodes_.size()) {
        throw InconsistentGraphError("adjacency table size disagrees with the node table");
    }

    auto audit = [&](const std::vector<std::vector<int>>& lists, bool outgoing) {
        std::vector<int> seen(edges_.size(), 0);
        for (std::size_t n = 0; n < lists.size(); ++n) {
            for (int e : lists[n]) {
                if (e < 0 || e >= edge_count()) {
                    throw InconsistentGraphError("adjacency of node " + std::to_string(n) +
                                                 " holds invalid edge index " + std::to_string(e));
                }
                int anchor = outgoing ? edges_[static_cast<std::size_t>(e)].src_node
                                      : edges_[static_cast<std::size_t>(e)].dst_node;
                if (anchor != static_cast<int>(n)) {
                    throw InconsistentGraphError("edge " + std::to_string(e) +
                                                 " is filed under node " + std::to_string(n) +
                                                 " but anchors at node " + std::to_string(anchor));
                }
                if (++seen[static_cast<std::size_t>(e)] > 1) {
                    throw InconsistentGraphError("edge " + std::to_string(e) +
                                                 " appears twice in the adjacency table");
                }
            }
        }
        for (std::size_t e = 0; e < seen.size(); ++e) {
            if (seen[e] == 0) {
                throw InconsistentGraphError("edge " + std::to_string(e) +
                                             " is missing from the adjacency table");
            }
        }
    };
    audit(out_edges_, true);
    audit(in_edges_, false);

    for (const auto& record : nodes_) {
        if (record.nested) record.nested->verify_consistent();
    }
}

bool ModelGraph::operator==(const ModelGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
}

std::vector<Adjacent> predecessors(const ModelGraph& graph, int node) {
    std::vector<Adjacent> out;
    for (int e : graph.in_edges(node)) out.push_back({graph.edge(e).src_node, e});
    return out;
}

std::vector<Adjacent> successors(const ModelGraph& graph, int node) {
    std::vector<Adjacent> out;
    for (int e : graph.out_edges(node)) out.push_back({graph.edge(e).dst_node, e});
    return out;
}

// ─── model conversion ────────────────────────────────────────────────────────

namespace {

ModelGraph build_system_graph(const System& sys) {
    std::vector<NodeRecord> nodes;
    std::map<std::string, int, std::less<>> index;
    for (const auto& block : sys.blocks) {
        NodeRecord record;
        record.name = block.name;
        record.block_type = block.type;
        record.is_subsystem = block.is_subsystem();
        record.virtual_subsystem = block.virtual_flag;
        record.in_ports = block.in_ports;
        record.out_ports = block.out_ports;
        record.parameters = block.parameters;
        if (const System* nested = block.nested_system()) {
            record.nested = std::make_shared<const ModelGraph>(build_system_graph(*nested));
        }
        index.emplace(block.name, static_cast<int>(nodes.size()));
        nodes.push_back(std::move(record));
    }

    std::vector<Edge> edges;
    for (const auto& conn : sys.connections) {
        int src = index.find(conn.src.block)->second;
        for (const auto& dst : conn.dsts) {
            edges.push_back(
                {src, conn.src.port, index.find(dst.block)->second, dst.port, conn.parameters});
        }
    }
    return ModelGraph::from_parts(std::move(nodes), std::move(edges));
}

System system_from_graph(const ModelGraph& graph) {
    System sys;
    for (const auto& record : graph.nodes()) {
        Block block;
        block.name = record.name;
        block.type = record.block_type;
        block.in_ports = record.in_ports;
        block.out_ports = record.out_ports;
        block.virtual_flag = record.virtual_subsystem;
        block.parameters = record.parameters;
        if (record.nested) block.nested.push_back(system_from_graph(*record.nested));
        sys.blocks.push_back(std::move(block));
    }

    // Consecutive edges sharing source port and parameters came from one
    // fan-out line; regrouping only such runs keeps edge order stable
    // across round trips.
    const auto& edges = graph.edges();
    for (std::size_t i = 0; i < edges.size();) {
        const Edge& head = edges[i];
        RawConnection conn;
        conn.src = {graph.node(head.src_node).name, head.src_port};
        conn.parameters = head.parameters;
        std::size_t j = i;
        while (j < edges.size() && edges[j].src_node == head.src_node &&
               edges[j].src_port == head.src_port && edges[j].parameters == head.parameters) {
            conn.dsts.push_back({graph.node(edges[j].dst_node).name, edges[j].dst_port});
            ++j;
            if (graph.connections_normalized()) break;
        }
        sys.connections.push_back(std::move(conn));
        i = j;
    }
    return sys;
}

} // namespace

ModelGraph build_graph(const Model& model) {
    auto violations = validate(model);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "model is not well formed: ";
        if (!violations.front().path.empty()) msg << violations.front().path << ": ";
        msg << violations.front().message;
        if (violations.size() > 1) msg << " (+" << violations.size() - 1 << " more)";
        throw InvalidModelError(msg.str());
    }
    return build_system_graph(model.root);
}

Model to_model(const ModelGraph& graph, const Model& header) {
    graph.verify_consistent();
    Model model;
    model.name = header.name;
    model.source_meta = header.source_meta;
    model.root = system_from_graph(graph);
    return model;
}

} // namespace bdg
