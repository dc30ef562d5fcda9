#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdg/model.hpp"
#include "bdg/params.hpp"

namespace bdg {

class ModelGraph;

/// One vertex of a level's multigraph. Subsystem nodes carry their own
/// nested graph; `nested` is shared because transforms copy levels they
/// do not touch.
struct NodeRecord {
    std::string name;
    std::string block_type;
    bool is_subsystem = false;
    bool virtual_subsystem = true;
    int in_ports = 0;
    int out_ports = 0;
    OrderedParams parameters;
    std::shared_ptr<const ModelGraph> nested;

    bool operator==(const NodeRecord& other) const;
};

/// One directed edge. Every fan-out is exploded into independent edges,
/// so parallel edges between the same ports are distinct entities.
struct Edge {
    int src_node = 0;
    int src_port = 1;
    int dst_node = 0;
    int dst_port = 1;
    OrderedParams parameters;

    bool operator==(const Edge&) const = default;
};

/// A neighbour reached over a specific edge.
struct Adjacent {
    int node = 0;
    int edge = 0;

    bool operator==(const Adjacent&) const = default;
};

/// Immutable multigraph for one hierarchy level. Nodes and edges keep
/// their construction order; adjacency lists hold edge indices in
/// ascending order. Equality compares nodes and edges (recursing into
/// nested graphs) and ignores the normalized flag, which only controls
/// how connections are regrouped on export.
class ModelGraph {
public:
    ModelGraph() = default;

    /// Builds adjacency from the edge list. Throws InconsistentGraphError
    /// when an edge endpoint or port is out of range.
    static ModelGraph from_parts(std::vector<NodeRecord> nodes, std::vector<Edge> edges,
                                 bool normalized = false);

    /// Adopts the given adjacency without checking it against the edges.
    /// verify_consistent() exists to audit graphs built this way.
    static ModelGraph from_raw_parts(std::vector<NodeRecord> nodes, std::vector<Edge> edges,
                                     std::vector<std::vector<int>> out_edges,
                                     std::vector<std::vector<int>> in_edges, bool normalized);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const NodeRecord& node(int index) const;
    const Edge& edge(int index) const;
    const std::vector<int>& out_edges(int node) const;
    const std::vector<int>& in_edges(int node) const;

    /// Index of the first node with this name at this level.
    std::optional<int> find_node(std::string_view name) const;

    struct Resolved {
        const ModelGraph* graph = nullptr;
        int node = -1;
    };

    /// Walks a '/'-separated path through nested subsystems and returns
    /// the owning level plus the node index, or nullopt.
    std::optional<Resolved> resolve(std::string_view path) const;

    bool connections_normalized() const { return normalized_; }

    /// Throws InconsistentGraphError when edges point outside the node
    /// table, ports leave their declared ranges, or the adjacency lists
    /// disagree with the edge list. Recurses into nested graphs.
    void verify_consistent() const;

    bool operator==(const ModelGraph& other) const;

private:
    std::vector<NodeRecord> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_edges_;
    std::vector<std::vector<int>> in_edges_;
    bool normalized_ = false;
};

/// Incoming neighbours of `node` in edge-index order.
/// Throws std::out_of_range for a bad index.
std::vector<Adjacent> predecessors(const ModelGraph& graph, int node);

/// Outgoing neighbours of `node` in edge-index order.
std::vector<Adjacent> successors(const ModelGraph& graph, int node);

/// Converts a model into its graph form, one node per block and one edge
/// per source/destination pair, recursing into subsystems. Throws
/// InvalidModelError when validate() reports violations.
ModelGraph build_graph(const Model& model);

/// Converts a graph back into a model. `header` supplies the model name
/// and metadata. Consecutive edges sharing source port and parameters
/// regroup into one fan-out line unless the graph is marked normalized,
/// in which case every edge becomes its own 1:1 line. Rebuilding a graph
/// from the result reproduces the input; throws InconsistentGraphError
/// when the graph fails verify_consistent().
Model to_model(const ModelGraph& graph, const Model& header);

} // namespace bdg
