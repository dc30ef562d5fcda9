#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bdg/graph.hpp"
#include "bdg/params.hpp"

namespace bdg {

/// An elementary cycle. `nodes` is rotated to start at the smallest node
/// index and holds each node once; edges[i] runs from nodes[i] to
/// nodes[(i+1) % size]. Parallel edges yield distinct cycles.
struct Cycle {
    std::vector<int> nodes;
    std::vector<int> edges;

    bool operator==(const Cycle&) const = default;
};

/// Enumerates every elementary cycle of one level, edge-distinct, sorted
/// by node sequence then edge sequence. Works on any graph.
std::vector<Cycle> detect_cycles(const ModelGraph& graph);

/// A signal path: nodes[0] is the start, edges[i] connects nodes[i] to
/// nodes[i + 1].
struct Path {
    std::vector<int> nodes;
    std::vector<int> edges;

    bool operator==(const Path&) const = default;
};

/// Enumerates minimal path segments: the start fans out (edge out-degree
/// at least two), the end fans in (edge in-degree at least two), and
/// interior nodes pass one edge in and one edge out. Segments that run
/// into a dead end or another fan-out carry no decision information and
/// are not reported. Results follow start node order, then the start's
/// outgoing edge order. Throws CycleError on cyclic levels.
std::vector<Path> enumerate_paths(const ModelGraph& graph);

/// Paths sharing both endpoints.
struct ParallelGroup {
    int start = 0;
    int end = 0;
    std::vector<Path> paths;

    bool operator==(const ParallelGroup&) const = default;
};

/// Groups the minimal segments by (start, end) and keeps the groups with
/// at least two members, sorted by start then end. Throws CycleError on
/// cyclic levels.
std::vector<ParallelGroup> find_parallel_paths(const ModelGraph& graph);

struct PathBlockCount {
    Path path;
    int count = 0;

    bool operator==(const PathBlockCount&) const = default;
};

/// Block counts for every start-to-end path, plus whether they all agree.
struct BlockCountSummary {
    std::vector<PathBlockCount> paths;
    bool balanced = true;

    bool operator==(const BlockCountSummary&) const = default;
};

/// Counts blocks of `block_type` (endpoints included) on every path from
/// `start` to `end`. No path at all yields an empty list that counts as
/// balanced. Throws CycleError on cyclic levels and std::out_of_range for
/// bad node indices.
BlockCountSummary count_blocks_on_paths(const ModelGraph& graph, int start, int end,
                                        std::string_view block_type);

/// A group of structurally identical, pairwise node-disjoint subgraphs.
/// Instances list hierarchical block names, sorted; the signature is a
/// stable rendering of the shared shape.
struct CloneGroup {
    std::string signature;
    std::vector<std::vector<std::string>> instances;

    bool operator==(const CloneGroup&) const = default;
};

/// Finds groups of connected subgraphs with at least `min_size` blocks
/// that share block types and wiring. The hierarchy is flattened first,
/// so clones are found across subsystem boundaries; reported names use
/// the flattened form. Groups come largest first. Throws
/// std::invalid_argument when min_size < 2.
std::vector<CloneGroup> detect_clones(const ModelGraph& graph, int min_size = 2);

/// The heaviest path of a weighted DAG.
struct WeightedPath {
    double total = 0.0;
    std::vector<int> nodes;

    bool operator==(const WeightedPath&) const = default;
};

/// Finds the path maximizing the sum of node weights, where a node's
/// weight is entry `weight_key` of its UserData parameter and
/// `default_weight` stands in when the block has no such entry. Paths may
/// start and end anywhere, so negative weights are handled. Ties resolve
/// toward smaller node indices. Throws CycleError on cyclic levels and
/// WeightParseError on malformed annotations.
WeightedPath longest_weighted_path(const ModelGraph& graph, std::string_view weight_key,
                                   double default_weight = 0.0);

/// Parses a "key=value;key=value" annotation, trimming blanks around
/// keys, values, and separators. Empty segments are skipped. Throws
/// WeightParseError when a segment has no '=' or an empty key.
OrderedParams parse_user_data(std::string_view text);

/// Renders parameters back into "key=value;key=value" form.
std::string format_user_data(const OrderedParams& params);

} // namespace bdg
