#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bdg/graph.hpp"

namespace bdg {

/// What one changelog entry describes. Added/removed entries carry enough
/// detail to replay the transform on a block/edge inventory; Rewired and
/// ParameterChanged annotate changes that leave the inventory unchanged.
enum class ChangeKind {
    AddedBlock,
    RemovedBlock,
    AddedEdge,
    RemovedEdge,
    Rewired,
    ParameterChanged,
};

/// Stable tag used in serialized logs: "added-block", "removed-edge", ...
std::string_view to_string(ChangeKind kind);

/// One step of a transform. `subject` names the block ("sub/inner" across
/// levels) or edge ("A:1 -> B:2"); block entries carry the block type in
/// `detail`, edge entries a free-form reason.
struct ChangeEntry {
    ChangeKind kind = ChangeKind::Rewired;
    std::string subject;
    std::string detail;

    bool operator==(const ChangeEntry&) const = default;
};

struct ChangeLog {
    std::vector<ChangeEntry> entries;

    void add(ChangeKind kind, std::string subject, std::string detail) {
        entries.push_back({kind, std::move(subject), std::move(detail)});
    }
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    bool operator==(const ChangeLog&) const = default;
};

struct TransformResult {
    ModelGraph graph;
    ChangeLog log;
};

/// Marks every level as holding only 1:1 connections, so exports write
/// one line per edge. The edge structure itself is already exploded, so
/// the graph is untouched; the log records one Rewired entry per fan-out
/// group that will no longer regroup. Running it again changes nothing
/// and logs nothing.
TransformResult normalize_connections(const ModelGraph& graph);

/// Splices subsystem contents into their parent level, bottom-up. Inner
/// blocks keep their names prefixed with the subsystem name and a dot;
/// boundary Inport/Outport blocks disappear and the edges through them
/// are joined, each joined edge keeping the outer (driving) edge's
/// parameters. Non-virtual subsystems are kept intact, interior included,
/// unless `include_atomic` is set; flattening one erases the atomic
/// execution boundary. Throws PortMismatchError when a subsystem's port
/// counts disagree with its boundary blocks.
TransformResult flatten_hierarchy(const ModelGraph& graph, bool include_atomic = false);

/// A removed edge, reported with hierarchical block names.
struct EdgeEndpoints {
    std::string src_block;
    int src_port = 1;
    std::string dst_block;
    int dst_port = 1;

    bool operator==(const EdgeEndpoints&) const = default;
};

struct BreakCyclesResult {
    ModelGraph graph;
    ChangeLog log;
    std::vector<EdgeEndpoints> removed;
};

/// Removes a minimum set of edges to make every level acyclic, preferring
/// sets whose edges end at UnitDelay blocks. The minimum is exact up to
/// five removals per level; beyond that a greedy pass breaks one cycle at
/// a time. Cycles that thread through subsystem boundaries are invisible
/// at any single level; flatten first to expose them.
BreakCyclesResult break_cycles(const ModelGraph& graph);

} // namespace bdg
