#include "bdg/report.hpp"

namespace bdg {

namespace {

Json name_list(const ModelGraph& graph, const std::vector<int>& nodes) {
    Json out = Json::array();
    for (int v : nodes) out.push_back(graph.node(v).name);
    return out;
}

Json edge_list(const ModelGraph& graph, const std::vector<int>& edges) {
    Json out = Json::array();
    for (int e : edges) out.push_back(edge_json(graph, graph.edge(e)));
    return out;
}

} // namespace

Json make_report(const std::string& analysis, const std::string& model, Json results) {
    Json report;
    report["schema"] = 1;
    report["analysis"] = analysis;
    report["model"] = model;
    report["results"] = std::move(results);
    return report;
}

Json edge_json(const ModelGraph& graph, const Edge& edge) {
    Json out;
    out["src"] = graph.node(edge.src_node).name;
    out["src_port"] = edge.src_port;
    out["dst"] = graph.node(edge.dst_node).name;
    out["dst_port"] = edge.dst_port;
    return out;
}

Json cycle_json(const ModelGraph& graph, const Cycle& cycle) {
    Json out;
    out["blocks"] = name_list(graph, cycle.nodes);
    out["edges"] = edge_list(graph, cycle.edges);
    return out;
}

Json path_json(const ModelGraph& graph, const Path& path) {
    Json out;
    out["blocks"] = name_list(graph, path.nodes);
    out["edges"] = edge_list(graph, path.edges);
    return out;
}

Json parallel_group_json(const ModelGraph& graph, const ParallelGroup& group) {
    Json out;
    out["start"] = graph.node(group.start).name;
    out["end"] = graph.node(group.end).name;
    Json paths = Json::array();
    for (const Path& path : group.paths) paths.push_back(path_json(graph, path));
    out["paths"] = std::move(paths);
    return out;
}

Json block_count_json(const ModelGraph& graph, const BlockCountSummary& summary) {
    Json out;
    Json paths = Json::array();
    for (const PathBlockCount& entry : summary.paths) {
        Json row;
        row["blocks"] = name_list(graph, entry.path.nodes);
        row["count"] = entry.count;
        paths.push_back(std::move(row));
    }
    out["paths"] = std::move(paths);
    out["balanced"] = summary.balanced;
    return out;
}

Json clone_group_json(const CloneGroup& group) {
    Json out;
    out["signature"] = group.signature;
    Json instances = Json::array();
    for (const auto& instance : group.instances) {
        Json names = Json::array();
        for (const std::string& name : instance) names.push_back(name);
        instances.push_back(std::move(names));
    }
    out["instances"] = std::move(instances);
    return out;
}

Json weighted_path_json(const ModelGraph& graph, const WeightedPath& path) {
    Json out;
    out["total"] = path.total;
    out["blocks"] = name_list(graph, path.nodes);
    return out;
}

Json change_entry_json(const ChangeEntry& entry) {
    Json out;
    out["kind"] = to_string(entry.kind);
    out["subject"] = entry.subject;
    out["detail"] = entry.detail;
    return out;
}

Json trace_json(const Trace& trace) {
    Json out;
    out["steps"] = trace.steps;
    Json values;
    for (const auto& [name, samples] : trace.values) {
        Json list = Json::array();
        for (double sample : samples) list.push_back(sample);
        values[name] = std::move(list);
    }
    out["values"] = std::move(values);
    return out;
}

} // namespace bdg
