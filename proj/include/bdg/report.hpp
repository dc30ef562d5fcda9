#pragma once

#include <string>

#include "json.hpp"

#include "bdg/analyses.hpp"
#include "bdg/eval.hpp"
#include "bdg/graph.hpp"
#include "bdg/transforms.hpp"

namespace bdg {

using Json = nlohmann::ordered_json;

// Standard envelope for machine-readable analysis output. `analysis`
// names the analysis that ran, `model` is the model name, and `results`
// carries the analysis-specific payload.
Json make_report(const std::string& analysis, const std::string& model, Json results);

Json edge_json(const ModelGraph& graph, const Edge& edge);
Json cycle_json(const ModelGraph& graph, const Cycle& cycle);
Json path_json(const ModelGraph& graph, const Path& path);
Json parallel_group_json(const ModelGraph& graph, const ParallelGroup& group);
Json block_count_json(const ModelGraph& graph, const BlockCountSummary& summary);
Json clone_group_json(const CloneGroup& group);
Json weighted_path_json(const ModelGraph& graph, const WeightedPath& path);
Json change_entry_json(const ChangeEntry& entry);
Json trace_json(const Trace& trace);

} // namespace bdg
