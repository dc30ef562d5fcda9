#pragma once

// Helpers shared by the transform implementations: hierarchical subject
// strings for changelog entries and name collision handling.

#include <set>
#include <string>

#include "bdg/graph.hpp"

namespace bdg::detail {

inline std::string unique_name(const std::set<std::string>& taken, const std::string& base) {
    if (!taken.count(base)) return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!taken.count(candidate)) return candidate;
    }
}

inline std::string port_subject(const std::string& prefix, const std::string& block, int port) {
    return prefix + block + ":" + std::to_string(port);
}

inline std::string edge_subject(const std::string& prefix, const ModelGraph& graph,
                                const Edge& edge) {
    return port_subject(prefix, graph.node(edge.src_node).name, edge.src_port) + " -> " +
           port_subject(prefix, graph.node(edge.dst_node).name, edge.dst_port);
}

} // namespace bdg::detail
