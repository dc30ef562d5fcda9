#include "bdg/analyses.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>

#include "bdg/errors.hpp"
#include "bdg/visitor.hpp"

namespace bdg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

// ─── cycles ──────────────────────────────────────────────────────────────────

// Path extension in the style of Tiernan: every cycle is found exactly
// once, rooted at its smallest node, by only extending to larger nodes.
std::vector<Cycle> detect_cycles(const ModelGraph& graph) {
    int n = graph.node_count();
    std::vector<Cycle> found;
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    std::vector<int> path_nodes;
    std::vector<int> path_edges;

    std::function<void(int, int)> extend = [&](int root, int node) {
        for (int e : graph.out_edges(node)) {
            int next = graph.edge(e).dst_node;
            if (next == root) {
                path_edges.push_back(e);
                found.push_back({path_nodes, path_edges});
                path_edges.pop_back();
            } else if (next > root && !on_path[static_cast<std::size_t>(next)]) {
                on_path[static_cast<std::size_t>(next)] = 1;
                path_nodes.push_back(next);
                path_edges.push_back(e);
                extend(root, next);
                path_edges.pop_back();
                path_nodes.pop_back();
                on_path[static_cast<std::size_t>(next)] = 0;
            }
        }
    };

    for (int root = 0; root < n; ++root) {
        std::fill(on_path.begin(), on_path.end(), 0);
        on_path[static_cast<std::size_t>(root)] = 1;
        path_nodes.assign(1, root);
        path_edges.clear();
        extend(root, root);
    }

    std::sort(found.begin(), found.end(), [](const Cycle& a, const Cycle& b) {
        if (a.nodes != b.nodes) return a.nodes < b.nodes;
        return a.edges < b.edges;
    });
    return found;
}

// ─── minimal segments ────────────────────────────────────────────────────────

std::vector<Path> enumerate_paths(const ModelGraph& graph) {
    topological_order(graph);

    auto out_deg = [&](int v) { return graph.out_edges(v).size(); };
    auto in_deg = [&](int v) { return graph.in_edges(v).size(); };

    std::vector<Path> result;
    for (int start = 0; start < graph.node_count(); ++start) {
        if (out_deg(start) < 2) continue;
        for (int first : graph.out_edges(start)) {
            Path path;
            path.nodes.push_back(start);
            int edge = first;
            for (;;) {
                int next = graph.edge(edge).dst_node;
                path.nodes.push_back(next);
                path.edges.push_back(edge);
                if (in_deg(next) >= 2) {
                    result.push_back(std::move(path));
                    break;
                }
                // A dead end or a second fan-out ends the walk without a
                // fan-in, so this segment is not minimal.
                if (out_deg(next) != 1) break;
                edge = graph.out_edges(next).front();
            }
        }
    }
    return result;
}

std::vector<ParallelGroup> find_parallel_paths(const ModelGraph& graph) {
    std::map<std::pair<int, int>, std::vector<Path>> by_endpoints;
    for (auto& path : enumerate_paths(graph)) {
        by_endpoints[{path.nodes.front(), path.nodes.back()}].push_back(std::move(path));
    }
    std::vector<ParallelGroup> groups;
    for (auto& [key, paths] : by_endpoints) {
        if (paths.size() < 2) continue;
        groups.push_back({key.first, key.second, std::move(paths)});
    }
    return groups;
}

// ─── block counting ──────────────────────────────────────────────────────────

BlockCountSummary count_blocks_on_paths(const ModelGraph& graph, int start, int end,
                                        std::string_view block_type) {
    graph.node(start);
    graph.node(end);
    topological_order(graph);

    BlockCountSummary summary;
    Path current;
    current.nodes.push_back(start);

    std::function<void(int)> walk = [&](int node) {
        if (node == end) {
            int count = 0;
            for (int v : current.nodes) {
                if (graph.node(v).block_type == block_type) ++count;
            }
            summary.paths.push_back({current, count});
            return;
        }
        for (int e : graph.out_edges(node)) {
            int next = graph.edge(e).dst_node;
            current.nodes.push_back(next);
            current.edges.push_back(e);
            walk(next);
            current.edges.pop_back();
            current.nodes.pop_back();
        }
    };
    walk(start);

    for (const auto& entry : summary.paths) {
        if (entry.count != summary.paths.front().count) {
            summary.balanced = false;
            break;
        }
    }
    return summary;
}

// ─── weighted paths ──────────────────────────────────────────────────────────

OrderedParams parse_user_data(std::string_view text) {
    OrderedParams out;
    std::size_t pos = 0;
    for (;;) {
        auto semi = text.find(';', pos);
        std::string_view segment =
            semi == std::string_view::npos ? text.substr(pos) : text.substr(pos, semi - pos);
        segment = trim(segment);
        if (!segment.empty()) {
            auto eq = segment.find('=');
            if (eq == std::string_view::npos) {
                throw WeightParseError("user data segment \"" + std::string(segment) +
                                       "\" has no '='");
            }
            std::string_view key = trim(segment.substr(0, eq));
            std::string_view value = trim(segment.substr(eq + 1));
            if (key.empty()) {
                throw WeightParseError("user data segment \"" + std::string(segment) +
                                       "\" has an empty key");
            }
            out.append_unchecked(key, value);
        }
        if (semi == std::string_view::npos) break;
        pos = semi + 1;
    }
    return out;
}

std::string format_user_data(const OrderedParams& params) {
    std::string out;
    for (const auto& [key, value] : params) {
        if (!out.empty()) out.push_back(';');
        out += key;
        out.push_back('=');
        out += value;
    }
    return out;
}

namespace {

double node_weight(const ModelGraph& graph, int node, std::string_view key,
                   double default_weight) {
    const NodeRecord& record = graph.node(node);
    const std::string* user_data = record.parameters.get("UserData");
    if (!user_data) return default_weight;

    OrderedParams entries;
    try {
        entries = parse_user_data(*user_data);
    } catch (const WeightParseError& e) {
        throw WeightParseError(record.name + ": " + e.what());
    }
    const std::string* value = entries.get(key);
    if (!value) return default_weight;

    double weight = 0.0;
    auto [ptr, ec] = std::from_chars(value->data(), value->data() + value->size(), weight);
    if (ec != std::errc{} || ptr != value->data() + value->size()) {
        throw WeightParseError(record.name + ": weight \"" + *value + "\" for key \"" +
                               std::string(key) + "\" is not a number");
    }
    return weight;
}

} // namespace

WeightedPath longest_weighted_path(const ModelGraph& graph, std::string_view weight_key,
                                   double default_weight) {
    auto order = topological_order(graph);
    int n = graph.node_count();
    if (n == 0) return {};

    std::vector<double> weight(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        weight[static_cast<std::size_t>(v)] = node_weight(graph, v, weight_key, default_weight);
    }

    // best[v] is the heaviest path ending at v; a prefix is only kept when
    // it improves on starting fresh at v, which handles negative weights.
    std::vector<double> best(static_cast<std::size_t>(n));
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    for (int v : order) {
        double best_prefix = 0.0;
        int best_pred = -1;
        for (const auto& pred : predecessors(graph, v)) {
            double candidate = best[static_cast<std::size_t>(pred.node)];
            if (best_pred == -1 || candidate > best_prefix ||
                (candidate == best_prefix && pred.node < best_pred)) {
                best_prefix = candidate;
                best_pred = pred.node;
            }
        }
        best[static_cast<std::size_t>(v)] = weight[static_cast<std::size_t>(v)];
        if (best_pred != -1 && best_prefix > 0.0) {
            best[static_cast<std::size_t>(v)] += best_prefix;
            parent[static_cast<std::size_t>(v)] = best_pred;
        }
    }

    int tail = 0;
    for (int v = 1; v < n; ++v) {
        if (best[static_cast<std::size_t>(v)] > best[static_cast<std::size_t>(tail)]) tail = v;
    }

    WeightedPath result;
    result.total = best[static_cast<std::size_t>(tail)];
    for (int v = tail; v != -1; v = parent[static_cast<std::size_t>(v)]) {
        result.nodes.push_back(v);
    }
    std::reverse(result.nodes.begin(), result.nodes.end());
    return result;
}

} // namespace bdg
