#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bdg/analyses.hpp"
#include "bdg/transforms.hpp"

namespace bdg {

namespace {

/// Sorted (src_port, dst_port) multiset of the edges from `from` to `to`.
/// Two node pairs relate identically exactly when these multisets match.
std::vector<std::pair<int, int>> ports_between(const ModelGraph& g, int from, int to) {
    std::vector<std::pair<int, int>> out;
    for (int e : g.out_edges(from)) {
        const Edge& edge = g.edge(e);
        if (edge.dst_node == to) out.push_back({edge.src_port, edge.dst_port});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> weak_neighbors(const ModelGraph& g, int v) {
    std::set<int> s;
    for (int e : g.out_edges(v)) s.insert(g.edge(e).dst_node);
    for (int e : g.in_edges(v)) s.insert(g.edge(e).src_node);
    s.erase(v);
    return {s.begin(), s.end()};
}

/// A partial isomorphism between two node-disjoint subgraphs. `pairs` is
/// kept sorted by left node; `used` holds the nodes of both sides, which
/// enforces the disjointness of the two instances.
struct Mapping {
    std::vector<std::pair<int, int>> pairs;
    std::set<int> used;

    bool has(int node) const { return used.count(node) != 0; }

    void add(int x, int y) {
        pairs.insert(std::upper_bound(pairs.begin(), pairs.end(), std::make_pair(x, y)), {x, y});
        used.insert(x);
        used.insert(y);
    }
};

/// True when extending the mapping by (x, y) keeps it an induced-subgraph
/// isomorphism: x relates to every mapped left node exactly as y relates
/// to the partner, self-loops included.
bool consistent(const ModelGraph& g, const Mapping& m, int x, int y) {
    if (ports_between(g, x, x) != ports_between(g, y, y)) return false;
    for (auto [a, b] : m.pairs) {
        if (ports_between(g, x, a) != ports_between(g, y, b)) return false;
        if (ports_between(g, a, x) != ports_between(g, b, y)) return false;
    }
    return true;
}

std::vector<std::pair<int, int>> extension_candidates(const ModelGraph& g, const Mapping& m) {
    std::set<std::pair<int, int>> out;
    for (auto [a, b] : m.pairs) {
        for (int x : weak_neighbors(g, a)) {
            if (m.has(x)) continue;
            const NodeRecord& nx = g.node(x);
            for (int y : weak_neighbors(g, b)) {
                if (m.has(y) || x == y) continue;
                const NodeRecord& ny = g.node(y);
                if (nx.block_type != ny.block_type || nx.in_ports != ny.in_ports ||
                    nx.out_ports != ny.out_ports) {
                    continue;
                }
                if (!consistent(g, m, x, y)) continue;
                out.insert({x, y});
            }
        }
    }
    return {out.begin(), out.end()};
}

/// Grows the mapping to a maximal one. Forced extensions are applied
/// greedily; when one left node has several possible partners the search
/// branches, bounded by `budget`, and the largest result wins.
void grow(const ModelGraph& g, Mapping m, int& budget, Mapping& best) {
    for (;;) {
        auto cands = extension_candidates(g, m);
        if (cands.empty()) break;
        int x = cands.front().first;
        std::vector<int> partners;
        for (auto [cx, cy] : cands) {
            if (cx == x) partners.push_back(cy);
        }
        if (partners.size() == 1 || budget <= 0) {
            m.add(x, partners.front());
            continue;
        }
        for (int y : partners) {
            --budget;
            Mapping child = m;
            child.add(x, y);
            grow(g, std::move(child), budget, best);
        }
        return;
    }
    if (m.pairs.size() > best.pairs.size() ||
        (m.pairs.size() == best.pairs.size() && m.pairs < best.pairs)) {
        best = m;
    }
}

std::string instance_signature(const ModelGraph& g, const std::vector<int>& instance) {
    std::set<int> members(instance.begin(), instance.end());

    // Breadth-first relabeling from the smallest member gives every
    // instance of the group the same rendering.
    std::map<int, int> label;
    std::deque<int> queue{instance.front()};
    label[instance.front()] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : weak_neighbors(g, v)) {
            if (members.count(w) && !label.count(w)) {
                label[w] = static_cast<int>(label.size());
                queue.push_back(w);
            }
        }
    }

    std::vector<std::pair<int, const NodeRecord*>> ordered;
    for (auto [node, id] : label) ordered.push_back({id, &g.node(node)});
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::ostringstream os;
    for (const auto& [id, record] : ordered) {
        if (id) os << ' ';
        os << id << ':' << record->block_type << '[' << record->in_ports << ','
           << record->out_ports << ']';
    }
    std::vector<std::array<int, 4>> wires;
    for (const Edge& e : g.edges()) {
        if (members.count(e.src_node) && members.count(e.dst_node)) {
            wires.push_back({label[e.src_node], e.src_port, label[e.dst_node], e.dst_port});
        }
    }
    std::sort(wires.begin(), wires.end());
    os << " |";
    for (const auto& w : wires) {
        os << ' ' << w[0] << ':' << w[1] << "->" << w[2] << ':' << w[3];
    }
    return os.str();
}

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> overlap;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(overlap));
    return overlap.empty();
}

bool subset_of(const std::vector<int>& small, const std::vector<int>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

/// True when every instance of `small` fits inside a distinct instance of
/// `big`; such a group restates part of the bigger finding.
bool covered_by(const std::vector<std::vector<int>>& small,
                const std::vector<std::vector<int>>& big) {
    std::vector<char> taken(big.size(), 0);
    std::function<bool(std::size_t)> match = [&](std::size_t i) {
        if (i == small.size()) return true;
        for (std::size_t j = 0; j < big.size(); ++j) {
            if (taken[j] || !subset_of(small[i], big[j])) continue;
            taken[j] = 1;
            if (match(i + 1)) return true;
            taken[j] = 0;
        }
        return false;
    };
    return match(0);
}

} // namespace

std::vector<CloneGroup> detect_clones(const ModelGraph& graph, int min_size) {
    if (min_size < 2) throw std::invalid_argument("min_size must be at least 2");

    ModelGraph flat = flatten_hierarchy(graph, true).graph;
    int n = flat.node_count();

    std::vector<std::vector<int>> instances;
    std::map<std::vector<int>, int> instance_id;
    std::vector<std::pair<int, int>> links;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;

    auto id_of = [&](const std::vector<int>& set) {
        auto it = instance_id.find(set);
        if (it != instance_id.end()) return it->second;
        int id = static_cast<int>(instances.size());
        instances.push_back(set);
        instance_id.emplace(set, id);
        return id;
    };

    for (int u = 0; u < n; ++u) {
        const NodeRecord& nu = flat.node(u);
        for (int v = u + 1; v < n; ++v) {
            const NodeRecord& nv = flat.node(v);
            if (nu.block_type != nv.block_type || nu.in_ports != nv.in_ports ||
                nu.out_ports != nv.out_ports) {
                continue;
            }
            if (ports_between(flat, u, u) != ports_between(flat, v, v)) continue;

            Mapping seed;
            seed.add(u, v);
            Mapping best;
            int budget = 3000;
            grow(flat, std::move(seed), budget, best);
            if (static_cast<int>(best.pairs.size()) < min_size) continue;

            std::vector<int> left;
            std::vector<int> right;
            for (auto [x, y] : best.pairs) {
                left.push_back(x);
                right.push_back(y);
            }
            std::sort(left.begin(), left.end());
            std::sort(right.begin(), right.end());
            auto key = left < right ? std::make_pair(left, right) : std::make_pair(right, left);
            if (!seen.insert(key).second) continue;
            links.push_back({id_of(left), id_of(right)});
        }
    }

    // Instances sharing an exact node set are the same shape; union-find
    // over the pairings collects each shape's instances.
    std::vector<int> parent(instances.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (auto [a, b] : links) parent[static_cast<std::size_t>(find(a))] = find(b);

    std::map<int, std::vector<int>> classes;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        classes[find(static_cast<int>(i))].push_back(static_cast<int>(i));
    }

    // Greedy disjoint pick in discovery order; overlapping repeats of the
    // same shape are dropped rather than reported twice.
    std::vector<std::vector<std::vector<int>>> picked_groups;
    std::vector<std::pair<int, std::vector<int>>> ordered_classes;
    for (auto& [root, members] : classes) {
        ordered_classes.push_back({members.front(), members});
    }
    std::sort(ordered_classes.begin(), ordered_classes.end());
    for (auto& [first_id, members] : ordered_classes) {
        (void)first_id;
        std::vector<std::vector<int>> selected;
        for (int id : members) {
            const auto& candidate = instances[static_cast<std::size_t>(id)];
            bool ok = true;
            for (const auto& already : selected) {
                if (!disjoint(candidate, already)) {
                    ok = false;
                    break;
                }
            }
            if (ok) selected.push_back(candidate);
        }
        if (selected.size() >= 2) {
            std::sort(selected.begin(), selected.end());
            picked_groups.push_back(std::move(selected));
        }
    }

    std::sort(picked_groups.begin(), picked_groups.end(),
              [](const auto& a, const auto& b) {
                  if (a.front().size() != b.front().size()) {
                      return a.front().size() > b.front().size();
                  }
                  return a.front() < b.front();
              });

    std::vector<std::vector<std::vector<int>>> kept;
    for (const auto& group : picked_groups) {
        bool shadowed = false;
        for (const auto& bigger : kept) {
            if (bigger.front().size() > group.front().size() && covered_by(group, bigger)) {
                shadowed = true;
                break;
            }
        }
        if (!shadowed) kept.push_back(group);
    }

    std::vector<CloneGroup> out;
    for (const auto& group : kept) {
        CloneGroup result;
        result.signature = instance_signature(flat, group.front());
        for (const auto& instance : group) {
            std::vector<std::string> names;
            for (int node : instance) names.push_back(flat.node(node).name);
            result.instances.push_back(std::move(names));
        }
        out.push_back(std::move(result));
    }
    return out;
}

} // namespace bdg
