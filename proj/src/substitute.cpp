#include <map>
#include <set>

#include "bdg/errors.hpp"
#include "bdg/rules.hpp"
#include "transform_util.hpp"

namespace bdg {

namespace {

std::pair<int, int> resolved_ports(const RuleBlock& block) {
    auto [din, dout] = default_port_counts(block.type);
    return {block.in_ports < 0 ? din : block.in_ports,
            block.out_ports < 0 ? dout : block.out_ports};
}

bool matches(const NodeRecord& record, const SubstitutionRule& rule) {
    if (record.block_type != rule.match_type) return false;
    for (const auto& [key, value] : rule.match_params) {
        const std::string* actual = record.parameters.get(key);
        if (!actual || *actual != value) return false;
    }
    return true;
}

const PortMapEntry* find_mapping(const std::vector<PortMapEntry>& map, int outer_port) {
    for (const auto& entry : map) {
        if (entry.outer_port == outer_port) return &entry;
    }
    return nullptr;
}

ModelGraph substitute_level(const ModelGraph& graph, const SubstitutionRule& rule,
                            const std::string& prefix, ChangeLog& log) {
    std::vector<int> matched;
    for (int i = 0; i < graph.node_count(); ++i) {
        if (matches(graph.node(i), rule)) matched.push_back(i);
    }

    std::vector<NodeRecord> nodes = graph.nodes();
    std::vector<Edge> edges = graph.edges();

    std::map<std::string, int, std::less<>> ref_pos;
    for (std::size_t r = 0; r < rule.blocks.size(); ++r) {
        ref_pos[rule.blocks[r].ref] = static_cast<int>(r);
    }

    int shift = 0;
    for (int original : matched) {
        int at = original + shift;
        const NodeRecord old = nodes[static_cast<std::size_t>(at)];
        int width = static_cast<int>(rule.blocks.size());

        std::set<std::string> taken;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (static_cast<int>(j) != at) taken.insert(nodes[j].name);
        }
        std::vector<std::string> names(rule.blocks.size());
        for (std::size_t r = 0; r < rule.blocks.size(); ++r) {
            names[r] = detail::unique_name(taken, old.name + "_" + rule.blocks[r].ref);
            taken.insert(names[r]);
        }

        log.add(ChangeKind::RemovedBlock, prefix + old.name, old.block_type);

        std::vector<NodeRecord> fresh;
        for (std::size_t r = 0; r < rule.blocks.size(); ++r) {
            const RuleBlock& spec = rule.blocks[r];
            NodeRecord record;
            record.name = names[r];
            record.block_type = spec.type;
            auto [in, out] = resolved_ports(spec);
            record.in_ports = in;
            record.out_ports = out;
            record.parameters = spec.parameters;
            log.add(ChangeKind::AddedBlock, prefix + record.name, record.block_type);
            for (const auto& copy : spec.copy_params) {
                if (const std::string* value = old.parameters.get(copy.from)) {
                    record.parameters.set(copy.to, *value);
                    log.add(ChangeKind::ParameterChanged, prefix + record.name,
                            copy.to + " <- " + copy.from + " of \"" + old.name + "\"");
                }
            }
            fresh.push_back(std::move(record));
        }

        auto old_name = [&](int index) { return nodes[static_cast<std::size_t>(index)].name; };
        auto remap = [&](int index) { return index < at ? index : index + width - 1; };

        for (auto& edge : edges) {
            bool at_src = edge.src_node == at;
            bool at_dst = edge.dst_node == at;
            if (!at_src && !at_dst) {
                edge.src_node = remap(edge.src_node);
                edge.dst_node = remap(edge.dst_node);
                continue;
            }
            std::string before =
                detail::port_subject(prefix, old_name(edge.src_node), edge.src_port) + " -> " +
                detail::port_subject(prefix, old_name(edge.dst_node), edge.dst_port);
            if (at_src) {
                const PortMapEntry* entry = find_mapping(rule.output_map, edge.src_port);
                if (!entry) {
                    throw PortMappingError(prefix + old.name + ": output port " +
                                           std::to_string(edge.src_port) +
                                           " is not mapped by the rule");
                }
                edge.src_node = at + ref_pos.find(entry->inner.ref)->second;
                edge.src_port = entry->inner.port;
            } else {
                edge.src_node = remap(edge.src_node);
            }
            if (at_dst) {
                const PortMapEntry* entry = find_mapping(rule.input_map, edge.dst_port);
                if (!entry) {
                    throw PortMappingError(prefix + old.name + ": input port " +
                                           std::to_string(edge.dst_port) +
                                           " is not mapped by the rule");
                }
                edge.dst_node = at + ref_pos.find(entry->inner.ref)->second;
                edge.dst_port = entry->inner.port;
            } else {
                edge.dst_node = remap(edge.dst_node);
            }
            auto name_at = [&](int index) {
                if (index >= at && index < at + width) {
                    return fresh[static_cast<std::size_t>(index - at)].name;
                }
                int before_splice = index < at ? index : index - width + 1;
                return nodes[static_cast<std::size_t>(before_splice)].name;
            };
            std::string after = detail::port_subject(prefix, name_at(edge.src_node),
                                                     edge.src_port) +
                                " -> " +
                                detail::port_subject(prefix, name_at(edge.dst_node),
                                                     edge.dst_port);
            log.add(ChangeKind::RemovedEdge, before, "rewired by rule");
            log.add(ChangeKind::AddedEdge, after, "rewired by rule");
        }

        for (const auto& tmpl : rule.internal_edges) {
            Edge edge;
            edge.src_node = at + ref_pos.find(tmpl.src.ref)->second;
            edge.src_port = tmpl.src.port;
            edge.dst_node = at + ref_pos.find(tmpl.dst.ref)->second;
            edge.dst_port = tmpl.dst.port;
            edges.push_back(edge);
            log.add(ChangeKind::AddedEdge,
                    detail::port_subject(prefix, fresh[static_cast<std::size_t>(
                                                      ref_pos.find(tmpl.src.ref)->second)]
                                                     .name,
                                         tmpl.src.port) +
                        " -> " +
                        detail::port_subject(prefix, fresh[static_cast<std::size_t>(
                                                          ref_pos.find(tmpl.dst.ref)->second)]
                                                         .name,
                                             tmpl.dst.port),
                    "rule template edge");
        }

        nodes.erase(nodes.begin() + at);
        nodes.insert(nodes.begin() + at, fresh.begin(), fresh.end());
        shift += width - 1;
    }

    for (auto& record : nodes) {
        if (record.nested) {
            record.nested = std::make_shared<const ModelGraph>(
                substitute_level(*record.nested, rule, prefix + record.name + "/", log));
        }
    }
    return ModelGraph::from_parts(std::move(nodes), std::move(edges),
                                  graph.connections_normalized());
}

} // namespace

TransformResult substitute(const ModelGraph& graph, const SubstitutionRule& rule) {
    validate_rule(rule);
    ChangeLog log;
    ModelGraph out = substitute_level(graph, rule, "", log);
    return {std::move(out), std::move(log)};
}

TransformResult substitute_all(const ModelGraph& graph,
                               const std::vector<SubstitutionRule>& rules) {
    ModelGraph current = graph;
    ChangeLog log;
    for (const auto& rule : rules) {
        TransformResult step = substitute(current, rule);
        current = std::move(step.graph);
        log.entries.insert(log.entries.end(), step.log.entries.begin(), step.log.entries.end());
    }
    return {std::move(current), std::move(log)};
}

} // namespace bdg
