#include "bdg/rules.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "bdg/errors.hpp"
#include "bdg/model.hpp"
#include "section_doc.hpp"

namespace bdg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::pair<int, int> resolved_ports(const RuleBlock& block) {
    auto [din, dout] = default_port_counts(block.type);
    return {block.in_ports < 0 ? din : block.in_ports,
            block.out_ports < 0 ? dout : block.out_ports};
}

} // namespace

void validate_rule(const SubstitutionRule& rule) {
    if (rule.match_type.empty()) throw RuleError("rule matches an empty block type");
    for (const auto& [key, value] : rule.match_params) {
        (void)value;
        if (!is_identifier(key)) {
            throw RuleError("match parameter name \"" + key + "\" is not an identifier");
        }
    }

    std::map<std::string, const RuleBlock*, std::less<>> by_ref;
    for (const auto& block : rule.blocks) {
        if (!is_identifier(block.ref)) {
            throw RuleError("block ref \"" + block.ref + "\" is not an identifier");
        }
        if (!by_ref.emplace(block.ref, &block).second) {
            throw RuleError("block ref \"" + block.ref + "\" repeats");
        }
        if (block.type.empty()) {
            throw RuleError("block ref \"" + block.ref + "\" has an empty type");
        }
        if (block.type == "SubSystem") {
            throw RuleError("replacement blocks cannot be SubSystem");
        }
        for (const auto& [key, value] : block.parameters) {
            (void)value;
            if (!is_identifier(key)) {
                throw RuleError("parameter name \"" + key + "\" of ref \"" + block.ref +
                                "\" is not an identifier");
            }
        }
        for (const auto& copy : block.copy_params) {
            if (!is_identifier(copy.from) || !is_identifier(copy.to)) {
                throw RuleError("copy \"" + copy.from + " -> " + copy.to + "\" of ref \"" +
                                block.ref + "\" must name identifiers");
            }
        }
    }

    auto check_ref = [&](const RulePortRef& ref, bool input_side, const std::string& what) {
        auto it = by_ref.find(ref.ref);
        if (it == by_ref.end()) {
            throw RuleError(what + " names unknown ref \"" + ref.ref + "\"");
        }
        auto [in, out] = resolved_ports(*it->second);
        int limit = input_side ? in : out;
        if (ref.port < 1 || ref.port > limit) {
            throw RuleError(what + " uses port " + std::to_string(ref.port) + " of \"" + ref.ref +
                            "\" outside 1.." + std::to_string(limit));
        }
    };

    for (const auto& edge : rule.internal_edges) {
        check_ref(edge.src, false, "template edge source");
        check_ref(edge.dst, true, "template edge destination");
    }
    std::set<int> seen;
    for (const auto& entry : rule.input_map) {
        if (entry.outer_port < 1) throw RuleError("input map uses a port below 1");
        if (!seen.insert(entry.outer_port).second) {
            throw RuleError("input port " + std::to_string(entry.outer_port) + " is mapped twice");
        }
        check_ref(entry.inner, true, "input map");
    }
    seen.clear();
    for (const auto& entry : rule.output_map) {
        if (entry.outer_port < 1) throw RuleError("output map uses a port below 1");
        if (!seen.insert(entry.outer_port).second) {
            throw RuleError("output port " + std::to_string(entry.outer_port) +
                            " is mapped twice");
        }
        check_ref(entry.inner, false, "output map");
    }
}

SubstitutionRule builtin_gain_rule() {
    SubstitutionRule rule;
    rule.match_type = "Gain";

    RuleBlock prod;
    prod.ref = "prod";
    prod.type = "Product";

    RuleBlock constant;
    constant.ref = "k";
    constant.type = "Constant";
    constant.copy_params.push_back({"Gain", "Value"});

    rule.blocks = {prod, constant};
    rule.internal_edges = {{{"k", 1}, {"prod", 2}}};
    rule.input_map = {{1, {"prod", 1}}};
    rule.output_map = {{1, {"prod", 1}}};
    return rule;
}

// ─── rule text format ────────────────────────────────────────────────────────

namespace {

using detail::KeyValue;
using detail::SectionNode;

int parse_int_or(const std::string& text, const std::string& what) {
    std::string_view s = trim(text);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw RuleError(what + " \"" + text + "\" is not an integer");
    }
    return value;
}

std::pair<std::string, std::string> split_arrow(const std::string& text,
                                                const std::string& what) {
    auto pos = text.find("->");
    if (pos == std::string::npos) {
        throw RuleError(what + " \"" + text + "\" is missing \"->\"");
    }
    std::string left{trim(std::string_view(text).substr(0, pos))};
    std::string right{trim(std::string_view(text).substr(pos + 2))};
    if (left.empty() || right.empty()) {
        throw RuleError(what + " \"" + text + "\" has an empty side");
    }
    return {left, right};
}

RulePortRef parse_port_ref(const std::string& text, const std::string& what) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        throw RuleError(what + " \"" + text + "\" must be ref:port");
    }
    std::string ref{trim(std::string_view(text).substr(0, colon))};
    int port = parse_int_or(text.substr(colon + 1), what + " port");
    return {ref, port};
}

std::pair<std::string, std::string> parse_param_section(const SectionNode& sec) {
    const KeyValue* name = nullptr;
    const KeyValue* value = nullptr;
    for (const auto& item : sec.items) {
        if (!item.is_pair()) {
            throw ParseError("unexpected section " + item.section.front().name + " in Param",
                             item.section.front().span);
        }
        const KeyValue& pair = *item.pair;
        if (pair.key == "Name" && !name) {
            name = &pair;
        } else if (pair.key == "Value" && !value) {
            value = &pair;
        } else {
            throw ParseError("unexpected key " + pair.key + " in Param", pair.span);
        }
    }
    if (!name) throw ParseError("Param is missing Name", sec.span);
    if (!value) throw ParseError("Param is missing Value", sec.span);
    return {name->value, value->value};
}

RuleBlock parse_rule_block(const SectionNode& sec) {
    RuleBlock block;
    const KeyValue* ref = nullptr;
    const KeyValue* type = nullptr;
    const KeyValue* ports = nullptr;
    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            auto claim = [&](const KeyValue*& slot) {
                if (slot) throw ParseError("key " + pair.key + " repeats in Block", pair.span);
                slot = &pair;
            };
            if (pair.key == "Ref") {
                claim(ref);
            } else if (pair.key == "Type") {
                claim(type);
            } else if (pair.key == "Ports") {
                claim(ports);
            } else if (pair.key == "CopyParam") {
                auto [from, to] = split_arrow(pair.value, "CopyParam");
                block.copy_params.push_back({from, to});
            } else {
                throw ParseError("unexpected key " + pair.key + " in Block", pair.span);
            }
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "Param") {
                throw ParseError("unexpected section " + child.name + " in Block", child.span);
            }
            auto [name, value] = parse_param_section(child);
            block.parameters.set(name, value);
        }
    }
    if (!ref) throw ParseError("Block is missing Ref", sec.span);
    if (!type) throw ParseError("Block is missing Type", sec.span);
    block.ref = ref->value;
    block.type = type->value;
    if (ports) {
        auto parsed = parse_ports_value(ports->value);
        if (!parsed) {
            throw ParseError("malformed Ports value \"" + ports->value + "\"", ports->span);
        }
        block.in_ports = parsed->first;
        if (parsed->second) block.out_ports = *parsed->second;
    }
    return block;
}

void parse_match_section(const SectionNode& sec, SubstitutionRule& rule) {
    const KeyValue* type = nullptr;
    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            if (pair.key != "Type") {
                throw ParseError("unexpected key " + pair.key + " in Match", pair.span);
            }
            if (type) throw ParseError("Type repeats in Match", pair.span);
            type = &pair;
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "Param") {
                throw ParseError("unexpected section " + child.name + " in Match", child.span);
            }
            auto [name, value] = parse_param_section(child);
            rule.match_params.set(name, value);
        }
    }
    if (!type) throw ParseError("Match is missing Type", sec.span);
    rule.match_type = type->value;
}

void parse_replace_section(const SectionNode& sec, SubstitutionRule& rule) {
    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            if (pair.key == "Connect") {
                auto [left, right] = split_arrow(pair.value, "Connect");
                rule.internal_edges.push_back({parse_port_ref(left, "Connect source"),
                                               parse_port_ref(right, "Connect destination")});
            } else if (pair.key == "MapIn") {
                auto [left, right] = split_arrow(pair.value, "MapIn");
                rule.input_map.push_back(
                    {parse_int_or(left, "MapIn port"), parse_port_ref(right, "MapIn target")});
            } else if (pair.key == "MapOut") {
                auto [left, right] = split_arrow(pair.value, "MapOut");
                rule.output_map.push_back(
                    {parse_int_or(left, "MapOut port"), parse_port_ref(right, "MapOut source")});
            } else {
                throw ParseError("unexpected key " + pair.key + " in Replace", pair.span);
            }
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "Block") {
                throw ParseError("unexpected section " + child.name + " in Replace", child.span);
            }
            rule.blocks.push_back(parse_rule_block(child));
        }
    }
}

SubstitutionRule parse_rule_section(const SectionNode& sec) {
    SubstitutionRule rule;
    const SectionNode* match = nullptr;
    const SectionNode* replace = nullptr;
    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            throw ParseError("unexpected key " + item.pair->key + " in Rule", item.pair->span);
        }
        const SectionNode& child = item.section.front();
        if (child.name == "Match") {
            if (match) throw ParseError("Match repeats in Rule", child.span);
            match = &child;
        } else if (child.name == "Replace") {
            if (replace) throw ParseError("Replace repeats in Rule", child.span);
            replace = &child;
        } else {
            throw ParseError("unexpected section " + child.name + " in Rule", child.span);
        }
    }
    if (!match) throw ParseError("Rule is missing its Match section", sec.span);
    if (!replace) throw ParseError("Rule is missing its Replace section", sec.span);
    parse_match_section(*match, rule);
    parse_replace_section(*replace, rule);
    return rule;
}

} // namespace

std::vector<SubstitutionRule> parse_rules(std::string_view text) {
    SectionNode root = detail::parse_document(text);
    std::vector<SubstitutionRule> rules;
    for (const auto& item : root.items) {
        if (item.is_pair()) {
            throw ParseError("expected a Rule section, found key " + item.pair->key,
                             item.pair->span);
        }
        const SectionNode& child = item.section.front();
        if (child.name != "Rule") {
            throw ParseError("unexpected top-level section " + child.name, child.span);
        }
        rules.push_back(parse_rule_section(child));
    }
    for (const auto& rule : rules) validate_rule(rule);
    return rules;
}

} // namespace bdg
