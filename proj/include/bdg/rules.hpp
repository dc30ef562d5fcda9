#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bdg/params.hpp"
#include "bdg/transforms.hpp"

namespace bdg {

/// Copies the matched block's parameter `from` into a replacement
/// block's parameter `to`. Skipped when the matched block has no `from`.
struct RuleCopyParam {
    std::string from;
    std::string to;

    bool operator==(const RuleCopyParam&) const = default;
};

/// One block of the replacement template. `ref` is the handle the rule's
/// edges and port maps use; the instantiated block is named
/// "<matched>_<ref>". Port counts of -1 fall back to the type's defaults.
struct RuleBlock {
    std::string ref;
    std::string type;
    int in_ports = -1;
    int out_ports = -1;
    OrderedParams parameters;
    std::vector<RuleCopyParam> copy_params;

    bool operator==(const RuleBlock&) const = default;
};

struct RulePortRef {
    std::string ref;
    int port = 1;

    bool operator==(const RulePortRef&) const = default;
};

struct RuleEdge {
    RulePortRef src;
    RulePortRef dst;

    bool operator==(const RuleEdge&) const = default;
};

/// Routes one port of the matched block to a port of a template block.
struct PortMapEntry {
    int outer_port = 1;
    RulePortRef inner;

    bool operator==(const PortMapEntry&) const = default;
};

/// A rewrite rule: blocks of `match_type` whose parameters carry every
/// `match_params` entry verbatim are replaced by the template `blocks`,
/// wired internally by `internal_edges`; existing edges at the matched
/// block are redirected through the input and output maps.
struct SubstitutionRule {
    std::string match_type;
    OrderedParams match_params;
    std::vector<RuleBlock> blocks;
    std::vector<RuleEdge> internal_edges;
    std::vector<PortMapEntry> input_map;
    std::vector<PortMapEntry> output_map;

    bool operator==(const SubstitutionRule&) const = default;
};

/// Throws RuleError when refs repeat or dangle, a template port is out of
/// range, a port map routes the same outer port twice, or a replacement
/// block is a SubSystem.
void validate_rule(const SubstitutionRule& rule);

/// Gain blocks become a Product fed by a new Constant: the original
/// signal enters Product port 1, the Constant enters port 2, and the
/// Gain parameter moves to the Constant's Value.
SubstitutionRule builtin_gain_rule();

/// Parses the textual rule format:
///
///   Rule {
///     Match {
///       Type "Gain"
///       Param { Name "K" Value "2" }
///     }
///     Replace {
///       Block {
///         Ref prod
///         Type Product
///         Ports "[2, 1]"
///         Param { Name "K" Value "2" }
///         CopyParam "Gain -> Value"
///       }
///       Connect "k:1 -> prod:2"
///       MapIn "1 -> prod:1"
///       MapOut "1 -> prod:1"
///     }
///   }
///
/// Throws ParseError for text problems and RuleError for inconsistent
/// rules; every returned rule passes validate_rule.
std::vector<SubstitutionRule> parse_rules(std::string_view text);

/// Applies one rule everywhere it matches, at every hierarchy level.
/// Matches are collected before rewriting, so replacement blocks are
/// never re-matched in the same pass. Throws PortMappingError when an
/// existing edge uses a port the rule does not map.
TransformResult substitute(const ModelGraph& graph, const SubstitutionRule& rule);

/// Applies the rules in order, feeding each one's output to the next.
TransformResult substitute_all(const ModelGraph& graph,
                               const std::vector<SubstitutionRule>& rules);

} // namespace bdg
