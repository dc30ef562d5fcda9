#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bdg/params.hpp"

namespace bdg {

/// One endpoint of a connection: a block name plus a 1-based port index.
struct PortRef {
    std::string block;
    int port = 1;

    bool operator==(const PortRef&) const = default;
};

/// A source port fanned out to one or more destination ports.
/// Extra keys found on a Line are preserved here as parameters.
struct RawConnection {
    PortRef src;
    std::vector<PortRef> dsts;
    OrderedParams parameters;

    bool operator==(const RawConnection&) const = default;
};

struct System;

/// A named block. SubSystem blocks carry exactly one nested System;
/// every other type carries none.
struct Block {
    std::string name;
    std::string type;
    int in_ports = 0;
    int out_ports = 0;
    bool virtual_flag = true;
    OrderedParams parameters;
    std::vector<System> nested;

    bool is_subsystem() const { return type == "SubSystem"; }
    const System* nested_system() const { return nested.empty() ? nullptr : &nested.front(); }

    bool operator==(const Block& other) const;
};

/// One hierarchy level: blocks in document order plus the connections
/// between their ports.
struct System {
    std::vector<Block> blocks;
    std::vector<RawConnection> connections;

    const Block* find_block(std::string_view name) const;

    bool operator==(const System&) const = default;
};

/// A complete model: a name, a root system, and any top-level metadata
/// entries that rode along in the source text.
struct Model {
    std::string name;
    System root;
    OrderedParams source_meta;

    bool operator==(const Model&) const = default;
};

/// One structural problem found by validate(). `path` addresses the
/// offending block or connection with '/' between hierarchy levels.
struct Violation {
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Built-in port counts per block type. Unknown types get one in, one out;
/// SubSystem counts come from the nested boundary blocks, not from here.
std::pair<int, int> default_port_counts(std::string_view type);

/// True if `s` matches [A-Za-z_][A-Za-z0-9_]*.
bool is_identifier(std::string_view s);

/// Parses a "Ports" value such as "[2, 1]" or "2, 1" or "2".
/// One integer sets the input count; a second sets the output count.
/// Returns nullopt when the value is not of that shape.
std::optional<std::pair<int, std::optional<int>>> parse_ports_value(std::string_view value);

/// Renders port counts in the canonical "[in, out]" form.
std::string format_ports_value(int in_ports, int out_ports);

/// Checks every structural invariant and returns the violations found,
/// in document order. An empty result means the model is well formed.
std::vector<Violation> validate(const Model& model);

} // namespace bdg
