#include "bdg/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace bdg {

bool Block::operator==(const Block& other) const {
    return name == other.name && type == other.type && in_ports == other.in_ports &&
           out_ports == other.out_ports && virtual_flag == other.virtual_flag &&
           parameters == other.parameters && nested == other.nested;
}

const Block* System::find_block(std::string_view name) const {
    for (const auto& b : blocks) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

std::pair<int, int> default_port_counts(std::string_view type) {
    if (type == "Gain") return {1, 1};
    if (type == "Sum") return {2, 1};
    if (type == "Product") return {2, 1};
    if (type == "Constant") return {0, 1};
    if (type == "UnitDelay") return {1, 1};
    if (type == "Inport") return {0, 1};
    if (type == "Outport") return {1, 0};
    if (type == "Terminator") return {1, 0};
    if (type == "SubSystem") return {0, 0};
    return {1, 1};
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s[0]);
    if (!std::isalpha(head) && s[0] != '_') return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<int> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

} // namespace

std::optional<std::pair<int, std::optional<int>>> parse_ports_value(std::string_view value) {
    std::string_view s = trim(value);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
        s = trim(s.substr(1, s.size() - 2));
    } else if (!s.empty() && (s.front() == '[' || s.back() == ']')) {
        return std::nullopt;
    }
    if (s.empty()) return std::nullopt;

    auto comma = s.find(',');
    if (comma == std::string_view::npos) {
        auto in = parse_int(s);
        if (!in) return std::nullopt;
        return std::make_pair(*in, std::optional<int>{});
    }
    if (s.find(',', comma + 1) != std::string_view::npos) return std::nullopt;
    auto in = parse_int(s.substr(0, comma));
    auto out = parse_int(s.substr(comma + 1));
    if (!in || !out) return std::nullopt;
    return std::make_pair(*in, std::optional<int>{*out});
}

std::string format_ports_value(int in_ports, int out_ports) {
    std::ostringstream os;
    os << '[' << in_ports << ", " << out_ports << ']';
    return os.str();
}

// ─── validation ──────────────────────────────────────────────────────────────

namespace {

const std::set<std::string, std::less<>> kReservedBlockKeys = {"BlockType", "Name", "Ports",
                                                               "Virtual"};
const std::set<std::string, std::less<>> kReservedLineKeys = {"SrcBlock", "SrcPort", "DstBlock",
                                                              "DstPort"};

void check_params(const OrderedParams& params, const std::set<std::string, std::less<>>& reserved,
                  const std::string& path, const char* owner, std::vector<Violation>& out) {
    std::set<std::string_view> seen;
    for (const auto& [key, value] : params) {
        (void)value;
        if (!is_identifier(key)) {
            out.push_back({path, std::string(owner) + " parameter key \"" + key +
                                     "\" is not an identifier"});
        } else if (reserved.count(key)) {
            out.push_back({path, std::string(owner) + " parameter key \"" + key +
                                     "\" is reserved for the file format"});
        }
        if (!seen.insert(key).second) {
            out.push_back({path, std::string(owner) + " parameter key \"" + key + "\" repeats"});
        }
    }
}

int count_type(const System& sys, std::string_view type) {
    int n = 0;
    for (const auto& b : sys.blocks) {
        if (b.type == type) ++n;
    }
    return n;
}

void validate_system(const System& sys, const std::string& prefix, std::vector<Violation>& out) {
    std::set<std::string_view> names;
    for (const auto& block : sys.blocks) {
        std::string path = prefix + block.name;
        if (block.name.empty()) {
            out.push_back({prefix, "block has an empty name"});
        } else if (!names.insert(block.name).second) {
            out.push_back({path, "block name repeats within its system"});
        }
        if (block.type.empty()) out.push_back({path, "block has an empty type"});
        if (block.in_ports < 0) out.push_back({path, "negative input port count"});
        if (block.out_ports < 0) out.push_back({path, "negative output port count"});

        if (block.type == "Inport" && (block.in_ports != 0 || block.out_ports != 1)) {
            out.push_back({path, "Inport must have no inputs and one output"});
        }
        if (block.type == "Outport" && (block.in_ports != 1 || block.out_ports != 0)) {
            out.push_back({path, "Outport must have one input and no outputs"});
        }

        if (block.is_subsystem()) {
            if (block.nested.size() != 1) {
                out.push_back({path, "SubSystem must contain exactly one nested system"});
            } else {
                const System& inner = block.nested.front();
                int inports = count_type(inner, "Inport");
                int outports = count_type(inner, "Outport");
                if (inports != block.in_ports) {
                    out.push_back({path, "input port count " + std::to_string(block.in_ports) +
                                             " does not match " + std::to_string(inports) +
                                             " nested Inport blocks"});
                }
                if (outports != block.out_ports) {
                    out.push_back({path, "output port count " + std::to_string(block.out_ports) +
                                             " does not match " + std::to_string(outports) +
                                             " nested Outport blocks"});
                }
                validate_system(inner, path + "/", out);
            }
        } else if (!block.nested.empty()) {
            out.push_back({path, "only SubSystem blocks may contain a nested system"});
        }

        check_params(block.parameters, kReservedBlockKeys, path, "block", out);
    }

    for (const auto& conn : sys.connections) {
        std::string src_path = prefix + conn.src.block;
        const Block* src = sys.find_block(conn.src.block);
        if (!src) {
            out.push_back({src_path, "connection source block does not exist"});
        } else if (conn.src.port < 1 || conn.src.port > src->out_ports) {
            out.push_back({src_path, "source port " + std::to_string(conn.src.port) +
                                         " outside 1.." + std::to_string(src->out_ports)});
        }
        if (conn.dsts.empty()) {
            out.push_back({src_path, "connection has no destinations"});
        }
        for (const auto& dst : conn.dsts) {
            std::string dst_path = prefix + dst.block;
            const Block* d = sys.find_block(dst.block);
            if (!d) {
                out.push_back({dst_path, "connection destination block does not exist"});
            } else if (dst.port < 1 || dst.port > d->in_ports) {
                out.push_back({dst_path, "destination port " + std::to_string(dst.port) +
                                             " outside 1.." + std::to_string(d->in_ports)});
            }
        }
        check_params(conn.parameters, kReservedLineKeys, src_path, "line", out);
    }
}

} // namespace

std::vector<Violation> validate(const Model& model) {
    std::vector<Violation> out;
    if (model.name.empty()) out.push_back({"", "model name is empty"});
    std::set<std::string_view> meta_seen;
    for (const auto& [key, value] : model.source_meta) {
        (void)value;
        if (!is_identifier(key)) {
            out.push_back({"", "metadata key \"" + key + "\" is not an identifier"});
        } else if (key == "Name") {
            out.push_back({"", "metadata key \"Name\" collides with the model name"});
        }
        if (!meta_seen.insert(key).second) {
            out.push_back({"", "metadata key \"" + key + "\" repeats"});
        }
    }
    validate_system(model.root, "", out);
    return out;
}

} // namespace bdg
