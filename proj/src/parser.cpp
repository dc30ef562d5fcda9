#include "bdg/parser.hpp"

#include <charconv>
#include <sstream>

#include "bdg/errors.hpp"
#include "section_doc.hpp"

namespace bdg {

namespace {

using detail::KeyValue;
using detail::SectionNode;

int parse_port_number(const KeyValue& pair) {
    int value = 0;
    const std::string& s = pair.value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(pair.key + " value \"" + s + "\" is not an integer", pair.span);
    }
    return value;
}

System parse_system(const SectionNode& sec);

Block parse_block(const SectionNode& sec) {
    Block block;
    const KeyValue* type = nullptr;
    const KeyValue* name = nullptr;
    const KeyValue* ports = nullptr;
    const KeyValue* virt = nullptr;
    const SectionNode* inner = nullptr;

    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            auto claim = [&](const KeyValue*& slot) {
                if (slot) throw ParseError("key " + pair.key + " repeats in Block", pair.span);
                slot = &pair;
            };
            if (pair.key == "BlockType") {
                claim(type);
            } else if (pair.key == "Name") {
                claim(name);
            } else if (pair.key == "Ports") {
                claim(ports);
            } else if (pair.key == "Virtual") {
                claim(virt);
                if (pair.value != "on" && pair.value != "off") {
                    throw ParseError("Virtual must be on or off, not \"" + pair.value + "\"",
                                     pair.span);
                }
            } else {
                block.parameters.append_unchecked(pair.key, pair.value);
            }
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "System") {
                throw ParseError("unexpected section " + child.name + " in Block", child.span);
            }
            if (inner) throw ParseError("Block contains more than one System", child.span);
            inner = &child;
        }
    }

    if (!type) throw ParseError("Block is missing BlockType", sec.span);
    if (!name) throw ParseError("Block is missing Name", sec.span);
    block.type = type->value;
    block.name = name->value;
    if (virt) block.virtual_flag = virt->value == "on";

    if (block.is_subsystem()) {
        if (!inner) throw ParseError("SubSystem block is missing its nested System", sec.span);
        block.nested.push_back(parse_system(*inner));
        const System& sys = block.nested.front();
        for (const auto& b : sys.blocks) {
            if (b.type == "Inport") ++block.in_ports;
            if (b.type == "Outport") ++block.out_ports;
        }
    } else {
        if (inner) {
            throw ParseError("only SubSystem blocks may contain a System", inner->span);
        }
        auto [in, out] = default_port_counts(block.type);
        block.in_ports = in;
        block.out_ports = out;
    }

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

/// Collects DstBlock/DstPort pairs and nested Branch sections, in document
/// order, into `dsts`. Every Branch must contribute at least one
/// destination, counting those of its nested branches.
void parse_branch(const SectionNode& sec, std::vector<PortRef>& dsts) {
    std::size_t before = dsts.size();
    const KeyValue* pending = nullptr;
    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            if (pair.key == "DstBlock") {
                if (pending) {
                    throw ParseError("DstBlock repeats before its DstPort", pair.span);
                }
                pending = &pair;
            } else if (pair.key == "DstPort") {
                if (!pending) {
                    throw ParseError("DstPort has no preceding DstBlock", pair.span);
                }
                dsts.push_back({pending->value, parse_port_number(pair)});
                pending = nullptr;
            } else {
                throw ParseError("unexpected key " + pair.key + " in Branch", pair.span);
            }
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "Branch") {
                throw ParseError("unexpected section " + child.name + " in Branch", child.span);
            }
            if (pending) {
                throw ParseError("Branch interrupts a DstBlock/DstPort pair", child.span);
            }
            parse_branch(child, dsts);
        }
    }
    if (pending) throw ParseError("DstBlock has no DstPort", pending->span);
    if (dsts.size() == before) throw ParseError("Branch has no destinations", sec.span);
}

RawConnection parse_line(const SectionNode& sec) {
    RawConnection conn;
    const KeyValue* src_block = nullptr;
    const KeyValue* src_port = nullptr;
    const KeyValue* pending = nullptr;

    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            if (pair.key == "SrcBlock") {
                if (src_block) throw ParseError("SrcBlock repeats in Line", pair.span);
                src_block = &pair;
            } else if (pair.key == "SrcPort") {
                if (src_port) throw ParseError("SrcPort repeats in Line", pair.span);
                src_port = &pair;
            } else if (pair.key == "DstBlock") {
                if (pending) {
                    throw ParseError("DstBlock repeats before its DstPort", pair.span);
                }
                pending = &pair;
            } else if (pair.key == "DstPort") {
                if (!pending) {
                    throw ParseError("DstPort has no preceding DstBlock", pair.span);
                }
                conn.dsts.push_back({pending->value, parse_port_number(pair)});
                pending = nullptr;
            } else {
                conn.parameters.append_unchecked(pair.key, pair.value);
            }
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "Branch") {
                throw ParseError("unexpected section " + child.name + " in Line", child.span);
            }
            if (pending) {
                throw ParseError("Branch interrupts a DstBlock/DstPort pair", child.span);
            }
            parse_branch(child, conn.dsts);
        }
    }

    if (pending) throw ParseError("DstBlock has no DstPort", pending->span);
    if (!src_block) throw ParseError("Line is missing SrcBlock", sec.span);
    if (!src_port) throw ParseError("Line is missing SrcPort", sec.span);
    conn.src = {src_block->value, parse_port_number(*src_port)};
    if (conn.dsts.empty()) throw ParseError("Line has no destinations", sec.span);
    return conn;
}

System parse_system(const SectionNode& sec) {
    System sys;
    for (const auto& item : sec.items) {
        if (item.is_pair()) {
            throw ParseError("System sections hold only Block and Line sections, found key " +
                                 item.pair->key,
                             item.pair->span);
        }
        const SectionNode& child = item.section.front();
        if (child.name == "Block") {
            sys.blocks.push_back(parse_block(child));
        } else if (child.name == "Line") {
            sys.connections.push_back(parse_line(child));
        } else {
            throw ParseError("unexpected section " + child.name + " in System", child.span);
        }
    }
    return sys;
}

} // namespace

Model parse_model(std::string_view text) {
    SectionNode root = detail::parse_document(text);

    const SectionNode* model_sec = nullptr;
    for (const auto& item : root.items) {
        if (item.is_pair()) {
            throw ParseError("expected a Model section, found key " + item.pair->key,
                             item.pair->span);
        }
        const SectionNode& child = item.section.front();
        if (child.name != "Model") {
            throw ParseError("unexpected top-level section " + child.name, child.span);
        }
        if (model_sec) throw ParseError("Model section repeats", child.span);
        model_sec = &child;
    }
    if (!model_sec) throw ParseError("text holds no Model section", SourceSpan{});

    Model model;
    bool have_name = false;
    const SectionNode* system = nullptr;
    for (const auto& item : model_sec->items) {
        if (item.is_pair()) {
            const KeyValue& pair = *item.pair;
            if (pair.key == "Name") {
                if (have_name) throw ParseError("Name repeats in Model", pair.span);
                model.name = pair.value;
                have_name = true;
            } else {
                model.source_meta.append_unchecked(pair.key, pair.value);
            }
        } else {
            const SectionNode& child = item.section.front();
            if (child.name != "System") {
                throw ParseError("unexpected section " + child.name + " in Model", child.span);
            }
            if (system) throw ParseError("Model contains more than one System", child.span);
            system = &child;
        }
    }
    if (!have_name) throw ParseError("Model is missing Name", model_sec->span);
    if (!system) throw ParseError("Model is missing its System", model_sec->span);
    model.root = parse_system(*system);
    return model;
}

// ─── canonical form ──────────────────────────────────────────────────────────

namespace {

std::string pad(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

void write_value(std::ostream& os, std::string_view value, bool prefer_bare) {
    if (prefer_bare && detail::is_bare_token(value)) {
        os << value;
    } else {
        os << detail::quoted(value);
    }
}

void write_system(std::ostream& os, const System& sys, int depth);

void write_block(std::ostream& os, const Block& block, int depth) {
    std::string in = pad(depth + 1);
    os << pad(depth) << "Block {\n";
    os << in << "BlockType ";
    write_value(os, block.type, true);
    os << '\n';
    os << in << "Name " << detail::quoted(block.name) << '\n';
    if (!block.is_subsystem()) {
        auto [din, dout] = default_port_counts(block.type);
        if (block.in_ports != din || block.out_ports != dout) {
            os << in << "Ports "
               << detail::quoted(format_ports_value(block.in_ports, block.out_ports)) << '\n';
        }
    }
    if (!block.virtual_flag) os << in << "Virtual off\n";
    for (const auto& [key, value] : block.parameters) {
        os << in << key << ' ' << detail::quoted(value) << '\n';
    }
    if (const System* nested = block.nested_system()) {
        write_system(os, *nested, depth + 1);
    }
    os << pad(depth) << "}\n";
}

void write_line(std::ostream& os, const RawConnection& conn, int depth) {
    std::string in = pad(depth + 1);
    os << pad(depth) << "Line {\n";
    os << in << "SrcBlock " << detail::quoted(conn.src.block) << '\n';
    os << in << "SrcPort " << conn.src.port << '\n';
    for (const auto& [key, value] : conn.parameters) {
        os << in << key << ' ' << detail::quoted(value) << '\n';
    }
    os << in << "DstBlock " << detail::quoted(conn.dsts.front().block) << '\n';
    os << in << "DstPort " << conn.dsts.front().port << '\n';
    for (std::size_t i = 1; i < conn.dsts.size(); ++i) {
        os << in << "Branch {\n";
        os << in << "  DstBlock " << detail::quoted(conn.dsts[i].block) << '\n';
        os << in << "  DstPort " << conn.dsts[i].port << '\n';
        os << in << "}\n";
    }
    os << pad(depth) << "}\n";
}

void write_system(std::ostream& os, const System& sys, int depth) {
    os << pad(depth) << "System {\n";
    for (const auto& block : sys.blocks) write_block(os, block, depth + 1);
    for (const auto& conn : sys.connections) write_line(os, conn, depth + 1);
    os << pad(depth) << "}\n";
}

} // namespace

std::string serialize_model(const Model& model) {
    auto violations = validate(model);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "cannot serialize an invalid model: ";
        if (!violations.front().path.empty()) msg << violations.front().path << ": ";
        msg << violations.front().message;
        if (violations.size() > 1) msg << " (+" << violations.size() - 1 << " more)";
        throw InvalidModelError(msg.str());
    }

    std::ostringstream os;
    os << "Model {\n";
    os << "  Name " << detail::quoted(model.name) << '\n';
    for (const auto& [key, value] : model.source_meta) {
        os << "  " << key << ' ' << detail::quoted(value) << '\n';
    }
    write_system(os, model.root, 1);
    os << "}\n";
    return os.str();
}

} // namespace bdg
