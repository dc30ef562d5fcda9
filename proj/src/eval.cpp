#include <algorithm>
#include <charconv>
#include <memory>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "bdg/errors.hpp"
#include "bdg/eval.hpp"

namespace bdg {

namespace {

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

struct LevelPlan;

struct NodePlan {
    enum Kind { Gain, Sum, Product, Constant, UnitDelay, Inport, Outport, Terminator, Subsystem };

    Kind kind = Terminator;
    double factor = 1.0;  // Gain
    double value = 1.0;   // Constant
    int ordinal = 0;      // Inport and Outport, 1-based document position
    std::unique_ptr<LevelPlan> child;
};

struct LevelPlan {
    const ModelGraph* graph = nullptr;
    std::vector<NodePlan> nodes;
    std::vector<int> order;  // evaluation order for one step
};

struct LevelState {
    std::map<int, double> delays;
    std::map<int, LevelState> children;
};

double numeric_parameter(const NodeRecord& record, const std::string& key, double fallback) {
    const std::string* raw = record.parameters.get(key);
    if (!raw) return fallback;
    double value = 0.0;
    if (!parse_double(*raw, value)) {
        throw BadParameterError("block \"" + record.name + "\": parameter " + key +
                                " is not a number: \"" + *raw + "\"");
    }
    return value;
}

// One step of a level must resolve every signal from already-known values,
// so the ordering ignores UnitDelay outputs: those are available up front.
std::vector<int> instantaneous_order(const ModelGraph& graph, const std::vector<NodePlan>& nodes) {
    int n = graph.node_count();
    std::vector<int> in_degree(static_cast<std::size_t>(n), 0);
    for (const Edge& e : graph.edges()) {
        if (nodes[static_cast<std::size_t>(e.src_node)].kind == NodePlan::UnitDelay) continue;
        ++in_degree[static_cast<std::size_t>(e.dst_node)];
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < n; ++v) {
        if (in_degree[static_cast<std::size_t>(v)] == 0) ready.push(v);
    }
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        order.push_back(v);
        if (nodes[static_cast<std::size_t>(v)].kind == NodePlan::UnitDelay) continue;
        for (int e : graph.out_edges(v)) {
            int w = graph.edge(e).dst_node;
            if (--in_degree[static_cast<std::size_t>(w)] == 0) ready.push(w);
        }
    }
    if (static_cast<int>(order.size()) != n) {
        for (int v = 0; v < n; ++v) {
            if (in_degree[static_cast<std::size_t>(v)] > 0) {
                throw UnresolvableCycleError("cycle without a UnitDelay passes through block \"" +
                                             graph.node(v).name + "\"");
            }
        }
    }
    return order;
}

void require_shape(const NodeRecord& record, bool in_ok, bool out_ok) {
    if (in_ok && out_ok) return;
    std::ostringstream os;
    os << "block \"" << record.name << "\" of type " << record.block_type
       << " cannot run with " << record.in_ports << " in and " << record.out_ports
       << " out ports";
    throw PortMismatchError(os.str());
}

LevelPlan build_plan(const ModelGraph& graph) {
    LevelPlan plan;
    plan.graph = &graph;
    plan.nodes.resize(static_cast<std::size_t>(graph.node_count()));
    int next_in = 0;
    int next_out = 0;
    for (int v = 0; v < graph.node_count(); ++v) {
        const NodeRecord& record = graph.node(v);
        NodePlan& node = plan.nodes[static_cast<std::size_t>(v)];
        if (record.is_subsystem) {
            node.kind = NodePlan::Subsystem;
            if (!record.nested) {
                throw PortMismatchError("subsystem \"" + record.name + "\" has no inner system");
            }
            int inner_in = 0;
            int inner_out = 0;
            for (const NodeRecord& inner : record.nested->nodes()) {
                if (inner.block_type == "Inport") ++inner_in;
                if (inner.block_type == "Outport") ++inner_out;
            }
            if (inner_in != record.in_ports || inner_out != record.out_ports) {
                std::ostringstream os;
                os << "subsystem \"" << record.name << "\" declares " << record.in_ports << " in, "
                   << record.out_ports << " out but contains " << inner_in << " Inport and "
                   << inner_out << " Outport blocks";
                throw PortMismatchError(os.str());
            }
            node.child = std::make_unique<LevelPlan>(build_plan(*record.nested));
        } else if (record.block_type == "Gain") {
            node.kind = NodePlan::Gain;
            node.factor = numeric_parameter(record, "Gain", 1.0);
            require_shape(record, record.in_ports == 1, record.out_ports == 1);
        } else if (record.block_type == "Sum") {
            node.kind = NodePlan::Sum;
            require_shape(record, record.in_ports >= 1, record.out_ports == 1);
        } else if (record.block_type == "Product") {
            node.kind = NodePlan::Product;
            require_shape(record, record.in_ports >= 1, record.out_ports == 1);
        } else if (record.block_type == "Constant") {
            node.kind = NodePlan::Constant;
            node.value = numeric_parameter(record, "Value", 1.0);
            require_shape(record, record.in_ports == 0, record.out_ports == 1);
        } else if (record.block_type == "UnitDelay") {
            node.kind = NodePlan::UnitDelay;
            require_shape(record, record.in_ports == 1, record.out_ports == 1);
        } else if (record.block_type == "Inport") {
            node.kind = NodePlan::Inport;
            node.ordinal = ++next_in;
            require_shape(record, record.in_ports == 0, record.out_ports == 1);
        } else if (record.block_type == "Outport") {
            node.kind = NodePlan::Outport;
            node.ordinal = ++next_out;
            require_shape(record, record.in_ports == 1, record.out_ports == 0);
        } else if (record.block_type == "Terminator") {
            node.kind = NodePlan::Terminator;
            require_shape(record, record.in_ports == 1, record.out_ports == 0);
        } else {
            throw UnsupportedBlockError("block \"" + record.name + "\" has unsupported type \"" +
                                        record.block_type + "\"");
        }
    }
    plan.order = instantaneous_order(graph, plan.nodes);
    return plan;
}

// Computes one step of one level. Nested levels receive their inputs by
// Inport ordinal; only the top level records into `record`.
std::vector<double> step_level(const LevelPlan& plan, LevelState& state,
                               const std::vector<double>* external,
                               const std::map<std::string, std::vector<double>>* top_inputs,
                               int step,
                               std::map<std::string, std::vector<double>>* record) {
    const ModelGraph& graph = *plan.graph;
    std::vector<std::vector<double>> out(plan.nodes.size());
    for (std::size_t v = 0; v < plan.nodes.size(); ++v) {
        out[v].assign(static_cast<std::size_t>(graph.node(static_cast<int>(v)).out_ports), 0.0);
        if (plan.nodes[v].kind == NodePlan::UnitDelay) {
            out[v][0] = state.delays[static_cast<int>(v)];
        }
    }

    auto port_in = [&](int v, int port, double neutral) {
        double total = 0.0;
        bool driven = false;
        for (int e : graph.in_edges(v)) {
            const Edge& edge = graph.edge(e);
            if (edge.dst_port != port) continue;
            total += out[static_cast<std::size_t>(edge.src_node)]
                        [static_cast<std::size_t>(edge.src_port - 1)];
            driven = true;
        }
        return driven ? total : neutral;
    };

    int outport_count = 0;
    for (const NodePlan& node : plan.nodes) {
        if (node.kind == NodePlan::Outport) ++outport_count;
    }
    std::vector<double> outputs(static_cast<std::size_t>(outport_count), 0.0);

    for (int v : plan.order) {
        const NodePlan& node = plan.nodes[static_cast<std::size_t>(v)];
        const NodeRecord& rec = graph.node(v);
        auto& slot = out[static_cast<std::size_t>(v)];
        switch (node.kind) {
        case NodePlan::Gain:
            slot[0] = port_in(v, 1, 0.0) * node.factor;
            break;
        case NodePlan::Sum: {
            double total = 0.0;
            for (int p = 1; p <= rec.in_ports; ++p) total += port_in(v, p, 0.0);
            slot[0] = total;
            break;
        }
        case NodePlan::Product: {
            double total = 1.0;
            for (int p = 1; p <= rec.in_ports; ++p) total *= port_in(v, p, 1.0);
            slot[0] = total;
            break;
        }
        case NodePlan::Constant:
            slot[0] = node.value;
            break;
        case NodePlan::UnitDelay:
            break;  // output was filled from state before the pass
        case NodePlan::Inport: {
            double sample = 0.0;
            if (top_inputs) {
                auto it = top_inputs->find(rec.name);
                if (it != top_inputs->end() && step < static_cast<int>(it->second.size())) {
                    sample = it->second[static_cast<std::size_t>(step)];
                }
            } else if (external && node.ordinal <= static_cast<int>(external->size())) {
                sample = (*external)[static_cast<std::size_t>(node.ordinal - 1)];
            }
            slot[0] = sample;
            break;
        }
        case NodePlan::Outport: {
            double sample = port_in(v, 1, 0.0);
            outputs[static_cast<std::size_t>(node.ordinal - 1)] = sample;
            if (record) (*record)[rec.name].push_back(sample);
            break;
        }
        case NodePlan::Terminator:
            if (record) (*record)[rec.name].push_back(port_in(v, 1, 0.0));
            break;
        case NodePlan::Subsystem: {
            std::vector<double> ins(static_cast<std::size_t>(rec.in_ports), 0.0);
            for (int p = 1; p <= rec.in_ports; ++p) {
                ins[static_cast<std::size_t>(p - 1)] = port_in(v, p, 0.0);
            }
            slot = step_level(*node.child, state.children[v], &ins, nullptr, step, nullptr);
            break;
        }
        }
    }

    for (std::size_t v = 0; v < plan.nodes.size(); ++v) {
        if (plan.nodes[v].kind == NodePlan::UnitDelay) {
            state.delays[static_cast<int>(v)] = port_in(static_cast<int>(v), 1, 0.0);
        }
    }
    return outputs;
}

} // namespace

Trace evaluate(const ModelGraph& graph,
               const std::map<std::string, std::vector<double>>& inputs,
               int steps) {
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");

    LevelPlan plan = build_plan(graph);
    Trace trace;
    trace.steps = steps;
    for (int v = 0; v < graph.node_count(); ++v) {
        const NodeRecord& record = graph.node(v);
        if (record.block_type == "Outport" || record.block_type == "Terminator") {
            trace.values[record.name];
        }
    }

    LevelState state;
    for (int step = 0; step < steps; ++step) {
        step_level(plan, state, nullptr, &inputs, step, &trace.values);
    }
    return trace;
}

} // namespace bdg
