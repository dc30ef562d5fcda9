#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "bdg/analyses.hpp"
#include "bdg/cli.hpp"
#include "bdg/errors.hpp"
#include "bdg/eval.hpp"
#include "bdg/graph.hpp"
#include "bdg/parser.hpp"
#include "bdg/report.hpp"
#include "bdg/rules.hpp"
#include "bdg/transforms.hpp"

namespace bdg {

namespace {

// ─── helpers ────────────────────────────────────────────────────────────

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot write file: " + path);
    file << text;
}

// Sends finished report text to the chosen sink.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
    } else {
        write_file(out_path, text);
    }
}

std::string dump(const Json& report) { return report.dump(2) + "\n"; }

std::string joined_names(const ModelGraph& graph, const std::vector<int>& nodes) {
    std::string text;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) text += " -> ";
        text += graph.node(nodes[i]).name;
    }
    return text;
}

void collect_levels(const ModelGraph& graph, const std::string& path,
                    std::vector<std::pair<std::string, const ModelGraph*>>& levels) {
    levels.push_back({path, &graph});
    for (const NodeRecord& node : graph.nodes()) {
        if (node.nested) collect_levels(*node.nested, path + node.name + "/", levels);
    }
}

std::map<std::string, std::vector<double>> parse_input_streams(const std::string& spec) {
    std::map<std::string, std::vector<double>> streams;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t semi = spec.find(';', pos);
        std::string segment =
            spec.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        pos = semi == std::string::npos ? spec.size() + 1 : semi + 1;

        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t");
            std::size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        segment = trim(segment);
        if (segment.empty()) continue;

        std::size_t eq = segment.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bad input stream, expected NAME=v1,v2,...: " + segment);
        }
        std::string name = trim(segment.substr(0, eq));
        if (name.empty()) throw std::invalid_argument("bad input stream, empty name: " + segment);

        std::vector<double> samples;
        std::string rest = segment.substr(eq + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            std::size_t comma = rest.find(',', start);
            std::string token =
                trim(rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                   : comma - start));
            start = comma == std::string::npos ? rest.size() + 1 : comma + 1;
            if (token.empty()) continue;
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc() || ptr != token.data() + token.size()) {
                throw std::invalid_argument("bad sample value: " + token);
            }
            samples.push_back(value);
        }
        streams[name] = std::move(samples);
    }
    return streams;
}

// ─── subcommand bodies ──────────────────────────────────────────────────

int run_validate(const std::string& file, bool strict, std::ostream& out) {
    Model model = parse_model(read_file(file));
    std::vector<Violation> violations = validate(model);
    for (const Violation& v : violations) {
        out << (v.path.empty() ? std::string("model") : v.path) << ": " << v.message << "\n";
    }
    if (violations.empty()) {
        out << "ok\n";
        return 0;
    }
    return strict ? 1 : 0;
}

int run_graph(const std::string& file, const std::string& format, const std::string& out_path,
              std::ostream& out) {
    Model model = parse_model(read_file(file));
    ModelGraph graph = build_graph(model);
    if (format == "json") {
        Json blocks = Json::array();
        for (const NodeRecord& node : graph.nodes()) {
            Json row;
            row["name"] = node.name;
            row["type"] = node.block_type;
            row["in_ports"] = node.in_ports;
            row["out_ports"] = node.out_ports;
            row["subsystem"] = node.is_subsystem;
            blocks.push_back(std::move(row));
        }
        Json connections = Json::array();
        for (const Edge& edge : graph.edges()) connections.push_back(edge_json(graph, edge));
        Json results;
        results["blocks"] = std::move(blocks);
        results["connections"] = std::move(connections);
        emit(dump(make_report("graph", model.name, std::move(results))), out_path, out);
    } else {
        std::ostringstream os;
        os << "blocks:\n";
        for (const NodeRecord& node : graph.nodes()) {
            os << "  " << node.name << " (" << node.block_type << ") [" << node.in_ports << ","
               << node.out_ports << "]\n";
        }
        os << "connections:\n";
        for (const Edge& edge : graph.edges()) {
            os << "  " << graph.node(edge.src_node).name << ":" << edge.src_port << " -> "
               << graph.node(edge.dst_node).name << ":" << edge.dst_port << "\n";
        }
        emit(os.str(), out_path, out);
    }
    return 0;
}

int run_cycles(const Model& model, const ModelGraph& graph, const std::string& format,
               const std::string& out_path, bool strict, std::ostream& out) {
    std::vector<std::pair<std::string, const ModelGraph*>> levels;
    collect_levels(graph, "", levels);

    bool any = false;
    Json results = Json::array();
    std::ostringstream text;
    for (const auto& [path, level] : levels) {
        std::vector<Cycle> cycles = detect_cycles(*level);
        if (cycles.empty()) continue;
        any = true;
        Json row;
        row["level"] = path;
        Json list = Json::array();
        for (const Cycle& cycle : cycles) {
            list.push_back(cycle_json(*level, cycle));
            text << "cycle";
            if (!path.empty()) text << " in " << path.substr(0, path.size() - 1);
            text << ": " << joined_names(*level, cycle.nodes) << " -> "
                 << level->node(cycle.nodes.front()).name << "\n";
        }
        row["cycles"] = std::move(list);
        results.push_back(std::move(row));
    }
    if (format == "json") {
        emit(dump(make_report("cycles", model.name, std::move(results))), out_path, out);
    } else {
        if (!any) text << "no cycles\n";
        emit(text.str(), out_path, out);
    }
    return strict && any ? 1 : 0;
}

int run_paths(const Model& model, const ModelGraph& graph, const std::string& format,
              const std::string& out_path, bool strict, std::ostream& out) {
    std::vector<Path> paths = enumerate_paths(graph);
    if (format == "json") {
        Json results = Json::array();
        for (const Path& path : paths) results.push_back(path_json(graph, path));
        emit(dump(make_report("paths", model.name, std::move(results))), out_path, out);
    } else {
        std::ostringstream os;
        for (const Path& path : paths) os << "path: " << joined_names(graph, path.nodes) << "\n";
        if (paths.empty()) os << "no paths\n";
        emit(os.str(), out_path, out);
    }
    return strict && !paths.empty() ? 1 : 0;
}

int run_parallel(const Model& model, const ModelGraph& graph, const std::string& format,
                 const std::string& out_path, bool strict, std::ostream& out) {
    std::vector<ParallelGroup> groups = find_parallel_paths(graph);
    if (format == "json") {
        Json results = Json::array();
        for (const ParallelGroup& group : groups) {
            results.push_back(parallel_group_json(graph, group));
        }
        emit(dump(make_report("parallel", model.name, std::move(results))), out_path, out);
    } else {
        std::ostringstream os;
        for (const ParallelGroup& group : groups) {
            os << "parallel " << graph.node(group.start).name << " -> "
               << graph.node(group.end).name << ": " << group.paths.size() << " paths\n";
            for (const Path& path : group.paths) {
                os << "  " << joined_names(graph, path.nodes) << "\n";
            }
        }
        if (groups.empty()) os << "no parallel groups\n";
        emit(os.str(), out_path, out);
    }
    return strict && !groups.empty() ? 1 : 0;
}

int run_count(const Model& model, const ModelGraph& graph, const std::string& from,
              const std::string& to, const std::string& type, const std::string& format,
              const std::string& out_path, bool strict, std::ostream& out) {
    auto start = graph.find_node(from);
    auto end = graph.find_node(to);
    if (!start) throw std::invalid_argument("no block named " + from);
    if (!end) throw std::invalid_argument("no block named " + to);
    BlockCountSummary summary = count_blocks_on_paths(graph, *start, *end, type);
    if (format == "json") {
        emit(dump(make_report("count", model.name, block_count_json(graph, summary))), out_path,
             out);
    } else {
        std::ostringstream os;
        for (const PathBlockCount& entry : summary.paths) {
            os << joined_names(graph, entry.path.nodes) << ": " << entry.count << " blocks\n";
        }
        os << (summary.balanced ? "balanced" : "unbalanced") << "\n";
        emit(os.str(), out_path, out);
    }
    return strict && !summary.balanced ? 1 : 0;
}

int run_clones(const Model& model, const ModelGraph& graph, int min_size,
               const std::string& format, const std::string& out_path, bool strict,
               std::ostream& out) {
    std::vector<CloneGroup> groups = detect_clones(graph, min_size);
    if (format == "json") {
        Json results = Json::array();
        for (const CloneGroup& group : groups) results.push_back(clone_group_json(group));
        emit(dump(make_report("clones", model.name, std::move(results))), out_path, out);
    } else {
        std::ostringstream os;
        for (const CloneGroup& group : groups) {
            os << "clone group (" << group.instances.front().size() << " blocks, "
               << group.instances.size() << " instances): " << group.signature << "\n";
            for (const auto& instance : group.instances) {
                os << "  ";
                for (std::size_t i = 0; i < instance.size(); ++i) {
                    if (i) os << ", ";
                    os << instance[i];
                }
                os << "\n";
            }
        }
        if (groups.empty()) os << "no clones\n";
        emit(os.str(), out_path, out);
    }
    return strict && !groups.empty() ? 1 : 0;
}

int run_longest_path(const Model& model, const ModelGraph& graph, const std::string& key,
                     double fallback, const std::string& format, const std::string& out_path,
                     std::ostream& out) {
    WeightedPath best = longest_weighted_path(graph, key, fallback);
    if (format == "json") {
        emit(dump(make_report("longest-path", model.name, weighted_path_json(graph, best))),
             out_path, out);
    } else {
        std::ostringstream os;
        os << "total: " << best.total << "\n";
        os << "blocks: " << joined_names(graph, best.nodes) << "\n";
        emit(os.str(), out_path, out);
    }
    return 0;
}

void write_change_log(const std::string& path, const ChangeLog& log) {
    std::ostringstream os;
    for (const ChangeEntry& entry : log.entries) os << change_entry_json(entry).dump() << "\n";
    write_file(path, os.str());
}

int run_eval(const std::string& file, const std::string& inputs_spec, int steps,
             const std::string& format, const std::string& out_path, std::ostream& out) {
    Model model = parse_model(read_file(file));
    ModelGraph graph = build_graph(model);
    Trace trace = evaluate(graph, parse_input_streams(inputs_spec), steps);
    if (format == "json") {
        emit(dump(make_report("eval", model.name, trace_json(trace))), out_path, out);
    } else {
        std::ostringstream os;
        os.precision(std::numeric_limits<double>::max_digits10);
        os << "steps: " << trace.steps << "\n";
        for (const auto& [name, samples] : trace.values) {
            os << name << ":";
            for (double sample : samples) os << " " << sample;
            os << "\n";
        }
        emit(os.str(), out_path, out);
    }
    return 0;
}

} // namespace

// ─── entry point ────────────────────────────────────────────────────────

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Block diagram model toolkit"};
    app.name("bdg");
    app.require_subcommand(1);

    std::string file;
    std::string out_path;
    std::string log_path;
    std::string rules_path;
    std::string format = "json";
    std::string from;
    std::string to;
    std::string key;
    std::string inputs_spec;
    bool strict = false;
    bool include_atomic = false;
    int min_size = 2;
    int steps = 0;
    double fallback = 0.0;

    auto add_model_arg = [&](CLI::App* cmd) {
        cmd->add_option("model", file, "model file")->required();
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("-o,--output", out_path, "write output to this file");
    };
    auto add_strict = [&](CLI::App* cmd) {
        cmd->add_flag("--strict", strict, "exit 1 when findings are reported");
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a model file for problems");
    add_model_arg(validate_cmd);
    add_strict(validate_cmd);

    CLI::App* graph_cmd = app.add_subcommand("graph", "print the connection graph of a model");
    add_model_arg(graph_cmd);
    add_format(graph_cmd);

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "run an analysis over a model");
    analyze_cmd->require_subcommand(1);
    CLI::App* cycles_cmd = analyze_cmd->add_subcommand("cycles", "find feedback cycles");
    CLI::App* paths_cmd = analyze_cmd->add_subcommand("paths", "list minimal path segments");
    CLI::App* parallel_cmd =
        analyze_cmd->add_subcommand("parallel", "group paths that share both endpoints");
    CLI::App* count_cmd =
        analyze_cmd->add_subcommand("count", "count blocks on every path between two blocks");
    CLI::App* clones_cmd = analyze_cmd->add_subcommand("clones", "find duplicated structure");
    CLI::App* longest_cmd =
        analyze_cmd->add_subcommand("longest-path", "heaviest path by a numeric UserData key");
    for (CLI::App* cmd : {cycles_cmd, paths_cmd, parallel_cmd, count_cmd, clones_cmd,
                          longest_cmd}) {
        add_model_arg(cmd);
        add_format(cmd);
        add_strict(cmd);
    }
    std::string count_type;
    count_cmd->add_option("--from", from, "path start block")->required();
    count_cmd->add_option("--to", to, "path end block")->required();
    count_cmd->add_option("--type", count_type, "block type to count along each path")
        ->required();
    clones_cmd->add_option("--min-size", min_size, "smallest group worth reporting")
        ->check(CLI::Range(2, 1 << 20));
    longest_cmd->add_option("--key", key, "UserData key holding the block weight")->required();
    longest_cmd->add_option("--default", fallback, "weight for blocks without the key");

    CLI::App* transform_cmd = app.add_subcommand("transform", "rewrite a model");
    transform_cmd->require_subcommand(1);
    CLI::App* normalize_cmd =
        transform_cmd->add_subcommand("normalize", "split fan-out lines into 1:1 lines");
    CLI::App* flatten_cmd =
        transform_cmd->add_subcommand("flatten", "splice subsystem contents into the parent");
    CLI::App* substitute_cmd =
        transform_cmd->add_subcommand("substitute", "apply block substitution rules");
    CLI::App* break_cmd =
        transform_cmd->add_subcommand("break-cycles", "remove a smallest set of feedback edges");
    for (CLI::App* cmd : {normalize_cmd, flatten_cmd, substitute_cmd, break_cmd}) {
        add_model_arg(cmd);
        cmd->add_option("-o,--output", out_path, "write the transformed model here")->required();
        cmd->add_option("--log", log_path, "write the change log here, one JSON entry per line");
    }
    flatten_cmd->add_flag("--include-atomic", include_atomic,
                          "also splice subsystems marked Virtual off");
    substitute_cmd->add_option("--rules", rules_path, "rule file to apply")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "run a model and print its outputs");
    add_model_arg(eval_cmd);
    add_format(eval_cmd);
    eval_cmd->add_option("--inputs", inputs_spec, "input streams, NAME=v1,v2,...;NAME=...");
    eval_cmd->add_option("--steps", steps, "number of steps to run")
        ->required()
        ->check(CLI::NonNegativeNumber);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) return run_validate(file, strict, out);
        if (*graph_cmd) return run_graph(file, format, out_path, out);

        if (*analyze_cmd) {
            Model model = parse_model(read_file(file));
            ModelGraph graph = build_graph(model);
            if (*cycles_cmd) return run_cycles(model, graph, format, out_path, strict, out);
            if (*paths_cmd) return run_paths(model, graph, format, out_path, strict, out);
            if (*parallel_cmd) return run_parallel(model, graph, format, out_path, strict, out);
            if (*count_cmd) {
                return run_count(model, graph, from, to, count_type, format, out_path, strict,
                                 out);
            }
            if (*clones_cmd) {
                return run_clones(model, graph, min_size, format, out_path, strict, out);
            }
            if (*longest_cmd) {
                return run_longest_path(model, graph, key, fallback, format, out_path, out);
            }
        }

        if (*transform_cmd) {
            Model model = parse_model(read_file(file));
            ModelGraph graph = build_graph(model);
            if (*normalize_cmd) {
                TransformResult result = normalize_connections(graph);
                write_file(out_path, serialize_model(to_model(result.graph, model)));
                if (!log_path.empty()) write_change_log(log_path, result.log);
                return 0;
            }
            if (*flatten_cmd) {
                TransformResult result = flatten_hierarchy(graph, include_atomic);
                write_file(out_path, serialize_model(to_model(result.graph, model)));
                if (!log_path.empty()) write_change_log(log_path, result.log);
                return 0;
            }
            if (*substitute_cmd) {
                std::vector<SubstitutionRule> rules = parse_rules(read_file(rules_path));
                TransformResult result = substitute_all(graph, rules);
                write_file(out_path, serialize_model(to_model(result.graph, model)));
                if (!log_path.empty()) write_change_log(log_path, result.log);
                return 0;
            }
            if (*break_cmd) {
                BreakCyclesResult result = break_cycles(graph);
                write_file(out_path, serialize_model(to_model(result.graph, model)));
                if (!log_path.empty()) write_change_log(log_path, result.log);
                for (const EdgeEndpoints& removed : result.removed) {
                    out << "removed: " << removed.src_block << ":" << removed.src_port << " -> "
                        << removed.dst_block << ":" << removed.dst_port << "\n";
                }
                return 0;
            }
        }

        if (*eval_cmd) return run_eval(file, inputs_spec, steps, format, out_path, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace bdg
