#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "bdg/cli.hpp"
#include "bdg/graph.hpp"
#include "bdg/parser.hpp"
#include "bdg/report.hpp"
#include "support/fixtures.hpp"

using namespace bdg;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run_tool(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string fixture_path(const std::string& name) {
    return std::string(BDG_FIXTURE_DIR) + "/" + name;
}

// Scratch directory shared by the test cases; file names stay unique.
std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto path = std::filesystem::temp_directory_path() / "bdg_cli_test";
        std::filesystem::create_directories(path);
        return path;
    }();
    return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
    auto path = scratch_dir() / name;
    std::ofstream file(path, std::ios::binary);
    REQUIRE(file.good());
    file << text;
    file.close();
    return path.string();
}

std::string read_back(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    return lines;
}

const char* kDuplicateNames = R"(Model {
  Name "broken"
  System {
    Block { BlockType Constant Name a }
    Block { BlockType Gain Name a }
  }
})";

} // namespace

TEST_CASE("help is available and exits cleanly") {
    RunResult top = run_tool({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("Block diagram model toolkit") != std::string::npos);

    RunResult sub = run_tool({"analyze", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("analysis") != std::string::npos);
}

TEST_CASE("usage mistakes exit with code 2") {
    CHECK(run_tool({}).code == 2);
    CHECK(run_tool({"frobnicate"}).code == 2);
    CHECK(run_tool({"analyze"}).code == 2);
    CHECK(run_tool({"validate"}).code == 2);
    CHECK(run_tool({"eval", fixture_path("minimal.bdm")}).code == 2);
    CHECK(run_tool({"eval", fixture_path("minimal.bdm"), "--steps", "-2"}).code == 2);
    CHECK(run_tool({"transform", "normalize", fixture_path("minimal.bdm")}).code == 2);
    CHECK(run_tool({"analyze", "clones", fixture_path("clone_pair.bdm"), "--min-size", "1"})
              .code == 2);
}

TEST_CASE("validate reports clean and broken models") {
    RunResult clean = run_tool({"validate", fixture_path("minimal.bdm")});
    CHECK(clean.code == 0);
    CHECK(clean.out == "ok\n");

    std::string broken = write_scratch("duplicate.bdm", kDuplicateNames);
    RunResult loose = run_tool({"validate", broken});
    CHECK(loose.code == 0);
    CHECK(loose.out == "a: block name repeats within its system\n");

    RunResult strict = run_tool({"validate", broken, "--strict"});
    CHECK(strict.code == 1);
    CHECK(strict.out == loose.out);
}

TEST_CASE("missing and malformed files exit with code 2") {
    RunResult missing = run_tool({"validate", scratch_dir().string() + "/absent.bdm"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("cannot read file") != std::string::npos);

    std::string mangled = write_scratch("mangled.bdm", "Model { Name \"x\" ");
    RunResult bad = run_tool({"graph", mangled});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("error:") != std::string::npos);
}

TEST_CASE("analyzing a structurally broken model exits with code 3") {
    std::string broken = write_scratch("duplicate2.bdm", kDuplicateNames);
    RunResult result = run_tool({"analyze", "cycles", broken});
    CHECK(result.code == 3);
    CHECK(result.err.find("error:") != std::string::npos);
}

TEST_CASE("graph prints both report formats") {
    RunResult json = run_tool({"graph", fixture_path("minimal.bdm")});
    REQUIRE(json.code == 0);
    Json report = Json::parse(json.out);
    CHECK(report["schema"] == 1);
    CHECK(report["analysis"] == "graph");
    CHECK(report["model"] == "minimal");
    REQUIRE(report["results"]["blocks"].size() == 2);
    CHECK(report["results"]["blocks"][0]["name"] == "one");
    CHECK(report["results"]["blocks"][0]["type"] == "Constant");
    REQUIRE(report["results"]["connections"].size() == 1);
    CHECK(report["results"]["connections"][0]["src"] == "one");
    CHECK(report["results"]["connections"][0]["dst_port"] == 1);

    RunResult text = run_tool({"graph", fixture_path("minimal.bdm"), "--format", "text"});
    REQUIRE(text.code == 0);
    CHECK(text.out ==
          "blocks:\n"
          "  one (Constant) [0,1]\n"
          "  out (Outport) [1,0]\n"
          "connections:\n"
          "  one:1 -> out:1\n");
}

TEST_CASE("reports can be routed to a file instead of stdout") {
    std::string out_path = (scratch_dir() / "graph.json").string();
    RunResult result = run_tool({"graph", fixture_path("minimal.bdm"), "-o", out_path});
    CHECK(result.code == 0);
    CHECK(result.out.empty());
    Json report = Json::parse(read_back(out_path));
    CHECK(report["analysis"] == "graph");
}

TEST_CASE("cycle analysis spots the feedback loop") {
    RunResult json = run_tool({"analyze", "cycles", fixture_path("feedback_loop.bdm")});
    REQUIRE(json.code == 0);
    Json report = Json::parse(json.out);
    CHECK(report["analysis"] == "cycles");
    REQUIRE(report["results"].size() == 1);
    CHECK(report["results"][0]["level"] == "");
    CHECK(report["results"][0]["cycles"][0]["blocks"] == Json::array({"acc", "g", "z"}));

    RunResult text =
        run_tool({"analyze", "cycles", fixture_path("feedback_loop.bdm"), "--format", "text"});
    CHECK(text.out == "cycle: acc -> g -> z -> acc\n");

    RunResult strict =
        run_tool({"analyze", "cycles", fixture_path("feedback_loop.bdm"), "--strict"});
    CHECK(strict.code == 1);

    RunResult clean =
        run_tool({"analyze", "cycles", fixture_path("minimal.bdm"), "--format", "text",
                  "--strict"});
    CHECK(clean.code == 0);
    CHECK(clean.out == "no cycles\n");
}

TEST_CASE("path analyses cover segments, parallel groups and counts") {
    RunResult paths = run_tool(
        {"analyze", "paths", fixture_path("parallel_module.bdm"), "--format", "text"});
    REQUIRE(paths.code == 0);
    CHECK(split_lines(paths.out) ==
          std::vector<std::string>{
              "path: S -> A -> E",
              "path: S -> B -> E",
              "path: S -> E",
              "path: S -> C -> D -> F",
              "path: G -> F",
              "path: G -> H -> E",
              "path: W -> M -> F",
          });

    RunResult parallel = run_tool({"analyze", "parallel", fixture_path("parallel_module.bdm")});
    REQUIRE(parallel.code == 0);
    Json report = Json::parse(parallel.out);
    REQUIRE(report["results"].size() == 1);
    CHECK(report["results"][0]["start"] == "S");
    CHECK(report["results"][0]["end"] == "E");
    CHECK(report["results"][0]["paths"].size() == 3);

    RunResult count =
        run_tool({"analyze", "count", fixture_path("parallel_module.bdm"), "--from", "S", "--to",
                  "E", "--type", "Gain"});
    REQUIRE(count.code == 0);
    Json counted = Json::parse(count.out);
    REQUIRE(counted["results"]["paths"].size() == 3);
    CHECK(counted["results"]["paths"][0]["count"] == 2);
    CHECK(counted["results"]["paths"][1]["count"] == 2);
    CHECK(counted["results"]["paths"][2]["count"] == 1);
    CHECK(counted["results"]["balanced"] == false);

    RunResult unbalanced =
        run_tool({"analyze", "count", fixture_path("parallel_module.bdm"), "--from", "S", "--to",
                  "E", "--type", "Gain", "--strict"});
    CHECK(unbalanced.code == 1);

    RunResult ghost =
        run_tool({"analyze", "count", fixture_path("parallel_module.bdm"), "--from", "nope",
                  "--to", "E", "--type", "Gain"});
    CHECK(ghost.code == 2);
    CHECK(ghost.err.find("no block named nope") != std::string::npos);
}

TEST_CASE("clone analysis lists groups or their absence") {
    RunResult json = run_tool({"analyze", "clones", fixture_path("clone_pair.bdm")});
    REQUIRE(json.code == 0);
    Json report = Json::parse(json.out);
    REQUIRE(report["results"].size() == 1);
    CHECK(report["results"][0]["instances"] ==
          Json::array({Json::array({"c1", "g1", "s1"}), Json::array({"c2", "g2", "s2"})}));

    RunResult none = run_tool({"analyze", "clones", fixture_path("clone_pair.bdm"), "--min-size",
                               "4", "--format", "text"});
    CHECK(none.code == 0);
    CHECK(none.out == "no clones\n");
}

TEST_CASE("the longest path analysis reads weights from user data") {
    RunResult json = run_tool(
        {"analyze", "longest-path", fixture_path("wcet_diamond.bdm"), "--key", "wcet"});
    REQUIRE(json.code == 0);
    Json report = Json::parse(json.out);
    CHECK(report["results"]["total"] == 9.0);
    CHECK(report["results"]["blocks"] == Json::array({"A", "C", "D"}));

    std::string bad = write_scratch("bad_weight.bdm", R"(Model {
      Name "m"
      System {
        Block { BlockType Gain Name g UserData "wcet=abc" }
      }
    })");
    RunResult broken = run_tool({"analyze", "longest-path", bad, "--key", "wcet"});
    CHECK(broken.code == 3);
    CHECK(broken.err.find("is not a number") != std::string::npos);
}

TEST_CASE("normalize writes a branch-free model and a change log") {
    std::string out_path = (scratch_dir() / "normalized.bdm").string();
    std::string log_path = (scratch_dir() / "normalized.log").string();
    RunResult result = run_tool({"transform", "normalize", fixture_path("branched_pair.bdm"),
                                 "-o", out_path, "--log", log_path});
    REQUIRE(result.code == 0);

    std::string text = read_back(out_path);
    CHECK(text.find("Branch {") == std::string::npos);
    CHECK(build_graph(parse_model(text)) ==
          build_graph(parse_model(testkit::read_fixture("branched_pair.bdm"))));

    std::vector<std::string> lines = split_lines(read_back(log_path));
    REQUIRE(lines.size() == 1);
    Json entry = Json::parse(lines[0]);
    CHECK(entry["kind"] == "rewired");
    CHECK(entry["subject"] == "u:1");
}

TEST_CASE("flatten writes the spliced model and its change log") {
    std::string out_path = (scratch_dir() / "flattened.bdm").string();
    std::string log_path = (scratch_dir() / "flattened.log").string();
    RunResult result = run_tool({"transform", "flatten", fixture_path("wrapped_gain.bdm"), "-o",
                                 out_path, "--log", log_path});
    REQUIRE(result.code == 0);

    Model flattened = parse_model(read_back(out_path));
    REQUIRE(flattened.root.blocks.size() == 3);
    CHECK(flattened.root.blocks[1].name == "wrap.inner_gain");

    std::vector<std::string> lines = split_lines(read_back(log_path));
    REQUIRE(lines.size() == 11);
    Json first = Json::parse(lines.front());
    CHECK(first["kind"] == "removed-block");
    CHECK(first["subject"] == "wrap");
}

TEST_CASE("substitute applies a rule file") {
    std::string out_path = (scratch_dir() / "substituted.bdm").string();
    RunResult result = run_tool({"transform", "substitute", fixture_path("branched_pair.bdm"),
                                 "--rules", fixture_path("gain.rules"), "-o", out_path});
    REQUIRE(result.code == 0);

    Model rewritten = parse_model(read_back(out_path));
    CHECK(rewritten.root.find_block("g1_prod") != nullptr);
    CHECK(rewritten.root.find_block("g1_k") != nullptr);
    CHECK(rewritten.root.find_block("g1") == nullptr);
}

TEST_CASE("break-cycles writes the trimmed model and names the cut edge") {
    std::string out_path = (scratch_dir() / "broken.bdm").string();
    RunResult result = run_tool(
        {"transform", "break-cycles", fixture_path("feedback_loop.bdm"), "-o", out_path});
    REQUIRE(result.code == 0);
    CHECK(result.out == "removed: g:1 -> z:1\n");

    ModelGraph trimmed = build_graph(parse_model(read_back(out_path)));
    CHECK(trimmed.edge_count() == 4);
}

TEST_CASE("eval runs a model from the command line") {
    RunResult json = run_tool({"eval", fixture_path("gain_chain.bdm"), "--steps", "3", "--inputs",
                               "u=1,2,3"});
    REQUIRE(json.code == 0);
    Json report = Json::parse(json.out);
    CHECK(report["analysis"] == "eval");
    CHECK(report["results"]["steps"] == 3);
    CHECK(report["results"]["values"]["y"] == Json::array({-3.0, -6.0, -9.0}));

    RunResult text = run_tool({"eval", fixture_path("gain_chain.bdm"), "--steps", "2", "--inputs",
                               "u=1,2", "--format", "text"});
    REQUIRE(text.code == 0);
    CHECK(text.out == "steps: 2\ny: -3 -6\n");

    RunResult bad_stream = run_tool(
        {"eval", fixture_path("gain_chain.bdm"), "--steps", "1", "--inputs", "u"});
    CHECK(bad_stream.code == 2);
    CHECK(bad_stream.err.find("bad input stream") != std::string::npos);

    std::string unsupported = write_scratch("unsupported.bdm", R"(Model {
      Name "m"
      System { Block { BlockType Filter Name f } }
    })");
    RunResult filter = run_tool({"eval", unsupported, "--steps", "1"});
    CHECK(filter.code == 3);
    CHECK(filter.err.find("unsupported type") != std::string::npos);
}
