#include <stdexcept>

#include "doctest.h"

#include "bdg/errors.hpp"
#include "bdg/graph.hpp"
#include "bdg/parser.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace bdg;

TEST_CASE("build_graph keeps document order for nodes and edges") {
    Model model = testkit::load_model("branched_pair.bdm");
    ModelGraph graph = build_graph(model);
    REQUIRE(graph.node_count() == 5);
    CHECK(graph.node(0).name == "u");
    CHECK(graph.node(1).name == "g1");
    CHECK(graph.node(2).name == "g2");
    CHECK(graph.node(3).name == "y1");
    CHECK(graph.node(4).name == "y2");

    // The fan-out line explodes into one edge per destination, in
    // destination order, before the later lines' edges.
    REQUIRE(graph.edge_count() == 4);
    CHECK(graph.edge(0) == Edge{0, 1, 1, 1, {}});
    CHECK(graph.edge(1) == Edge{0, 1, 2, 1, {}});
    CHECK(graph.edge(2) == Edge{1, 1, 3, 1, {}});
    CHECK(graph.edge(3) == Edge{2, 1, 4, 1, {}});

    CHECK(graph.out_edges(0) == std::vector<int>{0, 1});
    CHECK(graph.in_edges(1) == std::vector<int>{0});
    CHECK(graph.out_edges(3).empty());
}

TEST_CASE("line parameters are copied onto every exploded edge") {
    Model model = parse_model(R"(Model {
      Name "lp"
      System {
        Block { BlockType Inport Name u }
        Block { BlockType Gain Name a }
        Block { BlockType Gain Name b }
        Line { SrcBlock u SrcPort 1 Label "feed" DstBlock a DstPort 1
               Branch { DstBlock b DstPort 1 } }
      }
    })");
    ModelGraph graph = build_graph(model);
    REQUIRE(graph.edge_count() == 2);
    CHECK(*graph.edge(0).parameters.get("Label") == "feed");
    CHECK(*graph.edge(1).parameters.get("Label") == "feed");
}

TEST_CASE("subsystems nest their own graphs") {
    Model model = testkit::load_model("wrapped_gain.bdm");
    ModelGraph graph = build_graph(model);
    auto wrap = graph.find_node("wrap");
    REQUIRE(wrap.has_value());
    const NodeRecord& record = graph.node(*wrap);
    CHECK(record.is_subsystem);
    REQUIRE(record.nested != nullptr);
    CHECK(record.nested->find_node("inner_gain").has_value());
}

TEST_CASE("find_node and resolve address nodes by name and path") {
    Model model = testkit::load_model("wrapped_gain.bdm");
    ModelGraph graph = build_graph(model);
    CHECK(graph.find_node("missing") == std::nullopt);

    auto hit = graph.resolve("wrap/inner_gain");
    REQUIRE(hit.has_value());
    CHECK(hit->graph->node(hit->node).name == "inner_gain");
    CHECK(hit->graph->node(hit->node).block_type == "Gain");

    auto top = graph.resolve("src");
    REQUIRE(top.has_value());
    CHECK(top->graph == &graph);

    CHECK(graph.resolve("wrap/nope") == std::nullopt);
    CHECK(graph.resolve("src/too_deep") == std::nullopt);
    CHECK(graph.resolve("") == std::nullopt);
}

TEST_CASE("build_graph rejects invalid models") {
    Model model;
    model.name = "bad";
    Block a;
    a.name = "a";
    a.type = "Gain";
    a.in_ports = 1;
    a.out_ports = 1;
    model.root.blocks = {a};
    model.root.connections.push_back({{"a", 1}, {{"ghost", 1}}, {}});
    CHECK_THROWS_AS((void)build_graph(model), InvalidModelError);
}

TEST_CASE("from_parts validates edge endpoints and ports") {
    NodeRecord gain;
    gain.name = "g";
    gain.block_type = "Gain";
    gain.in_ports = 1;
    gain.out_ports = 1;

    CHECK_THROWS_AS((void)ModelGraph::from_parts({gain}, {Edge{0, 1, 3, 1, {}}}),
                    InconsistentGraphError);
    CHECK_THROWS_AS((void)ModelGraph::from_parts({gain}, {Edge{0, 2, 0, 1, {}}}),
                    InconsistentGraphError);
    CHECK_THROWS_AS((void)ModelGraph::from_parts({gain}, {Edge{0, 1, 0, 0, {}}}),
                    InconsistentGraphError);
    CHECK_NOTHROW((void)ModelGraph::from_parts({gain}, {Edge{0, 1, 0, 1, {}}}));
}

TEST_CASE("verify_consistent audits hand-built adjacency") {
    NodeRecord gain;
    gain.name = "g";
    gain.block_type = "Gain";
    gain.in_ports = 1;
    gain.out_ports = 1;

    ModelGraph good = ModelGraph::from_raw_parts({gain}, {Edge{0, 1, 0, 1, {}}}, {{0}}, {{0}},
                                                 false);
    CHECK_NOTHROW(good.verify_consistent());

    ModelGraph missing = ModelGraph::from_raw_parts({gain}, {Edge{0, 1, 0, 1, {}}}, {{}}, {{0}},
                                                    false);
    CHECK_THROWS_AS(missing.verify_consistent(), InconsistentGraphError);

    ModelGraph doubled = ModelGraph::from_raw_parts({gain}, {Edge{0, 1, 0, 1, {}}}, {{0, 0}},
                                                    {{0}}, false);
    CHECK_THROWS_AS(doubled.verify_consistent(), InconsistentGraphError);
}

TEST_CASE("node and edge accessors reject bad indices") {
    ModelGraph graph = build_graph(testkit::load_model("minimal.bdm"));
    CHECK_THROWS_AS((void)graph.node(99), std::out_of_range);
    CHECK_THROWS_AS((void)graph.edge(-1), std::out_of_range);
    CHECK_THROWS_AS((void)graph.out_edges(99), std::out_of_range);
    CHECK_THROWS_AS((void)predecessors(graph, 99), std::out_of_range);
}

TEST_CASE("predecessors and successors follow edge order") {
    Model model = testkit::load_model("parallel_module.bdm");
    ModelGraph graph = build_graph(model);
    int e = *graph.find_node("E");
    auto preds = predecessors(graph, e);
    REQUIRE(preds.size() == 4);
    CHECK(graph.node(preds[0].node).name == "S");
    for (std::size_t i = 1; i < preds.size(); ++i) {
        CHECK(preds[i - 1].edge < preds[i].edge);
    }
    int s = *graph.find_node("S");
    auto succ = successors(graph, s);
    REQUIRE(succ.size() == 4);
    CHECK(graph.node(succ[0].node).name == "A");
}

TEST_CASE("fixtures convert to graphs and back to identical models") {
    for (const char* name : {"minimal.bdm", "branched_pair.bdm", "wrapped_gain.bdm",
                             "gain_chain.bdm", "feedback_loop.bdm", "parallel_module.bdm",
                             "wcet_diamond.bdm", "clone_pair.bdm"}) {
        CAPTURE(name);
        Model model = testkit::load_model(name);
        ModelGraph graph = build_graph(model);
        CHECK(to_model(graph, model) == model);
    }
}

TEST_CASE("generated models keep their graph across a model round-trip") {
    for (unsigned seed = 200; seed < 260; ++seed) {
        CAPTURE(seed);
        testkit::Rng rng(seed);
        Model model = testkit::gen_model(rng);
        ModelGraph graph = build_graph(model);
        Model rebuilt = to_model(graph, model);
        REQUIRE(validate(rebuilt).empty());
        REQUIRE(build_graph(rebuilt) == graph);
    }
}

TEST_CASE("graph equality ignores the normalized flag") {
    ModelGraph plain = build_graph(testkit::load_model("minimal.bdm"));
    ModelGraph tagged = ModelGraph::from_parts(plain.nodes(), plain.edges(), true);
    CHECK(plain == tagged);
    CHECK(tagged.connections_normalized());
    CHECK_FALSE(plain.connections_normalized());
}
