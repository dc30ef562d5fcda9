#include <string>

#include "doctest.h"

#include "bdg/errors.hpp"
#include "bdg/parser.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace bdg;

TEST_CASE("minimal fixture parses into the expected model") {
    Model model = testkit::load_model("minimal.bdm");
    CHECK(model.name == "minimal");
    REQUIRE(model.root.blocks.size() == 2);
    CHECK(model.root.blocks[0].type == "Constant");
    CHECK(model.root.blocks[0].name == "one");
    CHECK(*model.root.blocks[0].parameters.get("Value") == "1");
    CHECK(model.root.blocks[1].type == "Outport");
    REQUIRE(model.root.connections.size() == 1);
    CHECK(model.root.connections[0].src == PortRef{"one", 1});
    REQUIRE(model.root.connections[0].dsts.size() == 1);
    CHECK(model.root.connections[0].dsts[0] == PortRef{"out", 1});
}

TEST_CASE("branches parse into ordered destination lists") {
    Model model = testkit::load_model("branched_pair.bdm");
    REQUIRE(model.root.connections.size() == 3);
    const RawConnection& fan = model.root.connections[0];
    CHECK(fan.src == PortRef{"u", 1});
    REQUIRE(fan.dsts.size() == 2);
    CHECK(fan.dsts[0] == PortRef{"g1", 1});
    CHECK(fan.dsts[1] == PortRef{"g2", 1});
}

TEST_CASE("nested branches flatten in document order") {
    Model model = parse_model(R"(Model {
      Name "fan"
      System {
        Block { BlockType Inport Name "u" }
        Block { BlockType Sum Name "s" Ports "[4, 1]" }
        Line {
          SrcBlock "u"
          SrcPort 1
          DstBlock "s"
          DstPort 1
          Branch {
            DstBlock "s"
            DstPort 2
            Branch {
              DstBlock "s"
              DstPort 3
            }
            DstBlock "s"
            DstPort 4
          }
        }
      }
    })");
    REQUIRE(model.root.connections.size() == 1);
    const auto& dsts = model.root.connections[0].dsts;
    REQUIRE(dsts.size() == 4);
    for (int p = 1; p <= 4; ++p) {
        CHECK(dsts[static_cast<std::size_t>(p - 1)] == PortRef{"s", p});
    }
}

TEST_CASE("quoting, escapes, and raw newlines survive parsing") {
    Model model = parse_model("Model {\n"
                              "  Name \"esc\"\n"
                              "  System {\n"
                              "    Block {\n"
                              "      BlockType \"Weird Type\"\n"
                              "      Name \"a\\\"b\"\n"
                              "      Note \"line1\nline2\"\n"
                              "      Path \"C:\\\\tmp\"\n"
                              "    }\n"
                              "  }\n"
                              "}\n");
    REQUIRE(model.root.blocks.size() == 1);
    const Block& block = model.root.blocks[0];
    CHECK(block.type == "Weird Type");
    CHECK(block.name == "a\"b");
    CHECK(*block.parameters.get("Note") == "line1\nline2");
    CHECK(*block.parameters.get("Path") == "C:\\tmp");

    std::string text = serialize_model(model);
    CHECK(parse_model(text) == model);
}

TEST_CASE("bare values work for names, types, and numbers") {
    Model model = parse_model(R"(Model {
      Name bare_model
      System {
        Block { BlockType Constant Name src }
        Block { BlockType Terminator Name dump }
        Line { SrcBlock src SrcPort 1 DstBlock dump DstPort 1 }
      }
    })");
    CHECK(model.name == "bare_model");
    CHECK(model.root.blocks[0].name == "src");
    CHECK(model.root.connections[0].src.port == 1);
}

TEST_CASE("Virtual off and port overrides parse and re-serialize") {
    Model model = parse_model(R"(Model {
      Name "flags"
      System {
        Block {
          BlockType SubSystem
          Name "atom"
          Virtual off
          System {
            Block { BlockType Gain Name "g" }
          }
        }
        Block { BlockType Sum Name "wide" Ports "[3, 1]" }
      }
    })");
    CHECK_FALSE(model.root.blocks[0].virtual_flag);
    CHECK(model.root.blocks[1].in_ports == 3);
    CHECK(model.root.blocks[1].out_ports == 1);
    CHECK(parse_model(serialize_model(model)) == model);
}

TEST_CASE("line parameters ride along on the connection") {
    Model model = parse_model(R"(Model {
      Name "lp"
      System {
        Block { BlockType Constant Name a }
        Block { BlockType Terminator Name b }
        Line { SrcBlock a SrcPort 1 Label "main feed" DstBlock b DstPort 1 }
      }
    })");
    CHECK(*model.root.connections[0].parameters.get("Label") == "main feed");
    CHECK(parse_model(serialize_model(model)) == model);
}

TEST_CASE("serializer emits the canonical layout") {
    Model model;
    model.name = "tiny";
    model.source_meta.set("Version", "9.1");
    Block src;
    src.name = "src";
    src.type = "Constant";
    src.out_ports = 1;
    src.parameters.set("Value", "2.5");
    Block add;
    add.name = "add";
    add.type = "Sum";
    add.in_ports = 3;
    add.out_ports = 1;
    add.virtual_flag = false;
    add.parameters.set("Note", "a\"b\\c");
    model.root.blocks = {src, add};
    model.root.connections.push_back({{"src", 1}, {{"add", 1}, {"add", 2}}, {{"Label", "main"}}});

    std::string expected = "Model {\n"
                           "  Name \"tiny\"\n"
                           "  Version \"9.1\"\n"
                           "  System {\n"
                           "    Block {\n"
                           "      BlockType Constant\n"
                           "      Name \"src\"\n"
                           "      Value \"2.5\"\n"
                           "    }\n"
                           "    Block {\n"
                           "      BlockType Sum\n"
                           "      Name \"add\"\n"
                           "      Ports \"[3, 1]\"\n"
                           "      Virtual off\n"
                           "      Note \"a\\\"b\\\\c\"\n"
                           "    }\n"
                           "    Line {\n"
                           "      SrcBlock \"src\"\n"
                           "      SrcPort 1\n"
                           "      Label \"main\"\n"
                           "      DstBlock \"add\"\n"
                           "      DstPort 1\n"
                           "      Branch {\n"
                           "        DstBlock \"add\"\n"
                           "        DstPort 2\n"
                           "      }\n"
                           "    }\n"
                           "  }\n"
                           "}\n";
    CHECK(serialize_model(model) == expected);
}

TEST_CASE("serializing an invalid model fails") {
    Model model;
    model.name = "bad";
    Block a;
    a.name = "a";
    a.type = "Gain";
    a.in_ports = 1;
    a.out_ports = 1;
    model.root.blocks = {a, a};
    CHECK_THROWS_AS((void)serialize_model(model), InvalidModelError);
}

TEST_CASE("duplicate parameter keys parse but fail validation") {
    Model model = parse_model(R"(Model {
      Name "dup"
      System {
        Block { BlockType Constant Name c Tag "1" Tag "2" }
      }
    })");
    REQUIRE(model.root.blocks[0].parameters.size() == 2);
    auto violations = validate(model);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].message.find("repeats") != std::string::npos);
}

namespace {

void expect_parse_error(const std::string& text, const std::string& fragment) {
    CAPTURE(text);
    CAPTURE(fragment);
    try {
        (void)parse_model(text);
        FAIL_CHECK("expected ParseError for: " << fragment);
    } catch (const ParseError& err) {
        CHECK(std::string(err.what()).find(fragment) != std::string::npos);
    }
}

} // namespace

TEST_CASE("malformed text is rejected with a clear reason") {
    expect_parse_error("", "text holds no Model section");
    expect_parse_error("Model {", "unterminated section");
    expect_parse_error("}", "unmatched \"}\"");
    expect_parse_error("Model { Name \"x\" }", "Model is missing its System");
    expect_parse_error("Model { System { } }", "Model is missing Name");
    expect_parse_error("Model { Name \"x\" System { } System { } }",
                       "Model contains more than one System");
    expect_parse_error("Model { Name \"x\" System { Foo \"1\" } }",
                       "System sections hold only Block and Line sections");
    expect_parse_error("Foo \"1\"", "expected a Model section");
    expect_parse_error("Model { Name \"x\" System { Block { Name \"a\" } } }",
                       "Block is missing BlockType");
    expect_parse_error("Model { Name \"x\" System { Block { BlockType Gain } } }",
                       "Block is missing Name");
    expect_parse_error("Model { Name \"x\" System { Block { BlockType Gain Name \"a\" "
                       "Ports \"[2\" } } }",
                       "malformed Ports value");
    expect_parse_error("Model { Name \"x\" System { Block { BlockType Gain Name \"a\" "
                       "Virtual maybe } } }",
                       "Virtual must be on or off");
    expect_parse_error("Model { Name \"x\" System { Line { SrcPort 1 DstBlock \"a\" "
                       "DstPort 1 } } }",
                       "Line is missing SrcBlock");
    expect_parse_error("Model { Name \"x\" System { Line { SrcBlock \"a\" DstBlock \"a\" "
                       "DstPort 1 } } }",
                       "Line is missing SrcPort");
    expect_parse_error("Model { Name \"x\" System { Line { SrcBlock \"a\" SrcPort 1 } } }",
                       "Line has no destinations");
    expect_parse_error("Model { Name \"x\" System { Line { SrcBlock \"a\" SrcPort abc "
                       "DstBlock \"a\" DstPort 1 } } }",
                       "is not an integer");
    expect_parse_error("Model { Name \"x\" System { Line { SrcBlock \"a\" SrcPort 1 "
                       "DstPort 1 } } }",
                       "DstPort has no preceding DstBlock");
    expect_parse_error("Model { Name \"x\" System { Line { SrcBlock \"a\" SrcPort 1 "
                       "DstBlock \"b\" } } }",
                       "DstBlock has no DstPort");
    expect_parse_error("Model { Name \"x\" System { Line { SrcBlock \"a\" SrcPort 1 "
                       "DstBlock \"b\" DstPort 1 Branch { } } } }",
                       "Branch has no destinations");
    expect_parse_error("Model { Name \"x\" \"quoted\" \"pair\" System { } }",
                       "expected a key, found a quoted string");
}

TEST_CASE("parse errors carry source positions") {
    try {
        (void)parse_model("Model {\n  Name \"abc");
        FAIL_CHECK("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.span().line == 2);
        CHECK(err.span().column == 12);
        CHECK(std::string(err.what()).find("unterminated string") != std::string::npos);
        CHECK(std::string(err.what()).find("line 2") != std::string::npos);
    }
    try {
        (void)parse_model("Model {\n  Name \"a\\qb\"\n  System { }\n}");
        FAIL_CHECK("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(std::string(err.what()).find("invalid escape sequence") != std::string::npos);
        CHECK(err.span().line == 2);
    }
}

TEST_CASE("comments and blank lines are ignored") {
    Model model = parse_model("# heading\n"
                              "Model { # trailing\n"
                              "  Name \"c\"\n"
                              "\n"
                              "  # a full-line note\n"
                              "  System { }\n"
                              "}\n"
                              "# footer\n");
    CHECK(model.name == "c");
    CHECK(model.root.blocks.empty());
}

TEST_CASE("every fixture round-trips through serialize and parse") {
    for (const char* name : {"minimal.bdm", "branched_pair.bdm", "wrapped_gain.bdm",
                             "gain_chain.bdm", "feedback_loop.bdm", "parallel_module.bdm",
                             "wcet_diamond.bdm", "clone_pair.bdm"}) {
        CAPTURE(name);
        Model model = testkit::load_model(name);
        CHECK(parse_model(serialize_model(model)) == model);
    }
}

TEST_CASE("generated models round-trip exactly") {
    for (unsigned seed = 100; seed < 150; ++seed) {
        CAPTURE(seed);
        testkit::Rng rng(seed);
        Model model = testkit::gen_model(rng);
        Model reparsed = parse_model(serialize_model(model));
        REQUIRE(reparsed == model);
    }
}
