#include <algorithm>

#include "doctest.h"

#include "bdg/model.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace bdg;

TEST_CASE("default port counts cover the built-in vocabulary") {
    CHECK(default_port_counts("Inport") == std::pair<int, int>{0, 1});
    CHECK(default_port_counts("Outport") == std::pair<int, int>{1, 0});
    CHECK(default_port_counts("Constant") == std::pair<int, int>{0, 1});
    CHECK(default_port_counts("Terminator") == std::pair<int, int>{1, 0});
    CHECK(default_port_counts("Gain") == std::pair<int, int>{1, 1});
    CHECK(default_port_counts("UnitDelay") == std::pair<int, int>{1, 1});
    CHECK(default_port_counts("Sum") == std::pair<int, int>{2, 1});
    CHECK(default_port_counts("Product") == std::pair<int, int>{2, 1});
    CHECK(default_port_counts("SomethingNew") == std::pair<int, int>{1, 1});
}

TEST_CASE("is_identifier accepts C-style names only") {
    CHECK(is_identifier("abc"));
    CHECK(is_identifier("_a1"));
    CHECK(is_identifier("A_B_9"));
    CHECK_FALSE(is_identifier(""));
    CHECK_FALSE(is_identifier("9a"));
    CHECK_FALSE(is_identifier("a b"));
    CHECK_FALSE(is_identifier("a-b"));
    CHECK_FALSE(is_identifier("a.b"));
}

TEST_CASE("parse_ports_value handles the documented shapes") {
    auto both = parse_ports_value("[2, 1]");
    REQUIRE(both.has_value());
    CHECK(both->first == 2);
    REQUIRE(both->second.has_value());
    CHECK(*both->second == 1);

    auto bare = parse_ports_value("3");
    REQUIRE(bare.has_value());
    CHECK(bare->first == 3);
    CHECK_FALSE(bare->second.has_value());

    auto unbracketed = parse_ports_value(" 2 , 4 ");
    REQUIRE(unbracketed.has_value());
    CHECK(unbracketed->first == 2);
    CHECK(*unbracketed->second == 4);

    CHECK_FALSE(parse_ports_value("").has_value());
    CHECK_FALSE(parse_ports_value("[2").has_value());
    CHECK_FALSE(parse_ports_value("2]").has_value());
    CHECK_FALSE(parse_ports_value("[1, 2, 3]").has_value());
    CHECK_FALSE(parse_ports_value("[]").has_value());
    CHECK_FALSE(parse_ports_value("x").has_value());
    CHECK_FALSE(parse_ports_value("[a, b]").has_value());
    CHECK_FALSE(parse_ports_value("2,").has_value());
}

TEST_CASE("format_ports_value renders the canonical form") {
    CHECK(format_ports_value(2, 1) == "[2, 1]");
    CHECK(format_ports_value(0, 0) == "[0, 0]");
}

TEST_CASE("OrderedParams keeps insertion order and overwrites in place") {
    OrderedParams params;
    params.set("b", "1");
    params.set("a", "2");
    params.set("b", "3");
    REQUIRE(params.size() == 2);
    CHECK(params.entries()[0] == OrderedParams::Entry{"b", "3"});
    CHECK(params.entries()[1] == OrderedParams::Entry{"a", "2"});
    CHECK(*params.get("a") == "2");
    CHECK(params.get("missing") == nullptr);
    CHECK(params.contains("b"));

    params.append_unchecked("a", "4");
    CHECK(params.size() == 3);
    CHECK(*params.get("a") == "2");

    params.erase("b");
    CHECK_FALSE(params.contains("b"));
}

TEST_CASE("fixture models validate cleanly") {
    for (const char* name : {"minimal.bdm", "branched_pair.bdm", "wrapped_gain.bdm",
                             "gain_chain.bdm", "feedback_loop.bdm", "parallel_module.bdm",
                             "wcet_diamond.bdm", "clone_pair.bdm"}) {
        CAPTURE(name);
        Model model = testkit::load_model(name);
        CHECK(validate(model).empty());
    }
}

namespace {

Model tiny_valid() {
    Model model;
    model.name = "tiny";
    Block a;
    a.name = "a";
    a.type = "Constant";
    a.out_ports = 1;
    Block b;
    b.name = "b";
    b.type = "Terminator";
    b.in_ports = 1;
    model.root.blocks = {a, b};
    model.root.connections.push_back({{"a", 1}, {{"b", 1}}, {}});
    return model;
}

bool mentions(const std::vector<Violation>& violations, const std::string& path,
              const std::string& fragment) {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
        return v.path == path && v.message.find(fragment) != std::string::npos;
    });
}

} // namespace

TEST_CASE("validate reports specific problems with block paths") {
    SUBCASE("duplicate names") {
        Model model = tiny_valid();
        model.root.blocks[1].name = "a";
        model.root.blocks[1].in_ports = 1;
        model.root.connections.clear();
        auto v = validate(model);
        CHECK(mentions(v, "a", "repeats within its system"));
    }
    SUBCASE("missing destination block") {
        Model model = tiny_valid();
        model.root.connections.push_back({{"a", 1}, {{"ghost", 1}}, {}});
        auto v = validate(model);
        CHECK(mentions(v, "ghost", "destination block does not exist"));
    }
    SUBCASE("source port out of range") {
        Model model = tiny_valid();
        model.root.connections.push_back({{"a", 7}, {{"b", 1}}, {}});
        auto v = validate(model);
        CHECK(mentions(v, "a", "source port 7 outside 1..1"));
    }
    SUBCASE("Inport shape is fixed") {
        Model model = tiny_valid();
        Block inport;
        inport.name = "u";
        inport.type = "Inport";
        inport.in_ports = 1;
        inport.out_ports = 1;
        model.root.blocks.push_back(inport);
        auto v = validate(model);
        CHECK(mentions(v, "u", "Inport must have no inputs and one output"));
    }
    SUBCASE("SubSystem needs exactly one nested system") {
        Model model = tiny_valid();
        Block sub;
        sub.name = "sub";
        sub.type = "SubSystem";
        model.root.blocks.push_back(sub);
        auto v = validate(model);
        CHECK(mentions(v, "sub", "exactly one nested system"));
    }
    SUBCASE("reserved parameter keys are rejected") {
        Model model = tiny_valid();
        model.root.blocks[0].parameters.append_unchecked("Name", "zzz");
        auto v = validate(model);
        CHECK(mentions(v, "a", "reserved"));
    }
    SUBCASE("nested violations carry slash paths") {
        Model model = tiny_valid();
        Block sub;
        sub.name = "sub";
        sub.type = "SubSystem";
        System inner;
        Block x;
        x.name = "x";
        x.type = "Gain";
        x.in_ports = 1;
        x.out_ports = 1;
        inner.blocks = {x, x};
        sub.nested.push_back(inner);
        model.root.blocks.push_back(sub);
        auto v = validate(model);
        CHECK(mentions(v, "sub/x", "repeats within its system"));
    }
    SUBCASE("subsystem port counts must match boundary blocks") {
        Model model = tiny_valid();
        Block sub;
        sub.name = "sub";
        sub.type = "SubSystem";
        sub.in_ports = 2;
        sub.nested.push_back(System{});
        model.root.blocks.push_back(sub);
        auto v = validate(model);
        CHECK(mentions(v, "sub", "does not match 0 nested Inport blocks"));
    }
    SUBCASE("metadata keys must be identifiers") {
        Model model = tiny_valid();
        model.source_meta.append_unchecked("bad key!", "v");
        auto v = validate(model);
        CHECK(mentions(v, "", "not an identifier"));
    }
    SUBCASE("empty destination list") {
        Model model = tiny_valid();
        model.root.connections.push_back({{"a", 1}, {}, {}});
        auto v = validate(model);
        CHECK(mentions(v, "a", "no destinations"));
    }
}

TEST_CASE("generated models validate; one mutation always breaks them") {
    for (unsigned seed = 1; seed <= 60; ++seed) {
        CAPTURE(seed);
        testkit::Rng rng(seed);
        Model model = testkit::gen_model(rng);
        REQUIRE(validate(model).empty());
        std::string what = testkit::mutate_model(model, rng);
        CAPTURE(what);
        CHECK_FALSE(validate(model).empty());
    }
}
