#include <doctest.h>

#include <random>

#include "khsim/netlist.hpp"
#include "khsim/presets.hpp"

using namespace khsim;

namespace {

const char* kFig2 =
    "C C1 1 0 1.01p\n"
    "L L1 1 0 1n\n"
    "R R12 1 2 4k\n"
    "L L23 2 3 1n\n"
    "C C3 3 0 1.01p\n"
    "L L3 3 0 1n\n";

}  // namespace

TEST_CASE("parse_value applies engineering suffixes") {
    CHECK(parse_value("1.01p") == 1.01e-12);
    CHECK(parse_value("1") == 1.0);
    CHECK(parse_value("4k") == 4.0e3);
    CHECK(parse_value("15.71M") == 15.71e6);
    CHECK(parse_value("20.26f") == 20.26e-15);
    CHECK(parse_value("1n") == 1e-9);
    CHECK(parse_value("2.5u") == 2.5e-6);
    CHECK(parse_value("3m") == 3e-3);
    CHECK(parse_value("5G") == 5e9);
    CHECK(parse_value("1.5e-3") == 1.5e-3);
}

TEST_CASE("parse_value rejects bad input") {
    CHECK_THROWS_AS((void)parse_value("abc"), InputError);
    CHECK_THROWS_AS((void)parse_value("1x"), InputError);
    CHECK_THROWS_AS((void)parse_value("0"), InputError);
    CHECK_THROWS_AS((void)parse_value("-1k"), InputError);
    CHECK_THROWS_AS((void)parse_value(""), InputError);
    CHECK_THROWS_AS((void)parse_value("1.2.3"), InputError);
    CHECK_THROWS_AS((void)parse_value("inf"), InputError);
}

TEST_CASE("suffix k is multiplicative") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.001, 999.0);
    for (int i = 0; i < 200; ++i) {
        const std::string x = format_double(dist(rng));
        CHECK(parse_value(x + "k") == 1000.0 * parse_value(x));
    }
}

TEST_CASE("a single element leaves its node dangling") {
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 0 1.01p"), NetlistError);
}

TEST_CASE("single resonator netlist") {
    const auto spec = parse_netlist("C C1 1 0 1.01p\nL L1 1 0 1n");
    CHECK(spec.node_count == 1);
    REQUIRE(spec.elements.size() == 2);
    CHECK(spec.elements[0].kind == ElementKind::capacitor);
    CHECK(spec.elements[0].value == 1.01e-12);
    CHECK(spec.elements[1].kind == ElementKind::inductor);
    CHECK(spec.elements[1].value == 1e-9);
}

TEST_CASE("comment-only netlist is empty") {
    CHECK_THROWS_WITH_AS((void)parse_netlist("# only comments\n"), "empty netlist", NetlistError);
}

TEST_CASE("pathological netlist has three nodes and six elements") {
    const auto spec = parse_netlist(kFig2);
    CHECK(spec.node_count == 3);
    CHECK(spec.elements.size() == 6);
}

TEST_CASE("SPICE-style tokens and CRLF") {
    const auto spec = parse_netlist("C1 1 0 1p\r\nL1 1 0 1n # inline comment\r\n\r\nRload 1 0 50\r\n");
    REQUIRE(spec.elements.size() == 3);
    CHECK(spec.elements[0].name == "C1");
    CHECK(spec.elements[2].kind == ElementKind::resistor);
    CHECK(spec.elements[2].name == "Rload");
}

TEST_CASE("nodes are renumbered contiguously") {
    const auto spec = parse_netlist("C Ca 7 0 1p\nL La 7 0 1n\nR Rc 7 12 1k\nC Cb 12 0 1p\nL Lb 12 0 1n\n");
    CHECK(spec.node_count == 2);
    CHECK(spec.node_labels == std::vector<std::string>{"7", "12"});
    CHECK(spec.elements[2].node_a == 1);
    CHECK(spec.elements[2].node_b == 2);
}

TEST_CASE("netlist errors carry line numbers") {
    try {
        (void)parse_netlist("C C1 1 0 1p\nL L1 1 0 1n\nX X1 1 0 1\n");
        FAIL("expected an error");
    } catch (const NetlistError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 0 1p\nL C1 1 0 1n\n"), NetlistError);    // duplicate
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 0 1p\nL L1 1 2 1n\n"), NetlistError);    // dangling 2
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 1 1p\n"), NetlistError);                 // same node
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 2 1p\nL L1 1 2 1n\n"), NetlistError);    // no ground
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 -1 1p\n"), NetlistError);
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 0\n"), NetlistError);
    CHECK_THROWS_AS((void)parse_netlist("C C1 1 0 0\nL L1 1 0 1n\n"), NetlistError);
}

TEST_CASE("render round-trips") {
    // a lone capacitor would leave node 1 dangling
    const auto spec = parse_netlist("C C1 1 0 1.01p\nL L1 1 0 1n");
    CHECK(parse_netlist(render_netlist(spec)) == spec);
    for (const auto& name : preset_names()) {
        const auto s = parse_netlist(preset(name).netlist);
        CHECK(parse_netlist(render_netlist(s)) == s);
    }
}

TEST_CASE("render keeps auxiliary elements") {
    auto spec = parse_netlist(kFig2);
    spec.elements.push_back({ElementKind::capacitor, "Caux2", 2, 3, 1.01e-15});
    const std::string text = render_netlist(spec);
    CHECK(text.find("C Caux2 2 3 1.01e-15") != std::string::npos);
    CHECK(parse_netlist(text) == spec);
    CHECK(spec.elements.back().is_auxiliary());
}

TEST_CASE("random specs round-trip") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> value(1e-16, 1e7);
    std::uniform_int_distribution<int> node(0, 4);
    const char kinds[] = {'C', 'L', 'R'};
    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        for (int n = 1; n <= 4; ++n) {
            text += "C Cg" + std::to_string(n) + " " + std::to_string(n) + " 0 " + format_double(value(rng)) + "\n";
            text += "L Lg" + std::to_string(n) + " " + std::to_string(n) + " 0 " + format_double(value(rng)) + "\n";
        }
        for (int e = 0; e < 5; ++e) {
            const int a = node(rng);
            int b = node(rng);
            if (a == b) {
                b = (a + 1) % 5;
            }
            text += std::string(1, kinds[e % 3]) + " X" + std::to_string(e) + " " + std::to_string(a) + " " +
                    std::to_string(b) + " " + format_double(value(rng)) + "\n";
        }
        const auto spec = parse_netlist(text);
        CHECK(parse_netlist(render_netlist(spec)) == spec);
        CHECK(parse_netlist(text) == spec);  // deterministic
    }
}
