#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <skt/curves.hpp>

#include <fstream>
#include <sstream>

using namespace skt;

namespace {
TriangulatedSurface fixture(const std::string& name) {
    std::ifstream in(std::string(SKT_FIXTURES) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return TriangulatedSurface::parse(os.str());
}

StatedDiagram torus_10(const TriangulatedSurface& s) {
    StatedDiagram d;
    Component c;
    c.name = "a";
    c.closed = true;
    c.steps = {Step{s.tri_index_of("T1"), 1, 2}, Step{s.tri_index_of("T2"), 2, 1}};
    d.comps.push_back(c);
    return d;
}
} // namespace

TEST_CASE("diagram validation") {
    auto s = fixture("punctured_torus.surf");
    StatedDiagram d = torus_10(s);
    CHECK_NOTHROW(validate_diagram(d, s));

    StatedDiagram uturn = d;
    uturn.comps[0].steps[0].out_slot = 1;
    CHECK_THROWS_AS(validate_diagram(uturn, s), curve_error);

    StatedDiagram mismatched = d;
    mismatched.comps[0].steps[1].in_slot = 0; // junction edges disagree
    CHECK_THROWS_AS(validate_diagram(mismatched, s), curve_error);

    // arc ending on an interior edge
    auto quad = fixture("quadrilateral.surf");
    StatedDiagram bad;
    Component a;
    a.name = "x";
    a.closed = false;
    a.steps = {Step{quad.tri_index_of("TL"), 0, 2}};
    bad.comps.push_back(a);
    CHECK_THROWS_AS(validate_diagram(bad, quad), curve_error);
}

TEST_CASE("coordinates of the torus curve") {
    auto s = fixture("punctured_torus.surf");
    ExtendedCoords c = coordinates(torus_10(s), s);
    CHECK(c.n == std::vector<long long>{0, 1, 1});
    CHECK(c.hat.empty());
    CHECK(c.dego == 2);
}

TEST_CASE("hat coordinates from endpoint states on the annulus") {
    auto s = fixture("annulus2.surf");
    // arc from b1 back to b1 around the core
    Component a;
    a.name = "loopback";
    a.closed = false;
    a.steps = {Step{s.tri_index_of("A1"), 0, 2}, Step{s.tri_index_of("A2"), 0, 2},
               Step{s.tri_index_of("A1"), 1, 0}};
    StatedDiagram d;
    d.comps.push_back(a);
    d.comps[0].state_start = +1;
    d.comps[0].state_end = +1;
    ExtendedCoords c = coordinates(d, s);
    int b1 = s.edge_index_of("b1");
    CHECK(c.n[b1] == 2);
    CHECK(c.hat.at(b1) == 0); // 2 - (1+1)
    d.comps[0].state_end = -1;
    c = coordinates(d, s);
    CHECK(c.hat.at(b1) == 2); // 2 - 0
    CHECK(c.hat.at(s.edge_index_of("b2")) == 0);
}

TEST_CASE("basis monoid membership") {
    auto s = TriangulatedSurface::parse("triangle T a b c\nboundary a b c\n");
    BarVector v;
    v.n = {1, 1, 2};
    CHECK(lambda_membership(v, s));
    v.n = {1, 1, 1};
    CHECK(!lambda_membership(v, s)); // odd sum
    v.n = {3, 1, 1};
    CHECK(!lambda_membership(v, s)); // triangle inequality
    v.n = {1, 1, 2};
    v.hat[0] = 2;
    CHECK(lambda_membership(v, s)); // hat 2 <= 2*1
    v.hat[0] = 4;
    CHECK(!lambda_membership(v, s)); // hat 4 > 2*1
    v.hat[0] = 1;
    CHECK(!lambda_membership(v, s)); // odd hat
}

TEST_CASE("balanced tests") {
    auto s = fixture("punctured_torus.surf");
    CHECK(is_balanced({0, 1, 1}, s));
    CHECK(!is_balanced({1, 1, 1}, s));
    auto quad = fixture("quadrilateral.surf");
    BarVector v;
    v.n.assign(quad.edges.size(), 0);
    v.n[quad.edge_index_of("s12")] = 1;
    v.n[quad.edge_index_of("s23")] = 1;
    v.n[quad.edge_index_of("d")] = 2;
    for (int b : quad.boundary_edge_indices()) v.hat[b] = 0;
    v.hat[quad.edge_index_of("s12")] = 2;
    CHECK(is_balanced_bar(v, quad)); // even hats
    v.hat[quad.edge_index_of("s12")] = 1;
    CHECK(!is_balanced_bar(v, quad)); // odd hat entry
    // every diagram's extended coordinates are balanced
    for (const auto& w : enumerate_lambda(quad, 2)) {
        StatedDiagram d = reconstruct_from_normal(w, quad);
        CHECK(is_balanced_bar(bar_vector(coordinates(d, quad)), quad));
    }
}

TEST_CASE("reconstruction round trips") {
    auto torus = fixture("punctured_torus.surf");
    for (const auto& v : enumerate_lambda(torus, 3)) {
        StatedDiagram d = reconstruct_from_normal(v, torus);
        CHECK(bar_vector(coordinates(d, torus)) == v);
    }
    auto quad = fixture("quadrilateral.surf");
    for (const auto& v : enumerate_lambda(quad, 2)) {
        StatedDiagram d = reconstruct_from_normal(v, quad);
        CHECK(bar_vector(coordinates(d, quad)) == v);
        validate_diagram(d, quad);
    }
    auto mono = fixture("punctured_monogon.surf");
    for (const auto& v : enumerate_lambda(mono, 3)) {
        StatedDiagram d = reconstruct_from_normal(v, mono);
        CHECK(bar_vector(coordinates(d, mono)) == v);
    }
}

TEST_CASE("reconstruction details") {
    auto torus = fixture("punctured_torus.surf");
    // the zero vector gives the empty diagram
    BarVector zero;
    zero.n = {0, 0, 0};
    CHECK(reconstruct_from_normal(zero, torus).comps.empty());
    // doubling a curve gives two parallel copies
    BarVector twice;
    twice.n = {0, 2, 2};
    StatedDiagram d = reconstruct_from_normal(twice, torus);
    CHECK(d.comps.size() == 2);
    CHECK(d.comps[0].steps.size() == 2);
    CHECK(d.comps[1].steps.size() == 2);
    // the all-twos vector is the peripheral curve around the puncture
    BarVector all2;
    all2.n = {2, 2, 2};
    StatedDiagram p = reconstruct_from_normal(all2, torus);
    CHECK(p.comps.size() == 1);
    CHECK(p.comps[0].steps.size() == 6);
    auto special = detect_special_components(p, torus);
    CHECK(special[0].kind == "peripheral");
    CHECK(special[0].about == "v0");
    // a vector outside the monoid throws
    BarVector badv;
    badv.n = {1, 1, 1};
    CHECK_THROWS_AS(reconstruct_from_normal(badv, torus), curve_error);

    auto quad = fixture("quadrilateral.surf");
    BarVector arc;
    arc.n.assign(quad.edges.size(), 0);
    arc.n[quad.edge_index_of("s12")] = 1;
    arc.n[quad.edge_index_of("s34")] = 1;
    arc.n[quad.edge_index_of("d")] = 1;
    for (int b : quad.boundary_edge_indices()) arc.hat[b] = 0;
    StatedDiagram a = reconstruct_from_normal(arc, quad);
    CHECK(a.comps.size() == 1);
    CHECK(!a.comps[0].closed);
}

TEST_CASE("splitting counts and states") {
    auto torus = fixture("punctured_torus.surf");
    StatedDiagram d = torus_10(torus);
    int e1 = torus.edge_index_of("e1");
    int e3 = torus.edge_index_of("e3");
    // no crossing: a single summand
    SplitResult none = split_along_edge(d, torus, e1);
    CHECK(none.summands.size() == 1);
    CHECK(none.summands[0].comps.size() == 1);
    // one crossing: two summands, each an arc with equal states on both copies
    SplitResult one = split_along_edge(d, torus, e3);
    CHECK(one.summands.size() == 2);
    for (const auto& piece : one.summands) {
        REQUIRE(piece.comps.size() == 1);
        CHECK(!piece.comps[0].closed);
        CHECK(piece.comps[0].state_start == piece.comps[0].state_end);
    }
    CHECK(one.summands[0].comps[0].state_start == +1);
    CHECK(one.summands[1].comps[0].state_start == -1);
    // two crossings: four summands with two pieces each
    BarVector v;
    v.n = {2, 2, 2};
    StatedDiagram per = reconstruct_from_normal(v, torus);
    SplitResult two = split_along_edge(per, torus, e3);
    CHECK(two.summands.size() == 4);
    for (const auto& piece : two.summands) CHECK(piece.comps.size() == 2);
    CHECK_THROWS_AS(split_along_edge(d, fixture("quadrilateral.surf"), 0), curve_error);
}

TEST_CASE("special component detection") {
    auto quad = fixture("quadrilateral.surf");
    StatedDiagram d;
    d.comps.push_back(generator_arc(quad, quad.edge_index_of("s23"), false));
    d.comps.push_back(generator_arc(quad, quad.edge_index_of("s23"), true));
    d.comps[1].height = 1;
    auto report = detect_special_components(d, quad);
    CHECK(report[0].kind == "corner_arc");
    CHECK(report[0].about == "s23");
    CHECK(report[1].kind == "bad_arc");
    CHECK(report[1].about == "s23");

    auto mono = fixture("punctured_monogon.surf");
    StatedDiagram loop;
    loop.comps.push_back(peripheral_loop(mono, 1));
    auto lr = detect_special_components(loop, mono);
    REQUIRE(lr.size() == 1);
    CHECK(lr[0].kind == "peripheral");
}

TEST_CASE("curve file parsing") {
    auto s = fixture("punctured_torus.surf");
    StatedDiagram d = parse_curves(
        "# a closed curve\ncurve a closed\nstep T1 1 2\nstep T2 2 1\n", s);
    CHECK(d.comps.size() == 1);
    CHECK(d.comps[0].closed);
    auto quad = fixture("quadrilateral.surf");
    StatedDiagram arcs = parse_curves(
        "curve x arc + - height 3\nstep TL 0 1\n", quad);
    CHECK(arcs.comps[0].state_end == -1);
    CHECK(arcs.comps[0].height == 3);
    CHECK_THROWS_AS(parse_curves("curve a closed\nstep T1 1 1\n", s), curve_error);
    CHECK_THROWS_AS(parse_curves("step T1 0 1\n", s), parse_error);
    CHECK_THROWS_AS(parse_curves("curve a arc + + height\nstep T1 0 1\n", s), parse_error);
}

TEST_CASE("generator arcs have the sweep shapes") {
    auto quad = fixture("quadrilateral.surf");
    Component d_arc = generator_arc(quad, quad.edge_index_of("d"), false);
    CHECK(d_arc.steps.size() == 2);
    Component s23 = generator_arc(quad, quad.edge_index_of("s23"), false);
    CHECK(s23.steps.size() == 1);
    auto mono = fixture("punctured_monogon.surf");
    Component b = generator_arc(mono, mono.edge_index_of("b"), false);
    CHECK(b.steps.size() == 2);
    Component xv = peripheral_loop(mono, 1);
    CHECK(xv.steps.size() == 1);
}

TEST_CASE("the basis monoid is closed under addition") {
    auto quad = fixture("quadrilateral.surf");
    auto members = enumerate_lambda(quad, 2);
    size_t step = std::max<size_t>(1, members.size() / 40);
    for (size_t i = 0; i < members.size(); i += step)
        for (size_t j = 0; j < members.size(); j += step) {
            BarVector sum = members[i];
            for (size_t k = 0; k < sum.n.size(); ++k) sum.n[k] += members[j].n[k];
            for (auto& [e, h] : sum.hat) h += members[j].hat.at(e);
            CHECK(lambda_membership(sum, quad));
        }
}
