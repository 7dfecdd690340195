#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <skt/matrices.hpp>

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
const char* bounded_fixtures[] = {"quadrilateral.surf", "punctured_monogon.surf",
                                  "annulus2.surf", "punctured_bigon.surf"};
} // namespace

TEST_CASE("face matrix of a single triangle and the torus") {
    auto s = TriangulatedSurface::parse("triangle T a b c\nboundary a b c\n");
    LabeledMatrix q = face_matrix(s);
    CHECK(q.at("a", "b") == -1);
    CHECK(q.at("b", "c") == -1);
    CHECK(q.at("c", "a") == -1);
    CHECK(q.antisymmetric());

    auto torus = fixture("punctured_torus.surf");
    LabeledMatrix qt = face_matrix(torus);
    CHECK(qt.at("e1", "e2") == -2);
    CHECK(qt.at("e2", "e3") == -2);
    CHECK(qt.at("e3", "e1") == -2);
}

TEST_CASE("face matrix of the punctured monogon vanishes") {
    auto s = fixture("punctured_monogon.surf");
    LabeledMatrix q = face_matrix(s);
    for (size_t i = 0; i < q.rows(); ++i)
        for (size_t j = 0; j < q.cols(); ++j) CHECK(q.m[i][j] == 0);
}

TEST_CASE("quadrilateral face matrix, frozen by summing the two faces") {
    auto s = fixture("quadrilateral.surf");
    LabeledMatrix q = face_matrix(s);
    CHECK(q.at("s12", "s23") == -1);
    CHECK(q.at("s23", "d") == -1);
    CHECK(q.at("d", "s12") == -1);
    CHECK(q.at("d", "s34") == -1);
    CHECK(q.at("s34", "s41") == -1);
    CHECK(q.at("s41", "d") == -1);
    CHECK(q.at("s12", "s34") == 0);
    CHECK(q.at("s12", "s41") == 0);
    CHECK(q.at("s23", "s34") == 0);
    CHECK(q.at("s23", "s41") == 0);
    CHECK(q.antisymmetric());
}

TEST_CASE("quadrilateral vertex matrix, frozen by enumerating the fans") {
    auto s = fixture("quadrilateral.surf");
    LabeledMatrix p = vertex_matrix_plus(s);
    // values from the corner fans plus the diagonal self-count, rows then
    // columns in the order (s12, s23, s34, s41, d)
    const char* names[5] = {"s12", "s23", "s34", "s41", "d"};
    long long expect[5][5] = {
        {1, 0, 0, 1, 1},
        {1, 1, 0, 0, 0},
        {0, 1, 1, 0, 1},
        {0, 0, 1, 1, 0},
        {0, 1, 0, 1, 1},
    };
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            CAPTURE(i);
            CAPTURE(j);
            CHECK(p.at(names[i], names[j]) == expect[i][j]);
        }
    CHECK(vertex_matrix(s).antisymmetric());
}

TEST_CASE("monogon: Pplus = (2), H = (1), HPplus = 2I") {
    auto s = fixture("punctured_monogon.surf");
    LabeledMatrix p = vertex_matrix_plus(s);
    REQUIRE(p.rows() == 1);
    CHECK(p.m[0][0] == 2);
    ExtendedMatrices x = extended_matrices(s);
    CHECK(x.H.rows() == 1);
    CHECK(x.H.m[0][0] == 1);
    CHECK((x.H * x.Pplus).m[0][0] == 2);
}

TEST_CASE("extension blocks") {
    auto s = fixture("quadrilateral.surf");
    ExtendedMatrices x = extended_matrices(s);
    CHECK(x.Qbar.at("s12_hat", "s12") == 1);
    CHECK(x.Qbar.at("s12", "s12_hat") == -1);
    CHECK(x.Qbar.at("s12_hat", "s23_hat") == 0);
    CHECK(x.Qstar.at("s12", "s12_hat") == 1);
    CHECK(x.Qbar.antisymmetric());
    CHECK(x.Qstar.antisymmetric());
    CHECK(x.Pbar.antisymmetric());
    // the hatted diagonal is the unhatted one minus two
    CHECK(x.Pbarplus.at("s12_hat", "s12_hat") == x.Pplus.at("s12", "s12") - 2);
    CHECK(x.Pbarplus.at("s12_hat", "s12_hat") == -1);
    CHECK(x.Pbarplus.at("d", "s12_hat") == x.Pplus.at("d", "s12"));
}

TEST_CASE("arc matrix of the quadrilateral diagonal, frozen from the swept arc") {
    auto s = fixture("quadrilateral.surf");
    LabeledMatrix k = arc_matrix(s);
    CHECK(k.at("d", "d") == 1);
    CHECK(k.at("d", "s41") == 1);
    CHECK(k.at("d", "s23") == 1);
    CHECK(k.at("d", "s12") == 0);
    CHECK(k.at("d", "s34") == 0);
    CHECK(k.at("d", "s41_hat") == 1);
    CHECK(k.at("d", "s23_hat") == 1);
    CHECK(k.at("d", "s12_hat") == 0);
}

TEST_CASE("monogon arc matrix row") {
    auto s = fixture("punctured_monogon.surf");
    LabeledMatrix k = arc_matrix(s);
    CHECK(k.at("b", "b") == 2);
    CHECK(k.at("b", "ev") == 1);
    CHECK(k.at("b", "b_hat") == 2);
    CHECK(k.at("b_hat", "b_hat") == 0);
    CHECK(k.at("b_hat", "b") == 2);
    CHECK(k.at("b_hat", "ev") == 1);
}

TEST_CASE("shear squares") {
    auto s = fixture("punctured_monogon.surf");
    LabeledMatrix sg = shear_square_matrix(s);
    CHECK(sg.at("b", "b") == 2);
    CHECK(sg.at("b", "ev") == 1); // the monogon correction
    CHECK(sg.at("ev", "ev") == 2);
    CHECK(sg.at("b_hat", "b_hat") == 2);
    auto quad = fixture("quadrilateral.surf");
    LabeledMatrix sq = shear_square_matrix(quad);
    CHECK(sq == LabeledMatrix::identity(delta_bar_names(quad), 2));

    LabeledMatrix hs = shear_square_sources(s);
    CHECK(hs.at("b_hat", "b") == 1);
    CHECK(hs.at("b_hat", "b_hat") == -1);
    CHECK(hs.at("ev", "v0") == 2);
}

TEST_CASE("matrix identities hold on every bounded fixture") {
    for (const char* name : bounded_fixtures) {
        CAPTURE(name);
        auto s = fixture(name);
        for (const auto& c : verify_matrix_identities(s)) {
            CAPTURE(c.name);
            CAPTURE(c.detail);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("mirrored fan orders break the duality identity") {
    auto s = fixture("quadrilateral.surf");
    ExtendedMatrices x = extended_matrices(s);
    // recompute Pplus with clockwise fans: reverse every fan
    const auto qnames = quasi_names(s);
    LabeledMatrix mirrored(qnames, qnames);
    for (const auto& v : s.vertices()) {
        if (!v.boundary) continue;
        std::vector<int> fan(v.fan.rbegin(), v.fan.rend());
        for (size_t i = 0; i < fan.size(); ++i)
            for (size_t j = i + 1; j < fan.size(); ++j) {
                const auto& a = s.edges[s.half_edges()[fan[i]].edge].id;
                const auto& b = s.edges[s.half_edges()[fan[j]].edge].id;
                mirrored.m[mirrored.row_index(a)][mirrored.col_index(b)] += 1;
            }
    }
    for (size_t i = 0; i < qnames.size(); ++i) mirrored.m[i][i] += 1;
    CHECK(!(x.H * mirrored == LabeledMatrix::identity(qnames, 2)));
}

TEST_CASE("antisymmetry across all bounded fixtures") {
    for (const char* name : bounded_fixtures) {
        CAPTURE(name);
        auto s = fixture(name);
        ExtendedMatrices x = extended_matrices(s);
        CHECK(x.Q.antisymmetric());
        CHECK(x.P.antisymmetric());
        CHECK(x.Qbar.antisymmetric());
        CHECK(x.Qstar.antisymmetric());
        CHECK(x.Pbar.antisymmetric());
    }
}
