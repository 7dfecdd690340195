#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(SKT_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const std::string& name) { return std::string(SKT_FIXTURES) + "/" + name; }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("check reports the surface statistics") {
    RunResult r = run("check " + fx("punctured_torus.surf"));
    CHECK(r.code == 0);
    CHECK(contains(r.out, "chi=-1"));
    CHECK(contains(r.out, "r=3"));
    CHECK(contains(r.out, "interior_punctures=1"));

    RunResult q = run("check " + fx("quadrilateral.surf"));
    CHECK(q.code == 0);
    CHECK(contains(q.out, "chi=1"));
    CHECK(contains(q.out, "r=9"));
    CHECK(contains(q.out, "boundary_punctures=4"));
}

TEST_CASE("malformed input exits with code 2") {
    std::string bad = fx("bad.tmp.surf");
    {
        std::ofstream f(bad);
        f << "triangle T a b\n";
    }
    RunResult r = run("check " + bad);
    CHECK(r.code == 2);
    std::remove(bad.c_str());
    CHECK(run("check " + fx("missing.surf")).code == 2);
    CHECK(run("matrices " + fx("quadrilateral.surf") + " --which Nope").code == 2);
    CHECK(run("frobnicate").code == 2);
}

TEST_CASE("matrices printing and verification") {
    RunResult r = run("matrices " + fx("punctured_monogon.surf") + " --which Pplus");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "2"));
    RunResult v = run("matrices " + fx("quadrilateral.surf") + " --verify");
    CHECK(v.code == 0);
    CHECK(contains(v.out, "IDENTITY HPplus PASS"));
    CHECK(contains(v.out, "IDENTITY HbarPbarplus PASS"));
    CHECK(contains(v.out, "IDENTITY PbarplusSigma PASS"));
    CHECK(contains(v.out, "IDENTITY SigmaHbarK PASS"));
    CHECK(contains(v.out, "IDENTITY Krestriction PASS"));
    CHECK(contains(v.out, "IDENTITY KQstarKt PASS"));
}

TEST_CASE("trace command") {
    std::string curve = fx("curve.tmp");
    {
        std::ofstream f(curve);
        f << "curve a closed\nstep T1 1 2\nstep T2 2 1\n";
    }
    RunResult r = run("trace " + fx("punctured_torus.surf") + " --curve " + curve +
                      " --coords shear --q1");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "1 * y_e2^1 y_e3^1"));
    CHECK(contains(r.out, "1 * y_e2^-1 y_e3^-1"));
    CHECK(contains(r.out, "q1:"));
    std::remove(curve.c_str());

    // peripheral loop in the monogon: extended coordinates
    std::string loop = fx("loop.tmp");
    {
        std::ofstream f(loop);
        f << "curve v closed\nstep M 2 1\n";
    }
    RunResult e = run("trace " + fx("punctured_monogon.surf") + " --curve " + loop +
                      " --coords extended");
    CHECK(e.code == 0);
    CHECK(contains(e.out, "1 * y_ev^1"));
    CHECK(contains(e.out, "1 * y_ev^-1"));
    RunResult l = run("trace " + fx("punctured_monogon.surf") + " --curve " + loop +
                      " --coords length");
    CHECK(l.code == 0);
    CHECK(contains(l.out, "1 * x_v0^1"));
    std::remove(loop.c_str());
}

TEST_CASE("length coordinates need a boundary") {
    std::string curve = fx("curve2.tmp");
    {
        std::ofstream f(curve);
        f << "curve a closed\nstep T1 1 2\nstep T2 2 1\n";
    }
    RunResult r = run("trace " + fx("punctured_torus.surf") + " --curve " + curve +
                      " --coords length");
    CHECK(r.code == 2);
    std::remove(curve.c_str());
}

TEST_CASE("basis enumeration is deterministic") {
    RunResult a = run("basis " + fx("punctured_torus.surf") + " --bound 2");
    RunResult b = run("basis " + fx("punctured_torus.surf") + " --bound 2");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(contains(a.out, "# columns: e1 e2 e3"));
    CHECK(contains(a.out, "0 0 0"));
    CHECK(contains(a.out, "0 1 1"));
}

TEST_CASE("verify runs the aggregate suite") {
    RunResult r = run("verify " + fx("punctured_monogon.surf") + " --bound 2 --seed 5");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "ALL PASS"));
    RunResult again = run("verify " + fx("punctured_monogon.surf") + " --bound 2 --seed 5");
    CHECK(again.out == r.out);
    RunResult zero = run("verify " + fx("punctured_monogon.surf") + " --bound 0");
    CHECK(zero.code == 0);
}

TEST_CASE("bigon words on the command line") {
    RunResult r = run("bigon \"cup0 | L: R:-+\"");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "epsilon = 1*q^(-1/2)"));
    RunResult z = run("bigon \"| L:+ R:-\"");
    CHECK(contains(z.out, "epsilon = 0"));
    CHECK(contains(z.out, "charge L=1 R=-1"));
}

TEST_CASE("bound guard") {
    CHECK(run("verify " + fx("punctured_monogon.surf") + " --bound 7").code == 2);
    CHECK(run("basis " + fx("punctured_monogon.surf") + " --bound -1").code == 2);
}
