// Acceptance suite: one line per criterion, exit code = number of failures.

#include <skt/verify.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace skt;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& what, bool pass, const std::string& detail = "") {
    std::cout << "CRITERION " << number << " " << (pass ? "PASS" : "FAIL") << " - " << what;
    if (!pass && !detail.empty()) std::cout << " [" << detail << "]";
    std::cout << "\n";
    if (!pass) ++g_failures;
}

TriangulatedSurface fixture(const std::string& name) {
    std::ifstream in(std::string(SKT_FIXTURES) + "/" + name);
    if (!in.good()) throw std::runtime_error("missing fixture " + name);
    std::ostringstream os;
    os << in.rdbuf();
    return TriangulatedSurface::parse(os.str());
}

const std::vector<std::string> kBundled = {
    "punctured_torus.surf", "quadrilateral.surf", "punctured_monogon.surf",
    "annulus2.surf", "genus1_boundary.surf"};

bool has_boundary(const TriangulatedSurface& s) {
    return !s.boundary_edge_indices().empty();
}

long long crossing_count(const StatedDiagram& d) {
    long long n = 0;
    for (const auto& c : d.comps) n += (long long)c.steps.size() - (c.closed ? 0 : 1);
    return n;
}

} // namespace

int main() {
    // 1. matrix identities, exactly, on every bundled surface with a vertex
    //    matrix (vacuous without boundary)
    {
        bool pass = true;
        std::string detail;
        for (const auto& name : kBundled) {
            TriangulatedSurface s = fixture(name);
            if (!has_boundary(s)) continue;
            for (const auto& c : verify_matrix_identities(s)) {
                if (c.name == "KQstarKt") continue; // criterion 2
                if (!c.pass) {
                    pass = false;
                    detail = name + ": " + c.name + " " + c.detail;
                }
            }
        }
        criterion(1, "matrix identities HP+=2I, HbarPbar+=2I, Pbar+*sigma=2K, sigma=Hbar*K, K|EE=Pbar+",
                  pass, detail);
    }

    // 2. the comparison map is multiplicatively linear and matches the lift on
    //    generators
    {
        bool pass = true;
        std::string detail;
        for (const auto& name : kBundled) {
            TriangulatedSurface s = fixture(name);
            if (!has_boundary(s)) continue;
            TraceContext ctx = make_trace_context(s);
            for (const auto& c : verify_matrix_identities(s))
                if (c.name == "KQstarKt" && !c.pass) {
                    pass = false;
                    detail = name + ": " + c.detail;
                }
            for (const auto& g : quasi_bar_names(s)) {
                if (psi_map(length_monomial(ctx, {g}), ctx) != trace_generator(ctx, g)) {
                    pass = false;
                    detail = name + ": psi mismatch on " + g;
                }
            }
            for (const auto& v : interior_puncture_names(s)) {
                ExpVec inv(ctx.form_x->size(), 0);
                inv[ctx.form_x->index(v)] = -1;
                TorusElement sum = psi_map(length_monomial(ctx, {v}), ctx) +
                                   psi_map(TorusElement::monomial(ctx.form_x, inv), ctx);
                if (sum != trace_generator(ctx, v)) {
                    pass = false;
                    detail = name + ": psi mismatch on " + v;
                }
            }
        }
        criterion(2, "K*Qstar*K^T = Pbar-diamond and psi agrees with the lift on generators",
                  pass, detail);
    }

    // 3. commutation of generator lifts with the vertex-form exponent
    {
        bool pass = true;
        std::string detail;
        for (const auto& name : kBundled) {
            TriangulatedSurface s = fixture(name);
            if (!has_boundary(s)) continue;
            TraceContext ctx = make_trace_context(s);
            auto gens = quasi_bar_names(s);
            std::map<std::string, TorusElement> phi;
            for (const auto& g : gens) phi[g] = trace_generator(ctx, g);
            for (const auto& a : gens)
                for (const auto& b : gens) {
                    long long pab = ctx.mats->Pbar.at(a, b);
                    if (phi[a] * phi[b] !=
                        (phi[b] * phi[a]) * HalfLaurent::q_half(2 * pab)) {
                        pass = false;
                        detail = name + ": (" + a + "," + b + ")";
                    }
                }
        }
        criterion(3, "phi(X_a)phi(X_b) = q^{Pbar(a,b)} phi(X_b)phi(X_a) for all generator pairs",
                  pass, detail);
    }

    // 4. top-term theorem over every basis vector with entries <= 3
    // 8. reflection invariance for the closed diagrams among them
    {
        bool top_pass = true, refl_pass = true;
        std::string top_detail, refl_detail;
        long long diagrams = 0;
        for (const auto& name : kBundled) {
            TriangulatedSurface s = fixture(name);
            TraceContext ctx = make_trace_context(s);
            for (const auto& v : enumerate_lambda(s, 3)) {
                StatedDiagram d = reconstruct_from_normal(v, s);
                if (d.comps.empty()) continue;
                ++diagrams;
                TorusElement lift = extended_trace(d, ctx);
                TopTerm t = top_term(lift, ctx);
                bool leq1 = true;
                for (int b : s.boundary_edge_indices())
                    if (v.n[b] > 1) leq1 = false;
                if (!t.single || !t.pure_q_power ||
                    t.exp != ystar_exponent_of_bar(v, ctx) || (leq1 && t.doubled_t != 0)) {
                    top_pass = false;
                    top_detail = name;
                }
                bool closed = true;
                for (const auto& c : d.comps) closed = closed && c.closed;
                if (closed && !lift.reflection_invariant()) {
                    refl_pass = false;
                    refl_detail = name;
                }
            }
        }
        criterion(4, "leading term q^t z^{n} with t in (1/2)Z over " +
                         std::to_string(diagrams) + " basis diagrams, t=0 when <=1 endpoint per edge",
                  top_pass, top_detail);
        // 5. naive oracle on every enumerated diagram with <= 10 crossings
        {
            bool pass = true;
            std::string detail;
            long long checked = 0;
            for (const auto& name : kBundled) {
                TriangulatedSurface s = fixture(name);
                TraceContext ctx = make_trace_context(s);
                for (const auto& v : enumerate_lambda(s, 3)) {
                    StatedDiagram d = reconstruct_from_normal(v, s);
                    if (d.comps.empty() || crossing_count(d) > 10) continue;
                    ++checked;
                    if (naive_state_sum(d, ctx, true) != extended_trace(d, ctx) ||
                        naive_state_sum(d, ctx, false) != shear_trace(d, ctx)) {
                        pass = false;
                        detail = name;
                    }
                }
            }
            criterion(5, "naive state sum equals both traces on " + std::to_string(checked) +
                             " diagrams with <= 10 crossings",
                      pass, detail);
        }
        criterion(8, "closed-diagram lifts are invariant under q^{1/2} -> q^{-1/2}",
                  refl_pass, refl_detail);
    }

    // 6. skein relation in the image on the torus and quadrilateral fixtures
    {
        bool pass = true;
        std::string detail;
        {
            TriangulatedSurface s = fixture("punctured_torus.surf");
            TraceContext ctx = make_trace_context(s);
            Component beta;
            beta.name = "beta";
            beta.closed = true;
            beta.steps = {Step{0, 0, 2}, Step{1, 2, 0}};
            Component alpha = beta;
            alpha.name = "alpha";
            alpha.steps = {Step{0, 1, 2}, Step{1, 2, 1}};
            alpha.height = 1;
            StatedDiagram da, db;
            da.comps = {alpha};
            db.comps = {beta};
            BarVector diag, anti;
            diag.n = {1, 1, 0};
            anti.n = {1, 1, 2};
            TorusElement lhs =
                extended_trace(da, ctx) * extended_trace(db, ctx);
            TorusElement rhs =
                HalfLaurent::q_half(2) *
                    extended_trace(reconstruct_from_normal(diag, s), ctx) +
                HalfLaurent::q_half(-2) *
                    extended_trace(reconstruct_from_normal(anti, s), ctx);
            if (lhs != rhs) {
                pass = false;
                detail = "punctured torus";
            }
        }
        {
            TriangulatedSurface s = fixture("quadrilateral.surf");
            TraceContext ctx = make_trace_context(s);
            int TL = s.tri_index_of("TL"), TH = s.tri_index_of("TH");
            auto arc = [&](std::vector<Step> steps, long long h) {
                Component c;
                c.name = "a" + std::to_string(h);
                c.steps = std::move(steps);
                c.height = h;
                return c;
            };
            StatedDiagram prod;
            prod.comps = {arc({Step{TL, 1, 2}, Step{TH, 0, 2}}, 0),
                          arc({Step{TL, 0, 2}, Step{TH, 0, 1}}, 1)};
            StatedDiagram gq;
            gq.comps = {arc({Step{TL, 0, 1}}, 0), arc({Step{TH, 1, 2}}, 1)};
            StatedDiagram gqi;
            gqi.comps = {arc({Step{TL, 0, 2}, Step{TH, 0, 2}}, 0),
                         arc({Step{TL, 1, 2}, Step{TH, 0, 1}}, 1)};
            TorusElement lhs = extended_trace(prod, ctx);
            TorusElement rhs = HalfLaurent::q_half(2) * extended_trace(gqi, ctx) +
                               HalfLaurent::q_half(-2) * extended_trace(gq, ctx);
            if (lhs != rhs) {
                pass = false;
                detail = "quadrilateral";
            }
        }
        criterion(6, "phi(alpha)phi(beta) = q phi(gamma+) + q^{-1} phi(gamma-) on the fixtures",
                  pass, detail);
    }

    // 7. the projection kills every bad arc
    {
        bool pass = true;
        std::string detail;
        for (const auto& name : kBundled) {
            TriangulatedSurface s = fixture(name);
            if (!has_boundary(s)) continue;
            TraceContext ctx = make_trace_context(s);
            for (const auto& b : boundary_names(s)) {
                if (!project_pr(trace_generator(ctx, hat_name(b)), ctx).is_zero()) {
                    pass = false;
                    detail = name + ": " + b;
                }
                StatedDiagram bad =
                    reconstruct_from_normal(generator_coordinates(ctx, b, true), s);
                if (!shear_trace(bad, ctx).is_zero()) {
                    pass = false;
                    detail = name + ": tr of bad arc over " + b;
                }
            }
        }
        criterion(7, "pr(phi(X_ehat)) = 0 for every bad arc", pass, detail);
    }

    // 9. basis monoid round trip at bound 4, rank witnesses, rank formula
    {
        bool pass = true;
        std::string detail;
        for (const auto& name : kBundled) {
            TriangulatedSurface s = fixture(name);
            auto [chi, r] = s.euler_and_rank();
            if (r != 3 * s.boundary_puncture_count() - 3 * chi ||
                r != (long long)delta_bar_names(s).size()) {
                pass = false;
                detail = name + ": rank";
            }
            BarVector two;
            two.n.assign(s.edges.size(), 2);
            for (int b : s.boundary_edge_indices()) two.hat[b] = 2;
            if (!lambda_membership(two, s)) {
                pass = false;
                detail = name + ": witness 2";
            }
            for (size_t a = 0; a < s.edges.size(); ++a) {
                BarVector w = two;
                w.n[a] += 2;
                if (!lambda_membership(w, s)) pass = false;
            }
            for (int b : s.boundary_edge_indices()) {
                BarVector w = two;
                w.hat[b] += 2;
                if (!lambda_membership(w, s)) pass = false;
            }
            for (const auto& v : enumerate_lambda(s, 4)) {
                StatedDiagram d = reconstruct_from_normal(v, s);
                if (!(bar_vector(coordinates(d, s)) == v)) {
                    pass = false;
                    detail = name + ": round trip";
                    break;
                }
            }
        }
        criterion(9, "basis monoid membership round-trips exhaustively at bound 4; rank witnesses hold",
                  pass, detail);
    }

    // 10. bigon suite
    {
        bool pass = true;
        std::string detail;
        for (const auto& item : verify_bigon(1, 200))
            if (!item.pass) {
                pass = false;
                detail = item.name;
            }
        criterion(10, "bigon counit: generators, 200 charge words, positive words, R2, derived table",
                  pass, detail);
    }

    std::cout << (g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << "\n";
    return g_failures;
}
