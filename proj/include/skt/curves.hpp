#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "surface.hpp"

namespace skt {

struct curve_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One taut pass through a triangle: enter through the edge at in_slot, leave
// through the edge at out_slot.
struct Step {
    int tri = -1;
    int in_slot = -1;
    int out_slot = -1;
    friend bool operator==(const Step& a, const Step& b) {
        return a.tri == b.tri && a.in_slot == b.in_slot && a.out_slot == b.out_slot;
    }
};

struct Component {
    std::string name;
    bool closed = false;
    std::vector<Step> steps;
    int state_start = +1; // arcs only
    int state_end = +1;
    long long height = 0;

    Occurrence start_occ() const { return Occurrence{steps.front().tri, steps.front().in_slot}; }
    Occurrence end_occ() const { return Occurrence{steps.back().tri, steps.back().out_slot}; }

    Component reversed() const {
        Component r = *this;
        std::reverse(r.steps.begin(), r.steps.end());
        for (auto& st : r.steps) std::swap(st.in_slot, st.out_slot);
        std::swap(r.state_start, r.state_end);
        return r;
    }
};

struct EndpointRef {
    int comp = -1;
    int which = 0; // 0 = start, 1 = end
    friend bool operator==(const EndpointRef& a, const EndpointRef& b) {
        return a.comp == b.comp && a.which == b.which;
    }
};

// A crossing of the diagram with an interior edge: the junction before step
// `junction` of component `comp` (for closed components step indices are
// cyclic and junction 0 sits before step 0).
struct CrossRef {
    int comp = -1;
    int junction = 0;
    friend bool operator==(const CrossRef& a, const CrossRef& b) {
        return a.comp == b.comp && a.junction == b.junction;
    }
};

// A simple stated tangle diagram: components with endpoint states plus the
// stacking data (component heights, per-boundary-edge endpoint order).  The
// optional interior order records the geometric order of the crossings along
// an edge; a taut diagram can always be leveled so that crossing heights
// follow the geometric order along each edge, up to a direction choice.
struct StatedDiagram {
    std::vector<Component> comps;
    // bottom-to-top endpoint order per boundary edge; entries are optional and
    // derived from heights when absent
    std::map<int, std::vector<EndpointRef>> boundary_order;
    // geometric crossing order per interior edge, along the first occurrence
    std::map<int, std::vector<CrossRef>> interior_order;
};

// ---- validation ---------------------------------------------------------------

inline void validate_diagram(const StatedDiagram& d, const TriangulatedSurface& s) {
    for (const auto& c : d.comps) {
        if (c.steps.empty()) throw curve_error("component `" + c.name + "` has no steps");
        for (const auto& st : c.steps) {
            if (st.tri < 0 || st.tri >= (int)s.tris.size())
                throw curve_error("component `" + c.name + "` references unknown triangle");
            if (st.in_slot < 0 || st.in_slot > 2 || st.out_slot < 0 || st.out_slot > 2)
                throw curve_error("component `" + c.name + "` has slot outside 0..2");
            if (st.in_slot == st.out_slot)
                throw curve_error("component `" + c.name + "` makes a U-turn inside a triangle");
        }
        size_t m = c.steps.size();
        size_t njunction = c.closed ? m : m - 1;
        for (size_t j = 0; j < njunction; ++j) {
            const Step& a = c.steps[j];
            const Step& b = c.steps[(j + 1) % m];
            Occurrence out{a.tri, a.out_slot}, in{b.tri, b.in_slot};
            int ea = s.edge_at(out), eb = s.edge_at(in);
            if (ea != eb || s.edges[ea].boundary || out == in)
                throw curve_error("component `" + c.name +
                                  "` has an inconsistent junction after step " + std::to_string(j));
        }
        if (!c.closed) {
            if (!s.edges[s.edge_at(c.start_occ())].boundary)
                throw curve_error("arc `" + c.name + "` starts on an interior edge");
            if (!s.edges[s.edge_at(c.end_occ())].boundary)
                throw curve_error("arc `" + c.name + "` ends on an interior edge");
            if ((c.state_start != 1 && c.state_start != -1) ||
                (c.state_end != 1 && c.state_end != -1))
                throw curve_error("arc `" + c.name + "` has an invalid state");
        }
    }
    for (const auto& [ei, order] : d.boundary_order) {
        if (ei < 0 || ei >= (int)s.edges.size() || !s.edges[ei].boundary)
            throw curve_error("endpoint order given for a non-boundary edge");
        for (const auto& r : order)
            if (r.comp < 0 || r.comp >= (int)d.comps.size() || d.comps[r.comp].closed)
                throw curve_error("endpoint order references a non-arc component");
    }
}

// Bottom-to-top endpoint order on a boundary edge: explicit if given, else by
// component height then start-before-end.
inline std::vector<EndpointRef> endpoint_order(const StatedDiagram& d,
                                               const TriangulatedSurface& s, int edge) {
    auto it = d.boundary_order.find(edge);
    if (it != d.boundary_order.end()) return it->second;
    std::vector<EndpointRef> r;
    for (int ci = 0; ci < (int)d.comps.size(); ++ci) {
        const Component& c = d.comps[ci];
        if (c.closed) continue;
        if (s.edge_at(c.start_occ()) == edge) r.push_back(EndpointRef{ci, 0});
        if (s.edge_at(c.end_occ()) == edge) r.push_back(EndpointRef{ci, 1});
    }
    std::stable_sort(r.begin(), r.end(), [&](const EndpointRef& a, const EndpointRef& b) {
        return std::make_tuple(d.comps[a.comp].height, a.comp, a.which) <
               std::make_tuple(d.comps[b.comp].height, b.comp, b.which);
    });
    return r;
}

// ---- coordinates ----------------------------------------------------------------

struct ExtendedCoords {
    std::vector<long long> n;     // intersection numbers over Delta in edge order
    std::map<int, long long> hat; // boundary edge -> hat coordinate
    long long dego = 0;           // hats not counted
};

inline ExtendedCoords coordinates(const StatedDiagram& d, const TriangulatedSurface& s) {
    ExtendedCoords r;
    r.n.assign(s.edges.size(), 0);
    std::map<int, long long> state_sum;
    for (const auto& c : d.comps) {
        size_t m = c.steps.size();
        size_t njunction = c.closed ? m : m - 1;
        for (size_t j = 0; j < njunction; ++j)
            r.n[s.edge_at(Occurrence{c.steps[j].tri, c.steps[j].out_slot})] += 1;
        if (!c.closed) {
            int es = s.edge_at(c.start_occ()), ee = s.edge_at(c.end_occ());
            r.n[es] += 1;
            r.n[ee] += 1;
            state_sum[es] += c.state_start;
            state_sum[ee] += c.state_end;
        }
    }
    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        if (s.edges[ei].boundary) r.hat[(int)ei] = r.n[ei] - state_sum[(int)ei];
        r.dego += r.n[ei];
    }
    return r;
}

// ---- basis monoid -----------------------------------------------------------------

// Vector over Delta-bar: intersection numbers plus hat coordinates.
struct BarVector {
    std::vector<long long> n;
    std::map<int, long long> hat;
    friend bool operator==(const BarVector& a, const BarVector& b) {
        return a.n == b.n && a.hat == b.hat;
    }
};

inline BarVector bar_vector(const ExtendedCoords& c) { return BarVector{c.n, c.hat}; }

inline bool is_balanced(const std::vector<long long>& n, const TriangulatedSurface& s) {
    for (const auto& t : s.tris)
        if ((n[t.edge[0]] + n[t.edge[1]] + n[t.edge[2]]) % 2 != 0) return false;
    return true;
}
// Extended balance in the z-style coordinates of eq-style hat counts: the
// triangle parities hold and every hat entry is even.  In the y-presentation
// of the extension torus the same condition reads k(ehat) = k(e) mod 2.
inline bool is_balanced_bar(const BarVector& v, const TriangulatedSurface& s) {
    if (!is_balanced(v.n, s)) return false;
    for (const auto& [e, h] : v.hat) {
        (void)e;
        if (((h % 2) + 2) % 2 != 0) return false;
    }
    return true;
}

inline bool lambda_membership(const BarVector& v, const TriangulatedSurface& s,
                              std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (v.n.size() != s.edges.size()) return fail("wrong vector length");
    for (long long x : v.n)
        if (x < 0) return fail("negative coordinate");
    for (const auto& t : s.tris) {
        long long a = v.n[t.edge[0]], b = v.n[t.edge[1]], c = v.n[t.edge[2]];
        if ((a + b + c) % 2 != 0) return fail("odd triangle sum at " + t.id);
        if (a > b + c || b > a + c || c > a + b)
            return fail("triangle inequality fails at " + t.id);
    }
    for (const auto& [e, h] : v.hat) {
        if (!s.edges[e].boundary) return fail("hat coordinate on interior edge");
        if (h < 0 || h % 2 != 0) return fail("hat coordinate not in 2N");
        if (h > 2 * v.n[e]) return fail("hat coordinate exceeds twice the edge coordinate");
    }
    return true;
}

// ---- reconstruction ----------------------------------------------------------------

// Taut representative of a basis vector.  Crossing points on an edge are
// indexed 1..n along the first occurrence (tail to head); the glued
// occurrence sees position p as n+1-p.  Within a triangle, corner k pairs the
// head side of slot k with the tail side of slot k+1, innermost first.
inline StatedDiagram reconstruct_from_normal(const BarVector& v, const TriangulatedSurface& s) {
    std::string why;
    if (!lambda_membership(v, s, &why))
        throw curve_error("vector is not in the basis monoid: " + why);

    struct TriArc {
        int tri, slot_a, slot_b;
        int pos_a, pos_b; // local positions on (tri,slot_a), (tri,slot_b)
    };
    std::vector<TriArc> arcs;
    for (size_t ti = 0; ti < s.tris.size(); ++ti) {
        const Triangle& t = s.tris[ti];
        long long n0 = v.n[t.edge[0]], n1 = v.n[t.edge[1]], n2 = v.n[t.edge[2]];
        long long corner[3] = {(n0 + n1 - n2) / 2, (n1 + n2 - n0) / 2, (n2 + n0 - n1) / 2};
        for (int k = 0; k < 3; ++k) {
            long long nk = v.n[t.edge[k]];
            for (long long u = 0; u < corner[k]; ++u)
                arcs.push_back(TriArc{(int)ti, k, (k + 1) % 3, (int)(nk - u), (int)(1 + u)});
        }
    }

    // local position -> (arc, side); for interior edges a position appears on
    // both occurrences and is attached to one arc on each side
    std::map<std::pair<Occurrence, int>, std::pair<int, int>> attach;
    auto note = [&](Occurrence o, int pos, int arc, int side) {
        auto key = std::make_pair(o, pos);
        if (attach.count(key)) throw curve_error("reconstruction produced a double attachment");
        attach[key] = {arc, side};
    };
    for (size_t ai = 0; ai < arcs.size(); ++ai) {
        const auto& a = arcs[ai];
        note(Occurrence{a.tri, a.slot_a}, a.pos_a, (int)ai, 0);
        note(Occurrence{a.tri, a.slot_b}, a.pos_b, (int)ai, 1);
    }

    auto glued = [&](Occurrence occ, int pos) -> std::optional<std::pair<Occurrence, int>> {
        int e = s.edge_at(occ);
        if (s.edges[e].boundary) return std::nullopt;
        return std::make_pair(s.other_occurrence(occ), (int)v.n[e] + 1 - pos);
    };

    StatedDiagram d;
    std::vector<bool> used(arcs.size(), false);
    std::map<std::pair<int, int>, EndpointRef> node_endpoint; // (edge,pos) -> endpoint
    std::map<std::pair<int, int>, CrossRef> node_cross;       // (edge,pos) -> crossing

    auto canonical = [&](Occurrence occ, int pos) {
        int e = s.edge_at(occ);
        if (s.edges[e].occs[0] == occ) return std::make_pair(e, pos);
        return std::make_pair(e, (int)v.n[e] + 1 - pos);
    };

    // walk from an arc entered on the given side; returns the component and,
    // for open walks, the terminal boundary node
    auto trace = [&](int ai, int side, bool closed, int ci) {
        Component c;
        c.closed = closed;
        std::pair<int, int> terminal{-1, -1};
        int cur = ai, cs = side;
        if (closed) {
            const auto& a0 = arcs[ai];
            Occurrence in_occ{a0.tri, side == 0 ? a0.slot_a : a0.slot_b};
            int in_pos = side == 0 ? a0.pos_a : a0.pos_b;
            node_cross[canonical(in_occ, in_pos)] = CrossRef{ci, 0};
        }
        while (true) {
            if (used[cur]) throw curve_error("reconstruction revisited an arc");
            used[cur] = true;
            const auto& a = arcs[cur];
            int in_slot = cs == 0 ? a.slot_a : a.slot_b;
            int out_slot = cs == 0 ? a.slot_b : a.slot_a;
            c.steps.push_back(Step{a.tri, in_slot, out_slot});
            Occurrence out_occ{a.tri, out_slot};
            int out_pos = cs == 0 ? a.pos_b : a.pos_a;
            auto g = glued(out_occ, out_pos);
            if (!g) {
                terminal = {s.edge_at(out_occ), out_pos};
                break;
            }
            auto it = attach.find(*g);
            if (it == attach.end()) throw curve_error("reconstruction failed to glue");
            if (closed && it->second.first == ai && it->second.second == side) break;
            node_cross[canonical(out_occ, out_pos)] = CrossRef{ci, (int)c.steps.size()};
            cur = it->second.first;
            cs = it->second.second;
        }
        return std::make_pair(c, terminal);
    };

    // arc components, sweeping boundary nodes in canonical order
    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        if (!s.edges[ei].boundary) continue;
        Occurrence occ = s.edges[ei].occs[0];
        for (int p = 1; p <= (int)v.n[ei]; ++p) {
            auto it = attach.find({occ, p});
            if (it == attach.end()) throw curve_error("dangling boundary point");
            if (used[it->second.first]) continue;
            int ci = (int)d.comps.size();
            auto [c, terminal] = trace(it->second.first, it->second.second, false, ci);
            c.name = "a" + std::to_string(ci);
            c.height = (long long)ci;
            node_endpoint[{(int)ei, p}] = EndpointRef{ci, 0};
            node_endpoint[terminal] = EndpointRef{ci, 1};
            d.comps.push_back(std::move(c));
        }
    }
    // closed components
    for (size_t ai = 0; ai < arcs.size(); ++ai) {
        if (used[ai]) continue;
        int ci = (int)d.comps.size();
        auto [c, terminal] = trace((int)ai, 0, true, ci);
        (void)terminal;
        c.name = "c" + std::to_string(ci);
        c.height = (long long)ci;
        d.comps.push_back(std::move(c));
    }
    // geometric crossing order along every interior edge
    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        if (s.edges[ei].boundary || v.n[ei] == 0) continue;
        std::vector<CrossRef> order;
        for (int p = 1; p <= (int)v.n[ei]; ++p) {
            auto it = node_cross.find({(int)ei, p});
            if (it == node_cross.end()) throw curve_error("missing interior crossing record");
            order.push_back(it->second);
        }
        d.interior_order[(int)ei] = order;
    }

    // States follow the geometric position along each boundary edge: the
    // first hat/2 points are negative, so the states increase along the edge.
    // Heights are left banded by component (the engine's default); the traced
    // element then differs from the positively ordered representative only in
    // its height order, which leaves every coordinate and every filtration
    // statement unchanged.
    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        if (!s.edges[ei].boundary || v.n[ei] == 0) continue;
        long long negatives = 0;
        if (auto it = v.hat.find((int)ei); it != v.hat.end()) negatives = it->second / 2;
        for (int p = 1; p <= (int)v.n[ei]; ++p) {
            auto it = node_endpoint.find({(int)ei, p});
            if (it == node_endpoint.end()) throw curve_error("missing endpoint during state assignment");
            int st = p <= negatives ? -1 : +1;
            if (it->second.which == 0) d.comps[it->second.comp].state_start = st;
            else d.comps[it->second.comp].state_end = st;
        }
    }
    validate_diagram(d, s);
    return d;
}

// Enumerate every basis vector with all coordinates bounded by `bound`.
inline std::vector<BarVector> enumerate_lambda(const TriangulatedSurface& s, long long bound) {
    std::vector<BarVector> out;
    const auto bedges = s.boundary_edge_indices();
    std::vector<long long> n(s.edges.size(), 0);
    std::vector<long long> hats(bedges.size(), 0);

    std::function<void(size_t)> hat_rec = [&](size_t bi) {
        if (bi == bedges.size()) {
            BarVector v;
            v.n = n;
            for (size_t k = 0; k < bedges.size(); ++k) v.hat[bedges[k]] = hats[k];
            if (lambda_membership(v, s)) out.push_back(std::move(v));
            return;
        }
        for (long long h = 0; h <= std::min(bound, 2 * n[bedges[bi]]); h += 2) {
            hats[bi] = h;
            hat_rec(bi + 1);
        }
    };
    std::function<void(size_t)> edge_rec = [&](size_t ei) {
        if (ei == n.size()) {
            hat_rec(0);
            return;
        }
        for (long long x = 0; x <= bound; ++x) {
            n[ei] = x;
            edge_rec(ei + 1);
        }
    };
    edge_rec(0);
    return out;
}

// ---- splitting ----------------------------------------------------------------------

struct SplitResult {
    std::string cut_surface_text;
    std::vector<StatedDiagram> summands; // one per state assignment, states in
                                          // binary order with + = 0
    std::string edge1, edge2;             // names of the two copies
};

// Cut the surface along an interior edge and split the diagram into its
// 2^(crossing count) stated summands.
inline SplitResult split_along_edge(const StatedDiagram& d, const TriangulatedSurface& s,
                                    int cut_edge) {
    if (cut_edge < 0 || cut_edge >= (int)s.edges.size() || s.edges[cut_edge].boundary)
        throw curve_error("can only split along an interior edge");
    validate_diagram(d, s);

    SplitResult res;
    res.edge1 = s.edges[cut_edge].id + "_1";
    res.edge2 = s.edges[cut_edge].id + "_2";
    Occurrence occ1 = s.edges[cut_edge].occs[0];
    Occurrence occ2 = s.edges[cut_edge].occs[1];

    std::ostringstream text;
    for (size_t ti = 0; ti < s.tris.size(); ++ti) {
        text << "triangle " << s.tris[ti].id;
        for (int sl = 0; sl < 3; ++sl) {
            Occurrence here{(int)ti, sl};
            if (here == occ1) text << " " << res.edge1;
            else if (here == occ2) text << " " << res.edge2;
            else text << " " << s.edges[s.tris[ti].edge[sl]].id;
        }
        text << "\n";
    }
    text << "boundary " << res.edge1 << " " << res.edge2;
    for (const auto& e : s.edges)
        if (e.boundary) text << " " << e.id;
    text << "\n";
    res.cut_surface_text = text.str();

    TriangulatedSurface cut = TriangulatedSurface::parse(res.cut_surface_text);
    int copy1 = cut.edge_index_of(res.edge1);
    int copy2 = cut.edge_index_of(res.edge2);

    // collect the crossings of the cut edge in diagram order
    struct Cut {
        int comp, junction; // junction j = between steps j and j+1 (mod m)
    };
    std::vector<Cut> cuts;
    for (int ci = 0; ci < (int)d.comps.size(); ++ci) {
        const Component& c = d.comps[ci];
        size_t m = c.steps.size();
        size_t nj = c.closed ? m : m - 1;
        for (size_t j = 0; j < nj; ++j)
            if (s.edge_at(Occurrence{c.steps[j].tri, c.steps[j].out_slot}) == cut_edge)
                cuts.push_back(Cut{ci, (int)j});
    }

    size_t nassign = 1ull << cuts.size();
    for (size_t mask = 0; mask < nassign; ++mask) {
        StatedDiagram out;
        out.boundary_order = d.boundary_order;
        std::map<int, std::vector<std::pair<int, int>>> comp_cuts; // comp -> (junction, state)
        for (size_t k = 0; k < cuts.size(); ++k)
            comp_cuts[cuts[k].comp].push_back(
                {cuts[k].junction, (mask >> k) & 1 ? -1 : +1});

        std::vector<std::vector<int>> new_index(d.comps.size());
        for (int ci = 0; ci < (int)d.comps.size(); ++ci) {
            const Component& c = d.comps[ci];
            auto it = comp_cuts.find(ci);
            if (it == comp_cuts.end()) {
                Component copy = c;
                copy.height = (long long)out.comps.size();
                new_index[ci].push_back((int)out.comps.size());
                out.comps.push_back(copy);
                continue;
            }
            auto& cl = it->second;
            std::sort(cl.begin(), cl.end());
            size_t m = c.steps.size();
            if (c.closed) {
                // open the cycle at each cut junction
                for (size_t k = 0; k < cl.size(); ++k) {
                    int j0 = cl[k].first, j1 = cl[(k + 1) % cl.size()].first;
                    Component piece;
                    piece.closed = false;
                    piece.name = c.name + "_" + std::to_string(k);
                    piece.state_start = cl[k].second;
                    piece.state_end = cl[(k + 1) % cl.size()].second;
                    for (size_t t = (j0 + 1) % m;; t = (t + 1) % m) {
                        piece.steps.push_back(c.steps[t]);
                        if ((int)t == j1) break;
                    }
                    piece.height = (long long)out.comps.size();
                    new_index[ci].push_back((int)out.comps.size());
                    out.comps.push_back(std::move(piece));
                }
            } else {
                int prev = -1;
                int prev_state = c.state_start;
                for (size_t k = 0; k <= cl.size(); ++k) {
                    int stop = k < cl.size() ? cl[k].first : (int)m - 1;
                    Component piece;
                    piece.closed = false;
                    piece.name = c.name + "_" + std::to_string(k);
                    piece.state_start = prev_state;
                    piece.state_end = k < cl.size() ? cl[k].second : c.state_end;
                    for (int t = prev + 1; t <= stop; ++t) piece.steps.push_back(c.steps[t]);
                    prev = stop;
                    prev_state = k < cl.size() ? cl[k].second : 0;
                    piece.height = (long long)out.comps.size();
                    new_index[ci].push_back((int)out.comps.size());
                    out.comps.push_back(std::move(piece));
                }
            }
        }
        // remap inherited endpoint orders to the new component indices
        for (auto& [e, order] : out.boundary_order) {
            (void)e;
            for (auto& r : order) {
                const auto& pieces = new_index[r.comp];
                // the original start endpoint lives on the first piece, the
                // original end endpoint on the last
                r = EndpointRef{r.which == 0 ? pieces.front() : pieces.back(), r.which};
            }
        }
        // the new endpoints keep the heights of the crossings they replace:
        // bottom to top by original stacking, then traversal
        struct NewEnd {
            long long h;
            int comp, junction;
            EndpointRef ref;
        };
        std::vector<NewEnd> on1, on2;
        std::map<int, std::vector<std::pair<int, int>>> sorted_cuts;
        for (const auto& cc : cuts) sorted_cuts[cc.comp].push_back({cc.junction, 0});
        for (auto& [ci, cl] : sorted_cuts) {
            std::sort(cl.begin(), cl.end());
            const Component& c = d.comps[ci];
            int K = (int)cl.size();
            for (int k = 0; k < K; ++k) {
                int j = cl[k].first;
                int end_piece = c.closed ? new_index[ci][(k - 1 + K) % K] : new_index[ci][k];
                int start_piece = c.closed ? new_index[ci][k] : new_index[ci][k + 1];
                bool out_on_1 = Occurrence{c.steps[j].tri, c.steps[j].out_slot} == occ1;
                NewEnd out_end{c.height, ci, j, EndpointRef{end_piece, 1}};
                NewEnd in_end{c.height, ci, j, EndpointRef{start_piece, 0}};
                (out_on_1 ? on1 : on2).push_back(out_end);
                (out_on_1 ? on2 : on1).push_back(in_end);
            }
        }
        auto by_key = [](const NewEnd& a, const NewEnd& b) {
            return std::make_tuple(a.h, a.comp, a.junction) <
                   std::make_tuple(b.h, b.comp, b.junction);
        };
        std::sort(on1.begin(), on1.end(), by_key);
        std::sort(on2.begin(), on2.end(), by_key);
        std::vector<EndpointRef> ord1, ord2;
        for (const auto& x : on1) ord1.push_back(x.ref);
        for (const auto& x : on2) ord2.push_back(x.ref);
        out.boundary_order[copy1] = ord1;
        out.boundary_order[copy2] = ord2;
        res.summands.push_back(std::move(out));
    }
    return res;
}

// ---- curve file format -----------------------------------------------------------------

inline StatedDiagram parse_curves(const std::string& text, const TriangulatedSurface& s) {
    StatedDiagram d;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    Component* cur = nullptr;
    long long next_height = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "curve") {
            Component c;
            std::string kind;
            if (!(ls >> c.name >> kind))
                throw parse_error("line " + std::to_string(lineno) + ": malformed curve line");
            c.height = next_height++;
            if (kind == "closed") {
                c.closed = true;
                std::string opt;
                if (ls >> opt) {
                    long long h;
                    if (opt != "height" || !(ls >> h))
                        throw parse_error("line " + std::to_string(lineno) + ": malformed curve line");
                    c.height = h;
                }
            } else if (kind == "arc") {
                std::string s0, s1, hk;
                long long h;
                if (!(ls >> s0 >> s1 >> hk >> h) || hk != "height" ||
                    (s0 != "+" && s0 != "-") || (s1 != "+" && s1 != "-"))
                    throw parse_error("line " + std::to_string(lineno) + ": malformed arc line");
                c.state_start = s0 == "+" ? 1 : -1;
                c.state_end = s1 == "+" ? 1 : -1;
                c.height = h;
            } else {
                throw parse_error("line " + std::to_string(lineno) + ": curve kind must be closed or arc");
            }
            d.comps.push_back(std::move(c));
            cur = &d.comps.back();
        } else if (kw == "step") {
            if (!cur) throw parse_error("line " + std::to_string(lineno) + ": step before any curve");
            std::string tid;
            int a, b;
            if (!(ls >> tid >> a >> b))
                throw parse_error("line " + std::to_string(lineno) + ": malformed step line");
            cur->steps.push_back(Step{s.tri_index_of(tid), a, b});
        } else {
            throw parse_error("line " + std::to_string(lineno) + ": unknown keyword `" + kw + "`");
        }
    }
    if (d.comps.empty()) throw parse_error("no curves in file");
    validate_diagram(d, s);
    return d;
}

// ---- canonical generator diagrams --------------------------------------------------------

namespace detail {

// Counterclockwise sweep at a vertex, drawn outward from fan position p: one
// step per wedge crossed.  The step for wedge i enters through the tail
// representative of fan[i] and leaves through the next slot clockwise.
inline std::vector<Step> outward_sweep(const TriangulatedSurface& s, const Vertex& v, size_t p) {
    std::vector<Step> steps;
    for (size_t i = p; i + 1 < v.fan.size(); ++i) {
        const HalfEdge& h = s.half_edges()[v.fan[i]];
        if (!h.tail_rep) throw surface_error("sweep hit a half-edge without a tail end");
        Occurrence o = h.tail_rep->occ;
        steps.push_back(Step{o.tri, o.slot, (o.slot + 2) % 3});
    }
    return steps;
}
inline std::vector<Step> reverse_steps(std::vector<Step> v) {
    std::reverse(v.begin(), v.end());
    for (auto& st : v) std::swap(st.in_slot, st.out_slot);
    return v;
}

} // namespace detail

// The pushed-left representative of the arc a (an edge of the
// quasitriangulation), as a step path.  Starts on the boundary edge entered
// at the sweep end and finishes either on the opposite sweep's boundary edge
// (interior a) or on a itself (boundary a).
inline Component generator_arc(const TriangulatedSurface& s, int a, bool hatted) {
    const Edge& ea = s.edges[a];
    if (hatted && !ea.boundary) throw curve_error("hatted generators need a boundary edge");
    std::vector<int> halves;
    for (size_t h = 0; h < s.half_edges().size(); ++h)
        if (s.half_edges()[h].edge == a) halves.push_back((int)h);
    auto fan_pos = [&](int h) {
        int vi = s.vertex_of_half(h);
        const Vertex& v = s.vertices()[vi];
        for (size_t p = 0; p < v.fan.size(); ++p)
            if (v.fan[p] == h) return std::make_pair(vi, p);
        throw surface_error("half-edge missing from its fan");
    };
    Component c;
    c.closed = false;
    c.name = (hatted ? "Xhat_" : "X_") + ea.id;
    if (ea.boundary) {
        // one sweep from the tail vertex; the far end slides onto a itself
        int tail_half = -1;
        for (int h : halves) {
            auto [vi, p] = fan_pos(h);
            if (s.vertices()[vi].fan[p] == h && p == 0) tail_half = h;
        }
        if (tail_half < 0) throw surface_error("boundary edge has no outgoing end");
        auto [vi, p] = fan_pos(tail_half);
        c.steps = detail::reverse_steps(detail::outward_sweep(s, s.vertices()[vi], p));
        c.state_start = +1;
        c.state_end = hatted ? -1 : +1; // the endpoint on a carries the sign
    } else {
        auto [v1, p1] = fan_pos(halves[0]);
        auto [v2, p2] = fan_pos(halves[1]);
        if (!s.vertices()[v1].boundary || !s.vertices()[v2].boundary)
            throw curve_error("generator arcs must end on boundary punctures");
        c.steps = detail::reverse_steps(detail::outward_sweep(s, s.vertices()[v1], p1));
        auto fwd = detail::outward_sweep(s, s.vertices()[v2], p2);
        c.steps.insert(c.steps.end(), fwd.begin(), fwd.end());
        c.state_start = c.state_end = +1;
    }
    if (c.steps.empty()) throw curve_error("generator arc for `" + ea.id + "` is empty");
    return c;
}

// Small loop around an interior puncture.
inline Component peripheral_loop(const TriangulatedSurface& s, int vertex) {
    const Vertex& v = s.vertices()[vertex];
    if (v.boundary) throw curve_error("peripheral loops surround interior punctures");
    Component c;
    c.closed = true;
    c.name = "X_" + v.id;
    for (size_t i = 0; i < v.fan.size(); ++i) {
        const HalfEdge& h = s.half_edges()[v.fan[i]];
        Occurrence o = h.tail_rep->occ;
        c.steps.push_back(Step{o.tri, o.slot, (o.slot + 2) % 3});
    }
    return c;
}

// ---- special component detection -----------------------------------------------------------

struct SpecialComponent {
    std::string component;
    std::string kind;  // corner_arc | bad_arc | peripheral | generic
    std::string about; // the boundary edge or puncture involved
};

inline bool same_arc_path(const Component& a, const Component& b) {
    return a.steps == b.steps || a.reversed().steps == b.steps;
}
inline bool same_loop_path(const Component& a, const Component& b) {
    if (a.steps.size() != b.steps.size()) return false;
    size_t m = a.steps.size();
    auto rotations_match = [&](const Component& x) {
        for (size_t r = 0; r < m; ++r) {
            bool ok = true;
            for (size_t i = 0; i < m && ok; ++i)
                ok = x.steps[(r + i) % m] == b.steps[i];
            if (ok) return true;
        }
        return false;
    };
    return rotations_match(a) || rotations_match(a.reversed());
}

inline std::vector<SpecialComponent> detect_special_components(const StatedDiagram& d,
                                                               const TriangulatedSurface& s) {
    std::vector<SpecialComponent> out;
    std::vector<std::pair<int, Component>> corner_arcs;
    for (int ei : s.boundary_edge_indices())
        corner_arcs.push_back({ei, generator_arc(s, ei, false)});
    std::vector<std::pair<int, Component>> loops;
    for (size_t vi = 0; vi < s.vertices().size(); ++vi)
        if (!s.vertices()[vi].boundary) loops.push_back({(int)vi, peripheral_loop(s, (int)vi)});

    for (const auto& c : d.comps) {
        SpecialComponent sc{c.name, "generic", ""};
        if (c.closed) {
            for (const auto& [vi, ref] : loops)
                if (same_loop_path(c, ref)) {
                    sc.kind = "peripheral";
                    sc.about = s.vertices()[vi].id;
                }
        } else {
            for (const auto& [ei, ref] : corner_arcs) {
                if (!same_arc_path(c, ref)) continue;
                sc.kind = "corner_arc";
                sc.about = s.edges[ei].id;
                // the bad state pattern: + at the swept end, - on the edge itself
                int s_on_edge = c.steps == ref.steps ? c.state_end : c.state_start;
                int s_other = c.steps == ref.steps ? c.state_start : c.state_end;
                if (s_on_edge == -1 && s_other == +1) sc.kind = "bad_arc";
            }
        }
        out.push_back(sc);
    }
    return out;
}

} // namespace skt
