#pragma once

#include <array>
#include <cstring>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace skt {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct surface_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A spot where an edge is used by a triangle.
struct Occurrence {
    int tri = -1;
    int slot = -1; // 0,1,2 counterclockwise
    friend bool operator==(const Occurrence& a, const Occurrence& b) {
        return a.tri == b.tri && a.slot == b.slot;
    }
    friend bool operator<(const Occurrence& a, const Occurrence& b) {
        return a.tri != b.tri ? a.tri < b.tri : a.slot < b.slot;
    }
};

// One end of an edge occurrence.  Traversing a triangle's boundary
// counterclockwise, each slot runs from its tail end to its head end; the
// tail sits at corner (slot+2)%3 and the head at corner slot.
struct EdgeEnd {
    Occurrence occ;
    int which = 0; // 0 = tail, 1 = head
    friend bool operator==(const EdgeEnd& a, const EdgeEnd& b) {
        return a.occ == b.occ && a.which == b.which;
    }
    friend bool operator<(const EdgeEnd& a, const EdgeEnd& b) {
        return a.occ == b.occ ? a.which < b.which : a.occ < b.occ;
    }
};

struct Triangle {
    std::string id;
    std::array<int, 3> edge{}; // edge indices at slots 0,1,2
};

struct Edge {
    std::string id;
    bool boundary = false;
    std::vector<Occurrence> occs; // size 1 (boundary) or 2 (interior)
    bool self_folded_pair() const { return occs.size() == 2 && occs[0].tri == occs[1].tri; }
};

// A half-edge: an edge germ at a puncture.  For an interior edge the tail
// end of one occurrence is glued to the head end of the other, so a
// half-edge carries up to two end representatives.
struct HalfEdge {
    int edge = -1;
    std::optional<EdgeEnd> tail_rep;
    std::optional<EdgeEnd> head_rep;
};

struct Vertex {
    std::string id;
    bool boundary = false;
    std::vector<int> fan; // half-edge indices, ccw; linear for boundary, cyclic for interior
};

// Quasitriangulation data recovered from a completed ideal triangulation:
// for every interior puncture v there must be a self-folded triangle whose
// repeated edge e_v encloses v in a once-punctured monogon.
struct QuasiData {
    std::map<int, int> monogon_edge;    // interior vertex index -> e_v edge index
    std::map<int, int> monogon_bounder; // interior vertex index -> third side b_v
    std::vector<int> quasi_edges;       // all edges of Delta except the e_v
};

class TriangulatedSurface {
public:
    std::vector<Triangle> tris;
    std::vector<Edge> edges;

    // ----- parsing ---------------------------------------------------------

    static TriangulatedSurface parse(const std::string& text, bool allow_generated_names = false) {
        TriangulatedSurface s;
        std::map<std::string, int> edge_index;
        std::set<std::string> tri_ids;
        std::vector<std::string> boundary_decl;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::istringstream ls(line);
            std::string kw;
            if (!(ls >> kw)) continue;
            if (kw == "triangle") {
                std::string tid, e0, e1, e2, extra;
                if (!(ls >> tid >> e0 >> e1 >> e2) || (ls >> extra))
                    throw parse_error("line " + std::to_string(lineno) +
                                      ": expected `triangle <tid> <eid> <eid> <eid>`");
                if (!tri_ids.insert(tid).second)
                    throw parse_error("duplicate triangle id: " + tid);
                Triangle t;
                t.id = tid;
                const std::string eids[3] = {e0, e1, e2};
                int ti = (int)s.tris.size();
                for (int sl = 0; sl < 3; ++sl) {
                    if (!allow_generated_names)
                        for (const char* suffix : {"_hat", "_hatp"}) {
                            const std::string& id = eids[sl];
                            size_t n = strlen(suffix);
                            if (id.size() > n && id.compare(id.size() - n, n, suffix) == 0)
                                throw parse_error("edge id `" + id +
                                                  "` collides with a generated name");
                        }
                    auto it = edge_index.find(eids[sl]);
                    int ei;
                    if (it == edge_index.end()) {
                        ei = (int)s.edges.size();
                        edge_index.emplace(eids[sl], ei);
                        s.edges.push_back(Edge{eids[sl], false, {}});
                    } else {
                        ei = it->second;
                    }
                    t.edge[sl] = ei;
                    s.edges[ei].occs.push_back(Occurrence{ti, sl});
                }
                s.tris.push_back(t);
            } else if (kw == "boundary") {
                std::string eid;
                bool any = false;
                while (ls >> eid) { boundary_decl.push_back(eid); any = true; }
                if (!any)
                    throw parse_error("line " + std::to_string(lineno) +
                                      ": boundary line lists no edges");
            } else {
                throw parse_error("line " + std::to_string(lineno) + ": unknown keyword `" + kw + "`");
            }
        }
        if (s.tris.empty()) throw parse_error("no triangles");
        for (const auto& b : boundary_decl) {
            auto it = edge_index.find(b);
            if (it == edge_index.end())
                throw parse_error("boundary edge `" + b + "` does not occur in any triangle");
            s.edges[it->second].boundary = true;
        }
        s.validate();
        s.build_vertices();
        return s;
    }

    void validate() const {
        for (const auto& e : edges) {
            if (e.occs.size() > 2)
                throw surface_error("edge `" + e.id + "` used " + std::to_string(e.occs.size()) + " times");
            if (e.boundary && e.occs.size() != 1)
                throw surface_error("boundary edge `" + e.id + "` must occur exactly once");
            if (!e.boundary && e.occs.size() != 2)
                throw surface_error("edge `" + e.id + "` occurs once but is not declared boundary");
        }
    }

    // ----- basic queries ----------------------------------------------------

    int edge_index_of(const std::string& id) const {
        for (size_t i = 0; i < edges.size(); ++i)
            if (edges[i].id == id) return (int)i;
        throw surface_error("unknown edge: " + id);
    }
    int tri_index_of(const std::string& id) const {
        for (size_t i = 0; i < tris.size(); ++i)
            if (tris[i].id == id) return (int)i;
        throw surface_error("unknown triangle: " + id);
    }

    int edge_at(const Occurrence& o) const { return tris[o.tri].edge[o.slot]; }

    Occurrence other_occurrence(const Occurrence& o) const {
        const Edge& e = edges[edge_at(o)];
        if (e.occs.size() != 2) throw surface_error("edge `" + e.id + "` has no second occurrence");
        return e.occs[0] == o ? e.occs[1] : e.occs[0];
    }

    std::vector<int> boundary_edge_indices() const {
        std::vector<int> r;
        for (size_t i = 0; i < edges.size(); ++i)
            if (edges[i].boundary) r.push_back((int)i);
        return r;
    }
    std::vector<int> interior_edge_indices() const {
        std::vector<int> r;
        for (size_t i = 0; i < edges.size(); ++i)
            if (!edges[i].boundary) r.push_back((int)i);
        return r;
    }

    // ----- vertex structure --------------------------------------------------

    const std::vector<HalfEdge>& half_edges() const { return half_edges_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }

    int half_edge_of(const EdgeEnd& end) const {
        auto it = end_to_half_.find(end);
        if (it == end_to_half_.end()) throw surface_error("unknown edge end");
        return it->second;
    }
    int vertex_of_half(int he) const { return half_to_vertex_[he]; }
    int vertex_of_end(const EdgeEnd& end) const { return half_to_vertex_[half_edge_of(end)]; }

    int boundary_puncture_count() const {
        int n = 0;
        for (const auto& v : vertices_) n += v.boundary ? 1 : 0;
        return n;
    }
    int interior_puncture_count() const { return (int)vertices_.size() - boundary_puncture_count(); }

    // Euler characteristic of the punctured surface and the associated rank:
    // chi = |P_boundary| - E + F,   r = 3|P_boundary| - 3 chi = |Delta-bar|.
    std::pair<long long, long long> euler_and_rank() const {
        long long pb = boundary_puncture_count();
        long long chi = pb - (long long)edges.size() + (long long)tris.size();
        return {chi, 3 * pb - 3 * chi};
    }

    int connected_components() const {
        std::vector<int> comp(tris.size(), -1);
        int n = 0;
        for (size_t seed = 0; seed < tris.size(); ++seed) {
            if (comp[seed] >= 0) continue;
            std::vector<int> stack{(int)seed};
            comp[seed] = n;
            while (!stack.empty()) {
                int t = stack.back();
                stack.pop_back();
                for (int sl = 0; sl < 3; ++sl) {
                    const Edge& e = edges[tris[t].edge[sl]];
                    for (const auto& o : e.occs)
                        if (comp[o.tri] < 0) { comp[o.tri] = n; stack.push_back(o.tri); }
                }
            }
            ++n;
        }
        return n;
    }

    // Counterclockwise successor of an edge end around its vertex.  Tails step
    // across the corner to the head of the previous slot; heads continue on
    // the glued tail of the other occurrence (or stop at the boundary).
    EdgeEnd corner_step(const EdgeEnd& end) const {
        if (end.which != 0) throw surface_error("corner_step expects a tail end");
        int s = end.occ.slot;
        return EdgeEnd{Occurrence{end.occ.tri, (s + 2) % 3}, 1};
    }
    std::optional<EdgeEnd> glue_step(const EdgeEnd& end) const {
        if (end.which != 1) throw surface_error("glue_step expects a head end");
        const Edge& e = edges[edge_at(end.occ)];
        if (e.boundary) return std::nullopt;
        return EdgeEnd{other_occurrence(end.occ), 0};
    }

    const QuasiData& quasi() const {
        if (!quasi_) quasi_ = compute_quasi();
        return *quasi_;
    }

private:
    void build_vertices() {
        half_edges_.clear();
        vertices_.clear();
        end_to_half_.clear();

        // Group ends into half-edges.
        auto add_half = [&](const HalfEdge& h) {
            int idx = (int)half_edges_.size();
            half_edges_.push_back(h);
            if (h.tail_rep) end_to_half_[*h.tail_rep] = idx;
            if (h.head_rep) end_to_half_[*h.head_rep] = idx;
            return idx;
        };
        for (size_t ei = 0; ei < edges.size(); ++ei) {
            const Edge& e = edges[ei];
            if (e.boundary) {
                add_half(HalfEdge{(int)ei, EdgeEnd{e.occs[0], 0}, std::nullopt});
                add_half(HalfEdge{(int)ei, std::nullopt, EdgeEnd{e.occs[0], 1}});
            } else {
                add_half(HalfEdge{(int)ei, EdgeEnd{e.occs[0], 0}, EdgeEnd{e.occs[1], 1}});
                add_half(HalfEdge{(int)ei, EdgeEnd{e.occs[1], 0}, EdgeEnd{e.occs[0], 1}});
            }
        }

        half_to_vertex_.assign(half_edges_.size(), -1);
        int n_boundary = 0, n_interior = 0;

        auto walk_from_tail = [&](const EdgeEnd& start, Vertex& v, int vid) {
            EdgeEnd cur = start;
            while (true) {
                int he = half_edge_of(cur);
                if (half_to_vertex_[he] == vid && !v.fan.empty() && v.fan.front() == he)
                    break; // closed the cycle (interior vertex)
                if (half_to_vertex_[he] >= 0 && half_to_vertex_[he] != vid)
                    throw surface_error("inconsistent gluing around a puncture");
                if (half_to_vertex_[he] < 0) {
                    half_to_vertex_[he] = vid;
                    v.fan.push_back(he);
                }
                EdgeEnd head = corner_step(cur);
                int hhe = half_edge_of(head);
                if (half_to_vertex_[hhe] < 0) {
                    half_to_vertex_[hhe] = vid;
                    v.fan.push_back(hhe);
                } else if (hhe == v.fan.front()) {
                    break; // interior cycle closes
                }
                auto next = glue_step(head);
                if (!next) { v.boundary = true; break; }
                cur = *next;
            }
        };

        // Boundary vertices first: each starts at the tail of a boundary edge.
        for (size_t ei = 0; ei < edges.size(); ++ei) {
            if (!edges[ei].boundary) continue;
            EdgeEnd start{edges[ei].occs[0], 0};
            if (half_to_vertex_[half_edge_of(start)] >= 0) continue;
            Vertex v;
            v.boundary = true;
            v.id = "p" + std::to_string(n_boundary++);
            walk_from_tail(start, v, (int)vertices_.size());
            vertices_.push_back(std::move(v));
        }
        // Remaining orbits are interior punctures.
        for (size_t he = 0; he < half_edges_.size(); ++he) {
            if (half_to_vertex_[he] >= 0) continue;
            const HalfEdge& h = half_edges_[he];
            EdgeEnd start = h.tail_rep ? *h.tail_rep : *h.head_rep;
            if (start.which == 1) start = *glue_step(start);
            Vertex v;
            v.boundary = false;
            v.id = "v" + std::to_string(n_interior++);
            walk_from_tail(start, v, (int)vertices_.size());
            if (v.boundary) throw surface_error("boundary end reached from an interior orbit");
            vertices_.push_back(std::move(v));
        }

        // Side count: every fan entry is one half-edge, and both together
        // partition the 2E half-edges.
        size_t fan_total = 0;
        for (const auto& v : vertices_) fan_total += v.fan.size();
        if (fan_total != half_edges_.size())
            throw surface_error("fans do not partition the edge ends");
        for (const auto& v : vertices_) {
            if (!v.boundary) continue;
            int b = 0;
            for (int he : v.fan) b += edges[half_edges_[he].edge].boundary ? 1 : 0;
            if (b != 2 || !edges[half_edges_[v.fan.front()].edge].boundary ||
                !edges[half_edges_[v.fan.back()].edge].boundary)
                throw surface_error("boundary fan must start and end with boundary edges");
        }
    }

    QuasiData compute_quasi() const {
        if (boundary_edge_indices().empty())
            throw surface_error("quasitriangulation requires non-empty boundary");
        QuasiData q;
        std::set<int> radii;
        for (size_t ti = 0; ti < tris.size(); ++ti) {
            const Triangle& t = tris[ti];
            int rep = -1, third = -1;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b)
                    if (t.edge[a] == t.edge[b]) { rep = t.edge[a]; third = t.edge[3 - a - b]; }
            if (rep < 0) continue;
            // enclosed puncture: the vertex where head of one repeated slot
            // meets tail of the other inside this triangle
            int s0 = -1, s1 = -1;
            for (int sl = 0; sl < 3; ++sl)
                if (t.edge[sl] == rep) { if (s0 < 0) s0 = sl; else s1 = sl; }
            int corner = (s1 == (s0 + 1) % 3) ? s0 : s1; // corner between the repeated slots
            EdgeEnd head{Occurrence{(int)ti, corner}, 1};
            int v = vertex_of_end(head);
            if (vertices_[v].boundary || vertices_[v].fan.size() != 1)
                throw surface_error("self-folded triangle `" + t.id + "` does not enclose a monogon puncture");
            q.monogon_edge[v] = rep;
            q.monogon_bounder[v] = third;
            radii.insert(rep);
        }
        for (size_t vi = 0; vi < vertices_.size(); ++vi) {
            if (!vertices_[vi].boundary && !q.monogon_edge.count((int)vi))
                throw surface_error("interior puncture " + vertices_[vi].id +
                                    " is not enclosed in a once-punctured monogon");
        }
        for (size_t ei = 0; ei < edges.size(); ++ei)
            if (!radii.count((int)ei)) q.quasi_edges.push_back((int)ei);
        return q;
    }

    std::vector<HalfEdge> half_edges_;
    std::vector<Vertex> vertices_;
    std::map<EdgeEnd, int> end_to_half_;
    std::vector<int> half_to_vertex_;
    mutable std::optional<QuasiData> quasi_;
};

} // namespace skt
