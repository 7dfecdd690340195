#pragma once

#include <cassert>
#include <functional>

#include "curves.hpp"
#include "matrices.hpp"
#include "qtorus.hpp"

namespace skt {

struct trace_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// the 2^m assignment enumeration refuses to run past this many crossings
struct state_sum_too_large : trace_error {
    state_sum_too_large() : trace_error("state sum too large") {}
};

namespace detail {

inline FormPtr make_form(const std::vector<std::string>& names,
                         const std::function<long long(size_t, size_t)>& entry) {
    auto f = std::make_shared<AntisymForm>(names);
    for (size_t i = 0; i < names.size(); ++i)
        for (size_t j = 0; j < names.size(); ++j) f->entries[i][j] = entry(i, j);
    f->check_antisymmetric();
    return f;
}

inline FormPtr form_from_matrix(const LabeledMatrix& m) {
    return make_form(m.row_names, [&](size_t i, size_t j) { return m.m[i][j]; });
}

// One variable per (triangle, slot); q-commutation within a triangle follows
// the counterclockwise successor convention.
inline FormPtr slot_form(const TriangulatedSurface& s) {
    std::vector<std::string> names;
    for (size_t t = 0; t < s.tris.size(); ++t)
        for (int sl = 0; sl < 3; ++sl)
            names.push_back("t" + std::to_string(t) + "s" + std::to_string(sl));
    return make_form(names, [&](size_t i, size_t j) -> long long {
        if (i / 3 != j / 3) return 0;
        int a = (int)(i % 3), b = (int)(j % 3);
        if (b == (a + 1) % 3) return -1;
        if (a == (b + 1) % 3) return 1;
        return 0;
    });
}

// rows * Q * rows^T must reproduce `target`; guards every multiplicatively
// linear change of variables used by the engine
inline void check_compatible(const FormPtr& src_target, const FormPtr& big,
                             const std::vector<ExpVec>& rows, const char* what) {
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j)
            if (big->pairing(rows[i], rows[j]) != src_target->entries[i][j])
                throw trace_error(std::string("form change is not multiplicative: ") + what);
}

} // namespace detail

// Everything fixed by the surface: the companion surface with a triangle
// attached to each boundary edge, the variable tori, and the combinatorial
// matrices.
struct TraceContext {
    const TriangulatedSurface* base = nullptr;
    bool has_boundary = false;

    TriangulatedSurface star;           // base + one triangle per boundary edge
    std::vector<int> hat_edge;          // boundary edge -> its hat edge in star
    std::vector<int> att_tri;           // boundary edge -> attached triangle in star

    FormPtr form_y;     // face form over Delta: shear output
    FormPtr form_ystar; // extension form over Delta-bar: extended output
    FormPtr form_z;     // z-presentation of the extension
    FormPtr form_x;     // length form over E-bar + punctures (boundary only)

    std::vector<ExpVec> z_rows;     // z -> ystar exponent change
    std::vector<ExpVec> k_rows;     // x -> ystar exponent change (rows of K)
    LabeledMatrix K;                // extended arc matrix
    std::optional<ExtendedMatrices> mats;

    size_t delta_size = 0; // number of edges of the base surface
};

inline TraceContext make_trace_context(const TriangulatedSurface& s) {
    TraceContext ctx;
    ctx.base = &s;
    ctx.delta_size = s.edges.size();
    const auto bidx = s.boundary_edge_indices();
    ctx.has_boundary = !bidx.empty();

    LabeledMatrix q = face_matrix(s);
    ctx.form_y = detail::form_from_matrix(q);

    // companion surface
    std::ostringstream text;
    for (const auto& t : s.tris)
        text << "triangle " << t.id << " " << s.edges[t.edge[0]].id << " "
             << s.edges[t.edge[1]].id << " " << s.edges[t.edge[2]].id << "\n";
    if (ctx.has_boundary) {
        text << "boundary";
        for (int b : bidx)
            text << " " << s.edges[b].id + "_hatp" << " " << hat_name(s.edges[b].id);
        text << "\n";
        for (int b : bidx)
            text << "triangle att_" << s.edges[b].id << " " << s.edges[b].id << " "
                 << s.edges[b].id + "_hatp" << " " << hat_name(s.edges[b].id) << "\n";
    }
    ctx.star = TriangulatedSurface::parse(text.str(), true);
    ctx.hat_edge.assign(s.edges.size(), -1);
    ctx.att_tri.assign(s.edges.size(), -1);
    for (int b : bidx) {
        ctx.hat_edge[b] = ctx.star.edge_index_of(hat_name(s.edges[b].id));
        ctx.att_tri[b] = ctx.star.tri_index_of("att_" + s.edges[b].id);
    }

    // extension form over Delta-bar, read off the companion surface
    std::vector<std::string> dbar = delta_bar_names(s);
    FormPtr star_slots = detail::slot_form(ctx.star);
    auto slot_of = [&](const Occurrence& o) { return (size_t)(3 * o.tri + o.slot); };
    std::vector<ExpVec> collapse_rows; // ystar generator -> star slot exponents
    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        ExpVec row(star_slots->size(), 0);
        for (const auto& o : ctx.star.edges[ei].occs) row[slot_of(o)] += 1;
        collapse_rows.push_back(row);
    }
    for (int b : bidx) {
        ExpVec row(star_slots->size(), 0);
        row[slot_of(ctx.star.edges[ctx.hat_edge[b]].occs[0])] += 1;
        collapse_rows.push_back(row);
    }
    ctx.form_ystar = detail::make_form(dbar, [&](size_t i, size_t j) {
        return star_slots->pairing(collapse_rows[i], collapse_rows[j]);
    });

    // z-presentation: z_a = y_a, z_e = [y_e y_ehat], z_ehat = y_ehat^{-1}
    ctx.z_rows.clear();
    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        ExpVec row(dbar.size(), 0);
        row[ei] = 1;
        if (s.edges[ei].boundary)
            row[ctx.form_ystar->index(hat_name(s.edges[ei].id))] = 1;
        ctx.z_rows.push_back(row);
    }
    for (int b : bidx) {
        ExpVec row(dbar.size(), 0);
        row[ctx.form_ystar->index(hat_name(s.edges[b].id))] = -1;
        ctx.z_rows.push_back(row);
    }
    ctx.form_z = detail::make_form(dbar, [&](size_t i, size_t j) {
        return ctx.form_ystar->pairing(ctx.z_rows[i], ctx.z_rows[j]);
    });

    if (ctx.has_boundary) {
        ctx.mats = extended_matrices(s);
        // consistency between the block construction and the companion surface
        auto block = ctx.mats->Qstar;
        for (size_t i = 0; i < dbar.size(); ++i)
            for (size_t j = 0; j < dbar.size(); ++j)
                if (block.m[i][j] != ctx.form_ystar->entries[i][j])
                    throw trace_error("extension form disagrees with the block matrices");
        for (size_t i = 0; i < dbar.size(); ++i)
            for (size_t j = 0; j < dbar.size(); ++j)
                if (ctx.mats->Qbar.m[i][j] != ctx.form_z->entries[i][j])
                    throw trace_error("z-form disagrees with the block matrices");

        ctx.K = arc_matrix_extended(s);
        LabeledMatrix pbard = pbar_diamond(s);
        ctx.form_x = detail::form_from_matrix(pbard);
        ctx.k_rows.clear();
        for (size_t i = 0; i < ctx.K.rows(); ++i) {
            ExpVec row(dbar.size(), 0);
            for (size_t j = 0; j < dbar.size(); ++j) row[j] = (int)ctx.K.m[i][j];
            ctx.k_rows.push_back(row);
        }
    }
    return ctx;
}

// ---- state sum engine ----------------------------------------------------------------

namespace detail {

struct Entity {
    int comp = -1;
    int idx = -1; // arcs: 0 start, j crossing before step j, m end; closed: j
    friend bool operator==(const Entity& a, const Entity& b) {
        return a.comp == b.comp && a.idx == b.idx;
    }
    friend bool operator<(const Entity& a, const Entity& b) {
        return a.comp != b.comp ? a.comp < b.comp : a.idx < b.idx;
    }
};

struct ArcRef {
    int comp, step;
    Entity in_ent, out_ent;
};

struct StepId {
    int comp, step;
    friend bool operator<(const StepId& a, const StepId& b) {
        return a.comp != b.comp ? a.comp < b.comp : a.step < b.step;
    }
    friend bool operator==(const StepId& a, const StepId& b) {
        return a.comp == b.comp && a.step == b.step;
    }
};

struct Leveling {
    std::map<int, std::vector<ArcRef>> tri_stack; // per triangle, bottom to top
    bool separated = true; // components occupy bands in every triangle
};

class StateSum {
public:
    StateSum(const TriangulatedSurface& s, const StatedDiagram& d,
             std::map<int, std::vector<Entity>> fixed, FormPtr slots)
        : s_(s), d_(d), fixed_(std::move(fixed)), slots_(std::move(slots)) {
        build_entities();
        solve_leveling();
    }

    // height key: larger stacks higher
    std::pair<long long, int> comp_key(int ci) const {
        return {d_.comps[ci].height, ci};
    }

    TorusElement run(bool naive) const {
        if (d_.comps.empty()) return TorusElement::unit(slots_);
        if (!naive && lv_.separated) {
            std::vector<int> order(d_.comps.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return comp_key(a) > comp_key(b); });
            TorusElement total = TorusElement::unit(slots_);
            for (int ci : order) total = total * component_sum(ci);
            return total;
        }
        return joint_sum(naive);
    }

private:
    // ---- diagram decomposition ----

    void build_entities() {
        for (int ci = 0; ci < (int)d_.comps.size(); ++ci) {
            const Component& c = d_.comps[ci];
            size_t m = c.steps.size();
            if (c.closed) {
                for (size_t j = 0; j < m; ++j)
                    crossing_edges_[Entity{ci, (int)j}] =
                        s_.edge_at(Occurrence{c.steps[j].tri, c.steps[j].in_slot});
            } else {
                endpoint_state_[Entity{ci, 0}] = c.state_start;
                endpoint_state_[Entity{ci, (int)m}] = c.state_end;
                endpoint_edges_[Entity{ci, 0}] = s_.edge_at(c.start_occ());
                endpoint_edges_[Entity{ci, (int)m}] = s_.edge_at(c.end_occ());
                for (size_t j = 1; j < m; ++j)
                    crossing_edges_[Entity{ci, (int)j}] =
                        s_.edge_at(Occurrence{c.steps[j].tri, c.steps[j].in_slot});
            }
        }
    }

    Entity in_entity(int ci, int j) const { return Entity{ci, j}; }
    Entity out_entity(int ci, int j) const {
        const Component& c = d_.comps[ci];
        int m = (int)c.steps.size();
        if (c.closed) return Entity{ci, (j + 1) % m};
        return Entity{ci, j + 1};
    }

    // ---- leveling ----

    // Interior crossing heights are free, so the engine may pick any heights
    // that stack every triangle.  The unknowns are the pairwise stacking
    // booleans of the steps sharing a wall; crossings tie the two sides of
    // each interior edge together, the wall orders of the boundary and of the
    // attached triangles are data.  The ties form an equality system solved
    // by union-find with polarity, and only the genuinely free classes are
    // searched.
    void solve_leveling() {
        // feet per wall
        std::map<Occurrence, std::vector<std::pair<Entity, StepId>>> wall_feet;
        std::map<int, std::vector<ArcRef>> tri_arcs;
        for (int ci = 0; ci < (int)d_.comps.size(); ++ci)
            for (int j = 0; j < (int)d_.comps[ci].steps.size(); ++j) {
                const Step& st = d_.comps[ci].steps[j];
                ArcRef a{ci, j, in_entity(ci, j), out_entity(ci, j)};
                tri_arcs[st.tri].push_back(a);
                wall_feet[Occurrence{st.tri, st.in_slot}].push_back({a.in_ent, StepId{ci, j}});
                wall_feet[Occurrence{st.tri, st.out_slot}].push_back({a.out_ent, StepId{ci, j}});
            }

        // pair variables: value true means first below second (canonical order)
        std::map<std::pair<StepId, StepId>, int> var_of;
        std::vector<std::pair<StepId, StepId>> pairs;
        auto var = [&](StepId u, StepId v, bool& flipped) {
            flipped = v < u;
            if (flipped) std::swap(u, v);
            auto key = std::make_pair(u, v);
            auto it = var_of.find(key);
            if (it != var_of.end()) return it->second;
            int id = (int)pairs.size();
            var_of.emplace(key, id);
            pairs.push_back(key);
            return id;
        };
        for (const auto& [occ, feet] : wall_feet) {
            (void)occ;
            for (size_t i = 0; i < feet.size(); ++i)
                for (size_t j = i + 1; j < feet.size(); ++j) {
                    bool fl;
                    var(feet[i].second, feet[j].second, fl);
                }
        }

        // union-find with parity
        std::vector<int> parent(pairs.size()), parity(pairs.size(), 0);
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
        std::function<std::pair<int, int>(int)> find = [&](int x) -> std::pair<int, int> {
            if (parent[x] == x) return {x, 0};
            auto [r, p] = find(parent[x]);
            parent[x] = r;
            parity[x] ^= p;
            return {r, parity[x]};
        };
        auto unite = [&](int a, int b, int rel) {
            auto [ra, pa] = find(a);
            auto [rb, pb] = find(b);
            if (ra == rb) {
                if ((pa ^ pb) != rel)
                    throw trace_error("no consistent stacking order found for the diagram");
                return;
            }
            parent[ra] = rb;
            parity[ra] = pa ^ pb ^ rel;
        };

        // crossings tie the two sides of their interior edge
        std::map<int, std::vector<std::pair<Entity, std::vector<StepId>>>> edge_entities;
        {
            std::map<int, std::map<Entity, std::vector<StepId>>> tmp;
            for (const auto& [occ, feet] : wall_feet) {
                int e = s_.edge_at(occ);
                for (const auto& [ent, sid] : feet) tmp[e][ent].push_back(sid);
            }
            for (auto& [e, m] : tmp)
                for (auto& [ent, sids] : m) edge_entities[e].push_back({ent, sids});
        }
        for (const auto& [e, ents] : edge_entities) {
            if (s_.edges[e].boundary) continue;
            for (size_t i = 0; i < ents.size(); ++i)
                for (size_t j = i + 1; j < ents.size(); ++j) {
                    // each interior entity has one step foot on each side
                    const auto& [ex, sx] = ents[i];
                    const auto& [ey, sy] = ents[j];
                    (void)ex;
                    (void)ey;
                    if (sx.size() != 2 || sy.size() != 2)
                        throw trace_error("interior crossing with bad wall incidence");
                    // match the sides via the occurrence
                    std::array<StepId, 2> xs, ys;
                    for (int side = 0; side < 2; ++side) {
                        Occurrence occ = s_.edges[e].occs[side];
                        auto on = [&](const std::vector<StepId>& sids, const Entity& ent) {
                            for (const auto& sid : sids) {
                                const Step& st = d_.comps[sid.comp].steps[sid.step];
                                if (Occurrence{st.tri, st.in_slot} == occ &&
                                    in_entity(sid.comp, sid.step) == ent)
                                    return sid;
                                if (Occurrence{st.tri, st.out_slot} == occ &&
                                    out_entity(sid.comp, sid.step) == ent)
                                    return sid;
                            }
                            throw trace_error("crossing foot not found on its wall");
                        };
                        xs[side] = on(sx, ents[i].first);
                        ys[side] = on(sy, ents[j].first);
                    }
                    bool f0, f1;
                    int v0 = var(xs[0], ys[0], f0);
                    int v1 = var(xs[1], ys[1], f1);
                    unite(v0, v1, (f0 ? 1 : 0) ^ (f1 ? 1 : 0));
                }
        }

        // data walls force values: collect (variable, value) with conflicts
        std::vector<int> forced(pairs.size(), -1);
        auto force = [&](int v, int val) {
            auto [r, p] = find(v);
            int rval = val ^ p;
            if (forced[r] >= 0 && forced[r] != rval)
                throw trace_error("no consistent stacking order found for the diagram");
            forced[r] = rval;
        };
        auto fix_wall = [&](int edge, const std::vector<Entity>& order) {
            // entity -> rank
            auto rank_of = [&](const Entity& ent) {
                for (size_t i = 0; i < order.size(); ++i)
                    if (order[i] == ent) return (long long)i;
                throw trace_error("fixed order misses an entity");
            };
            for (const auto& occ : s_.edges[edge].occs) {
                auto it = wall_feet.find(occ);
                if (it == wall_feet.end()) continue;
                const auto& feet = it->second;
                for (size_t i = 0; i < feet.size(); ++i)
                    for (size_t j = i + 1; j < feet.size(); ++j) {
                        bool fl;
                        int v = var(feet[i].second, feet[j].second, fl);
                        bool below = rank_of(feet[i].first) < rank_of(feet[j].first);
                        force(v, (below ^ fl) ? 1 : 0);
                    }
            }
        };
        for (const auto& [e, ents] : edge_entities) {
            if (!s_.edges[e].boundary) continue;
            auto order = endpoint_order(d_, s_, e);
            std::vector<Entity> fixed;
            for (const auto& r : order)
                fixed.push_back(Entity{r.comp, r.which == 0 ? 0 : (int)d_.comps[r.comp].steps.size()});
            fix_wall(e, fixed);
        }
        for (const auto& [e, list] : fixed_) fix_wall(e, list);

        // Free classes keep the stacking semantics by default: distinct
        // components follow their bands, one component follows its traversal.
        // The first assignment tried is the preferred one, so fully free
        // situations stack exactly like the product of the components.
        std::vector<int> free_roots;
        std::map<int, int> preferred;
        for (size_t i = 0; i < pairs.size(); ++i) {
            auto [r, p] = find((int)i);
            if (forced[r] >= 0) continue;
            const auto& [u, v] = pairs[i];
            int pref;
            if (u.comp != v.comp)
                pref = comp_key(u.comp) < comp_key(v.comp) ? 1 : 0;
            else
                pref = u.step < v.step ? 1 : 0;
            if (!preferred.count(r)) {
                preferred[r] = pref ^ p;
                free_roots.push_back(r);
            }
        }
        // Search only over classes implicated in a failing triangle, growing
        // the suspect set on demand; everything else keeps its preference.
        std::map<int, int> flip; // root -> 0/1, applied on top of preferred
        auto value_of = [&](int v) {
            auto [r, p] = find(v);
            int base = forced[r];
            if (base < 0) {
                auto it = flip.find(r);
                base = preferred[r] ^ (it == flip.end() ? 0 : it->second);
            }
            return base ^ p;
        };
        auto attempt = [&](int& failed_tri) {
            return build_stacks(
                tri_arcs,
                [&](StepId u, StepId v) {
                    bool fl;
                    int id = var(u, v, fl);
                    return value_of(id) ^ (fl ? 1 : 0);
                },
                failed_tri);
        };

        std::vector<int> suspects;
        auto implicate = [&](int tri) {
            bool grew = false;
            for (const auto& a : tri_arcs.at(tri))
                for (const auto& b : tri_arcs.at(tri)) {
                    StepId u{a.comp, a.step}, v{b.comp, b.step};
                    if (!(u < v)) continue;
                    auto it = var_of.find(std::make_pair(u, v));
                    if (it == var_of.end()) continue;
                    auto [r, p] = find(it->second);
                    (void)p;
                    if (forced[r] >= 0) continue;
                    if (std::find(suspects.begin(), suspects.end(), r) == suspects.end()) {
                        suspects.push_back(r);
                        grew = true;
                    }
                }
            return grew;
        };

        int failed_tri = -1;
        if (attempt(failed_tri)) return;
        while (true) {
            if (!implicate(failed_tri)) {
                // widen to every free class before giving up
                bool grew = false;
                for (int r : free_roots)
                    if (std::find(suspects.begin(), suspects.end(), r) == suspects.end()) {
                        suspects.push_back(r);
                        grew = true;
                    }
                if (!grew)
                    throw trace_error("no consistent stacking order found for the diagram");
            }
            if (suspects.size() > 20)
                throw trace_error("stacking search space too large");
            bool solved = false;
            for (unsigned long long mask = 0; mask < (1ull << suspects.size()); ++mask) {
                flip.clear();
                for (size_t k = 0; k < suspects.size(); ++k)
                    flip[suspects[k]] = (int)((mask >> k) & 1);
                if (attempt(failed_tri)) { solved = true; break; }
            }
            if (solved) return;
        }
    }

    template <typename Below>
    bool build_stacks(const std::map<int, std::vector<ArcRef>>& tri_arcs, Below below,
                      int& failed_tri) {
        lv_.tri_stack.clear();
        lv_.separated = true;
        for (const auto& [tri, arcs] : tri_arcs) {
            size_t n = arcs.size();
            std::vector<std::vector<int>> succ(n);
            std::vector<int> indeg(n, 0);
            auto shares_wall = [&](const ArcRef& a, const ArcRef& b) {
                const Step& sa = d_.comps[a.comp].steps[a.step];
                const Step& sb = d_.comps[b.comp].steps[b.step];
                return sa.in_slot == sb.in_slot || sa.in_slot == sb.out_slot ||
                       sa.out_slot == sb.in_slot || sa.out_slot == sb.out_slot;
            };
            for (size_t u = 0; u < n; ++u)
                for (size_t v = u + 1; v < n; ++v) {
                    if (!shares_wall(arcs[u], arcs[v])) continue;
                    bool u_below = below(StepId{arcs[u].comp, arcs[u].step},
                                         StepId{arcs[v].comp, arcs[v].step});
                    if (u_below) { succ[u].push_back((int)v); ++indeg[v]; }
                    else { succ[v].push_back((int)u); ++indeg[u]; }
                }
            std::vector<int> order;
            std::vector<bool> done(n, false);
            for (size_t it = 0; it < n; ++it) {
                int best = -1;
                for (size_t u = 0; u < n; ++u) {
                    if (done[u] || indeg[u] != 0) continue;
                    if (best < 0 ||
                        std::make_tuple(comp_key(arcs[u].comp), arcs[u].step) <
                            std::make_tuple(comp_key(arcs[best].comp), arcs[best].step))
                        best = (int)u;
                }
                if (best < 0) { failed_tri = tri; return false; } // cycle
                done[best] = true;
                order.push_back(best);
                for (int v : succ[best]) --indeg[v];
            }
            std::vector<ArcRef> stack;
            for (int u : order) stack.push_back(arcs[u]);
            for (size_t i = 0; i + 1 < stack.size(); ++i)
                if (comp_key(stack[i].comp) > comp_key(stack[i + 1].comp))
                    lv_.separated = false;
            lv_.tri_stack[tri] = std::move(stack);
        }
        return true;
    }

    // ---- evaluation ----

    // arcs of one component in multiplication order (top of the stack first)
    std::vector<ArcRef> ordered_arcs(std::optional<int> comp) const {
        std::vector<ArcRef> arcs;
        for (const auto& [tri, stack] : lv_.tri_stack) {
            (void)tri;
            for (auto it = stack.rbegin(); it != stack.rend(); ++it)
                if (!comp || it->comp == *comp) arcs.push_back(*it);
        }
        return arcs;
    }

    int entity_state(const Entity& e, unsigned long long mask,
                     const std::vector<Entity>& bits) const {
        auto st = endpoint_state_.find(e);
        if (st != endpoint_state_.end()) return st->second;
        for (size_t b = 0; b < bits.size(); ++b)
            if (bits[b] == e) return (mask >> b) & 1 ? -1 : +1;
        throw trace_error("entity has no state");
    }

    static bool dead_arc(const Step& st, int mu, int nu) {
        // zero exactly when the state on the counterclockwise-later edge is -
        // and on the earlier edge is +
        if (st.out_slot == (st.in_slot + 1) % 3) return nu == -1 && mu == +1;
        return mu == -1 && nu == +1;
    }

    TorusElement sum_over(const std::vector<Entity>& bits,
                          const std::vector<ArcRef>& arcs, bool naive) const {
        if (bits.size() > 20) throw state_sum_too_large();
        TorusElement out(slots_);
        size_t nslots = slots_->size();
        for (unsigned long long mask = 0; mask < (1ull << bits.size()); ++mask) {
            bool dead = false;
            if (naive) {
                TorusElement prod = TorusElement::unit(slots_);
                for (const auto& a : arcs) {
                    const Step& st = d_.comps[a.comp].steps[a.step];
                    int mu = entity_state(a.in_ent, mask, bits);
                    int nu = entity_state(a.out_ent, mask, bits);
                    if (dead_arc(st, mu, nu)) { dead = true; break; }
                    ExpVec k(nslots, 0);
                    k[3 * st.tri + st.in_slot] += mu;
                    k[3 * st.tri + st.out_slot] += nu;
                    prod = prod * TorusElement::monomial(slots_, k);
                }
                if (!dead) out += prod;
                continue;
            }
            ExpVec acc(nslots, 0);
            long long q2 = 0;
            for (const auto& a : arcs) {
                const Step& st = d_.comps[a.comp].steps[a.step];
                int mu = entity_state(a.in_ent, mask, bits);
                int nu = entity_state(a.out_ent, mask, bits);
                if (dead_arc(st, mu, nu)) { dead = true; break; }
                ExpVec k(nslots, 0);
                k[3 * st.tri + st.in_slot] += mu;
                k[3 * st.tri + st.out_slot] += nu;
                q2 += slots_->pairing(acc, k);
                for (size_t i = 0; i < nslots; ++i) acc[i] += k[i];
            }
            if (!dead) out.add_term(acc, HalfLaurent::q_half(q2));
        }
        return out;
    }

    std::vector<Entity> crossing_bits(std::optional<int> comp) const {
        std::vector<Entity> bits;
        for (const auto& [ent, e] : crossing_edges_) {
            (void)e;
            if (!comp || ent.comp == *comp) bits.push_back(ent);
        }
        return bits;
    }

    TorusElement component_sum(int ci) const {
        return sum_over(crossing_bits(ci), ordered_arcs(ci), false);
    }
    TorusElement joint_sum(bool naive) const {
        // multiplication order: stacking bands from the top, then triangle
        // stacks from the top
        std::vector<int> order(d_.comps.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return comp_key(a) > comp_key(b); });
        std::vector<ArcRef> arcs;
        if (lv_.separated) {
            for (int ci : order) {
                auto part = ordered_arcs(ci);
                arcs.insert(arcs.end(), part.begin(), part.end());
            }
        } else {
            arcs = ordered_arcs(std::nullopt);
        }
        return sum_over(crossing_bits(std::nullopt), arcs, naive);
    }

    const TriangulatedSurface& s_;
    const StatedDiagram& d_;
    std::map<int, std::vector<Entity>> fixed_;
    FormPtr slots_;
    std::map<Entity, int> crossing_edges_;
    std::map<Entity, int> endpoint_edges_;
    std::map<Entity, int> endpoint_state_;
    Leveling lv_;
};

// collapse a slot-torus element through the occurrence-sum change of variables
inline TorusElement collapse_slots(const TorusElement& u, const FormPtr& target,
                                   const std::vector<std::vector<Occurrence>>& gens) {
    TorusElement out(target);
    for (const auto& [k, c] : u.terms()) {
        ExpVec img(target->size(), 0);
        ExpVec seen(k.size(), 0);
        for (size_t g = 0; g < gens.size(); ++g) {
            long long val = 0;
            bool first = true;
            for (const auto& o : gens[g]) {
                long long x = k[3 * o.tri + o.slot];
                seen[3 * o.tri + o.slot] = 1;
                if (first) { val = x; first = false; }
                else if (x != val)
                    throw trace_error("state sum produced unequal exponents across a gluing");
            }
            img[g] = (int)val;
        }
        for (size_t i = 0; i < k.size(); ++i)
            if (!seen[i] && k[i] != 0)
                throw trace_error("state sum leaked onto an unused slot");
        out.add_term(img, c);
    }
    return out;
}

} // namespace detail

// ---- public trace operations -------------------------------------------------------------

// Bonahon-Wong style trace in the face torus over Delta.
inline TorusElement shear_trace(const StatedDiagram& d, const TraceContext& ctx,
                                bool naive = false) {
    validate_diagram(d, *ctx.base);
    FormPtr slots = detail::slot_form(*ctx.base);
    detail::StateSum engine(*ctx.base, d, {}, slots);
    TorusElement raw = engine.run(naive);
    std::vector<std::vector<Occurrence>> gens;
    for (const auto& e : ctx.base->edges) gens.push_back(e.occs);
    return detail::collapse_slots(raw, ctx.form_y, gens);
}

// The extended diagram on the companion surface, with the crossing order of
// the old boundary edges pinned to the endpoint order.
inline std::pair<StatedDiagram, std::map<int, std::vector<detail::Entity>>>
extend_diagram(const StatedDiagram& d, const TraceContext& ctx) {
    StatedDiagram out;
    out.comps = d.comps;
    std::map<int, std::vector<detail::Entity>> fixed;
    if (!ctx.has_boundary) {
        out.interior_order = d.interior_order;
        return {out, fixed};
    }
    const TriangulatedSurface& s = *ctx.base;
    for (auto& c : out.comps) {
        if (c.closed) continue;
        int es = s.edge_at(Occurrence{c.steps.front().tri, c.steps.front().in_slot});
        int ee = s.edge_at(Occurrence{c.steps.back().tri, c.steps.back().out_slot});
        c.steps.insert(c.steps.begin(), Step{ctx.att_tri[es], 2, 0});
        c.steps.push_back(Step{ctx.att_tri[ee], 0, 2});
    }
    // interior crossing records shift by the prepended extension step
    for (const auto& [e, order] : d.interior_order) {
        std::vector<CrossRef> shifted;
        for (const auto& r : order)
            shifted.push_back(CrossRef{
                r.comp, d.comps[r.comp].closed ? r.junction : r.junction + 1});
        out.interior_order[e] = shifted;
    }
    for (int b : ctx.base->boundary_edge_indices()) {
        auto order = endpoint_order(d, s, b);
        if (order.empty()) continue;
        std::vector<EndpointRef> hat_order = order;
        out.boundary_order[ctx.hat_edge[b]] = hat_order;
        std::vector<detail::Entity> cross;
        for (const auto& r : order) {
            int m = (int)out.comps[r.comp].steps.size();
            cross.push_back(detail::Entity{r.comp, r.which == 0 ? 1 : m - 1});
        }
        fixed[b] = cross;
    }
    return {out, fixed};
}

// Lift of the quantum trace in the extension torus over Delta-bar
// (y-presentation).  Without boundary this coincides with shear_trace.
inline TorusElement extended_trace(const StatedDiagram& d, const TraceContext& ctx,
                                   bool naive = false) {
    validate_diagram(d, *ctx.base);
    auto [star_diagram, fixed] = extend_diagram(d, ctx);
    FormPtr slots = detail::slot_form(ctx.star);
    detail::StateSum engine(ctx.star, star_diagram, fixed, slots);
    TorusElement raw = engine.run(naive);
    std::vector<std::vector<Occurrence>> gens;
    for (size_t ei = 0; ei < ctx.base->edges.size(); ++ei)
        gens.push_back(ctx.star.edges[ei].occs);
    for (int b : ctx.base->boundary_edge_indices())
        gens.push_back(ctx.star.edges[ctx.hat_edge[b]].occs);
    return detail::collapse_slots(raw, ctx.form_ystar, gens);
}

inline TorusElement naive_state_sum(const StatedDiagram& d, const TraceContext& ctx,
                                    bool extended) {
    return extended ? extended_trace(d, ctx, true) : shear_trace(d, ctx, true);
}

// z-presentation exponent of a ystar term: m(a) = k(a), m(ehat) = k(e) - k(ehat).
inline ExpVec z_exponent(const ExpVec& k, const TraceContext& ctx) {
    ExpVec m(k.size(), 0);
    for (size_t i = 0; i < ctx.delta_size; ++i) m[i] = k[i];
    size_t h = ctx.delta_size;
    for (int b : ctx.base->boundary_edge_indices()) {
        m[h] = k[b] - k[h];
        ++h;
    }
    return m;
}
inline ExpVec ystar_exponent(const ExpVec& m, const TraceContext& ctx) {
    ExpVec k(m.size(), 0);
    for (size_t i = 0; i < ctx.delta_size; ++i) k[i] = m[i];
    size_t h = ctx.delta_size;
    for (int b : ctx.base->boundary_edge_indices()) {
        k[h] = m[b] - m[h];
        ++h;
    }
    return k;
}

inline TorusElement to_z_presentation(const TorusElement& u, const TraceContext& ctx) {
    TorusElement out(ctx.form_z);
    for (const auto& [k, c] : u.terms()) out.add_term(z_exponent(k, ctx), c);
    return out;
}

// Does every term of the extended trace lie in the lift algebra: balanced,
// hats matching their edges mod 2, and nonnegative hat exponents in the
// z-presentation.
inline bool in_lift_algebra(const TorusElement& u, const TraceContext& ctx) {
    for (const auto& [k, c] : u.terms()) {
        (void)c;
        ExpVec m = z_exponent(k, ctx);
        std::vector<long long> n(ctx.delta_size);
        for (size_t i = 0; i < ctx.delta_size; ++i) n[i] = m[i];
        if (!is_balanced(n, *ctx.base)) return false;
        size_t h = ctx.delta_size;
        for (int b : ctx.base->boundary_edge_indices()) {
            (void)b;
            if (m[h] < 0) return false;
            if (m[h] % 2 != 0) return false;
            ++h;
        }
    }
    return true;
}
inline bool is_balanced_element(const TorusElement& u, const TraceContext& ctx) {
    for (const auto& [k, c] : u.terms()) {
        (void)c;
        std::vector<long long> n(k.begin(), k.end());
        n.resize(ctx.delta_size);
        if (!is_balanced(n, *ctx.base)) return false;
    }
    return true;
}

// Projection onto the balanced face torus: kills every z-monomial with a
// nonzero hat exponent, identity on the rest.
inline TorusElement project_pr(const TorusElement& u, const TraceContext& ctx) {
    TorusElement out(ctx.form_y);
    for (const auto& [k, c] : u.terms()) {
        ExpVec m = z_exponent(k, ctx);
        bool keep = true;
        for (size_t i = ctx.delta_size; i < m.size(); ++i)
            if (m[i] != 0) keep = false;
        if (!keep) continue;
        ExpVec restricted(ctx.delta_size);
        for (size_t i = 0; i < ctx.delta_size; ++i) restricted[i] = m[i];
        out.add_term(restricted, c);
    }
    return out;
}

// dego weights: count only the unhatted exponents
inline std::vector<long long> dego_weights(const TraceContext& ctx) {
    std::vector<long long> w(ctx.form_ystar->size(), 0);
    for (size_t i = 0; i < ctx.delta_size; ++i) w[i] = 1;
    return w;
}

// ---- generators and the comparison map -----------------------------------------------------

// Basis coordinates of the generator arc: crossing counts from the arc
// matrix, hats zero except the negative end of a hatted generator.
inline BarVector generator_coordinates(const TraceContext& ctx, const std::string& name,
                                       bool hatted) {
    const TriangulatedSurface& s = *ctx.base;
    size_t row = ctx.K.row_index(hatted ? hat_name(name) : name);
    BarVector v;
    v.n.assign(s.edges.size(), 0);
    for (size_t ei = 0; ei < s.edges.size(); ++ei)
        v.n[ei] = ctx.K.m[row][ctx.K.col_index(s.edges[ei].id)];
    for (int b : s.boundary_edge_indices()) v.hat[b] = 0;
    if (hatted) v.hat[s.edge_index_of(name)] = 2;
    return v;
}

// Quantum trace of the normalized generator X_a, X_a-hat, or the peripheral
// loop X_v.  Arcs whose two ideal endpoints coincide pick up the reflection
// normalization q^{-1/2} (q^{+1/2} for the hatted state pattern).
inline TorusElement trace_generator(const TraceContext& ctx, const std::string& gen) {
    const TriangulatedSurface& s = *ctx.base;
    for (const auto& v : s.vertices()) {
        if (v.id != gen) continue;
        StatedDiagram d;
        d.comps.push_back(peripheral_loop(s, (int)(&v - &s.vertices()[0])));
        return extended_trace(d, ctx);
    }
    bool hatted = false;
    std::string name = gen;
    const std::string suffix = "_hat";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        hatted = true;
        name = name.substr(0, name.size() - suffix.size());
    }
    StatedDiagram d = reconstruct_from_normal(generator_coordinates(ctx, name, hatted), s);
    if (d.comps.size() != 1) throw trace_error("generator did not reconstruct to one arc");
    TorusElement t = extended_trace(d, ctx);
    int e = s.edge_index_of(name);
    std::vector<int> hv;
    for (size_t h = 0; h < s.half_edges().size(); ++h)
        if (s.half_edges()[h].edge == e) hv.push_back((int)h);
    if (s.vertex_of_half(hv[0]) == s.vertex_of_half(hv[1]))
        t = t * HalfLaurent::q_half(hatted ? 1 : -1);
    return t;
}

// Word in the length-coordinate torus: ordered product of generators.
inline TorusElement length_monomial(const TraceContext& ctx,
                                    const std::vector<std::string>& word) {
    if (!ctx.has_boundary) throw trace_error("length coordinates need a boundary");
    TorusElement out = TorusElement::unit(ctx.form_x);
    for (const auto& g : word) {
        ExpVec k(ctx.form_x->size(), 0);
        k[ctx.form_x->index(g)] = 1;
        out = out * TorusElement::monomial(ctx.form_x, k);
    }
    return out;
}

// The multiplicatively linear comparison x^n -> y^{nK}.
inline TorusElement psi_map(const TorusElement& u, const TraceContext& ctx) {
    if (!ctx.has_boundary) throw trace_error("psi needs a boundary");
    detail::check_compatible(ctx.form_x, ctx.form_ystar, ctx.k_rows, "psi");
    return u.apply_linear(ctx.form_ystar, ctx.k_rows);
}

// Leading part with respect to dego; the top term of a basis diagram.
struct TopTerm {
    ExpVec exp;
    HalfLaurent coeff;
    bool single = false;
    bool pure_q_power = false;
    long long doubled_t = 0;
};

inline TopTerm top_term(const TorusElement& u, const TraceContext& ctx) {
    TorusElement lead = u.leading_term(dego_weights(ctx));
    TopTerm t;
    t.single = lead.term_count() == 1;
    if (!t.single) return t;
    t.exp = lead.terms().begin()->first;
    t.coeff = lead.terms().begin()->second;
    auto p = t.coeff.single_power();
    if (p && p->second == 1) {
        t.pure_q_power = true;
        t.doubled_t = p->first;
    }
    return t;
}

inline ExpVec ystar_exponent_of_bar(const BarVector& v, const TraceContext& ctx) {
    ExpVec m(ctx.form_ystar->size(), 0);
    for (size_t i = 0; i < ctx.delta_size; ++i) m[i] = (int)v.n[i];
    size_t h = ctx.delta_size;
    for (int b : ctx.base->boundary_edge_indices()) {
        long long hat = 0;
        if (auto it = v.hat.find(b); it != v.hat.end()) hat = it->second;
        m[h] = (int)hat;
        ++h;
    }
    return ystar_exponent(m, ctx);
}

} // namespace skt
