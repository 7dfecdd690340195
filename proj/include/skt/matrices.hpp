#pragma once

#include <iomanip>
#include <optional>
#include <sstream>

#include "surface.hpp"

namespace skt {

inline std::string hat_name(const std::string& id) { return id + "_hat"; }

// Integer matrix indexed by named edge sets.
struct LabeledMatrix {
    std::vector<std::string> row_names, col_names;
    std::vector<std::vector<long long>> m;

    LabeledMatrix() = default;
    LabeledMatrix(std::vector<std::string> rows, std::vector<std::string> cols)
        : row_names(std::move(rows)), col_names(std::move(cols)),
          m(row_names.size(), std::vector<long long>(col_names.size(), 0)) {}

    size_t rows() const { return row_names.size(); }
    size_t cols() const { return col_names.size(); }
    long long& at(size_t i, size_t j) { return m[i][j]; }
    long long at(size_t i, size_t j) const { return m[i][j]; }

    size_t row_index(const std::string& n) const {
        for (size_t i = 0; i < row_names.size(); ++i)
            if (row_names[i] == n) return i;
        throw std::invalid_argument("unknown row: " + n);
    }
    size_t col_index(const std::string& n) const {
        for (size_t i = 0; i < col_names.size(); ++i)
            if (col_names[i] == n) return i;
        throw std::invalid_argument("unknown column: " + n);
    }
    long long at(const std::string& r, const std::string& c) const {
        return m[row_index(r)][col_index(c)];
    }

    LabeledMatrix transpose() const {
        LabeledMatrix t(col_names, row_names);
        for (size_t i = 0; i < rows(); ++i)
            for (size_t j = 0; j < cols(); ++j) t.m[j][i] = m[i][j];
        return t;
    }

    friend LabeledMatrix operator*(const LabeledMatrix& a, const LabeledMatrix& b) {
        if (a.cols() != b.rows())
            throw std::invalid_argument("matrix size mismatch in product");
        LabeledMatrix r(a.row_names, b.col_names);
        for (size_t i = 0; i < a.rows(); ++i)
            for (size_t k = 0; k < a.cols(); ++k) {
                if (a.m[i][k] == 0) continue;
                for (size_t j = 0; j < b.cols(); ++j)
                    r.m[i][j] += a.m[i][k] * b.m[k][j];
            }
        return r;
    }
    friend LabeledMatrix operator+(const LabeledMatrix& a, const LabeledMatrix& b) {
        LabeledMatrix r = a;
        for (size_t i = 0; i < r.rows(); ++i)
            for (size_t j = 0; j < r.cols(); ++j) r.m[i][j] += b.m[i][j];
        return r;
    }
    friend LabeledMatrix operator-(const LabeledMatrix& a, const LabeledMatrix& b) {
        LabeledMatrix r = a;
        for (size_t i = 0; i < r.rows(); ++i)
            for (size_t j = 0; j < r.cols(); ++j) r.m[i][j] -= b.m[i][j];
        return r;
    }
    LabeledMatrix scaled(long long s) const {
        LabeledMatrix r = *this;
        for (auto& row : r.m)
            for (auto& x : row) x *= s;
        return r;
    }
    friend bool operator==(const LabeledMatrix& a, const LabeledMatrix& b) {
        return a.row_names == b.row_names && a.col_names == b.col_names && a.m == b.m;
    }

    static LabeledMatrix identity(const std::vector<std::string>& names, long long scale = 1) {
        LabeledMatrix r(names, names);
        for (size_t i = 0; i < names.size(); ++i) r.m[i][i] = scale;
        return r;
    }

    bool antisymmetric() const {
        if (rows() != cols()) return false;
        for (size_t i = 0; i < rows(); ++i)
            for (size_t j = 0; j < cols(); ++j)
                if (m[i][j] != -m[j][i]) return false;
        return true;
    }

    // First entry where the two matrices differ, if any.
    static std::optional<std::tuple<size_t, size_t, long long, long long>>
    first_difference(const LabeledMatrix& a, const LabeledMatrix& b) {
        for (size_t i = 0; i < a.rows(); ++i)
            for (size_t j = 0; j < a.cols(); ++j)
                if (a.m[i][j] != b.m[i][j])
                    return std::make_tuple(i, j, b.m[i][j], a.m[i][j]);
        return std::nullopt;
    }

    std::string to_string() const {
        size_t w = 3;
        for (const auto& n : col_names) w = std::max(w, n.size());
        for (const auto& row : m)
            for (long long x : row) w = std::max(w, std::to_string(x).size());
        size_t rw = 0;
        for (const auto& n : row_names) rw = std::max(rw, n.size());
        std::ostringstream os;
        os << std::setw((int)rw) << "" << " ";
        for (const auto& n : col_names) os << " " << std::setw((int)w) << n;
        os << "\n";
        for (size_t i = 0; i < rows(); ++i) {
            os << std::setw((int)rw) << row_names[i] << " ";
            for (size_t j = 0; j < cols(); ++j) os << " " << std::setw((int)w) << m[i][j];
            os << "\n";
        }
        return os.str();
    }
};

// ---- index sets -------------------------------------------------------------

inline std::vector<std::string> delta_names(const TriangulatedSurface& s) {
    std::vector<std::string> r;
    for (const auto& e : s.edges) r.push_back(e.id);
    return r;
}
inline std::vector<std::string> boundary_names(const TriangulatedSurface& s) {
    std::vector<std::string> r;
    for (const auto& e : s.edges)
        if (e.boundary) r.push_back(e.id);
    return r;
}
inline std::vector<std::string> delta_bar_names(const TriangulatedSurface& s) {
    std::vector<std::string> r = delta_names(s);
    for (const auto& b : boundary_names(s)) r.push_back(hat_name(b));
    return r;
}
inline std::vector<std::string> quasi_names(const TriangulatedSurface& s) {
    std::vector<std::string> r;
    for (int ei : s.quasi().quasi_edges) r.push_back(s.edges[ei].id);
    return r;
}
inline std::vector<std::string> quasi_bar_names(const TriangulatedSurface& s) {
    std::vector<std::string> r = quasi_names(s);
    for (const auto& b : boundary_names(s)) r.push_back(hat_name(b));
    return r;
}
inline std::vector<std::string> interior_puncture_names(const TriangulatedSurface& s) {
    std::vector<std::string> r;
    for (const auto& v : s.vertices())
        if (!v.boundary) r.push_back(v.id);
    return r;
}
// generator set of the length-coordinate torus: quasi arcs, hats, punctures
inline std::vector<std::string> length_names(const TriangulatedSurface& s) {
    std::vector<std::string> r = quasi_bar_names(s);
    for (const auto& v : interior_puncture_names(s)) r.push_back(v);
    std::set<std::string> seen;
    for (const auto& n : r)
        if (!seen.insert(n).second)
            throw surface_error("edge id `" + n + "` collides with a puncture name");
    return r;
}

// ---- face matrix -------------------------------------------------------------

// Q(a,b): over all non-self-folded faces, -1 when b immediately follows a
// counterclockwise, +1 the other way.  Self-folded faces contribute nothing.
inline LabeledMatrix face_matrix(const TriangulatedSurface& s) {
    LabeledMatrix q(delta_names(s), delta_names(s));
    for (const auto& t : s.tris) {
        if (t.edge[0] == t.edge[1] || t.edge[1] == t.edge[2] || t.edge[0] == t.edge[2])
            continue;
        for (int sl = 0; sl < 3; ++sl) {
            int a = t.edge[sl], b = t.edge[(sl + 1) % 3];
            q.m[a][b] -= 1;
            q.m[b][a] += 1;
        }
    }
    return q;
}

// ---- vertex matrix ------------------------------------------------------------

// P_+(a,b): ordered pairs of half-edge ends at a common boundary puncture
// with the b end strictly counterclockwise-later, plus 1 on the diagonal
// (the two parallel copies used for the diagonal cross once).
inline LabeledMatrix vertex_matrix_plus(const TriangulatedSurface& s) {
    const auto qnames = quasi_names(s);
    LabeledMatrix p(qnames, qnames);
    std::map<int, int> col_of_edge; // edge index -> column
    for (size_t i = 0; i < qnames.size(); ++i)
        col_of_edge[s.edge_index_of(qnames[i])] = (int)i;
    for (const auto& v : s.vertices()) {
        if (!v.boundary) continue;
        for (size_t i = 0; i < v.fan.size(); ++i) {
            auto ia = col_of_edge.find(s.half_edges()[v.fan[i]].edge);
            if (ia == col_of_edge.end()) continue;
            for (size_t j = i + 1; j < v.fan.size(); ++j) {
                auto ib = col_of_edge.find(s.half_edges()[v.fan[j]].edge);
                if (ib == col_of_edge.end()) continue;
                p.m[ia->second][ib->second] += 1;
            }
        }
    }
    for (size_t i = 0; i < qnames.size(); ++i) p.m[i][i] += 1;
    return p;
}

inline LabeledMatrix vertex_matrix(const TriangulatedSurface& s) {
    LabeledMatrix p = vertex_matrix_plus(s);
    LabeledMatrix r = p - p.transpose();
    return r;
}

// ---- extended matrices ---------------------------------------------------------

struct ExtendedMatrices {
    LabeledMatrix Q;          // Delta x Delta
    LabeledMatrix Qbar;       // Delta-bar x Delta-bar
    LabeledMatrix Qstar;      // Delta-bar x Delta-bar
    LabeledMatrix Pplus;      // E x E
    LabeledMatrix P;          // E x E
    LabeledMatrix Pbarplus;   // E-bar x E-bar
    LabeledMatrix Pbar;       // E-bar x E-bar
    LabeledMatrix H;          // E x E
    LabeledMatrix Hbar;       // E-bar x E-bar
    LabeledMatrix J;          // E x E_boundary
};

inline LabeledMatrix restrict_matrix(const LabeledMatrix& a,
                                     const std::vector<std::string>& rows,
                                     const std::vector<std::string>& cols) {
    LabeledMatrix r(rows, cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            r.m[i][j] = a.at(rows[i], cols[j]);
    return r;
}

inline ExtendedMatrices extended_matrices(const TriangulatedSurface& s) {
    ExtendedMatrices x;
    const auto dn = delta_names(s);
    const auto bn = boundary_names(s);
    const auto dbar = delta_bar_names(s);
    const auto qn = quasi_names(s);
    const auto qbar = quasi_bar_names(s);

    x.Q = face_matrix(s);
    x.Pplus = vertex_matrix_plus(s);
    x.P = x.Pplus - x.Pplus.transpose();

    x.J = LabeledMatrix(qn, bn);
    for (size_t j = 0; j < bn.size(); ++j) x.J.m[x.J.row_index(bn[j])][j] = 1;

    auto unhatted_block = [&](LabeledMatrix& big, const LabeledMatrix& base) {
        for (size_t i = 0; i < base.rows(); ++i)
            for (size_t j = 0; j < base.cols(); ++j) big.m[i][j] = base.m[i][j];
    };

    // Qbar = [[Q,-J],[J^T,0]],  Qstar = [[Q,J],[-J^T,0]]
    x.Qbar = LabeledMatrix(dbar, dbar);
    x.Qstar = LabeledMatrix(dbar, dbar);
    unhatted_block(x.Qbar, x.Q);
    unhatted_block(x.Qstar, x.Q);
    for (size_t j = 0; j < bn.size(); ++j) {
        size_t hj = dn.size() + j;
        size_t ej = x.Qbar.row_index(bn[j]);
        x.Qbar.m[ej][hj] = -1;
        x.Qbar.m[hj][ej] = 1;
        x.Qstar.m[ej][hj] = 1;
        x.Qstar.m[hj][ej] = -1;
    }

    // H = I_boundary - Q restricted to the quasitriangulation
    LabeledMatrix qe = restrict_matrix(x.Q, qn, qn);
    x.H = LabeledMatrix(qn, qn);
    for (size_t i = 0; i < qn.size(); ++i)
        for (size_t j = 0; j < qn.size(); ++j)
            x.H.m[i][j] = -qe.m[i][j];
    for (const auto& b : bn) x.H.m[x.H.row_index(b)][x.H.col_index(b)] += 1;

    // Hbar = [[-Q_E, J],[J^T, -I]]
    x.Hbar = LabeledMatrix(qbar, qbar);
    for (size_t i = 0; i < qn.size(); ++i)
        for (size_t j = 0; j < qn.size(); ++j) x.Hbar.m[i][j] = -qe.m[i][j];
    for (size_t j = 0; j < bn.size(); ++j) {
        size_t hj = qn.size() + j;
        size_t ej = x.Hbar.row_index(bn[j]);
        x.Hbar.m[ej][hj] = 1;
        x.Hbar.m[hj][ej] = 1;
        x.Hbar.m[hj][hj] = -1;
    }

    // Pbarplus = [[P+, P+J],[J^T P+, J^T P+ J - 2I]]
    x.Pbarplus = LabeledMatrix(qbar, qbar);
    x.Pbar = LabeledMatrix(qbar, qbar);
    LabeledMatrix psym = x.Pplus + x.Pplus.transpose();
    for (size_t i = 0; i < qn.size(); ++i)
        for (size_t j = 0; j < qn.size(); ++j) {
            x.Pbarplus.m[i][j] = x.Pplus.m[i][j];
            x.Pbar.m[i][j] = x.P.m[i][j];
        }
    for (size_t bj = 0; bj < bn.size(); ++bj) {
        size_t hj = qn.size() + bj;
        size_t ej = x.Pbarplus.row_index(bn[bj]);
        for (size_t i = 0; i < qn.size(); ++i) {
            x.Pbarplus.m[i][hj] = x.Pplus.m[i][ej];
            x.Pbarplus.m[hj][i] = x.Pplus.m[ej][i];
            x.Pbar.m[i][hj] = -psym.m[i][ej];
            x.Pbar.m[hj][i] = psym.m[ej][i];
        }
        for (size_t bi = 0; bi < bn.size(); ++bi) {
            size_t hi = qn.size() + bi;
            size_t ei = x.Pbarplus.row_index(bn[bi]);
            x.Pbarplus.m[hi][hj] = x.Pplus.m[ei][ej] - (bi == bj ? 2 : 0);
            x.Pbar.m[hi][hj] = -x.P.m[ei][ej];
        }
    }
    return x;
}

// ---- arc matrix K ---------------------------------------------------------------

// Exponent of the quantum trace of the generator arc attached to a: sweep
// counterclockwise from each end of a across everything later in the fan,
// end on the hat of the incoming boundary edge, and cross a itself once in
// the middle.  The hatted row reuses the support of a with the hat entry
// lowered by 2 (negative state at the sliding end).
inline LabeledMatrix arc_matrix(const TriangulatedSurface& s) {
    const auto qbar = quasi_bar_names(s);
    const auto dbar = delta_bar_names(s);
    const auto bn = boundary_names(s);
    LabeledMatrix k(qbar, dbar);

    auto col_of_edge = [&](int ei) { return k.col_index(s.edges[ei].id); };
    auto col_of_hat = [&](int ei) { return k.col_index(hat_name(s.edges[ei].id)); };

    for (const auto& name : quasi_names(s)) {
        int a = s.edge_index_of(name);
        size_t row = k.row_index(name);
        // the two half-edges of a
        std::vector<int> halves;
        for (size_t h = 0; h < s.half_edges().size(); ++h)
            if (s.half_edges()[h].edge == a) halves.push_back((int)h);
        if (halves.size() != 2) throw surface_error("arc `" + name + "` has bad half-edge count");
        for (int h : halves) {
            int vi = s.vertex_of_half(h);
            const Vertex& v = s.vertices()[vi];
            if (!v.boundary)
                throw surface_error("arc `" + name + "` is not boundary ending");
            size_t pos = 0;
            while (v.fan[pos] != h) ++pos;
            bool slide = s.edges[a].boundary && pos + 1 == v.fan.size();
            if (slide) {
                k.m[row][col_of_hat(a)] += 1;
            } else {
                for (size_t q = pos + 1; q < v.fan.size(); ++q)
                    k.m[row][col_of_edge(s.half_edges()[v.fan[q]].edge)] += 1;
                int w = s.half_edges()[v.fan.back()].edge;
                k.m[row][col_of_hat(w)] += 1;
            }
        }
        k.m[row][col_of_edge(a)] += 1; // middle crossing
    }
    for (const auto& b : bn) {
        size_t row = k.row_index(hat_name(b));
        size_t src = k.row_index(b);
        k.m[row] = k.m[src];
        k.m[row][k.col_index(hat_name(b))] -= 2;
    }
    return k;
}

// K extended by the central puncture rows x_v -> e_v.
inline LabeledMatrix arc_matrix_extended(const TriangulatedSurface& s) {
    LabeledMatrix k = arc_matrix(s);
    LabeledMatrix r(length_names(s), k.col_names);
    for (size_t i = 0; i < k.rows(); ++i) r.m[i] = k.m[i];
    for (const auto& [v, ev] : s.quasi().monogon_edge) {
        size_t row = r.row_index(s.vertices()[v].id);
        r.m[row][r.col_index(s.edges[ev].id)] = 1;
    }
    return r;
}

// ---- shear squares ----------------------------------------------------------------

// sigma_e: the shear square y_e^2, with the central radius variable tacked on
// when e bounds a once-punctured monogon.
inline LabeledMatrix shear_square_matrix(const TriangulatedSurface& s) {
    const auto dbar = delta_bar_names(s);
    LabeledMatrix sg(dbar, dbar);
    std::map<int, int> radius_of_bounder; // b_v edge -> e_v edge
    for (const auto& [v, ev] : s.quasi().monogon_edge)
        radius_of_bounder[s.quasi().monogon_bounder.at(v)] = ev;
    for (size_t i = 0; i < dbar.size(); ++i) {
        sg.m[i][i] = 2;
        if (i < s.edges.size()) {
            auto it = radius_of_bounder.find((int)i);
            if (it != radius_of_bounder.end())
                sg.m[i][sg.col_index(s.edges[it->second].id)] += 1;
        }
    }
    return sg;
}

// Hbar extended over all of Delta-bar, with columns in the length index set:
// the exponent vectors whose length-coordinate monomials map to the shear
// squares.
inline LabeledMatrix shear_square_sources(const TriangulatedSurface& s) {
    const auto dbar = delta_bar_names(s);
    const auto ln = length_names(s);
    LabeledMatrix h(dbar, ln);
    LabeledMatrix q = face_matrix(s);
    std::set<int> radii;
    for (const auto& [v, ev] : s.quasi().monogon_edge) radii.insert(ev);

    for (size_t ei = 0; ei < s.edges.size(); ++ei) {
        size_t row = h.row_index(s.edges[ei].id);
        if (radii.count((int)ei)) {
            // radius row: the square of the central puncture variable
            for (const auto& [v, ev] : s.quasi().monogon_edge)
                if (ev == (int)ei) h.m[row][h.col_index(s.vertices()[v].id)] = 2;
            continue;
        }
        for (size_t j = 0; j < s.edges.size(); ++j) {
            if (q.m[ei][j] == 0 || radii.count((int)j)) continue;
            h.m[row][h.col_index(s.edges[j].id)] = -q.m[ei][j];
        }
        if (s.edges[ei].boundary)
            h.m[row][h.col_index(hat_name(s.edges[ei].id))] += 1;
    }
    for (const auto& b : boundary_names(s)) {
        size_t row = h.row_index(hat_name(b));
        h.m[row][h.col_index(b)] = 1;
        h.m[row][h.col_index(hat_name(b))] = -1;
    }
    return h;
}

// P-bar zero-extended over the interior punctures.
inline LabeledMatrix pbar_diamond(const TriangulatedSurface& s) {
    const auto ln = length_names(s);
    LabeledMatrix r(ln, ln);
    LabeledMatrix pbar = extended_matrices(s).Pbar;
    for (size_t i = 0; i < pbar.rows(); ++i)
        for (size_t j = 0; j < pbar.cols(); ++j) r.m[i][j] = pbar.m[i][j];
    return r;
}

// ---- identity report -----------------------------------------------------------------

struct IdentityCheck {
    std::string name;
    bool pass = false;
    std::string detail; // first failing entry, when any
};

inline IdentityCheck check_equal(const std::string& name, const LabeledMatrix& got,
                                 const LabeledMatrix& expect) {
    IdentityCheck c{name, true, ""};
    auto d = LabeledMatrix::first_difference(got, expect);
    if (d) {
        auto [i, j, e, g] = *d;
        c.pass = false;
        std::ostringstream os;
        os << "(" << got.row_names[i] << "," << got.col_names[j] << ") expected " << e
           << " got " << g;
        c.detail = os.str();
    }
    return c;
}

inline std::vector<IdentityCheck> verify_matrix_identities(const TriangulatedSurface& s) {
    std::vector<IdentityCheck> out;
    ExtendedMatrices x = extended_matrices(s);
    const auto qbar = quasi_bar_names(s);
    LabeledMatrix k = arc_matrix(s);
    LabeledMatrix kx = arc_matrix_extended(s);
    LabeledMatrix sg = shear_square_matrix(s);
    LabeledMatrix hs = shear_square_sources(s);

    out.push_back(check_equal("HPplus", x.H * x.Pplus,
                              LabeledMatrix::identity(quasi_names(s), 2)));
    out.push_back(check_equal("HbarPbarplus", x.Hbar * x.Pbarplus,
                              LabeledMatrix::identity(qbar, 2)));
    out.push_back(check_equal("PbarplusSigma",
                              x.Pbarplus * restrict_matrix(sg, qbar, sg.col_names),
                              k.scaled(2)));
    out.push_back(check_equal("SigmaHbarK", hs * kx, sg));
    out.push_back(check_equal("Krestriction", restrict_matrix(k, qbar, qbar), x.Pbarplus));
    out.push_back(check_equal("KQstarKt", kx * x.Qstar * kx.transpose(), pbar_diamond(s)));
    return out;
}

} // namespace skt
