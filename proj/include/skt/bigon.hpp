#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qcoeff.hpp"

namespace skt {

struct bigon_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Elementary slices of a tangle diagram in the bigon, read from the left
// boundary edge to the right one.  Positions count strands bottom to top,
// and bottom-to-top is increasing height on both walls.
enum class SliceKind { Cup, Cap, CrossPos, CrossNeg };

struct Slice {
    SliceKind kind;
    int pos = 0;
};

struct SliceWord {
    std::vector<Slice> slices;
    std::string left_states;  // bottom to top, characters '+' / '-'
    std::string right_states; // bottom to top

    size_t crossing_count() const {
        size_t n = 0;
        for (const auto& s : slices)
            if (s.kind == SliceKind::CrossPos || s.kind == SliceKind::CrossNeg) ++n;
        return n;
    }
};

// Grammar: dot-separated slices, a `|`, then the wall states, e.g.
//   cup0.cross_pos1.cap2 | L:+- R:+-
inline SliceWord parse_slice_word(const std::string& text) {
    SliceWord w;
    auto bar = text.find('|');
    if (bar == std::string::npos) throw bigon_error("missing `|` in bigon word");
    std::string body = text.substr(0, bar), states = text.substr(bar + 1);
    std::string tok;
    std::string trimmed;
    for (char ch : body)
        if (!isspace((unsigned char)ch)) trimmed += ch;
    size_t at = 0;
    while (at < trimmed.size()) {
        size_t dot = trimmed.find('.', at);
        std::string item = trimmed.substr(at, dot == std::string::npos ? std::string::npos : dot - at);
        at = dot == std::string::npos ? trimmed.size() : dot + 1;
        if (item.empty()) continue;
        size_t d = item.size();
        while (d > 0 && isdigit((unsigned char)item[d - 1])) --d;
        if (d == item.size()) throw bigon_error("slice `" + item + "` has no position");
        std::string name = item.substr(0, d);
        int pos = std::stoi(item.substr(d));
        SliceKind k;
        if (name == "cup") k = SliceKind::Cup;
        else if (name == "cap") k = SliceKind::Cap;
        else if (name == "cross_pos") k = SliceKind::CrossPos;
        else if (name == "cross_neg") k = SliceKind::CrossNeg;
        else throw bigon_error("unknown slice `" + name + "`");
        w.slices.push_back(Slice{k, pos});
    }
    // states
    std::istringstream ss(states);
    while (ss >> tok) {
        if (tok.rfind("L:", 0) == 0) w.left_states = tok.substr(2);
        else if (tok.rfind("R:", 0) == 0) w.right_states = tok.substr(2);
        else throw bigon_error("unknown state block `" + tok + "`");
    }
    for (char c : w.left_states + w.right_states)
        if (c != '+' && c != '-') throw bigon_error("states must be + or -");
    return w;
}

inline void check_arities(const SliceWord& w) {
    int count = (int)w.left_states.size();
    for (const auto& s : w.slices) {
        switch (s.kind) {
        case SliceKind::Cup:
            if (s.pos < 0 || s.pos > count) throw bigon_error("cup out of range");
            count += 2;
            break;
        case SliceKind::Cap:
            if (s.pos < 0 || s.pos + 2 > count) throw bigon_error("cap out of range");
            count -= 2;
            break;
        case SliceKind::CrossPos:
        case SliceKind::CrossNeg:
            if (s.pos < 0 || s.pos + 2 > count) throw bigon_error("crossing out of range");
            break;
        }
    }
    if (count != (int)w.right_states.size())
        throw bigon_error("right wall has " + std::to_string(w.right_states.size()) +
                          " states but the word produces " + std::to_string(count));
}

// Per-wall charge: the sum of the states.
inline std::pair<int, int> charge(const SliceWord& w) {
    auto sum = [](const std::string& s) {
        int c = 0;
        for (char ch : s) c += ch == '+' ? 1 : -1;
        return c;
    };
    return {sum(w.left_states), sum(w.right_states)};
}

namespace detail {

// crossingless connectivity: loops plus a planar matching of the wall points
struct Matching {
    int loops = 0;
    // points: left wall 0..nl-1 bottom-up, then right wall nl..nl+nr-1
    std::vector<int> mate;
};

// Trace the strands through the slices.  Ids < nl+nr are wall points; larger
// ids are open strand ends in the moving cross-section.  `far` pairs the two
// current ends of every strand.
inline Matching word_matching(const std::vector<Slice>& slices, int nl, int nr) {
    Matching mm;
    int next_id = nl + nr;
    std::map<int, int> far;
    std::vector<int> cur;
    for (int i = 0; i < nl; ++i) {
        int t = next_id++;
        far[t] = i;
        far[i] = t;
        cur.push_back(t);
    }
    for (const auto& s : slices) {
        if (s.kind == SliceKind::Cup) {
            int a = next_id++, b = next_id++;
            far[a] = b;
            far[b] = a;
            cur.insert(cur.begin() + s.pos, {a, b});
        } else if (s.kind == SliceKind::Cap) {
            int x = cur[s.pos], y = cur[s.pos + 1];
            int fx = far.at(x), fy = far.at(y);
            if (fx == y) {
                ++mm.loops;
            } else {
                far[fx] = fy;
                far[fy] = fx;
            }
            far.erase(x);
            far.erase(y);
            cur.erase(cur.begin() + s.pos, cur.begin() + s.pos + 2);
        } else {
            throw bigon_error("internal error: crossing in a crossingless word");
        }
    }
    if ((int)cur.size() != nr) throw bigon_error("internal error: wrong final strand count");
    std::map<int, int> right_id;
    for (int i = 0; i < nr; ++i) right_id[cur[i]] = nl + i;
    mm.mate.assign(nl + nr, -1);
    auto endpoint_id = [&](int x) { return x < nl + nr ? x : right_id.at(x); };
    for (int i = 0; i < nr; ++i) {
        int a = endpoint_id(cur[i]), b = endpoint_id(far.at(cur[i]));
        mm.mate[a] = b;
        mm.mate[b] = a;
    }
    for (int i = 0; i < nl; ++i) {
        if (mm.mate[i] >= 0) continue;
        int b = endpoint_id(far.at(i));
        mm.mate[i] = b;
        mm.mate[b] = i;
    }
    return mm;
}

} // namespace detail

// Values of the trivial returning arcs, derived from the defining relations.
// Indexed by [wall][s_low][s_high] with wall 0 = right, 1 = left and states
// 0 = '-', 1 = '+'.
struct TrivialArcTable {
    HalfLaurent val[2][2][2];

    const HalfLaurent& at(int wall, char s_low, char s_high) const {
        return val[wall][s_low == '+' ? 1 : 0][s_high == '+' ? 1 : 0];
    }
};

inline HalfLaurent loop_value() {
    HalfLaurent v;
    v.add_term(4, BigInt(-1));
    v.add_term(-4, BigInt(-1));
    return v; // -q^2 - q^{-2}
}

// Base relation: the right returning arc with + above - is q^{-1/2}; equal
// states vanish.  The remaining right value comes from exchanging the states
// (factor q^2 plus q^{-1/2} times the closed loop), and the left wall is the
// bar of the right wall with the labels swapped (rotate the bigon by a half
// turn, then reverse the heights).
inline TrivialArcTable derive_trivial_arc_table() {
    TrivialArcTable t;
    HalfLaurent zero;
    // right wall
    t.val[0][1][1] = zero;
    t.val[0][0][0] = zero;
    t.val[0][0][1] = HalfLaurent::q_half(-1);          // low -, high +
    t.val[0][1][0] = HalfLaurent::q_half(4) * t.val[0][0][1] +
                     HalfLaurent::q_half(-1) * loop_value(); // low +, high -
    // left wall: bar and swap
    for (int lo = 0; lo < 2; ++lo)
        for (int hi = 0; hi < 2; ++hi) t.val[1][lo][hi] = t.val[0][hi][lo].bar();
    return t;
}

// Independent re-derivation of the exchanged right arc.  Resolving the
// crossing in cup;cross_pos gives the kink factor q*loop + q^{-1} = -q^3,
// and the height exchange lemma equates the kinked arc with q^{+1} times the
// reordered one, so arc(low +, high -) = -q^{-3} * q * arc(low -, high +).
inline HalfLaurent rederive_exchanged_arc() {
    HalfLaurent kink = HalfLaurent::q_half(2) * loop_value() + HalfLaurent::q_half(-2);
    HalfLaurent minus_q3 = HalfLaurent(-1) * HalfLaurent::q_half(6);
    if (kink != minus_q3) throw bigon_error("kink resolution disagrees with -q^3");
    HalfLaurent base = HalfLaurent::q_half(-1); // arc(low -, high +)
    return HalfLaurent(-1) * HalfLaurent::q_half(-6) * HalfLaurent::q_half(2) * base;
}

// Counit of a stated bigon diagram: resolve the crossings, drop the loops,
// evaluate the returning arcs innermost first, and match the through strands.
class BigonEvaluator {
public:
    BigonEvaluator() : table_(derive_trivial_arc_table()) {}

    const TrivialArcTable& table() const { return table_; }

    HalfLaurent evaluate(const SliceWord& w) const {
        check_arities(w);
        HalfLaurent total;
        // resolve the crossings one by one: positive crossing -> q cap;cup +
        // q^{-1} nothing, negative the other way round
        std::function<void(std::vector<Slice>, size_t, HalfLaurent)> rec =
            [&](std::vector<Slice> slices, size_t at, HalfLaurent scale) {
                for (size_t i = at; i < slices.size(); ++i) {
                    if (slices[i].kind != SliceKind::CrossPos &&
                        slices[i].kind != SliceKind::CrossNeg)
                        continue;
                    bool pos = slices[i].kind == SliceKind::CrossPos;
                    int p = slices[i].pos;
                    std::vector<Slice> smooth = slices;
                    smooth[i] = Slice{SliceKind::Cap, p};
                    smooth.insert(smooth.begin() + i + 1, Slice{SliceKind::Cup, p});
                    std::vector<Slice> ident = slices;
                    ident.erase(ident.begin() + i);
                    rec(std::move(smooth), i, scale * HalfLaurent::q_half(pos ? 2 : -2));
                    rec(std::move(ident), i, scale * HalfLaurent::q_half(pos ? -2 : 2));
                    return;
                }
                total += scale * evaluate_crossingless(slices, w.left_states, w.right_states);
            };
        rec(w.slices, 0, HalfLaurent(1));
        return total;
    }

private:
    HalfLaurent evaluate_crossingless(const std::vector<Slice>& slices,
                                      const std::string& ls, const std::string& rs) const {
        int nl = (int)ls.size(), nr = (int)rs.size();
        detail::Matching mm = detail::word_matching(slices, nl, nr);
        HalfLaurent value(1);
        for (int i = 0; i < mm.loops; ++i) value *= loop_value();

        // wall points that remain, bottom to top per wall
        std::vector<int> left, right;
        for (int i = 0; i < nl; ++i) left.push_back(i);
        for (int i = 0; i < nr; ++i) right.push_back(nl + i);
        auto state_of = [&](int p) { return p < nl ? ls[p] : rs[p - nl]; };

        // innermost returning arcs first
        bool changed = true;
        while (changed) {
            changed = false;
            auto scan = [&](std::vector<int>& wall, int side) {
                for (size_t i = 0; i + 1 < wall.size(); ++i) {
                    if (mm.mate[wall[i]] != wall[i + 1]) continue;
                    value *= table_.at(side, state_of(wall[i]), state_of(wall[i + 1]));
                    wall.erase(wall.begin() + i, wall.begin() + i + 2);
                    changed = true;
                    return;
                }
            };
            scan(right, 0);
            if (!changed) scan(left, 1);
            if (value.is_zero()) return value;
        }
        // all remaining strands run through; planarity forces order preservation
        if (left.size() != right.size())
            throw bigon_error("internal error: unmatched strands remain");
        for (size_t i = 0; i < left.size(); ++i) {
            if (mm.mate[left[i]] != right[i])
                throw bigon_error("internal error: non-planar matching");
            if (state_of(left[i]) != state_of(right[i])) return HalfLaurent();
        }
        return value;
    }

    TrivialArcTable table_;
};

// The lift of the counit to the triangle torus: 1 on monomials whose two
// corner exponents agree and whose opposite edge is absent.
inline bool epsilon_star(const std::vector<int>& k_abc) {
    return k_abc[0] == 0 && k_abc[1] == k_abc[2];
}

} // namespace skt
