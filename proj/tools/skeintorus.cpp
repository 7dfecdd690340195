// Command line front end: surface checks, matrix printing, quantum traces,
// basis enumeration, and the verification suite.

#include <skt/verify.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using namespace skt;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw usage_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Args {
    std::vector<std::string> positional;
    std::map<std::string, std::string> options;
    std::set<std::string> flags;
};

Args parse_args(int argc, char** argv, const std::set<std::string>& value_opts,
                const std::set<std::string>& flag_opts) {
    Args a;
    for (int i = 2; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--", 0) == 0) {
            std::string name = arg.substr(2);
            if (flag_opts.count(name)) {
                a.flags.insert(name);
            } else if (value_opts.count(name)) {
                if (i + 1 >= argc) throw usage_error("option --" + name + " needs a value");
                a.options[name] = argv[++i];
            } else {
                throw usage_error("unknown option --" + name);
            }
        } else {
            a.positional.push_back(arg);
        }
    }
    return a;
}

TorusElement rename_generators(const TorusElement& u, const std::string& prefix) {
    auto renamed = std::make_shared<AntisymForm>(*u.form());
    for (auto& n : renamed->names) n = prefix + n;
    TorusElement out{FormPtr(renamed)};
    for (const auto& [k, c] : u.terms()) out.add_term(k, c);
    return out;
}

void print_element(const TorusElement& u, const std::string& prefix, bool q1) {
    TorusElement show = rename_generators(u, prefix);
    std::cout << show.to_string() << "\n";
    if (q1) {
        std::cout << "q1:\n";
        if (show.is_zero()) {
            std::cout << "0\n";
            return;
        }
        bool first = true;
        std::ostringstream os;
        for (const auto& [k, c] : show.terms()) {
            if (!first) os << "\n";
            first = false;
            std::string mono;
            for (size_t i = 0; i < k.size(); ++i) {
                if (k[i] == 0) continue;
                if (!mono.empty()) mono += " ";
                mono += show.form()->names[i] + "^" + std::to_string(k[i]);
            }
            os << c.evaluate_q1().to_string();
            if (!mono.empty()) os << " * " << mono;
        }
        std::cout << os.str() << "\n";
    }
}

int cmd_check(int argc, char** argv) {
    Args a = parse_args(argc, argv, {}, {});
    if (a.positional.size() != 1) throw usage_error("usage: check FILE");
    TriangulatedSurface s = TriangulatedSurface::parse(slurp(a.positional[0]));
    auto [chi, r] = s.euler_and_rank();
    std::cout << "ok\n";
    std::cout << "triangles=" << s.tris.size() << "\n";
    std::cout << "edges=" << s.edges.size() << "\n";
    std::cout << "boundary_edges=" << s.boundary_edge_indices().size() << "\n";
    std::cout << "chi=" << chi << "\n";
    std::cout << "r=" << r << "\n";
    std::cout << "boundary_punctures=" << s.boundary_puncture_count() << "\n";
    std::cout << "interior_punctures=" << s.interior_puncture_count() << "\n";
    std::cout << "components=" << s.connected_components() << "\n";
    if (!s.boundary_edge_indices().empty()) {
        try {
            const QuasiData& q = s.quasi();
            std::cout << "quasi_edges=" << q.quasi_edges.size() << "\n";
            for (const auto& [v, ev] : q.monogon_edge)
                std::cout << "monogon " << s.vertices()[v].id << " radius="
                          << s.edges[ev].id << " bounded_by="
                          << s.edges[q.monogon_bounder.at(v)].id << "\n";
        } catch (const surface_error& e) {
            std::cout << "quasi=unavailable (" << e.what() << ")\n";
        }
    } else {
        std::cout << "quasi=n/a (no boundary)\n";
    }
    return 0;
}

int cmd_matrices(int argc, char** argv) {
    Args a = parse_args(argc, argv, {"which"}, {"verify"});
    if (a.positional.size() != 1) throw usage_error("usage: matrices FILE --which NAME [--verify]");
    TriangulatedSurface s = TriangulatedSurface::parse(slurp(a.positional[0]));
    if (a.flags.count("verify")) {
        bool all = true;
        for (const auto& c : verify_matrix_identities(s)) {
            std::cout << "IDENTITY " << c.name << " " << (c.pass ? "PASS" : "FAIL");
            if (!c.pass) std::cout << " " << c.detail;
            std::cout << "\n";
            all = all && c.pass;
        }
        return all ? 0 : 1;
    }
    auto it = a.options.find("which");
    if (it == a.options.end()) throw usage_error("matrices needs --which or --verify");
    const std::string& which = it->second;
    LabeledMatrix m;
    if (which == "Q") m = face_matrix(s);
    else if (which == "Qbar") m = extended_matrices(s).Qbar;
    else if (which == "Qstar") m = extended_matrices(s).Qstar;
    else if (which == "P") m = vertex_matrix(s);
    else if (which == "Pplus") m = vertex_matrix_plus(s);
    else if (which == "Pbar") m = extended_matrices(s).Pbar;
    else if (which == "Pplusbar") m = extended_matrices(s).Pbarplus;
    else if (which == "H") m = extended_matrices(s).H;
    else if (which == "Hbar") m = extended_matrices(s).Hbar;
    else if (which == "K") m = arc_matrix_extended(s);
    else if (which == "sigma") m = shear_square_matrix(s);
    else throw usage_error("unknown matrix selector: " + which);
    std::cout << m.to_string();
    return 0;
}

// recognize the diagram as a product of the standard generators
std::vector<std::string> generator_word(const StatedDiagram& d, const TriangulatedSurface& s) {
    std::vector<std::pair<int, Component>> arc_refs;
    for (const auto& name : quasi_names(s)) {
        int e = s.edge_index_of(name);
        arc_refs.push_back({e, generator_arc(s, e, false)});
    }
    std::vector<std::pair<int, Component>> loops;
    for (size_t vi = 0; vi < s.vertices().size(); ++vi)
        if (!s.vertices()[vi].boundary) loops.push_back({(int)vi, peripheral_loop(s, (int)vi)});

    std::vector<int> order(d.comps.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return std::make_pair(d.comps[x].height, x) > std::make_pair(d.comps[y].height, y);
    });
    std::vector<std::string> word;
    for (int ci : order) {
        const Component& c = d.comps[ci];
        bool found = false;
        if (c.closed) {
            for (const auto& [vi, ref] : loops)
                if (same_loop_path(c, ref)) {
                    word.push_back(s.vertices()[vi].id);
                    found = true;
                }
        } else {
            for (const auto& [e, ref] : arc_refs) {
                if (!same_arc_path(c, ref)) continue;
                int on_edge = c.steps == ref.steps ? c.state_end : c.state_start;
                int other = c.steps == ref.steps ? c.state_start : c.state_end;
                if (other != +1) continue;
                if (on_edge == +1) {
                    word.push_back(s.edges[e].id);
                    found = true;
                } else if (s.edges[e].boundary) {
                    word.push_back(hat_name(s.edges[e].id));
                    found = true;
                }
            }
        }
        if (!found)
            throw usage_error("component `" + c.name +
                              "` is not a standard generator; length coordinates apply "
                              "only to products of generator arcs and peripheral loops");
    }
    return word;
}

int cmd_trace(int argc, char** argv) {
    Args a = parse_args(argc, argv, {"curve", "coords"}, {"q1"});
    if (a.positional.size() != 1 || !a.options.count("curve"))
        throw usage_error("usage: trace FILE --curve CURVEFILE --coords shear|extended|length [--q1]");
    std::string coords = a.options.count("coords") ? a.options.at("coords") : "extended";
    TriangulatedSurface s = TriangulatedSurface::parse(slurp(a.positional[0]));
    StatedDiagram d = parse_curves(slurp(a.options.at("curve")), s);
    TraceContext ctx = make_trace_context(s);
    bool q1 = a.flags.count("q1") > 0;
    if (coords == "shear") {
        print_element(shear_trace(d, ctx), "y_", q1);
    } else if (coords == "extended") {
        print_element(extended_trace(d, ctx), "y_", q1);
    } else if (coords == "length") {
        if (!ctx.has_boundary)
            throw usage_error("length coordinates require a surface with boundary");
        print_element(length_monomial(ctx, generator_word(d, s)), "x_", q1);
    } else {
        throw usage_error("unknown coordinate system: " + coords);
    }
    return 0;
}

int cmd_basis(int argc, char** argv) {
    Args a = parse_args(argc, argv, {"bound"}, {});
    if (a.positional.size() != 1) throw usage_error("usage: basis FILE --bound N");
    long long bound = a.options.count("bound") ? std::stoll(a.options.at("bound")) : 2;
    if (bound < 0 || bound > 6) throw usage_error("--bound must be between 0 and 6");
    TriangulatedSurface s = TriangulatedSurface::parse(slurp(a.positional[0]));
    std::cout << "# columns:";
    for (const auto& e : s.edges) std::cout << " " << e.id;
    for (int b : s.boundary_edge_indices())
        std::cout << " " << hat_name(s.edges[b].id);
    std::cout << "\n";
    for (const auto& v : enumerate_lambda(s, bound)) {
        bool first = true;
        for (long long x : v.n) {
            std::cout << (first ? "" : " ") << x;
            first = false;
        }
        for (int b : s.boundary_edge_indices()) std::cout << " " << v.hat.at(b);
        std::cout << "\n";
    }
    return 0;
}

int cmd_verify(int argc, char** argv) {
    Args a = parse_args(argc, argv, {"bound", "seed", "jobs"}, {});
    if (a.positional.size() != 1) throw usage_error("usage: verify FILE [--bound N] [--seed S] [--jobs N]");
    long long bound = a.options.count("bound") ? std::stoll(a.options.at("bound")) : 3;
    if (bound < 0 || bound > 6) throw usage_error("--bound must be between 0 and 6");
    uint64_t seed = a.options.count("seed") ? std::stoull(a.options.at("seed")) : 1;
    int jobs = a.options.count("jobs") ? std::stoi(a.options.at("jobs")) : 1;
    TriangulatedSurface s = TriangulatedSurface::parse(slurp(a.positional[0]));

    std::vector<VerifyItem> items;
    if (jobs > 1) {
        auto bigon = std::async(std::launch::async, [&] { return verify_bigon(seed); });
        items = verify_surface(s, bound);
        auto b = bigon.get();
        items.insert(items.end(), b.begin(), b.end());
    } else {
        items = verify_surface(s, bound);
        auto b = verify_bigon(seed);
        items.insert(items.end(), b.begin(), b.end());
    }
    bool all = true;
    for (const auto& it : items) {
        std::cout << "CHECK " << it.name << " " << (it.pass ? "PASS" : "FAIL");
        if (!it.pass) std::cout << " " << it.detail;
        std::cout << "\n";
        all = all && it.pass;
    }
    std::cout << (all ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    return all ? 0 : 1;
}

int cmd_bigon(int argc, char** argv) {
    Args a = parse_args(argc, argv, {}, {"q1"});
    if (a.positional.size() != 1) throw usage_error("usage: bigon \"WORD\"");
    SliceWord w = parse_slice_word(a.positional[0]);
    BigonEvaluator ev;
    HalfLaurent value = ev.evaluate(w);
    auto [cl, cr] = charge(w);
    std::cout << "epsilon = " << value.to_string() << "\n";
    std::cout << "charge L=" << cl << " R=" << cr << "\n";
    if (a.flags.count("q1")) std::cout << "q1 = " << value.evaluate_q1().to_string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: skeintorus <check|matrices|trace|basis|verify|bigon> ...\n";
        return 2;
    }
    std::string cmd = argv[1];
    try {
        if (cmd == "check") return cmd_check(argc, argv);
        if (cmd == "matrices") return cmd_matrices(argc, argv);
        if (cmd == "trace") return cmd_trace(argc, argv);
        if (cmd == "basis") return cmd_basis(argc, argv);
        if (cmd == "verify") return cmd_verify(argc, argv);
        if (cmd == "bigon") return cmd_bigon(argc, argv);
        std::cerr << "unknown command: " << cmd << "\n";
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
