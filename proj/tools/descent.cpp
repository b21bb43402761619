// descent: analysis of layered rooted digraphs with self-similar cones.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "descent/amalgam.hpp"
#include "descent/fingerprint.hpp"
#include "descent/io.hpp"
#include "descent/properties.hpp"
#include "descent/selftest.hpp"
#include "descent/structure.hpp"

using namespace descent;

namespace {

ExpansionSystem builtin_system(const std::string& name) {
    if (name == "tree2") return tree_system(2);
    if (name == "tree3") return tree_system(3);
    if (name == "ladder2") return ladder_system(2);
    if (name == "ladder3") return ladder_system(3);
    if (name == "triad") return triad_system();
    if (name.rfind("tree:", 0) == 0) return tree_system(std::stoi(name.substr(5)));
    if (name.rfind("ladder:", 0) == 0) return ladder_system(std::stoi(name.substr(7)));
    throw op_error("unknown built-in system: " + name);
}

bool looks_like_path(const std::string& s) {
    return s.find('.') != std::string::npos || s.find('/') != std::string::npos;
}

LayeredDigraph load_input(const std::string& input, int depth) {
    if (looks_like_path(input)) return load_digraph(input, depth);
    return expand(builtin_system(input), depth < 0 ? 6 : depth);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw op_error("cannot write " + out_path);
    os << text;
}

std::string verdict_line(const std::string& prop, const Verdict& v, int depth) {
    std::ostringstream os;
    os << prop << " " << to_string(v.status) << " depth=" << depth;
    if (v.witness) {
        os << " witness=" << v.witness->what;
        for (const auto& id : v.witness->vertices) os << "," << id;
    }
    return os.str();
}

int cmd_check(const std::string& input, int depth, const std::string& props_csv) {
    LayeredDigraph g = load_input(input, depth);
    std::vector<std::string> props;
    std::stringstream ss(props_csv);
    std::string p;
    while (std::getline(ss, p, ','))
        if (!p.empty()) props.push_back(p);
    auto lines = run_checks(g, props);
    bool any_fail = false, any_inc = false;
    for (const auto& [prop, v] : lines) {
        std::cout << verdict_line(prop, v, g.depth()) << "\n";
        any_fail |= v.status == Status::fail;
        any_inc |= v.status == Status::inconclusive;
    }
    return any_fail ? 1 : (any_inc ? 2 : 0);
}

int cmd_analyze(const std::string& input, int depth, const std::string& format) {
    LayeredDigraph g = load_input(input, depth);
    std::ostringstream os;
    os << "depth: " << g.depth() << "\n";
    os << "m: " << g.m() << "\n";
    os << "levels:";
    for (int l = 0; l <= g.depth(); ++l) os << " " << g.level_size(l);
    os << "\n";
    KResult kr = compute_k(g);
    if (!kr.report) {
        os << "k: unavailable (" << (kr.verdict.witness ? kr.verdict.witness->what
                                                        : kr.verdict.note)
           << ")\n";
        std::cout << os.str();
        return 1;
    }
    int k = kr.report->k;
    os << "k: " << k << "\n";
    os << "K: " << 2 * k - 1 << "\n";
    os << "t:";
    for (int t : kr.report->t_sequence) os << " " << t;
    os << "\n";
    for (int lvl = k; lvl <= g.depth(); ++lvl) {
        RhoPartition rho = rho_partition(g, k, lvl);
        SigmaPartition sig = sigma_partition(g, k, lvl, g.depth());
        os << "rho level=" << lvl << " classes=" << rho.classes.size() << " sizes=";
        for (size_t i = 0; i < rho.classes.size(); ++i)
            os << (i ? "," : "") << rho.classes[i].size();
        os << "\n";
        os << "sigma level=" << lvl << " classes=" << sig.classes.size()
           << " agrees_rho=" << (sig.classes == rho.classes ? "yes" : "no");
        if (sig.changed_from_prev_horizon)
            os << " stable_vs_prev_horizon=" << (*sig.changed_from_prev_horizon ? "no" : "yes");
        os << "\n";
    }
    QuotientResult q = quotient(g, k, k);
    os << "quotient: tree=" << to_string(q.tree_verdict.status) << " classes=" << q.nodes.size()
       << "\n";
    if (format == "dot") {
        std::cout << q.dot();
        return 0;
    }
    TStructure t = build_t(g, k);
    os << "colours: " << t.base.size() << "\n";
    NResult n = compute_n(t);
    os << "N: " << n.n_hat << " window=[" << n.window_lo << "," << n.window_hi << "]"
       << (n.inconclusive ? " inconclusive" : "") << "\n";
    int m_depth = 2 * k + n.n_hat;
    os << "M: " << m_depth;
    if (g.depth() < m_depth) os << " (depth too small for the fingerprint)";
    os << "\n";
    std::cout << os.str();
    return 0;
}

int cmd_fingerprint(const std::string& input, int depth) {
    LayeredDigraph g = load_input(input, depth);
    Fingerprint fp = compute_m(g);
    std::cout << "k=" << fp.k << " N=" << fp.m_depth - 2 * fp.k << " M=" << fp.m_depth << "\n";
    std::cout << fp.canonical_text;
    return 0;
}

int cmd_iso(const std::string& in1, const std::string& in2, int depth) {
    LayeredDigraph g1 = load_input(in1, depth), g2 = load_input(in2, depth);
    for (const auto* g : {&g1, &g2}) {
        Verdict v0 = check_g0(*g);
        if (v0.status != Status::pass) throw op_error("input fails the layering check");
        Verdict v1 = check_g1(*g);
        if (v1.status != Status::pass)
            throw op_error("input fails the cone self-similarity check");
    }
    IsoContext c1 = make_iso_context(g1), c2 = make_iso_context(g2);
    IsoDecision d = decide_iso(c1, c2);
    switch (d.verdict) {
        case IsoVerdict::isomorphic: {
            std::cout << "isomorphic " << d.detail << "\n";
            for (const auto& [x, y] : d.certificate) std::cout << "map " << x << " " << y << "\n";
            return 0;
        }
        case IsoVerdict::not_isomorphic:
            std::cout << "not_isomorphic " << d.discriminator << "\n";
            return 1;
        default:
            std::cout << "insufficient_depth " << d.detail << "\n";
            return 2;
    }
}

int cmd_expand(const std::string& input, int depth, const std::string& out,
               const std::string& format) {
    ExpansionSystem sys =
        looks_like_path(input) ? load_system(input) : builtin_system(input);
    if (format == "exs") {
        emit(write_exs(sys), out);
        return 0;
    }
    emit(write_ldg(expand(sys, depth)), out);
    return 0;
}

int cmd_extendiso(const std::string& in1, const std::string& in2, int depth, int from, int to) {
    LayeredDigraph g1 = load_input(in1, depth), g2 = load_input(in2, depth);
    IsoContext c1 = make_iso_context(g1), c2 = make_iso_context(g2);
    if (!c1.t || !c2.t) throw op_error("structure unavailable: " + c1.blocked + c2.blocked);
    int n2 = c2.n->n_hat;
    if (from < 0) from = n2 + 1;
    int tmax = std::min(c1.t->t_depth, c2.t->t_depth);
    if (to < 0) to = tmax;
    if (to > tmax) throw op_error("target depth beyond the available structure");
    BallIso phi = initial_ball_iso(*c1.t, *c2.t, from);
    std::cout << "ball depth=" << from << " verified size=" << phi.map.size() << "\n";
    while (phi.depth < to) {
        phi = extend_ball_iso(phi, *c1.t, *c2.t, n2);
        std::cout << "extend depth=" << phi.depth << " verified size=" << phi.map.size()
                  << "\n";
    }
    return 0;
}

int cmd_amalgam_build(const std::string& input, const std::string& schedule_path, int depth,
                      const std::string& out) {
    ExpansionSystem sys =
        looks_like_path(input) ? load_system(input) : builtin_system(input);
    std::ifstream sf(schedule_path);
    if (!sf) throw parse_error("cannot open " + schedule_path);
    std::stringstream buf;
    buf << sf.rdbuf();
    std::vector<TaskStep> steps = parse_schedule(buf.str());
    BuildStats stats;
    FGObject f = build_limit_approx(sys, steps, depth, &stats);
    for (const auto& l : stats.log) std::cerr << l << "\n";
    emit(write_ldgx(f), out);
    return 0;
}

int cmd_amalgam_trace(const std::string& input, const std::string& gamma_path,
                      const std::string& a, const std::string& b, int horizon) {
    ExpansionSystem sys =
        looks_like_path(gamma_path) ? load_system(gamma_path) : builtin_system(gamma_path);
    std::ifstream in(input);
    if (!in) throw parse_error("cannot open " + input);
    FGObject f = read_ldgx(in, sys);
    auto defects = f.validate();
    if (!defects.empty()) throw op_error("object invalid: " + defects.front().text());
    SeparationTrace tr = separation_trace(f, a, b, horizon);
    std::cout << tr.table();
    return tr.y_final_empty ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"descent: layered digraph structure analysis"};
    app.require_subcommand(1);

    std::string input, input2, out, props, format = "summary", schedule, gamma, va, vb;
    int depth = -1, horizon = -1, from = -1, to = -1;

    auto* check = app.add_subcommand("check", "run the property checkers");
    check->add_option("input", input)->required();
    check->add_option("--depth", depth);
    check->add_option("--props", props);

    auto* analyze = app.add_subcommand("analyze", "structural report");
    analyze->add_option("input", input)->required();
    analyze->add_option("--depth", depth);
    analyze->add_option("--format", format)->check(CLI::IsMember({"summary", "dot"}));

    auto* fingerprint = app.add_subcommand("fingerprint", "k, N, M and the canonical ball");
    fingerprint->add_option("input", input)->required();
    fingerprint->add_option("--depth", depth);

    auto* iso = app.add_subcommand("iso", "decide isomorphism");
    iso->add_option("input1", input)->required();
    iso->add_option("input2", input2)->required();
    iso->add_option("--depth", depth);

    auto* expand_cmd = app.add_subcommand("expand", "expand a system to a digraph");
    expand_cmd->add_option("input", input)->required();
    expand_cmd->add_option("--depth", depth);
    expand_cmd->add_option("--out", out);
    expand_cmd->add_option("--format", format)->check(CLI::IsMember({"summary", "ldg", "exs"}));

    auto* extendiso = app.add_subcommand("extendiso", "grow a verified ball isomorphism");
    extendiso->add_option("input1", input)->required();
    extendiso->add_option("input2", input2)->required();
    extendiso->add_option("--depth", depth);
    extendiso->add_option("--from", from);
    extendiso->add_option("--to", to);

    auto* amalgam = app.add_subcommand("amalgam", "amalgamation constructions");
    amalgam->require_subcommand(1);
    auto* build = amalgam->add_subcommand("build", "run a task schedule");
    build->add_option("input", input)->required();
    build->add_option("--schedule", schedule)->required();
    build->add_option("--depth", depth)->required();
    build->add_option("--out", out);
    auto* trace = amalgam->add_subcommand("trace", "separation trace between two vertices");
    trace->add_option("input", input)->required();
    trace->add_option("--gamma", gamma)->required();
    trace->add_option("--a", va)->required();
    trace->add_option("--b", vb)->required();
    trace->add_option("--horizon", horizon);

    app.add_subcommand("selftest", "invariant battery over the built-in systems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (check->parsed()) return cmd_check(input, depth, props);
        if (analyze->parsed()) return cmd_analyze(input, depth, format);
        if (fingerprint->parsed()) return cmd_fingerprint(input, depth);
        if (iso->parsed()) return cmd_iso(input, input2, depth);
        if (expand_cmd->parsed())
            return cmd_expand(input, depth < 0 ? 6 : depth, out,
                              format == "summary" ? "ldg" : format);
        if (extendiso->parsed()) return cmd_extendiso(input, input2, depth, from, to);
        if (amalgam->parsed()) {
            if (build->parsed()) return cmd_amalgam_build(input, schedule, depth, out);
            if (trace->parsed()) return cmd_amalgam_trace(input, gamma, va, vb, horizon);
        }
        if (app.get_subcommand("selftest")->parsed()) return run_selftest(std::cout);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 65;
    } catch (const invariant_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 70;
    } catch (const op_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
    return 64;
}
