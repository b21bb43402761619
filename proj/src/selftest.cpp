#include "descent/selftest.hpp"

#include <ostream>
#include <sstream>

#include "descent/amalgam.hpp"
#include "descent/fingerprint.hpp"
#include "descent/io.hpp"
#include "descent/properties.hpp"
#include "descent/structure.hpp"

namespace descent {

namespace {

struct Battery {
    std::ostream& os;
    int failures = 0;

    void line(const std::string& name, bool ok, const std::string& extra = "") {
        os << name << " " << (ok ? "ok" : "FAIL");
        if (!extra.empty()) os << " " << extra;
        os << "\n";
        if (!ok) ++failures;
    }
};

std::map<VertexId, VertexId> random_relabel(const LayeredDigraph& g, DetRng& rng) {
    std::vector<int> perm(g.size());
    for (int i = 0; i < g.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::map<VertexId, VertexId> out;
    for (int v = 0; v < g.size(); ++v) {
        std::string nn = "n" + std::to_string(perm[v]);
        out[g.id_of(v)] = nn;
    }
    return out;
}

void run_instance(Battery& b, const std::string& name, const ExpansionSystem& sys, int depth) {
    LayeredDigraph g = expand(sys, depth);
    auto checks = run_checks(g);
    std::ostringstream props;
    for (const auto& [prop, verdict] : checks) props << prop << "=" << to_string(verdict.status) << " ";
    b.os << name << " depth=" << depth << " " << props.str() << "\n";

    KResult kr = compute_k(g);
    b.line(name + " declared-k-matches", kr.report && kr.report->k == sys.k);
    if (!kr.report) return;
    int k = kr.report->k;
    // the ancestor-count sequence never decreases and stays within m
    bool mono = true;
    for (size_t i = 1; i < kr.report->t_sequence.size(); ++i)
        if (kr.report->t_sequence[i] < kr.report->t_sequence[i - 1]) mono = false;
    for (int t : kr.report->t_sequence)
        if (t > g.m()) mono = false;
    b.line(name + " t-monotone", mono);
    if (check_g2(g).status == Status::pass) {
        bool lt = true;
        for (int t : kr.report->t_sequence)
            if (t >= g.m()) lt = false;
        b.line(name + " t-below-m", lt);
    }
    // sigma refines the ancestor classes on every usable level
    bool refines = true;
    for (int lvl = k; lvl <= g.depth(); ++lvl) {
        RhoPartition rho = rho_partition(g, k, lvl);
        SigmaPartition sig = sigma_partition(g, k, lvl, g.depth());
        for (const auto& cls : sig.classes) {
            int rc = rho.class_of[cls[0]];
            for (int v : cls)
                if (rho.class_of[v] != rc) refines = false;
        }
    }
    b.line(name + " sigma-refines-rho", refines);
    QuotientResult q = quotient(g, k, k);
    b.line(name + " quotient-tree", q.tree_verdict.status == Status::pass);
    // determinism and prefix property of the expansion
    b.line(name + " expand-deterministic", write_ldg(expand(sys, depth)) == write_ldg(g));
    b.line(name + " expand-prefix",
           write_ldg(expand(sys, depth - 1)) == write_ldg(g.truncate(depth - 1)));

    TStructure t = build_t(g, k);
    NResult n = compute_n(t);
    Fingerprint fp = compute_m(g);
    b.os << name << " k=" << k << " N=" << n.n_hat << " M=" << fp.m_depth << " colours="
         << t.base.size() << "\n";
    DetRng rng(0xD5 + depth + g.m());
    for (int round = 0; round < 2; ++round) {
        LayeredDigraph h = g.relabelled(random_relabel(g, rng));
        b.line(name + " fingerprint-stable", compute_m(h).canonical_text == fp.canonical_text);
    }
}

} // namespace

int run_selftest(std::ostream& os) {
    Battery b{os};
    try {
        ExpansionSystem t2 = tree_system(2), t3 = tree_system(3);
        ExpansionSystem l2 = ladder_system(2), l3 = ladder_system(3);
        run_instance(b, "tree2", t2, 5);
        run_instance(b, "tree3", t3, 5);
        run_instance(b, "ladder2", l2, 5);
        run_instance(b, "ladder3", l3, 5);

        // isomorphism decisions across the built-ins
        LayeredDigraph g2 = expand(t2, 5), gl = expand(l2, 5);
        DetRng rng(0xC0FFEE);
        LayeredDigraph g2r = g2.relabelled(random_relabel(g2, rng));
        IsoContext c1 = make_iso_context(g2), c2 = make_iso_context(g2r),
                   c3 = make_iso_context(gl);
        b.line("iso tree2~relabel", decide_iso(c1, c2).verdict == IsoVerdict::isomorphic);
        IsoDecision d = decide_iso(c1, c3);
        b.line("iso tree2!~ladder2",
               d.verdict == IsoVerdict::not_isomorphic && d.discriminator.substr(0, 2) == "k:");

        // a short scheduled construction with per-step validity
        std::vector<TaskStep> steps;
        steps.push_back({TaskStep::Kind::add_in_neighbour, "r", -1});
        steps.push_back({TaskStep::Kind::add_fresh_copy, "", 3});
        steps.push_back({TaskStep::Kind::amalgamate_over_cone, "a0", -1});
        BuildStats stats;
        FGObject f = build_limit_approx(t2, steps, 3, &stats);
        for (const auto& l : stats.log) os << "build " << l << "\n";
        b.line("build-valid", f.validate().empty());

        // a small separation trace over two tree cones sharing a subtree
        FGObject base = from_gamma(t2, 4);
        FGObject::Builder sb(t2);
        for (const auto& id : base.ids()) sb.vertex(id);
        for (int v = 0; v < base.size(); ++v)
            for (int w : base.out(v)) sb.edge(base.id_of(v), base.id_of(w));
        // second generator over the cone of the first child
        LayeredDigraph priv = expand(t2, 3);
        sb.vertex("b*");
        sb.edge("b*", "a0");
        for (int v = 0; v < priv.size(); ++v) sb.vertex("p." + priv.id_of(v));
        for (int v = 0; v < priv.size(); ++v)
            for (int w : priv.out(v)) sb.edge("p." + priv.id_of(v), "p." + priv.id_of(w));
        sb.edge("b*", "p." + priv.id_of(priv.root()));
        FGObject shared = sb.build();
        SeparationTrace trace = separation_trace(shared, "r", "b*");
        os << trace.table();
        b.line("trace-separates", trace.y_final_empty);
    } catch (const std::exception& e) {
        os << "selftest aborted: " << e.what() << "\n";
        return 70;
    }
    os << (b.failures == 0 ? "selftest pass" : "selftest FAIL") << "\n";
    return b.failures == 0 ? 0 : 1;
}

} // namespace descent
