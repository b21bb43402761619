#include "descent/properties.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "descent/iso.hpp"
#include "descent/view.hpp"

namespace descent {

int KResult::k() const {
    if (!report) throw op_error("stabilization constant unavailable: " +
                                (verdict.witness ? verdict.witness->what : verdict.note));
    return report->k;
}

Verdict check_g0(const LayeredDigraph& g) {
    auto defects = g.validate();
    if (defects.empty()) return Verdict::passed(g.depth());
    Witness w;
    w.what = defects.front().what;
    w.vertices = defects.front().vertices;
    w.detail = std::to_string(defects.size()) + " defect(s) total";
    return Verdict::failed(g.depth(), w);
}

Verdict check_g1(const LayeredDigraph& g) {
    // one reference view per level
    std::vector<DigraphView> trunc(g.depth() + 1);
    for (int l = 0; l <= g.depth(); ++l) trunc[l] = view_of(g.truncate(g.depth() - l));
    for (int v = 0; v < g.size(); ++v) {
        int l = g.level_ix(v);
        if (l == 0 && v == g.root()) continue; // cone of the root is the digraph itself
        DigraphView cv = view_of(g.cone_ix(v));
        if (!iso_search(cv, trunc[l])) {
            Witness w;
            w.what = "cone not isomorphic to the same-depth truncation";
            w.vertices = {g.id_of(v)};
            return Verdict::failed(g.depth(), w);
        }
    }
    return Verdict::passed(g.depth());
}

Verdict check_g2(const LayeredDigraph& g) {
    for (int n = 0; n < g.depth(); ++n)
        if (g.level_size(n) >= g.level_size(n + 1)) {
            Witness w;
            w.what = "level sizes not strictly increasing";
            w.detail = "at n = " + std::to_string(n) + ": " + std::to_string(g.level_size(n)) +
                       " !< " + std::to_string(g.level_size(n + 1));
            return Verdict::failed(g.depth(), w);
        }
    return Verdict::passed(g.depth());
}

KResult compute_k(const LayeredDigraph& g) {
    if (g.depth() < 2)
        return {Verdict::undecided(g.depth(), "insufficient depth"), std::nullopt};
    // level-1 ancestor sets, top down
    std::vector<Bits> anc1(g.size(), Bits(g.level_size(1)));
    std::map<int, int> l1pos;
    for (int i = 0; i < g.level_size(1); ++i) l1pos[g.level_vertices(1)[i]] = i;
    for (int lvl = 1; lvl <= g.depth(); ++lvl)
        for (int v : g.level_vertices(lvl)) {
            if (lvl == 1) anc1[v].set(l1pos[v]);
            for (int w : g.in(v))
                if (g.level_ix(w) >= 1) anc1[v].or_with(anc1[w]);
        }
    // per-level counts must be constant across the level
    std::vector<int> t_seq;
    for (int lvl = 1; lvl <= g.depth() - 1; ++lvl) {
        int t = -1;
        for (int v : g.level_vertices(lvl)) {
            int c = anc1[v].count();
            if (t == -1) t = c;
            if (c != t) {
                Witness w;
                w.what = "level-1 ancestor count not constant on a level";
                w.vertices = {g.id_of(g.level_vertices(lvl)[0]), g.id_of(v)};
                w.detail = "level " + std::to_string(lvl);
                return {Verdict::failed(g.depth(), w), std::nullopt};
            }
        }
        t_seq.push_back(t);
    }
    // least level from which anc1 is constant along every edge
    int last_bad = 0;
    std::pair<int, int> bad_edge{-1, -1};
    for (int lvl = 1; lvl <= g.depth() - 1; ++lvl)
        for (int v : g.level_vertices(lvl))
            for (int w : g.out(v))
                if (!(anc1[v] == anc1[w]) && lvl > last_bad) {
                    last_bad = lvl;
                    bad_edge = {v, w};
                }
    int k = last_bad + 1;
    if (k > g.depth() - 1) {
        Witness w;
        w.what = "no stabilization level within the truncation";
        w.vertices = {g.id_of(bad_edge.first), g.id_of(bad_edge.second)};
        return {Verdict::failed(g.depth(), w,
                                "deeper stabilization cannot be excluded at this depth"),
                std::nullopt};
    }
    KReport rep;
    rep.k = k;
    rep.t_sequence = t_seq;
    rep.stable_from = static_cast<int>(t_seq.size());
    while (rep.stable_from > 1 && t_seq[rep.stable_from - 2] == t_seq.back())
        --rep.stable_from;
    return {Verdict::passed(g.depth()), rep};
}

Verdict check_p2(const LayeredDigraph& g) {
    KResult kr = compute_k(g);
    if (!kr.report)
        return Verdict::undecided(g.depth(), "stabilization constant unavailable");
    int k = kr.report->k;
    if (g.depth() < 2 * k + 2)
        return Verdict::undecided(g.depth(), "depth below 2k+2");
    auto desc = g.descendant_matrix();
    Bits deepest(g.size());
    for (int v : g.level_vertices(g.depth())) deepest.set(v);
    std::string notes;
    for (int a = 0; a < g.size(); ++a) {
        Bits cone_floor = desc[a];
        for (size_t i = 0; i < cone_floor.w.size(); ++i) cone_floor.w[i] &= deepest.w[i];
        for (int b = 0; b < g.size(); ++b) {
            if (desc[a].test(b)) continue; // b inside the cone of a
            Bits bf = desc[b];
            for (size_t i = 0; i < bf.w.size(); ++i) bf.w[i] &= deepest.w[i];
            if (bf.subset_of(desc[a])) {
                Witness w;
                w.what = "outside vertex whose deepest-level cone lies inside";
                w.vertices = {g.id_of(a), g.id_of(b)};
                return Verdict::failed(g.depth(), w);
            }
        }
    }
    return Verdict::passed(g.depth());
}

Verdict check_p2_prime(const LayeredDigraph& g) {
    auto desc = g.descendant_matrix();
    Bits deepest(g.size());
    for (int v : g.level_vertices(g.depth())) deepest.set(v);
    for (int lvl = 0; lvl <= g.depth(); ++lvl) {
        const auto& vs = g.level_vertices(lvl);
        std::map<Bits, int> seen;
        for (int v : vs) {
            Bits floor = desc[v];
            for (size_t i = 0; i < floor.w.size(); ++i) floor.w[i] &= deepest.w[i];
            auto [it, fresh] = seen.insert({floor, v});
            if (!fresh) {
                Witness w;
                w.what = "distinct vertices with equal deepest-level cones";
                w.vertices = {g.id_of(it->second), g.id_of(v)};
                return Verdict::failed(g.depth(), w);
            }
        }
    }
    // distinct non-frontier vertices must have distinct out-sets
    std::map<std::vector<int>, int> outs;
    for (int v = 0; v < g.size(); ++v) {
        if (g.out(v).empty()) continue;
        auto [it, fresh] = outs.insert({g.out(v), v});
        if (!fresh) {
            Witness w;
            w.what = "distinct vertices with equal out-sets";
            w.vertices = {g.id_of(it->second), g.id_of(v)};
            return Verdict::failed(g.depth(), w);
        }
    }
    return Verdict::passed(g.depth());
}

Verdict check_p3(const LayeredDigraph& g) {
    DigraphView full = view_of(g);
    for (int lvl = 1; lvl <= g.depth(); ++lvl) {
        const auto& vs = g.level_vertices(lvl);
        if (vs.size() <= 1) continue;
        // vertices with different structural codes are separated for sure;
        // within a code group, join orbits by explicit automorphism search
        std::map<uint64_t, std::vector<int>> groups;
        for (int v : vs) groups[full.wl[v]].push_back(v);
        if (groups.size() > 1) {
            auto it = groups.begin();
            int a = it->second[0];
            int b = std::next(it)->second[0];
            Witness w;
            w.what = "level splits into several orbits";
            w.vertices = {g.id_of(a), g.id_of(b)};
            w.detail = "level " + std::to_string(lvl);
            return Verdict::failed(g.depth(), w, "truncation-level transitivity");
        }
        int rep = vs[0];
        for (size_t i = 1; i < vs.size(); ++i) {
            IsoConstraints c;
            c.pins = {{rep, vs[i]}};
            if (!iso_search(full, full, c)) {
                Witness w;
                w.what = "level splits into several orbits";
                w.vertices = {g.id_of(rep), g.id_of(vs[i])};
                w.detail = "level " + std::to_string(lvl);
                return Verdict::failed(g.depth(), w, "truncation-level transitivity");
            }
        }
    }
    return Verdict::passed(g.depth(), "truncation-level transitivity");
}

std::vector<PropertyLine> run_checks(const LayeredDigraph& g,
                                     const std::vector<std::string>& props) {
    auto want = [&](const std::string& p) {
        return props.empty() || std::find(props.begin(), props.end(), p) != props.end();
    };
    std::vector<PropertyLine> out;
    Verdict g0 = check_g0(g);
    if (want("g0")) out.push_back({"g0", g0});
    bool g0ok = g0.status == Status::pass;
    auto guarded = [&](const char* name, Verdict (*fn)(const LayeredDigraph&)) {
        if (!want(name)) return;
        if (!g0ok) {
            out.push_back({name, Verdict::undecided(g.depth(), "g0 failed")});
            return;
        }
        out.push_back({name, fn(g)});
    };
    guarded("g1", check_g1);
    guarded("g2", check_g2);
    if (want("g3")) {
        if (!g0ok)
            out.push_back({"g3", Verdict::undecided(g.depth(), "g0 failed")});
        else
            out.push_back({"g3", compute_k(g).verdict});
    }
    guarded("p2", check_p2);
    guarded("p2p", check_p2_prime);
    guarded("p3", check_p3);
    return out;
}

} // namespace descent
