#include "descent/structure.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "descent/iso.hpp"
#include "descent/properties.hpp"

namespace descent {

namespace {

std::vector<std::vector<int>> group_level_by_bits(const LayeredDigraph& g, int level,
                                                  const std::vector<Bits>& key) {
    std::map<Bits, std::vector<int>> by;
    for (int v : g.level_vertices(level)) by[key[v]].push_back(v);
    std::vector<std::vector<int>> classes;
    for (auto& [bits, members] : by) classes.push_back(members);
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return classes;
}

} // namespace

RhoPartition rho_partition(const LayeredDigraph& g, int k, int level) {
    if (level < k) throw op_error("rho undefined below level k");
    if (level > g.depth()) throw op_error("no such level");
    std::vector<Bits> anc(g.size());
    for (int v : g.level_vertices(level)) anc[v] = g.ancestors_on_level(v, level - (k - 1));
    RhoPartition p;
    p.level = level;
    p.k = k;
    p.classes = group_level_by_bits(g, level, anc);
    p.class_of.assign(g.size(), -1);
    for (size_t ci = 0; ci < p.classes.size(); ++ci)
        for (int v : p.classes[ci]) p.class_of[v] = static_cast<int>(ci);
    return p;
}

namespace {

std::vector<std::vector<int>> sigma_classes_at(const LayeredDigraph& g, int level,
                                               int witness_depth) {
    const auto& verts = g.level_vertices(level);
    int n = static_cast<int>(verts.size());
    std::vector<Bits> cone(n);
    for (int i = 0; i < n; ++i) cone[i] = g.descendants_ix(verts[i], witness_depth - level);
    // union-find over the level
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (cone[i].intersects(cone[j])) {
                int a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::map<int, std::vector<int>> by;
    for (int i = 0; i < n; ++i) by[find(i)].push_back(verts[i]);
    std::vector<std::vector<int>> classes;
    for (auto& [root, members] : by) classes.push_back(members);
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return classes;
}

} // namespace

SigmaPartition sigma_partition(const LayeredDigraph& g, int k, int level, int witness_depth) {
    if (level < k) throw op_error("sigma undefined below level k");
    if (level > g.depth()) throw op_error("no such level");
    if (witness_depth < level || witness_depth > g.depth())
        throw op_error("sigma horizon out of range");
    SigmaPartition p;
    p.level = level;
    p.witness_depth = witness_depth;
    p.classes = sigma_classes_at(g, level, witness_depth);
    p.class_of.assign(g.size(), -1);
    for (size_t ci = 0; ci < p.classes.size(); ++ci)
        for (int v : p.classes[ci]) p.class_of[v] = static_cast<int>(ci);
    if (witness_depth - 1 >= level)
        p.changed_from_prev_horizon =
            sigma_classes_at(g, level, witness_depth - 1) != p.classes;
    return p;
}

QuotientResult quotient(const LayeredDigraph& g, int k, int from_level) {
    if (from_level < k) throw op_error("quotient requires from_level >= k");
    QuotientResult q;
    q.from_level = from_level;
    std::vector<int> node_of(g.size(), -1);
    std::vector<int> first_at_level(g.depth() + 2, -1);
    for (int lvl = from_level; lvl <= g.depth(); ++lvl) {
        RhoPartition p = rho_partition(g, k, lvl);
        for (auto& members : p.classes) {
            int id = static_cast<int>(q.nodes.size());
            if (first_at_level[lvl] < 0) first_at_level[lvl] = id;
            q.nodes.push_back({lvl, members, {}});
            for (int v : members) node_of[v] = id;
        }
    }
    // class-to-class edges, deduplicated
    for (auto& node : q.nodes) {
        std::vector<int> outs;
        for (int v : node.members)
            for (int w : g.out(v))
                if (node_of[w] >= 0) outs.push_back(node_of[w]);
        std::sort(outs.begin(), outs.end());
        outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
        node.out = outs;
    }
    // unique-parent verdict for every node below from_level
    std::vector<std::vector<int>> parents(q.nodes.size());
    for (size_t i = 0; i < q.nodes.size(); ++i)
        for (int j : q.nodes[i].out) parents[j].push_back(static_cast<int>(i));
    q.tree_verdict = Verdict::passed(g.depth());
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        if (q.nodes[i].level == from_level) continue;
        if (parents[i].size() != 1) {
            Witness w;
            w.what = "class without a unique parent class";
            for (int v : q.nodes[i].members) w.vertices.push_back(g.id_of(v));
            w.detail = std::to_string(parents[i].size()) + " parent classes";
            q.tree_verdict = Verdict::failed(g.depth(), w);
            break;
        }
    }
    return q;
}

std::string QuotientResult::dot() const {
    std::ostringstream os;
    os << "digraph quotient {\n";
    for (size_t i = 0; i < nodes.size(); ++i)
        os << "  n" << i << " [label=\"L" << nodes[i].level << " size "
           << nodes[i].members.size() << "\"];\n";
    for (size_t i = 0; i < nodes.size(); ++i)
        for (int j : nodes[i].out) os << "  n" << i << " -> n" << j << ";\n";
    os << "}\n";
    return os.str();
}

namespace {

// All vertices of the tower of `cls` down to relative depth d, with their
// relative levels and class ids.
void collect_ball(const TStructure& t, const std::vector<int>& roots, int root_level, int d,
                  std::vector<int>& verts, std::vector<int>& levels) {
    const LayeredDigraph& g = *t.g;
    Bits seen(g.size());
    std::vector<int> cur = roots;
    for (int v : roots) seen.set(v);
    int lvl = 0;
    while (true) {
        for (int v : cur) {
            verts.push_back(v);
            levels.push_back(lvl);
        }
        if (lvl == d) break;
        std::vector<int> next;
        for (int v : cur)
            for (int w : g.out(v))
                if (!seen.test(w)) {
                    seen.set(w);
                    next.push_back(w);
                }
        cur = std::move(next);
        ++lvl;
        if (cur.empty()) break;
    }
    (void)root_level;
}

DigraphView ball_view_impl(const TStructure& t, const std::vector<int>& roots, int d,
                           bool with_colours) {
    std::vector<int> verts, levels;
    collect_ball(t, roots, 0, d, verts, levels);
    DigraphView v = subset_view(*t.g, verts, levels);
    v.cls.assign(v.n, -1);
    v.colour.assign(v.n, -1);
    std::map<int, int> local; // T class id -> local class number
    for (int i = 0; i < v.n; ++i) {
        int tc = t.class_of[v.orig[i]];
        if (tc < 0) continue;
        auto it = local.find(tc);
        if (it == local.end()) it = local.insert({tc, static_cast<int>(local.size())}).first;
        v.cls[i] = it->second;
        if (with_colours) v.colour[i] = t.classes[tc].colour;
    }
    v.finalize(); // refresh wl and class tables with marks applied
    return v;
}

} // namespace

DigraphView t_ball_view(const TStructure& t, int d, bool with_colours) {
    std::vector<int> roots;
    for (int b : t.base)
        for (int v : t.classes[b].members) roots.push_back(v);
    std::sort(roots.begin(), roots.end());
    return ball_view_impl(t, roots, d, with_colours);
}

DigraphView t_class_ball_view(const TStructure& t, int cls, int d, bool with_colours) {
    return ball_view_impl(t, t.classes[cls].members, d, with_colours);
}

TStructure build_t(const LayeredDigraph& g, int k) {
    if (g.depth() < 2 * k) throw op_error("build_t: depth must be at least 2k");
    KResult kr = compute_k(g);
    if (!kr.report || kr.report->k != k)
        throw op_error("build_t: stabilization constant of the input is not " +
                       std::to_string(k));
    TStructure t;
    t.g = &g;
    t.k = k;
    t.K = 2 * k - 1;
    t.t_depth = g.depth() - t.K;
    t.class_of.assign(g.size(), -1);

    for (int lvl = t.K; lvl <= g.depth(); ++lvl) {
        RhoPartition p = rho_partition(g, k, lvl);
        for (auto& members : p.classes) {
            int id = static_cast<int>(t.classes.size());
            TStructure::TClass c;
            c.level = lvl - t.K;
            c.members = members;
            t.classes.push_back(c);
            for (int v : members) t.class_of[v] = id;
            if (lvl == t.K) t.base.push_back(id);
        }
    }
    // parent class and component (towers are disjoint below the base layer)
    for (auto& c : t.classes) {
        if (c.level == 0) {
            c.component = static_cast<int>(&c - t.classes.data());
            continue;
        }
        for (int v : c.members)
            for (int w : t.g->in(v)) {
                int pc = t.class_of[w];
                if (pc >= 0) {
                    if (c.parent == -1) c.parent = pc;
                    else if (c.parent != pc)
                        throw op_error("class with two parent classes; not a valid truncation");
                }
            }
        if (c.parent == -1) throw op_error("class without a parent class");
    }
    for (auto& c : t.classes) {
        int a = static_cast<int>(&c - t.classes.data());
        while (t.classes[a].parent != -1) a = t.classes[a].parent;
        c.component = a;
    }
    for (size_t i = 0; i < t.base.size(); ++i)
        if (t.base[i] != static_cast<int>(i))
            throw invariant_error("base classes are not the first class ids");

    // colour assignment: least base class with a depth-matched structural
    // match, classes and layers respected (colours not yet involved)
    std::map<std::pair<int, int>, DigraphView> base_cache; // (base ordinal, avail)
    auto base_view = [&](int bi, int avail) -> const DigraphView& {
        auto key = std::make_pair(bi, avail);
        auto it = base_cache.find(key);
        if (it == base_cache.end())
            it = base_cache.insert({key, t_class_ball_view(t, t.base[bi], avail, false)}).first;
        return it->second;
    };
    for (size_t ci = 0; ci < t.classes.size(); ++ci) {
        auto& c = t.classes[ci];
        int avail = t.t_depth - c.level;
        DigraphView mine = t_class_ball_view(t, static_cast<int>(ci), avail, false);
        int found = -1;
        for (size_t bi = 0; bi < t.base.size(); ++bi) {
            const auto& b = t.classes[t.base[bi]];
            if (b.members.size() != c.members.size()) continue;
            IsoConstraints ic;
            ic.respect_cls = true;
            if (iso_search(base_view(static_cast<int>(bi), avail), mine, ic)) {
                found = static_cast<int>(bi);
                break;
            }
        }
        if (found < 0)
            throw op_error("class admits no colour; input is not a valid truncation");
        c.colour = found;
    }
    return t;
}

bool validate_t(const TStructure& t, std::string* why) {
    for (size_t ci = 0; ci < t.classes.size(); ++ci) {
        const auto& c = t.classes[ci];
        if (c.colour < 0 || c.colour >= static_cast<int>(t.base.size())) {
            if (why) *why = "colour out of range";
            return false;
        }
        int avail = t.t_depth - c.level;
        DigraphView mine = t_class_ball_view(t, static_cast<int>(ci), avail, false);
        DigraphView theirs = t_class_ball_view(t, t.base[c.colour], avail, false);
        IsoConstraints ic;
        ic.respect_cls = true;
        auto m = iso_search(theirs, mine, ic);
        if (!m) {
            if (why) *why = "colour does not match its base class";
            return false;
        }
        std::string v;
        if (!verify_mapping(theirs, mine, *m, true, false, &v)) {
            if (why) *why = "colour witness fails re-verification: " + v;
            return false;
        }
        // least-index rule
        for (int bi = 0; bi < c.colour; ++bi) {
            const auto& b = t.classes[t.base[bi]];
            if (b.members.size() != c.members.size()) continue;
            DigraphView earlier = t_class_ball_view(t, t.base[bi], avail, false);
            if (iso_search(earlier, mine, ic)) {
                if (why) *why = "colour is not least-index";
                return false;
            }
        }
    }
    return true;
}

} // namespace descent
