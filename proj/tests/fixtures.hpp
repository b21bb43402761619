// Shared instance builders for the integration tests.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "descent/amalgam.hpp"
#include "descent/expansion.hpp"
#include "descent/io.hpp"

namespace fixtures {

using namespace descent;

// Two generators whose cones share the descendants of the reference
// digraph's least level-1 vertex (together with any level-1 twins that,
// like in the complete-bipartite systems, own exactly the same cone).
inline FGObject shared_instance(const ExpansionSystem& sys, int depth) {
    LayeredDigraph g = expand(sys, depth);
    int first = g.out(g.root())[0];
    Bits shared(g.size());
    std::vector<int> group;
    for (int v : g.level_vertices(1))
        if (g.out(v) == g.out(first)) group.push_back(v);
    for (int v : group) shared.or_with(g.descendants_ix(v));
    FGObject::Builder b(sys);
    b.vertex("A*");
    b.vertex("B*");
    for (int v = 0; v < g.size(); ++v) {
        if (shared.test(v))
            b.vertex("s." + g.id_of(v));
        else if (g.level_ix(v) > 0)
            b.vertex("a." + g.id_of(v));
    }
    for (int v = 0; v < g.size(); ++v)
        if (!shared.test(v) && g.level_ix(v) > 0) b.vertex("b." + g.id_of(v));
    auto name = [&](int v, const char* own) {
        return shared.test(v) ? "s." + g.id_of(v) : own + ("." + g.id_of(v));
    };
    for (int v = 0; v < g.size(); ++v)
        for (int w : g.out(v)) {
            if (v == g.root()) continue;
            if (shared.test(v)) {
                b.edge(name(v, "a"), name(w, "a"));
            } else {
                b.edge(name(v, "a"), name(w, "a"));
                b.edge(name(v, "b"), name(w, "b"));
            }
        }
    for (int w : g.out(g.root())) {
        b.edge("A*", name(w, "a"));
        b.edge("B*", name(w, "b"));
    }
    return b.build();
}

inline std::map<VertexId, VertexId> shuffled_names(const LayeredDigraph& g, uint64_t seed) {
    std::vector<int> perm(g.size());
    for (int i = 0; i < g.size(); ++i) perm[i] = i;
    DetRng rng(seed);
    rng.shuffle(perm);
    std::map<VertexId, VertexId> m;
    for (int v = 0; v < g.size(); ++v) m[g.id_of(v)] = "q" + std::to_string(perm[v]);
    return m;
}

// A two-colour presentation of the binary tree: colours alternate along
// descent but the generated digraph is the plain tree. Exercises the
// multi-colour loader path and gives a cross-system isomorphic pair.
inline ExpansionSystem alternating_tree_system() {
    ExpansionSystem sys;
    sys.m = 2;
    sys.k = 1;
    LayeredDigraph::Builder b;
    b.vertex("r", 0);
    b.vertex("a0", 1);
    b.vertex("a1", 1);
    b.edge("r", "a0");
    b.edge("r", "a1");
    sys.seed = b.build(2);
    sys.frontier_colours.push_back({{"a0"}, 1});
    sys.frontier_colours.push_back({{"a1"}, 1});
    CellType c0;
    c0.colour = 0;
    c0.size = 1;
    c0.children = {{1, {{0, 0}}}, {1, {{0, 0}}}};
    CellType c1;
    c1.colour = 1;
    c1.size = 1;
    c1.children = {{0, {{0, 0}}}, {0, {{0, 0}}}};
    sys.cells[0] = c0;
    sys.cells[1] = c1;
    sys.check();
    return sys;
}

} // namespace fixtures
