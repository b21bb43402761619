#pragma once

#include <map>
#include <vector>

#include "descent/digraph.hpp"

namespace descent {

// One growth rule: how a frontier class of this colour spawns the next
// level. edge_pattern entries are (parent_index, child_index) pairs within
// the class / child class.
struct CellChild {
    int colour = 0;
    std::vector<std::pair<int, int>> pattern; // sorted (parent, child) pairs
};

struct CellType {
    int colour = 0;
    int size = 0;
    std::vector<CellChild> children;
};

// Finite recipe generating layered digraphs to any depth: a seed ball plus
// coloured class types that expand level by level.
struct ExpansionSystem {
    int m = 0;
    int k = 0; // declared stabilization constant
    LayeredDigraph seed;
    // classes of the seed's last level (each sorted, listed by least member
    // id) with the colour each one expands with
    std::vector<std::pair<std::vector<VertexId>, int>> frontier_colours;
    std::map<int, CellType> cells;

    // Checks the structural constraints (seed validity, colour references,
    // per-class out-valency budgets). Throws op_error on the first break.
    void check() const;
};

// Deterministic expansion of the system to the requested depth. Vertex ids
// beyond the seed derive from (class path, child ordinal, member index), so
// re-expansion is reproducible and deeper expansions extend shallower ones
// vertex for vertex.
LayeredDigraph expand(const ExpansionSystem& sys, int depth);

// Seed truncated or expanded to depth d (helper: expand() requires
// d >= seed depth, this one does not).
LayeredDigraph gamma_truncation(const ExpansionSystem& sys, int d);

// Built-in systems.
ExpansionSystem tree_system(int m);   // k = 1, directed m-ary tree
ExpansionSystem ladder_system(int m); // k = 2, complete-bipartite levels of size m
// k = 2 system with out-valency 6: classes of three vertices, children
// sourced by the three 2-subsets of each class. Unlike the ladder, distinct
// vertices keep distinct eventual descendant sets.
ExpansionSystem triad_system();

} // namespace descent
