#pragma once

#include <optional>
#include <string>
#include <vector>

#include "descent/digraph.hpp"
#include "descent/verdict.hpp"
#include "descent/view.hpp"

namespace descent {

// Partition of one level by equality of the ancestor set k-1 steps up.
struct RhoPartition {
    int level = 0;
    int k = 0;
    std::vector<std::vector<int>> classes; // sorted members, classes by least member
    std::vector<int> class_of;             // graph vertex -> class ordinal (-1 off-level)
};

RhoPartition rho_partition(const LayeredDigraph& g, int k, int level);

// Transitive closure of "descendant cones intersect", tested within a
// bounded horizon. Always a refinement of the ancestor-class partition on
// valid inputs; always an under-approximation of the unbounded relation.
struct SigmaPartition {
    int level = 0;
    int witness_depth = 0;
    std::vector<std::vector<int>> classes;
    std::vector<int> class_of;
    // whether the partition differs from the one at horizon-1 (absent when
    // no smaller horizon exists)
    std::optional<bool> changed_from_prev_horizon;
};

SigmaPartition sigma_partition(const LayeredDigraph& g, int k, int level, int witness_depth);

// Quotient of levels from_level..D by the ancestor-class partition, with
// the unique-parent tree verdict.
struct QuotientResult {
    struct Node {
        int level;
        std::vector<int> members;
        std::vector<int> out; // node indices one level down
    };
    std::vector<Node> nodes;
    int from_level = 0;
    Verdict tree_verdict;
    std::string dot() const;
};

QuotientResult quotient(const LayeredDigraph& g, int k, int from_level);

// The union of levels 2k-1..D with its class structure and a colouring of
// classes by structural type. Class ids index `classes`; levels are relative
// (base classes at T-level 0).
struct TStructure {
    const LayeredDigraph* g = nullptr;
    int k = 0, K = 0;
    int t_depth = 0; // levels available below the base layer
    struct TClass {
        int level;                // T-level
        std::vector<int> members; // graph vertex indices, sorted
        int colour = -1;          // index into `base`
        int parent = -1;          // class id one level up (-1 at the base)
        int component = -1;       // base-class ordinal whose tower holds it
    };
    std::vector<TClass> classes;
    std::vector<int> class_of; // graph vertex -> class id (-1 above the base layer)
    std::vector<int> base;     // class ids at T-level 0

    int g_level(int t_level) const { return 2 * k - 1 + t_level; }
};

// Assembles the T-structure of g. Requires depth >= 2k and that the
// stabilization constant of g equals k. Colours are assigned by the least
// base class whose depth-matched descendant structure matches; a class with
// no matching base class is a structural defect and raises op_error.
TStructure build_t(const LayeredDigraph& g, int k);

// View of the ball of radius d around the whole base layer (levels 0..d of
// T) with class ids and colours attached. Colour tags can be left out for
// searches that must not see them (colour assignment itself).
DigraphView t_ball_view(const TStructure& t, int d, bool with_colours = true);
// Ball of radius d around one class.
DigraphView t_class_ball_view(const TStructure& t, int cls, int d, bool with_colours = true);

// Checks the colour bookkeeping of a T-structure by independent search.
bool validate_t(const TStructure& t, std::string* why = nullptr);

} // namespace descent
