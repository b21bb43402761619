#pragma once

#include "descent/digraph.hpp"
#include "descent/verdict.hpp"

namespace descent {

// Depth-bounded checkers. Each pass is a statement about the truncation
// only; the witness of a fail can be re-checked directly on the input.

// Layering, constant out-valency, root reachability.
Verdict check_g0(const LayeredDigraph& g);

// Every cone is isomorphic to the same-depth truncation of the whole
// digraph. Assumes check_g0 passed.
Verdict check_g1(const LayeredDigraph& g);

// Strict level growth.
Verdict check_g2(const LayeredDigraph& g);

// Least level from which the level-1 ancestor set is constant along
// descent, plus the per-level ancestor counts.
KResult compute_k(const LayeredDigraph& g);

// Closure proxy: no vertex outside a cone may have its whole deepest-level
// cone inside that cone. Inconclusive below depth 2k+2.
Verdict check_p2(const LayeredDigraph& g);

// Twin-freeness proxy: distinct same-level vertices must differ on the
// deepest level, and distinct non-frontier vertices must have distinct
// out-sets.
Verdict check_p2_prime(const LayeredDigraph& g);

// Truncation-level transitivity: each level is one orbit of the
// root-fixing automorphism group of the truncation.
Verdict check_p3(const LayeredDigraph& g);

struct PropertyLine {
    std::string prop;
    Verdict verdict;
};

// The named battery in canonical order. `props` selects a subset by name
// (g0,g1,g2,g3,p2,p2p,p3); empty means all.
std::vector<PropertyLine> run_checks(const LayeredDigraph& g,
                                     const std::vector<std::string>& props = {});

} // namespace descent
