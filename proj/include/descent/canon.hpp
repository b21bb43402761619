#pragma once

#include <string>
#include <vector>

#include "descent/view.hpp"

namespace descent {

struct CanonResult {
    std::string text;       // canonical serialization, LDG format
    std::vector<int> order; // view index -> canonical number
};

// Canonical relabelling of a view: level-wise partition refinement with
// backtracking over the remaining ties. The output is invariant under any
// renaming or reordering of the input vertices. m is only echoed into the
// serialized header.
CanonResult canonical_view(const DigraphView& v, int m);

CanonResult canonical_form(const LayeredDigraph& g);

} // namespace descent
