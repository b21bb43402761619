#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "descent/structure.hpp"

namespace descent {

// Permutations induced on the base layer by ball automorphisms that fix
// every base class setwise. Towers of distinct base classes are disjoint,
// so the group is the direct product of its per-class factors; each factor
// is stored as an explicit, lexicographically sorted permutation list.
struct GroupOnBase {
    int depth = 0;
    struct Factor {
        std::vector<int> verts;              // members of the base class (graph indices)
        std::vector<std::vector<int>> perms; // index permutations, sorted
    };
    std::vector<Factor> factors;

    bool operator==(const GroupOnBase& o) const;
    bool subgroup_of(const GroupOnBase& o) const;
    uint64_t order() const;
    // full element list as base-vertex permutations; guarded against blowup
    std::vector<std::vector<int>> elements(uint64_t guard = 4096) const;
    std::string describe() const;
};

// Enumeration guard: per-class candidate count is size! and must stay small.
inline constexpr int kMaxBaseClassSize = 8;

GroupOnBase induced_group(const TStructure& t, int d);

struct NResult {
    int n_hat = 0;
    int window_lo = 0, window_hi = 0; // depths over which the chain is constant
    bool inconclusive = false;        // the last available step still shrank
    std::vector<uint64_t> chain_orders;
};

// Chain of induced groups for d = 1..t_depth; n_hat is the least depth
// whose group equals the deepest one. The deepest group stands proxy for
// the unbounded structure, hence the inconclusive flag when the chain was
// still shrinking at the end.
NResult compute_n(const TStructure& t);

} // namespace descent
