#pragma once

#include <iosfwd>

namespace descent {

// Invariant battery over the built-in systems (trees m = 2,3; ladders
// m = 2,3). Deterministic output; returns 0 when everything holds.
int run_selftest(std::ostream& os);

} // namespace descent
