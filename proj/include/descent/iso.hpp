#pragma once

#include <optional>
#include <vector>

#include "descent/view.hpp"

namespace descent {

// Constraints on an isomorphism search. Pins are view-index pairs that the
// mapping must contain; class pins force one class onto another.
struct IsoConstraints {
    bool respect_cls = false;
    bool respect_colour = false;
    std::vector<std::pair<int, int>> pins;
    std::vector<std::pair<int, int>> class_pins;
};

// Deterministic constraint-respecting digraph isomorphism search. Vertices
// of A are processed in view order; candidates ascend, so the first hit is
// the lexicographically least mapping under that order. Returns the mapping
// A-index -> B-index, or nothing.
std::optional<std::vector<int>> iso_search(const DigraphView& a, const DigraphView& b,
                                           const IsoConstraints& c = {});

// Re-checks a mapping as a level-, edge-, non-edge-, class- and
// colour-preserving bijection. Independent of the search implementation.
bool verify_mapping(const DigraphView& a, const DigraphView& b, const std::vector<int>& map,
                    bool check_cls, bool check_colour, std::string* why = nullptr);

} // namespace descent
