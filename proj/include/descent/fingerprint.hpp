#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descent/canon.hpp"
#include "descent/groups.hpp"
#include "descent/structure.hpp"

namespace descent {

// (k, M, canonical serialization of the depth-M truncation): equal
// fingerprints mean byte-identical canonical text and equal constants.
struct Fingerprint {
    int k = 0;
    int m_depth = 0; // M = 2k + N
    std::string canonical_text;
    bool operator==(const Fingerprint& o) const {
        return k == o.k && m_depth == o.m_depth && canonical_text == o.canonical_text;
    }
};

// Requires a stabilization constant, depth >= 2k+1 for the group chain and
// depth >= M for the canonical ball. Throws op_error otherwise.
Fingerprint compute_m(const LayeredDigraph& g);

// Level-preserving bijection between depth-d balls of two T-structures,
// preserving edges, non-edges, classes and colours. Maps are kept on the
// underlying graph vertex indices.
struct BallIso {
    int depth = 0;
    std::map<int, int> map;
};

BallIso initial_ball_iso(const TStructure& t, const TStructure& s, int d);

// One step of the constructive extension: turns a verified depth-d ball
// isomorphism into a verified depth-d+1 one. Requires d > n_hat(s) and both
// structures to reach depth d+1; raises op_error("extension failed") when a
// constrained sub-search comes up empty, which on valid inputs cannot
// happen.
BallIso extend_ball_iso(const BallIso& phi, const TStructure& t, const TStructure& s,
                        int n_hat_s);

bool verify_ball_iso(const BallIso& phi, const TStructure& t, const TStructure& s,
                     std::string* why = nullptr);

// Everything decide_iso needs about one input, computed once.
struct IsoContext {
    const LayeredDigraph* g = nullptr;
    KResult kres;
    std::optional<TStructure> t;
    std::optional<NResult> n;
    std::optional<Fingerprint> fp;
    std::string blocked; // non-empty when the invariants could not be computed
};

IsoContext make_iso_context(const LayeredDigraph& g);

enum class IsoVerdict { isomorphic, not_isomorphic, insufficient_depth };

struct IsoDecision {
    IsoVerdict verdict;
    std::string discriminator; // set on not_isomorphic
    std::string detail;
    // explicit certificate on the common-depth truncations, re-verified
    std::vector<std::pair<VertexId, VertexId>> certificate;
};

// Compares out-valency, k, M and the canonical depth-M balls; on a match
// produces an explicit isomorphism of the common-depth truncations by
// repeated ball extension.
IsoDecision decide_iso(const IsoContext& a, const IsoContext& b);

} // namespace descent
