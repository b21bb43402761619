#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descent/digraph.hpp"
#include "descent/expansion.hpp"
#include "descent/verdict.hpp"

namespace descent {

// Finite approximation of a finitely generated object all of whose cones
// look like the reference system's digraph: every non-frontier vertex has
// the full out-valency and the complete part of every cone matches the
// matching truncation of the reference. Cones are ragged in general: a
// vertex whose out-edges were never materialized is frontier regardless of
// its distance from the generators.
class FGObject {
public:
    class Builder;

    const ExpansionSystem& gamma() const { return gamma_; }
    int m() const { return gamma_.m; }
    int size() const { return static_cast<int>(ids_.size()); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id_of(int v) const { return ids_[v]; }
    int index_of(const VertexId& id) const;
    bool has_vertex(const VertexId& id) const { return index_.count(id) > 0; }

    const std::vector<int>& out(int v) const { return out_[v]; }
    const std::vector<int>& in(int v) const { return in_[v]; }
    bool is_frontier(int v) const { return out_[v].empty(); }
    int gen_level(int v) const { return gen_level_[v]; }
    int max_gen_level() const;
    const std::vector<int>& generators() const { return generators_; }
    std::vector<VertexId> generator_ids() const;
    std::vector<VertexId> frontier_ids() const;

    Bits descendants_ix(int v) const;
    // levels of the descendants of v relative to v (-1 outside the cone)
    std::vector<int> cone_levels(int v) const;
    LayeredDigraph cone_as_digraph(int v) const;
    // deepest level to which the cone of v is complete (no frontier above it)
    int cone_complete_depth(int v) const;

    // Structural defects against the reference system; `only` restricts the
    // cone re-verification to the given vertices (new vertices after an
    // amalgamation step; old cones are never modified by the operations).
    std::vector<DefectReport> validate(const std::vector<int>* only = nullptr) const;

private:
    ExpansionSystem gamma_;
    std::vector<std::string> ids_;
    std::map<std::string, int> index_;
    std::vector<std::vector<int>> out_, in_;
    std::vector<int> gen_level_;
    std::vector<int> generators_;

    friend class Builder;
};

class FGObject::Builder {
public:
    explicit Builder(ExpansionSystem gamma) : gamma_(std::move(gamma)) {}
    Builder& vertex(const VertexId& id);
    Builder& edge(const VertexId& src, const VertexId& dst);
    FGObject build() const;

private:
    ExpansionSystem gamma_;
    std::vector<std::string> verts_;
    std::vector<std::pair<std::string, std::string>> edges_;
};

struct FGEmbedding {
    std::map<VertexId, VertexId> map;
};

// --- membership predicates ----------------------------------------------

// Descendant closure of a vertex subset.
Verdict check_sub(const FGObject& f, const std::vector<VertexId>& a);
// Descendant closure plus the bounded closure conditions: no outside vertex
// whose whole frontier cone lies inside, and per-generator finite
// generation (always true on a truncation; the generating sets are written
// into the note).
Verdict check_subplus(const FGObject& f, const std::vector<VertexId>& a);

// Least closed superset: descendant closure, then repeatedly absorb any
// vertex whose entire frontier cone already lies inside.
std::vector<VertexId> subplus_closure(const FGObject& f, const std::vector<VertexId>& seeds);

// --- constructions --------------------------------------------------------

// Single-generator object whose unique cone is the expansion to `depth`.
FGObject from_gamma(const ExpansionSystem& sys, int depth);

// F = B1 + B2 glued over A. A is named by its vertices in B1; `a_to_b2`
// carries the agreement of the two embeddings. B2-only vertices are renamed
// when their ids collide with B1's. |F| = |B1| + |B2| - |A| always; new
// cones are re-verified against the reference.
FGObject free_amalgam(const FGObject& b1, const FGObject& b2,
                      const std::vector<VertexId>& a_in_b1,
                      const std::map<VertexId, VertexId>& a_to_b2,
                      FGEmbedding* emb_b2 = nullptr);

// One construction task: glue B onto Dn over the closed subset A (named in
// Dn) along f : A -> B.
FGObject extend_task(const FGObject& dn, const std::vector<VertexId>& a,
                     const FGObject& b, const std::map<VertexId, VertexId>& f,
                     FGEmbedding* emb_b = nullptr);

// Clone B over A twisted by an automorphism h of A: builds a fresh copy B'
// with B intersect B' = A exactly, s : B -> B' extending h, and returns the
// enlarged object together with s.
std::pair<FGObject, FGEmbedding> clone_over(const FGObject& f, const std::vector<VertexId>& a,
                                            const std::vector<VertexId>& b,
                                            const std::map<VertexId, VertexId>& h);

// F plus a fresh disjoint copy of the reference digraph; returns the new
// generator. Disjointness from the cones of `a` and `b` is re-checked.
std::pair<FGObject, VertexId> disjoint_witness(const FGObject& f, const VertexId& a,
                                               const VertexId& b, int depth = -1);

// --- scheduled construction ------------------------------------------------

struct TaskStep {
    enum class Kind { add_in_neighbour, add_fresh_copy, amalgamate_over_cone };
    Kind kind;
    VertexId vertex; // unused for add_fresh_copy
    int depth = -1;  // fresh-copy depth override
};

std::vector<TaskStep> parse_schedule(const std::string& text);
std::string write_schedule(const std::vector<TaskStep>& steps);

// Gives v a new in-neighbour with an otherwise fresh cone. Only available
// for depth-1-seed systems (k = 1): deeper seeds need interlocking sibling
// structure that a task description cannot supply; use extend_task or
// clone_over there.
FGObject add_in_neighbour(const FGObject& f, const VertexId& v);

// Glues a parallel copy of v's generator envelope over the cone of v.
FGObject amalgamate_over_cone(const FGObject& f, const VertexId& v);

struct BuildStats {
    int steps = 0;
    std::vector<std::string> log; // one line per step: sizes and the identity check
};

FGObject build_limit_approx(const ExpansionSystem& sys, const std::vector<TaskStep>& schedule,
                            int depth, BuildStats* stats = nullptr);

// --- separation trace -------------------------------------------------------

struct TraceStep {
    VertexId b_prev, b_cur, b_next;
    int y_size = 0, z_size = 0; // |Y_i|, |Z_i| after the step
    std::string h_desc;         // chosen automorphism, as "moved: z -> w"
    bool same_level_ok = false; // shared vertices at equal relative levels
    bool sigma_union_ok = false;
    bool generated_low_ok = false;
    bool shrink_ok = false;
};

struct SeparationTrace {
    VertexId a, b;
    int n = 0, K = 0, r = 0;
    bool y_final_empty = false;
    std::vector<TraceStep> steps;
    std::vector<VertexId> chain; // b_0 = a, b_1 = b, b_2, ...
    FGObject final_object;
    std::string table() const; // printable step table
};

// Executes the clone-and-shrink loop on the finite object until the last
// two clones have disjoint cones, auditing every step. The horizon bounds
// every cone inspection; -1 means the full available depth.
SeparationTrace separation_trace(const FGObject& f, const VertexId& a, const VertexId& b,
                                 int horizon = -1);

// --- orbit certificates -----------------------------------------------------

struct OrbitCertificate {
    std::pair<VertexId, VertexId> uv, ab;
    std::vector<std::pair<VertexId, VertexId>> envelope_iso;
};

// One-sided orbit test: an isomorphism between the closed envelopes of the
// two pairs, pinning u to a and v to b. Absence is inconclusive.
std::optional<OrbitCertificate> orbit_certificate(const FGObject& f, const VertexId& u,
                                                  const VertexId& v, const VertexId& a,
                                                  const VertexId& b);

} // namespace descent
