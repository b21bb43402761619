#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descent/common.hpp"

namespace descent {

// Opaque vertex token. Unique within one digraph, totally ordered so that
// every iteration order in the library is deterministic.
using VertexId = std::string;

struct DefectReport;

// Finite truncation of a rooted layered digraph of constant out-valency m.
// The truncation is always read as the first D+1 levels of a purportedly
// infinite digraph, so vertices on the last level legitimately have no
// out-edges (the frontier). The type itself can hold arbitrary leveled
// edge data; validate() reports where the layered-digraph invariants break.
//
// Vertices are indexed internally 0..n-1, sorted by (level, id). All public
// queries accept ids; index-based accessors are provided for hot paths.
class LayeredDigraph {
public:
    class Builder;

    int m() const { return m_; }
    int depth() const { return depth_; }
    int size() const { return static_cast<int>(ids_.size()); }

    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id_of(int v) const { return ids_[v]; }
    int index_of(const VertexId& id) const; // throws op_error("no such vertex")
    std::optional<int> try_index(const VertexId& id) const;

    int level_ix(int v) const { return level_[v]; }
    const std::vector<int>& level_vertices(int lvl) const { return levels_[lvl]; }
    int level_size(int lvl) const { return static_cast<int>(levels_[lvl].size()); }
    const std::vector<int>& out(int v) const { return out_[v]; }
    const std::vector<int>& in(int v) const { return in_[v]; }
    bool has_edge(int u, int v) const;
    int edge_count() const { return edge_count_; }
    int root() const; // the unique level-0 vertex; op_error when |L_0| != 1

    // --- index-based queries -------------------------------------------
    // Descendants of v within max_depth forward steps (v itself included).
    Bits descendants_ix(int v, int max_depth = -1) const;
    // Vertices at level level(x) - s of which x is a descendant.
    std::vector<int> ancestors_at_ix(int x, int s) const;
    // Ancestors-of-x bitset restricted to a single level.
    Bits ancestors_on_level(int x, int lvl) const;

    // Per-vertex descendant bitsets, bounded depth (whole graph). Row v is
    // the descendant set of v.
    std::vector<Bits> descendant_matrix(int max_depth = -1) const;

    LayeredDigraph cone_ix(int v) const;
    LayeredDigraph truncate(int d) const; // op_error when d > depth

    // Copy with fresh vertex ids (structure preserved).
    LayeredDigraph relabelled(const std::map<VertexId, VertexId>& rename) const;

    // Every violated invariant with a witness. Empty report iff the object
    // is a valid constant-out-valency layered truncation.
    std::vector<DefectReport> validate() const;

    bool identical(const LayeredDigraph& o) const; // same ids, levels, edges, m

private:
    int m_ = 0;
    int depth_ = 0;
    int edge_count_ = 0;
    std::vector<std::string> ids_;
    std::map<std::string, int> index_;
    std::vector<int> level_;
    std::vector<std::vector<int>> levels_;
    std::vector<std::vector<int>> out_, in_;

    friend class Builder;
};

struct DefectReport {
    std::string what;
    std::vector<VertexId> vertices;
    std::string text() const;
};

class LayeredDigraph::Builder {
public:
    Builder& vertex(const VertexId& id, int level);
    Builder& edge(const VertexId& src, const VertexId& dst);
    // Sorts, indexes and freezes. Does not run validate(): defective
    // instances are representable on purpose.
    LayeredDigraph build(int m) const;

private:
    std::vector<std::pair<std::string, int>> verts_;
    std::vector<std::pair<std::string, std::string>> edges_;
};

// --- id-based operation surface ---------------------------------------

int level_of(const LayeredDigraph& g, const VertexId& v);
std::vector<VertexId> descendants(const LayeredDigraph& g, const VertexId& v,
                                  int max_depth = -1);
std::vector<VertexId> ancestors_at(const LayeredDigraph& g, const VertexId& x, int s);
LayeredDigraph cone(const LayeredDigraph& g, const VertexId& v);
std::vector<DefectReport> validate(const LayeredDigraph& g);

} // namespace descent
