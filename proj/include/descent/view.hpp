#pragma once

#include <vector>

#include "descent/digraph.hpp"

namespace descent {

// Indexed digraph the search and canonical-form engines run on. A view
// carries an isomorphism-invariant level per vertex plus optional class ids
// (mapped setwise-consistently) and colour tags (matched exactly).
struct DigraphView {
    int n = 0;
    std::vector<int> level;
    std::vector<int> cls;    // -1 when absent
    std::vector<int> colour; // -1 when absent
    std::vector<std::vector<int>> out, in;
    std::vector<Bits> adj; // adj[u].test(v) == edge u->v
    std::vector<int> orig; // view index -> caller's vertex index
    std::vector<uint64_t> wl; // refined structural code per vertex
    int n_cls = 0;
    std::vector<int> cls_size;

    bool has_edge(int u, int v) const { return adj[u].test(v); }
    void finalize(); // builds in/adj/wl from out; call once after filling
};

DigraphView view_of(const LayeredDigraph& g);

// View on a vertex subset. levels must be supplied (iso-invariant relative
// levels); vertex order inside the view follows (level, position in subset).
DigraphView subset_view(const LayeredDigraph& g, const std::vector<int>& verts,
                        const std::vector<int>& levels);

} // namespace descent
