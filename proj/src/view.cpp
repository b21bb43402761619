#include "descent/view.hpp"

#include <algorithm>
#include <map>

namespace descent {

void DigraphView::finalize() {
    in.assign(n, {});
    adj.assign(n, Bits(n));
    for (int u = 0; u < n; ++u) {
        std::sort(out[u].begin(), out[u].end());
        for (int v : out[u]) {
            in[v].push_back(u);
            adj[u].set(v);
        }
    }
    for (auto& v : in) std::sort(v.begin(), v.end());

    if (cls.empty()) cls.assign(n, -1);
    if (colour.empty()) colour.assign(n, -1);
    n_cls = 0;
    for (int c : cls) n_cls = std::max(n_cls, c + 1);
    cls_size.assign(n_cls, 0);
    for (int c : cls)
        if (c >= 0) cls_size[c]++;

    // structural codes: iterated neighbourhood refinement, id-independent
    wl.assign(n, 0);
    for (int u = 0; u < n; ++u)
        wl[u] = mix(mix(0x9e37u, static_cast<uint64_t>(level[u])),
                    static_cast<uint64_t>(colour[u] + 1));
    int rounds = 0;
    size_t prev_distinct = 0;
    while (true) {
        std::vector<uint64_t> nxt(n);
        for (int u = 0; u < n; ++u) {
            std::vector<uint64_t> ons, ins;
            ons.reserve(out[u].size());
            ins.reserve(in[u].size());
            for (int v : out[u]) ons.push_back(wl[v]);
            for (int v : in[u]) ins.push_back(wl[v]);
            std::sort(ons.begin(), ons.end());
            std::sort(ins.begin(), ins.end());
            uint64_t h = mix(wl[u], 0x517cc1b7ull);
            for (uint64_t x : ons) h = mix(h, x);
            h = mix(h, 0x2754ull);
            for (uint64_t x : ins) h = mix(h, x);
            nxt[u] = h;
        }
        wl = std::move(nxt);
        std::vector<uint64_t> uniq = wl;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        if (uniq.size() == prev_distinct || ++rounds > n + 2) break;
        prev_distinct = uniq.size();
    }
}

DigraphView view_of(const LayeredDigraph& g) {
    DigraphView v;
    v.n = g.size();
    v.level.resize(v.n);
    v.out.assign(v.n, {});
    v.orig.resize(v.n);
    for (int u = 0; u < v.n; ++u) {
        v.level[u] = g.level_ix(u);
        v.out[u] = g.out(u);
        v.orig[u] = u;
    }
    v.finalize();
    return v;
}

DigraphView subset_view(const LayeredDigraph& g, const std::vector<int>& verts,
                        const std::vector<int>& levels) {
    std::vector<int> ord(verts.size());
    for (size_t i = 0; i < ord.size(); ++i) ord[i] = static_cast<int>(i);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        return levels[a] != levels[b] ? levels[a] < levels[b] : verts[a] < verts[b];
    });
    std::map<int, int> pos;
    DigraphView v;
    v.n = static_cast<int>(verts.size());
    v.level.resize(v.n);
    v.out.assign(v.n, {});
    v.orig.resize(v.n);
    for (int i = 0; i < v.n; ++i) {
        v.level[i] = levels[ord[i]];
        v.orig[i] = verts[ord[i]];
        pos[verts[ord[i]]] = i;
    }
    for (int i = 0; i < v.n; ++i)
        for (int w : g.out(v.orig[i])) {
            auto it = pos.find(w);
            if (it != pos.end()) v.out[i].push_back(it->second);
        }
    v.finalize();
    return v;
}

} // namespace descent
