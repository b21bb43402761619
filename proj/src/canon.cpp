#include "descent/canon.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace descent {

namespace {

// Ordered partition of the view's vertices. Cells are kept in a canonical
// order: splits replace a cell by its fragments sorted by an
// index-independent key, so cell numbers are themselves invariants.
struct Partition {
    std::vector<std::vector<int>> cells;
    std::vector<int> cell_of;

    void renumber() {
        for (size_t ci = 0; ci < cells.size(); ++ci)
            for (int v : cells[ci]) cell_of[v] = static_cast<int>(ci);
    }
};

struct Canonizer {
    static constexpr int kNoJump = 1 << 28;

    const DigraphView& v;
    int m;
    // best (smallest) signature found so far, its order and its path of
    // individualized vertices
    std::vector<int64_t> best_sig;
    std::vector<int> best_order_pos; // vertex -> canonical position
    std::vector<int> best_path;
    bool have_best = false;
    // discovered automorphisms (vertex permutations yielding equal leaves)
    std::vector<std::vector<int>> autos;

    explicit Canonizer(const DigraphView& view, int mm) : v(view), m(mm) {}

    Partition initial() const {
        Partition p;
        p.cell_of.assign(v.n, 0);
        std::map<std::pair<int, int>, std::vector<int>> by;
        for (int u = 0; u < v.n; ++u) by[{v.level[u], v.colour[u]}].push_back(u);
        for (auto& [key, cell] : by) p.cells.push_back(cell);
        p.renumber();
        return p;
    }

    void refine(Partition& p) const {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<std::vector<int>> next;
            for (auto& cell : p.cells) {
                if (cell.size() == 1) {
                    next.push_back(cell);
                    continue;
                }
                // key: multisets of neighbouring cell indices, both ways
                std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<int>> split;
                for (int u : cell) {
                    std::vector<int> ok, ik;
                    for (int w : v.out[u]) ok.push_back(p.cell_of[w]);
                    for (int w : v.in[u]) ik.push_back(p.cell_of[w]);
                    std::sort(ok.begin(), ok.end());
                    std::sort(ik.begin(), ik.end());
                    split[{ok, ik}].push_back(u);
                }
                if (split.size() > 1) changed = true;
                for (auto& [key, frag] : split) next.push_back(frag);
            }
            p.cells = std::move(next);
            p.renumber();
        }
    }

    // signature of a discrete partition: per vertex in canonical order, the
    // level followed by the sorted canonical out-neighbour list
    std::vector<int64_t> signature(const Partition& p, std::vector<int>& pos) const {
        pos.assign(v.n, -1);
        for (size_t i = 0; i < p.cells.size(); ++i) pos[p.cells[i][0]] = static_cast<int>(i);
        std::vector<int64_t> sig;
        sig.reserve(static_cast<size_t>(v.n) * 3);
        for (size_t i = 0; i < p.cells.size(); ++i) {
            int u = p.cells[i][0];
            sig.push_back(v.level[u]);
            sig.push_back(v.colour[u]);
            std::vector<int> nb;
            for (int w : v.out[u]) nb.push_back(pos[w]);
            std::sort(nb.begin(), nb.end());
            sig.push_back(-1 - static_cast<int64_t>(nb.size()));
            for (int x : nb) sig.push_back(x);
        }
        return sig;
    }

    // Returns kNoJump, or the depth of the node that should resume.
    int leaf(const Partition& p, const std::vector<int>& fixed) {
        std::vector<int> pos;
        std::vector<int64_t> sig = signature(p, pos);
        if (!have_best || sig < best_sig) {
            best_sig = std::move(sig);
            best_order_pos = pos;
            best_path = fixed;
            have_best = true;
            return kNoJump;
        }
        if (sig == best_sig) {
            // equal leaf: position-wise composition of the two orders is an
            // automorphism mapping this branch onto the already-explored
            // branch the best path took at the divergence node, so every
            // node strictly below the divergence can be abandoned
            std::vector<int> at_pos(v.n), here_at(v.n), g(v.n);
            for (int u = 0; u < v.n; ++u) at_pos[best_order_pos[u]] = u;
            for (int u = 0; u < v.n; ++u) here_at[pos[u]] = u;
            for (int i = 0; i < v.n; ++i) g[at_pos[i]] = here_at[i];
            autos.push_back(g);
            size_t c = 0;
            while (c < fixed.size() && c < best_path.size() && fixed[c] == best_path[c]) ++c;
            return static_cast<int>(c);
        }
        return kNoJump;
    }

    int search(const Partition& p, const std::vector<int>& fixed) {
        int depth = static_cast<int>(fixed.size());
        int target = -1;
        for (size_t i = 0; i < p.cells.size(); ++i)
            if (p.cells[i].size() > 1) {
                target = static_cast<int>(i);
                break;
            }
        if (target == -1) return leaf(p, fixed);
        std::vector<int> tried;
        for (int u : p.cells[target]) {
            bool skip = false;
            for (int t : tried) {
                for (const auto& g : autos) {
                    bool fixes = true;
                    for (int f : fixed)
                        if (g[f] != f) {
                            fixes = false;
                            break;
                        }
                    if (fixes && g[t] == u) {
                        skip = true;
                        break;
                    }
                }
                if (skip) break;
            }
            if (skip) continue;
            tried.push_back(u);
            Partition q = p;
            auto cell = q.cells[target];
            cell.erase(std::find(cell.begin(), cell.end(), u));
            q.cells[target] = {u};
            q.cells.insert(q.cells.begin() + target + 1, cell);
            q.renumber();
            refine(q);
            std::vector<int> f2 = fixed;
            f2.push_back(u);
            int jump = search(q, f2);
            if (jump < depth) return jump; // unwound past this node
        }
        return kNoJump;
    }
};

} // namespace

CanonResult canonical_view(const DigraphView& v, int m) {
    Canonizer c(v, m);
    Partition p = c.initial();
    c.refine(p);
    c.search(p, {});

    // render the best order as LDG text with zero-padded numeric ids
    int width = 1;
    for (int t = v.n - 1; t >= 10; t /= 10) ++width;
    auto name = [&](int canonpos) {
        std::string s = std::to_string(canonpos);
        while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
        return s;
    };
    int depth = 0;
    for (int u = 0; u < v.n; ++u) depth = std::max(depth, v.level[u]);
    std::ostringstream os;
    os << "ldg 1\nm " << m << "\ndepth " << depth << "\n";
    std::vector<std::vector<int>> by_level(depth + 1);
    for (int u = 0; u < v.n; ++u) by_level[v.level[u]].push_back(c.best_order_pos[u]);
    for (int l = 0; l <= depth; ++l) {
        std::sort(by_level[l].begin(), by_level[l].end());
        os << "level " << l << ":";
        for (int x : by_level[l]) os << " " << name(x);
        os << "\n";
    }
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < v.n; ++u)
        for (int w : v.out[u]) edges.push_back({c.best_order_pos[u], c.best_order_pos[w]});
    std::sort(edges.begin(), edges.end());
    for (auto [s, d] : edges) os << "edge " << name(s) << " " << name(d) << "\n";

    return {os.str(), c.best_order_pos};
}

CanonResult canonical_form(const LayeredDigraph& g) {
    return canonical_view(view_of(g), g.m());
}

} // namespace descent
