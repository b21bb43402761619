#include "descent/iso.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace descent {

namespace {

// multiset signature used for the cheap pre-checks
template <typename T>
std::vector<T> sorted(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// Backtracking search with per-vertex candidate bitsets, positive
// forward checking and most-constrained-first ordering. The exact induced
// consistency (including non-edges) is enforced at bind time; forward
// checking only narrows the positive adjacency, which is what prunes the
// deep symmetric instances.
struct Search {
    const DigraphView& a;
    const DigraphView& b;
    const IsoConstraints& c;
    std::vector<Bits> b_in_rows;
    std::vector<Bits> cand;
    std::vector<int> img, pre; // a->b, b->a, -1 unset
    std::vector<int> cls_img;  // a-class -> b-class, -1 unset
    std::vector<int> cls_cnt;  // mapped members per a-class
    std::vector<char> cls_pinned;
    std::vector<std::pair<int, Bits>> trail; // saved candidate sets
    std::vector<size_t> trail_mark;
    int assigned = 0;

    Search(const DigraphView& a_, const DigraphView& b_, const IsoConstraints& c_)
        : a(a_), b(b_), c(c_) {}

    bool consistent(int u, int v) const {
        if (a.level[u] != b.level[v]) return false;
        if (c.respect_colour && a.colour[u] != b.colour[v]) return false;
        if (a.out[u].size() != b.out[v].size() || a.in[u].size() != b.in[v].size())
            return false;
        if (a.wl[u] != b.wl[v]) return false;
        return true;
    }

    // exact induced check against everything already mapped
    bool try_assign(int u, int v) const {
        if (pre[v] != -1) return false;
        int hit = 0;
        for (int w : a.out[u])
            if (img[w] != -1) {
                if (!b.has_edge(v, img[w])) return false;
                ++hit;
            }
        int bh = 0;
        for (int x : b.out[v])
            if (pre[x] != -1) ++bh;
        if (bh != hit) return false;
        hit = 0;
        for (int w : a.in[u])
            if (img[w] != -1) {
                if (!b.has_edge(img[w], v)) return false;
                ++hit;
            }
        bh = 0;
        for (int x : b.in[v])
            if (pre[x] != -1) ++bh;
        if (bh != hit) return false;
        if (c.respect_cls && a.cls[u] != -1) {
            if (b.cls[v] == -1) return false;
            int ca = a.cls[u];
            if (cls_img[ca] == -1) {
                if (a.cls_size[ca] != b.cls_size[b.cls[v]]) return false;
            } else if (cls_img[ca] != b.cls[v])
                return false;
        } else if (c.respect_cls && b.cls[v] != -1)
            return false;
        return true;
    }

    void save(int w) { trail.push_back({w, cand[w]}); }

    // narrow the candidates of u's unassigned neighbours to v's rows, then
    // restore arc consistency: a candidate y for x stays only while every
    // neighbour of x still has a y-compatible candidate
    bool forward(int u, int v) {
        std::vector<int> dirty;
        for (int w : a.out[u]) {
            if (img[w] != -1) continue;
            save(w);
            bool ch = false;
            for (size_t i = 0; i < cand[w].w.size(); ++i) {
                uint64_t nw = cand[w].w[i] & b.adj[v].w[i];
                if (nw != cand[w].w[i]) ch = true;
                cand[w].w[i] = nw;
            }
            if (!cand[w].any()) return false;
            if (ch) dirty.push_back(w);
        }
        for (int w : a.in[u]) {
            if (img[w] != -1) continue;
            save(w);
            bool ch = false;
            for (size_t i = 0; i < cand[w].w.size(); ++i) {
                uint64_t nw = cand[w].w[i] & b_in_rows[v].w[i];
                if (nw != cand[w].w[i]) ch = true;
                cand[w].w[i] = nw;
            }
            if (!cand[w].any()) return false;
            if (ch) dirty.push_back(w);
        }
        return propagate(dirty);
    }

    // worklist arc consistency over the candidate sets
    bool propagate(std::vector<int> work) {
        std::vector<char> queued(a.n, 0);
        for (int w : work) queued[w] = 1;
        while (!work.empty()) {
            int w = work.back();
            work.pop_back();
            queued[w] = 0;
            auto revise = [&](int x, bool w_is_parent) -> int {
                // drop candidates of x without a compatible candidate at w
                bool saved = false, changed = false;
                for (int y : cand[x].members()) {
                    const Bits& row = w_is_parent ? b_in_rows[y] : b.adj[y];
                    if (!cand[w].intersects(row)) {
                        if (!saved) {
                            save(x);
                            saved = true;
                        }
                        cand[x].reset(y);
                        changed = true;
                    }
                }
                if (changed && !cand[x].any()) return -1;
                return changed ? 1 : 0;
            };
            for (int x : a.out[w]) {
                if (img[x] != -1) continue;
                int r = revise(x, true);
                if (r < 0) return false;
                if (r > 0 && !queued[x]) {
                    queued[x] = 1;
                    work.push_back(x);
                }
            }
            for (int x : a.in[w]) {
                if (img[x] != -1) continue;
                int r = revise(x, false);
                if (r < 0) return false;
                if (r > 0 && !queued[x]) {
                    queued[x] = 1;
                    work.push_back(x);
                }
            }
        }
        return true;
    }

    bool bind(int u, int v) {
        trail_mark.push_back(trail.size());
        img[u] = v;
        pre[v] = u;
        ++assigned;
        if (c.respect_cls && a.cls[u] != -1) {
            int ca = a.cls[u];
            if (cls_cnt[ca]++ == 0 && !cls_pinned[ca]) cls_img[ca] = b.cls[v];
        }
        return forward(u, v);
    }

    void unbind(int u, int v) {
        for (size_t i = trail.size(); i > trail_mark.back(); --i)
            cand[trail[i - 1].first] = trail[i - 1].second;
        trail.resize(trail_mark.back());
        trail_mark.pop_back();
        img[u] = -1;
        pre[v] = -1;
        --assigned;
        if (c.respect_cls && a.cls[u] != -1) {
            int ca = a.cls[u];
            if (--cls_cnt[ca] == 0 && !cls_pinned[ca]) cls_img[ca] = -1;
        }
    }

    // unassigned vertex with the fewest remaining candidates
    int pick() const {
        int best = -1, best_n = 1 << 30;
        for (int u = 0; u < a.n; ++u) {
            if (img[u] != -1) continue;
            int cn = 0;
            for (size_t i = 0; i < cand[u].w.size(); ++i)
                cn += __builtin_popcountll(cand[u].w[i]);
            if (cn < best_n) {
                best_n = cn;
                best = u;
            }
        }
        return best;
    }

    bool run(std::vector<int>& result) {
        img.assign(a.n, -1);
        pre.assign(b.n, -1);
        cls_img.assign(a.n_cls, -1);
        cls_cnt.assign(a.n_cls, 0);
        cls_pinned.assign(a.n_cls, 0);
        b_in_rows.assign(b.n, Bits(b.n));
        for (int v = 0; v < b.n; ++v)
            for (int x : b.out[v]) b_in_rows[x].set(v);
        for (auto [ca, cb] : c.class_pins) {
            if (ca < 0 || ca >= a.n_cls || cb < 0 || cb >= b.n_cls)
                throw op_error("class pin out of range");
            if (a.cls_size[ca] != b.cls_size[cb]) return false;
            cls_img[ca] = cb;
            cls_pinned[ca] = 1;
        }
        cand.assign(a.n, Bits(b.n));
        for (int u = 0; u < a.n; ++u) {
            bool any = false;
            for (int v = 0; v < b.n; ++v)
                if (consistent(u, v)) {
                    cand[u].set(v);
                    any = true;
                }
            if (!any) return false;
        }
        for (auto [u, v] : c.pins) {
            if (u < 0 || u >= a.n || v < 0 || v >= b.n)
                throw op_error("pin out of range");
            if (a.level[u] != b.level[v]) throw op_error("level-incompatible pins");
            if (img[u] == v) continue;
            if (img[u] != -1 || !cand[u].test(v) || !try_assign(u, v)) return false;
            if (!bind(u, v)) return false;
        }
        if (!recurse()) return false;
        result = img;
        return true;
    }

    bool recurse() {
        if (assigned == a.n) return true;
        int u = pick();
        if (u < 0) return false;
        for (int v : cand[u].members()) {
            if (pre[v] != -1) continue;
            if (!try_assign(u, v)) continue;
            bool ok = bind(u, v);
            if (ok && recurse()) return true;
            unbind(u, v);
        }
        return false;
    }
};

} // namespace

std::optional<std::vector<int>> iso_search(const DigraphView& a, const DigraphView& b,
                                           const IsoConstraints& c) {
    if (a.n != b.n) return std::nullopt;
    if (sorted(a.level) != sorted(b.level)) return std::nullopt;
    if (sorted(a.wl) != sorted(b.wl)) return std::nullopt;
    if (c.respect_colour && sorted(a.colour) != sorted(b.colour)) return std::nullopt;
    if (c.respect_cls) {
        if (sorted(a.cls_size) != sorted(b.cls_size)) return std::nullopt;
    }
    Search s(a, b, c);
    std::vector<int> result;
    if (!s.run(result)) return std::nullopt;
    return result;
}

bool verify_mapping(const DigraphView& a, const DigraphView& b, const std::vector<int>& map,
                    bool check_cls, bool check_colour, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.n != b.n || static_cast<int>(map.size()) != a.n) return fail("size mismatch");
    std::vector<int> seen(b.n, 0);
    for (int u = 0; u < a.n; ++u) {
        int v = map[u];
        if (v < 0 || v >= b.n) return fail("image out of range");
        if (seen[v]++) return fail("not injective");
        if (a.level[u] != b.level[v]) return fail("level not preserved");
        if (check_colour && a.colour[u] != b.colour[v]) return fail("colour not preserved");
    }
    // edge sets, built directly from the out lists
    std::set<std::pair<int, int>> ea, eb;
    for (int u = 0; u < a.n; ++u)
        for (int w : a.out[u]) ea.insert({map[u], map[w]});
    for (int v = 0; v < b.n; ++v)
        for (int x : b.out[v]) eb.insert({v, x});
    if (ea != eb) return fail("edge sets differ under the mapping");
    if (check_cls) {
        std::map<int, int> ci;
        for (int u = 0; u < a.n; ++u) {
            int ca = a.cls[u], cb = b.cls[map[u]];
            if ((ca == -1) != (cb == -1)) return fail("class presence differs");
            if (ca == -1) continue;
            auto it = ci.find(ca);
            if (it == ci.end())
                ci[ca] = cb;
            else if (it->second != cb)
                return fail("class split by the mapping");
        }
        std::set<int> used;
        for (auto [ca, cb] : ci)
            if (!used.insert(cb).second) return fail("two classes merged");
    }
    return true;
}

} // namespace descent
