#include "descent/digraph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace descent {

int LayeredDigraph::index_of(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw op_error("no such vertex: " + id);
    return it->second;
}

std::optional<int> LayeredDigraph::try_index(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool LayeredDigraph::has_edge(int u, int v) const {
    const auto& o = out_[u];
    return std::binary_search(o.begin(), o.end(), v);
}

int LayeredDigraph::root() const {
    if (levels_.empty() || levels_[0].size() != 1)
        throw op_error("digraph has no unique root");
    return levels_[0][0];
}

Bits LayeredDigraph::descendants_ix(int v, int max_depth) const {
    Bits seen(size());
    seen.set(v);
    std::deque<std::pair<int, int>> q;
    q.push_back({v, 0});
    while (!q.empty()) {
        auto [u, d] = q.front();
        q.pop_front();
        if (max_depth >= 0 && d == max_depth) continue;
        for (int w : out_[u])
            if (!seen.test(w)) {
                seen.set(w);
                q.push_back({w, d + 1});
            }
    }
    return seen;
}

std::vector<int> LayeredDigraph::ancestors_at_ix(int x, int s) const {
    if (s > level_[x]) throw op_error("underflow: level(" + ids_[x] + ") < s");
    // Walk in-edges s times. On a layered instance every in-step goes up one
    // level; on defective input we filter by the target level at the end.
    Bits cur(size());
    cur.set(x);
    for (int step = 0; step < s; ++step) {
        Bits nxt(size());
        for (int v = 0; v < size(); ++v)
            if (cur.test(v))
                for (int w : in_[v]) nxt.set(w);
        cur = nxt;
    }
    std::vector<int> res;
    int want = level_[x] - s;
    for (int v : cur.members())
        if (level_[v] == want) res.push_back(v);
    return res;
}

Bits LayeredDigraph::ancestors_on_level(int x, int lvl) const {
    Bits res(size());
    if (lvl > level_[x]) return res;
    for (int v : ancestors_at_ix(x, level_[x] - lvl)) res.set(v);
    return res;
}

std::vector<Bits> LayeredDigraph::descendant_matrix(int max_depth) const {
    // Bottom-up union over levels; edges that skip levels (defective input)
    // fall back to per-vertex BFS.
    std::vector<Bits> d(size());
    bool layered = true;
    for (int v = 0; v < size() && layered; ++v)
        for (int w : out_[v])
            if (level_[w] != level_[v] + 1) layered = false;
    if (!layered || max_depth >= 0) {
        for (int v = 0; v < size(); ++v) d[v] = descendants_ix(v, max_depth);
        return d;
    }
    for (int lvl = depth_; lvl >= 0; --lvl)
        for (int v : levels_[lvl]) {
            d[v] = Bits(size());
            d[v].set(v);
            for (int w : out_[v]) d[v].or_with(d[w]);
        }
    return d;
}

LayeredDigraph LayeredDigraph::cone_ix(int v) const {
    Bits keep = descendants_ix(v);
    Builder b;
    int base = level_[v];
    for (int u : keep.members()) b.vertex(ids_[u], level_[u] - base);
    for (int u : keep.members())
        for (int w : out_[u])
            if (keep.test(w)) b.edge(ids_[u], ids_[w]);
    return b.build(m_);
}

LayeredDigraph LayeredDigraph::truncate(int d) const {
    if (d > depth_) throw op_error("insufficient depth: have " + std::to_string(depth_) +
                                   ", need " + std::to_string(d));
    Builder b;
    for (int v = 0; v < size(); ++v)
        if (level_[v] <= d) b.vertex(ids_[v], level_[v]);
    for (int v = 0; v < size(); ++v)
        if (level_[v] < d)
            for (int w : out_[v])
                if (level_[w] <= d) b.edge(ids_[v], ids_[w]);
    return b.build(m_);
}

LayeredDigraph LayeredDigraph::relabelled(const std::map<VertexId, VertexId>& rename) const {
    auto name = [&](int v) {
        auto it = rename.find(ids_[v]);
        return it == rename.end() ? ids_[v] : it->second;
    };
    Builder b;
    for (int v = 0; v < size(); ++v) b.vertex(name(v), level_[v]);
    for (int v = 0; v < size(); ++v)
        for (int w : out_[v]) b.edge(name(v), name(w));
    return b.build(m_);
}

std::string DefectReport::text() const {
    std::ostringstream os;
    os << what;
    for (size_t i = 0; i < vertices.size(); ++i) os << (i ? " " : ": ") << vertices[i];
    return os.str();
}

std::vector<DefectReport> LayeredDigraph::validate() const {
    std::vector<DefectReport> out;
    if (m_ <= 0) out.push_back({"out-valency m must be positive", {}});
    if (levels_.empty() || levels_[0].size() != 1) {
        std::vector<VertexId> l0;
        if (!levels_.empty())
            for (int v : levels_[0]) l0.push_back(ids_[v]);
        out.push_back({"level 0 must hold exactly the root", l0});
    }
    for (int v = 0; v < size(); ++v) {
        for (int w : out_[v])
            if (level_[w] != level_[v] + 1)
                out.push_back({"non-consecutive edge", {ids_[v], ids_[w]}});
        int deg = static_cast<int>(out_[v].size());
        if (level_[v] < depth_ && deg != m_)
            out.push_back({"out-valency != m (" + std::to_string(deg) + " vs " +
                               std::to_string(m_) + ")",
                           {ids_[v]}});
        if (level_[v] == depth_ && deg != 0)
            out.push_back({"frontier vertex has out-edges", {ids_[v]}});
    }
    for (int lvl = 0; lvl <= depth_; ++lvl)
        if (levels_[lvl].empty()) out.push_back({"empty level " + std::to_string(lvl), {}});
    // root-reachability
    if (!levels_.empty() && levels_[0].size() == 1) {
        Bits reach = descendants_ix(levels_[0][0]);
        for (int v = 0; v < size(); ++v)
            if (!reach.test(v))
                out.push_back({"vertex not a descendant of the root", {ids_[v]}});
    }
    return out;
}

bool LayeredDigraph::identical(const LayeredDigraph& o) const {
    return m_ == o.m_ && depth_ == o.depth_ && ids_ == o.ids_ && level_ == o.level_ &&
           out_ == o.out_;
}

LayeredDigraph::Builder& LayeredDigraph::Builder::vertex(const VertexId& id, int level) {
    verts_.push_back({id, level});
    return *this;
}

LayeredDigraph::Builder& LayeredDigraph::Builder::edge(const VertexId& src, const VertexId& dst) {
    edges_.push_back({src, dst});
    return *this;
}

LayeredDigraph LayeredDigraph::Builder::build(int m) const {
    LayeredDigraph g;
    g.m_ = m;
    auto sorted = verts_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    int maxlvl = 0;
    for (const auto& [id, lvl] : sorted) {
        if (lvl < 0) throw op_error("negative level for vertex " + id);
        if (g.index_.count(id)) throw op_error("duplicate vertex id: " + id);
        int ix = static_cast<int>(g.ids_.size());
        g.ids_.push_back(id);
        g.index_[id] = ix;
        g.level_.push_back(lvl);
        maxlvl = std::max(maxlvl, lvl);
    }
    g.depth_ = maxlvl;
    g.levels_.assign(maxlvl + 1, {});
    for (int v = 0; v < g.size(); ++v) g.levels_[g.level_[v]].push_back(v);
    g.out_.assign(g.size(), {});
    g.in_.assign(g.size(), {});
    for (const auto& [s, d] : edges_) {
        auto si = g.index_.find(s), di = g.index_.find(d);
        if (si == g.index_.end()) throw op_error("edge from unknown vertex: " + s);
        if (di == g.index_.end()) throw op_error("edge to unknown vertex: " + d);
        g.out_[si->second].push_back(di->second);
        g.in_[di->second].push_back(si->second);
    }
    for (auto& v : g.out_) {
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end())
            throw op_error("duplicate edge");
    }
    for (auto& v : g.in_) std::sort(v.begin(), v.end());
    g.edge_count_ = static_cast<int>(edges_.size());
    return g;
}

int level_of(const LayeredDigraph& g, const VertexId& v) { return g.level_ix(g.index_of(v)); }

std::vector<VertexId> descendants(const LayeredDigraph& g, const VertexId& v, int max_depth) {
    Bits d = g.descendants_ix(g.index_of(v), max_depth);
    std::vector<VertexId> out;
    for (int u : d.members()) out.push_back(g.id_of(u));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VertexId> ancestors_at(const LayeredDigraph& g, const VertexId& x, int s) {
    std::vector<VertexId> out;
    for (int u : g.ancestors_at_ix(g.index_of(x), s)) out.push_back(g.id_of(u));
    std::sort(out.begin(), out.end());
    return out;
}

LayeredDigraph cone(const LayeredDigraph& g, const VertexId& v) {
    return g.cone_ix(g.index_of(v));
}

std::vector<DefectReport> validate(const LayeredDigraph& g) { return g.validate(); }

} // namespace descent
