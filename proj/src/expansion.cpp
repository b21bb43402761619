#include "descent/expansion.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace descent {

namespace {

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

int digits(int n) { return n < 10 ? 1 : 1 + digits(n / 10); }

} // namespace

void ExpansionSystem::check() const {
    if (m <= 0) throw op_error("expansion system: m must be positive");
    if (k < 1) throw op_error("expansion system: k must be >= 1");
    if (seed.m() != m) throw op_error("expansion system: seed out-valency differs from m");
    if (seed.depth() < 2 * k - 1)
        throw op_error("expansion system: seed depth below 2k-1");
    if (!seed.validate().empty())
        throw op_error("expansion system: seed fails layered-digraph validation");

    // frontier classes must partition the last level into groups with equal
    // (k-1)-up ancestor sets, i.e. the last level's class structure
    std::map<VertexId, int> claimed;
    for (size_t ci = 0; ci < frontier_colours.size(); ++ci) {
        const auto& [members, colour] = frontier_colours[ci];
        if (members.empty()) throw op_error("expansion system: empty frontier class");
        auto cell = cells.find(colour);
        if (cell == cells.end())
            throw op_error("unknown colour " + std::to_string(colour) + " on frontier class");
        if (cell->second.size != static_cast<int>(members.size()))
            throw op_error("cell out-valency mismatch: frontier class size " +
                           std::to_string(members.size()) + " vs cell size " +
                           std::to_string(cell->second.size));
        Bits anc;
        for (const auto& id : members) {
            int v = seed.index_of(id);
            if (seed.level_ix(v) != seed.depth())
                throw op_error("frontier class member not on the last level: " + id);
            if (claimed.count(id)) throw op_error("frontier classes overlap at " + id);
            claimed[id] = static_cast<int>(ci);
            Bits a = seed.ancestors_on_level(v, seed.depth() - (k - 1));
            if (anc.n == 0)
                anc = a;
            else if (!(anc == a))
                throw op_error("frontier class is not an ancestor class: " + id);
        }
    }
    for (int v : seed.level_vertices(seed.depth()))
        if (!claimed.count(seed.id_of(v)))
            throw op_error("last-level vertex missing from frontier classes: " + seed.id_of(v));
    // distinct frontier classes must have distinct ancestor sets
    for (size_t i = 0; i < frontier_colours.size(); ++i)
        for (size_t j = i + 1; j < frontier_colours.size(); ++j) {
            int a = seed.index_of(frontier_colours[i].first[0]);
            int b = seed.index_of(frontier_colours[j].first[0]);
            if (seed.ancestors_on_level(a, seed.depth() - (k - 1)) ==
                seed.ancestors_on_level(b, seed.depth() - (k - 1)))
                throw op_error("frontier classes split one ancestor class");
        }

    for (const auto& [colour, cell] : cells) {
        if (cell.colour != colour) throw op_error("cell colour key mismatch");
        if (cell.size <= 0) throw op_error("cell size must be positive");
        std::vector<int> budget(cell.size, 0);
        for (const auto& child : cell.children) {
            auto it = cells.find(child.colour);
            if (it == cells.end())
                throw op_error("unknown colour " + std::to_string(child.colour) +
                               " in cell children");
            int csize = it->second.size;
            std::vector<int> covered(csize, 0);
            for (auto [p, c] : child.pattern) {
                if (p < 0 || p >= cell.size || c < 0 || c >= csize)
                    throw op_error("cell pattern index out of range");
                budget[p]++;
                covered[c]++;
            }
            for (int c = 0; c < csize; ++c)
                if (covered[c] == 0)
                    throw op_error("cell child member without in-edge");
        }
        for (int p = 0; p < cell.size; ++p)
            if (budget[p] != m)
                throw op_error("cell out-valency mismatch: parent " + std::to_string(p) +
                               " of colour " + std::to_string(colour) + " emits " +
                               std::to_string(budget[p]) + " edges, m = " + std::to_string(m));
    }
}

LayeredDigraph expand(const ExpansionSystem& sys, int depth) {
    sys.check();
    if (depth < sys.seed.depth())
        throw op_error("expand: depth below seed depth");

    LayeredDigraph::Builder b;
    const LayeredDigraph& seed = sys.seed;
    for (int v = 0; v < seed.size(); ++v) b.vertex(seed.id_of(v), seed.level_ix(v));
    for (int v = 0; v < seed.size(); ++v)
        for (int w : seed.out(v)) b.edge(seed.id_of(v), seed.id_of(w));

    struct Front {
        std::string path;
        int colour;
        std::vector<std::string> members;
    };
    std::vector<Front> frontier;
    int cw = digits(std::max<int>(1, static_cast<int>(sys.frontier_colours.size()) - 1));
    for (size_t ci = 0; ci < sys.frontier_colours.size(); ++ci)
        frontier.push_back({"g" + pad(static_cast<int>(ci), cw), sys.frontier_colours[ci].second,
                            sys.frontier_colours[ci].first});

    for (int lvl = seed.depth() + 1; lvl <= depth; ++lvl) {
        std::vector<Front> next;
        for (const auto& f : frontier) {
            const CellType& cell = sys.cells.at(f.colour);
            if (cell.size != static_cast<int>(f.members.size()))
                throw op_error("cell out-valency mismatch during expansion");
            for (size_t j = 0; j < cell.children.size(); ++j) {
                const CellChild& child = cell.children[j];
                int csize = sys.cells.at(child.colour).size;
                std::string path = f.path + "." + pad(static_cast<int>(j), 2);
                std::vector<std::string> members;
                for (int i = 0; i < csize; ++i) {
                    members.push_back(path + ":" + pad(i, 2));
                    b.vertex(members.back(), lvl);
                }
                for (auto [p, c] : child.pattern) b.edge(f.members[p], members[c]);
                next.push_back({path, child.colour, members});
            }
        }
        frontier = std::move(next);
    }
    return b.build(sys.m);
}

LayeredDigraph gamma_truncation(const ExpansionSystem& sys, int d) {
    if (d <= sys.seed.depth()) return sys.seed.truncate(d);
    return expand(sys, d);
}

ExpansionSystem tree_system(int m) {
    if (m < 1) throw op_error("tree_system: m must be >= 1");
    LayeredDigraph::Builder b;
    b.vertex("r", 0);
    int w = digits(m - 1);
    for (int i = 0; i < m; ++i) {
        b.vertex("a" + pad(i, w), 1);
        b.edge("r", "a" + pad(i, w));
    }
    ExpansionSystem sys;
    sys.m = m;
    sys.k = 1;
    sys.seed = b.build(m);
    for (int i = 0; i < m; ++i)
        sys.frontier_colours.push_back({{"a" + pad(i, w)}, 0});
    CellType cell;
    cell.colour = 0;
    cell.size = 1;
    for (int i = 0; i < m; ++i) cell.children.push_back({0, {{0, 0}}});
    sys.cells[0] = cell;
    sys.check();
    return sys;
}

ExpansionSystem ladder_system(int m) {
    if (m < 2) throw op_error("ladder_system: m must be >= 2");
    LayeredDigraph::Builder b;
    b.vertex("r", 0);
    int w = digits(m - 1);
    std::vector<std::string> prev;
    for (int i = 0; i < m; ++i) {
        std::string id = "a" + pad(i, w);
        b.vertex(id, 1);
        b.edge("r", id);
        prev.push_back(id);
    }
    std::vector<std::string> last = prev;
    for (int lvl = 2; lvl <= 3; ++lvl) {
        std::vector<std::string> cur;
        for (int i = 0; i < m; ++i) {
            std::string id = "x" + std::to_string(lvl) + "_" + pad(i, w);
            b.vertex(id, lvl);
            cur.push_back(id);
        }
        for (const auto& p : last)
            for (const auto& c : cur) b.edge(p, c);
        last = cur;
    }
    ExpansionSystem sys;
    sys.m = m;
    sys.k = 2;
    sys.seed = b.build(m);
    sys.frontier_colours.push_back({last, 0});
    CellType cell;
    cell.colour = 0;
    cell.size = m;
    CellChild child;
    child.colour = 0;
    for (int p = 0; p < m; ++p)
        for (int c = 0; c < m; ++c) child.pattern.push_back({p, c});
    cell.children.push_back(child);
    sys.cells[0] = cell;
    sys.check();
    return sys;
}

ExpansionSystem triad_system() {
    const int m = 6;
    const std::pair<int, int> pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
    LayeredDigraph::Builder b;
    b.vertex("r", 0);
    std::vector<std::vector<std::string>> triples(2); // the two level-1 triples
    for (int t = 0; t < 2; ++t)
        for (int i = 0; i < 3; ++i) {
            std::string id = std::string(t == 0 ? "a" : "b") + std::to_string(i);
            b.vertex(id, 1);
            b.edge("r", id);
            triples[t].push_back(id);
        }
    // level 2: three classes per triple, sourced by the 2-subsets
    std::vector<std::vector<std::string>> cls2;
    std::vector<std::vector<std::string>> src2;
    int n2 = 0;
    for (int t = 0; t < 2; ++t)
        for (int pi = 0; pi < 3; ++pi) {
            std::vector<std::string> members;
            for (int i = 0; i < 3; ++i) {
                std::string id = "x2_" + pad(n2++, 2);
                b.vertex(id, 2);
                members.push_back(id);
            }
            std::vector<std::string> src = {triples[t][pairs[pi].first],
                                            triples[t][pairs[pi].second]};
            for (const auto& s : src)
                for (const auto& c : members) b.edge(s, c);
            cls2.push_back(members);
            src2.push_back(src);
        }
    // level 3: three classes per level-2 class
    std::vector<std::vector<std::string>> cls3;
    int n3 = 0;
    for (const auto& parent : cls2)
        for (int pi = 0; pi < 3; ++pi) {
            std::vector<std::string> members;
            for (int i = 0; i < 3; ++i) {
                std::string id = "x3_" + pad(n3++, 2);
                b.vertex(id, 3);
                members.push_back(id);
            }
            for (int s : {pairs[pi].first, pairs[pi].second})
                for (const auto& c : members) b.edge(parent[s], c);
            cls3.push_back(members);
        }
    ExpansionSystem sys;
    sys.m = m;
    sys.k = 2;
    sys.seed = b.build(m);
    for (const auto& cls : cls3) sys.frontier_colours.push_back({cls, 0});
    CellType cell;
    cell.colour = 0;
    cell.size = 3;
    for (int pi = 0; pi < 3; ++pi) {
        CellChild child;
        child.colour = 0;
        for (int s : {pairs[pi].first, pairs[pi].second})
            for (int c = 0; c < 3; ++c) child.pattern.push_back({s, c});
        std::sort(child.pattern.begin(), child.pattern.end());
        cell.children.push_back(child);
    }
    sys.cells[0] = cell;
    sys.check();
    return sys;
}

} // namespace descent
