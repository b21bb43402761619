#include "descent/amalgam.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "descent/iso.hpp"
#include "descent/properties.hpp"
#include "descent/structure.hpp"
#include "descent/view.hpp"

namespace descent {

// ---------------------------------------------------------------- FGObject

int FGObject::index_of(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw op_error("no such vertex: " + id);
    return it->second;
}

int FGObject::max_gen_level() const {
    int m = 0;
    for (int l : gen_level_) m = std::max(m, l);
    return m;
}

std::vector<VertexId> FGObject::generator_ids() const {
    std::vector<VertexId> out;
    for (int v : generators_) out.push_back(ids_[v]);
    return out;
}

std::vector<VertexId> FGObject::frontier_ids() const {
    std::vector<VertexId> out;
    for (int v = 0; v < size(); ++v)
        if (is_frontier(v)) out.push_back(ids_[v]);
    std::sort(out.begin(), out.end());
    return out;
}

Bits FGObject::descendants_ix(int v) const {
    Bits seen(size());
    seen.set(v);
    std::deque<int> q = {v};
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : out_[u])
            if (!seen.test(w)) {
                seen.set(w);
                q.push_back(w);
            }
    }
    return seen;
}

std::vector<int> FGObject::cone_levels(int v) const {
    std::vector<int> lvl(size(), -1);
    lvl[v] = 0;
    std::deque<int> q = {v};
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : out_[u])
            if (lvl[w] < 0) {
                lvl[w] = lvl[u] + 1;
                q.push_back(w);
            }
    }
    return lvl;
}

LayeredDigraph FGObject::cone_as_digraph(int v) const {
    std::vector<int> lvl = cone_levels(v);
    LayeredDigraph::Builder b;
    for (int u = 0; u < size(); ++u)
        if (lvl[u] >= 0) b.vertex(ids_[u], lvl[u]);
    for (int u = 0; u < size(); ++u)
        if (lvl[u] >= 0)
            for (int w : out_[u]) b.edge(ids_[u], ids_[w]);
    return b.build(m());
}

int FGObject::cone_complete_depth(int v) const {
    std::vector<int> lvl = cone_levels(v);
    int deepest = 0, first_frontier = -1;
    for (int u = 0; u < size(); ++u) {
        if (lvl[u] < 0) continue;
        deepest = std::max(deepest, lvl[u]);
        if (is_frontier(u) && (first_frontier < 0 || lvl[u] < first_frontier))
            first_frontier = lvl[u];
    }
    return first_frontier < 0 ? deepest : first_frontier;
}

std::vector<DefectReport> FGObject::validate(const std::vector<int>* only) const {
    std::vector<DefectReport> rep;
    for (int v = 0; v < size(); ++v) {
        int deg = static_cast<int>(out_[v].size());
        if (deg != 0 && deg != m())
            rep.push_back({"out-valency neither 0 nor m (" + std::to_string(deg) + ")",
                           {ids_[v]}});
        if (gen_level_[v] < 0)
            rep.push_back({"vertex not a descendant of any generator", {ids_[v]}});
    }
    if (!rep.empty()) return rep;

    std::map<int, DigraphView> gamma_views;
    auto gamma_view = [&](int d) -> const DigraphView& {
        auto it = gamma_views.find(d);
        if (it == gamma_views.end())
            it = gamma_views.insert({d, view_of(gamma_truncation(gamma_, d))}).first;
        return it->second;
    };
    std::vector<int> targets;
    if (only)
        targets = *only;
    else
        for (int v = 0; v < size(); ++v) targets.push_back(v);
    for (int v : targets) {
        int cd = cone_complete_depth(v);
        LayeredDigraph cg = cone_as_digraph(v);
        LayeredDigraph ct = cg.depth() > cd ? cg.truncate(cd) : cg;
        if (!ct.validate().empty()) {
            rep.push_back({"complete part of a cone is not a layered truncation", {ids_[v]}});
            continue;
        }
        if (!iso_search(view_of(ct), gamma_view(cd)))
            rep.push_back({"cone does not match the reference digraph", {ids_[v]}});
    }
    return rep;
}

FGObject::Builder& FGObject::Builder::vertex(const VertexId& id) {
    verts_.push_back(id);
    return *this;
}

FGObject::Builder& FGObject::Builder::edge(const VertexId& src, const VertexId& dst) {
    edges_.push_back({src, dst});
    return *this;
}

FGObject FGObject::Builder::build() const {
    // first pass: temporary index to compute generator distances
    std::map<std::string, int> tmp;
    std::vector<std::string> ids;
    for (const auto& id : verts_) {
        if (tmp.count(id)) throw op_error("duplicate vertex id: " + id);
        tmp[id] = static_cast<int>(ids.size());
        ids.push_back(id);
    }
    int n = static_cast<int>(ids.size());
    std::vector<std::vector<int>> out(n), in(n);
    for (const auto& [s, d] : edges_) {
        auto si = tmp.find(s), di = tmp.find(d);
        if (si == tmp.end() || di == tmp.end())
            throw op_error("edge with unknown endpoint: " + s + " -> " + d);
        out[si->second].push_back(di->second);
        in[di->second].push_back(si->second);
    }
    std::vector<int> lvl(n, -1);
    std::deque<int> q;
    for (int v = 0; v < n; ++v)
        if (in[v].empty()) {
            lvl[v] = 0;
            q.push_back(v);
        }
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : out[u])
            if (lvl[w] < 0) {
                lvl[w] = lvl[u] + 1;
                q.push_back(w);
            }
    }
    for (int v = 0; v < n; ++v)
        if (lvl[v] < 0) throw op_error("vertex unreachable from the generators: " + ids[v]);

    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return lvl[a] != lvl[b] ? lvl[a] < lvl[b] : ids[a] < ids[b];
    });
    FGObject f;
    f.gamma_ = gamma_;
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) {
        pos[order[i]] = i;
        f.ids_.push_back(ids[order[i]]);
        f.index_[ids[order[i]]] = i;
        f.gen_level_.push_back(lvl[order[i]]);
    }
    f.out_.assign(n, {});
    f.in_.assign(n, {});
    for (int v = 0; v < n; ++v)
        for (int w : out[v]) {
            f.out_[pos[v]].push_back(pos[w]);
            f.in_[pos[w]].push_back(pos[v]);
        }
    for (auto& v : f.out_) {
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end())
            throw op_error("duplicate edge");
    }
    for (auto& v : f.in_) std::sort(v.begin(), v.end());
    for (int v = 0; v < n; ++v)
        if (f.in_[v].empty()) f.generators_.push_back(v);
    return f;
}

// ------------------------------------------------------------- predicates

namespace {

Bits ids_to_bits(const FGObject& f, const std::vector<VertexId>& ids) {
    Bits b(f.size());
    for (const auto& id : ids) b.set(f.index_of(id));
    return b;
}

Bits frontier_bits(const FGObject& f) {
    Bits b(f.size());
    for (int v = 0; v < f.size(); ++v)
        if (f.is_frontier(v)) b.set(v);
    return b;
}

// minimal generating set of a descendant-closed subset: members without an
// in-neighbour inside
std::vector<int> minimal_generators(const FGObject& f, const Bits& a) {
    std::vector<int> gens;
    for (int v : a.members()) {
        bool min = true;
        for (int w : f.in(v))
            if (a.test(w)) {
                min = false;
                break;
            }
        if (min) gens.push_back(v);
    }
    return gens;
}

} // namespace

Verdict check_sub(const FGObject& f, const std::vector<VertexId>& a) {
    Bits bits = ids_to_bits(f, a);
    for (int v : bits.members())
        for (int w : f.out(v))
            if (!bits.test(w)) {
                Witness wit;
                wit.what = "subset not descendant-closed";
                wit.vertices = {f.id_of(v), f.id_of(w)};
                return Verdict::failed(f.max_gen_level(), wit);
            }
    return Verdict::passed(f.max_gen_level());
}

namespace {

Verdict subplus_impl(const FGObject& f, const Bits& a, const Bits& domain) {
    Bits frontier = frontier_bits(f);
    for (int b = 0; b < f.size(); ++b) {
        if (!domain.test(b) || a.test(b)) continue;
        Bits cone = f.descendants_ix(b);
        Bits floor = cone;
        for (size_t i = 0; i < floor.w.size(); ++i) floor.w[i] &= frontier.w[i];
        if (floor.subset_of(a)) {
            Witness w;
            w.what = "outside vertex whose whole frontier cone lies inside";
            w.vertices = {f.id_of(b)};
            return Verdict::failed(f.max_gen_level(), w);
        }
    }
    std::ostringstream note;
    note << "generating sets:";
    for (int g : f.generators()) {
        Bits meet = f.descendants_ix(g);
        for (size_t i = 0; i < meet.w.size(); ++i) meet.w[i] &= a.w[i];
        auto gens = minimal_generators(f, meet);
        note << " " << f.id_of(g) << ":{";
        for (size_t i = 0; i < gens.size(); ++i)
            note << (i ? "," : "") << f.id_of(gens[i]);
        note << "}";
    }
    return Verdict::passed(f.max_gen_level(), note.str());
}

} // namespace

Verdict check_subplus(const FGObject& f, const std::vector<VertexId>& a) {
    Verdict sub = check_sub(f, a);
    if (sub.status != Status::pass) return sub;
    Bits all(f.size());
    for (int v = 0; v < f.size(); ++v) all.set(v);
    return subplus_impl(f, ids_to_bits(f, a), all);
}

std::vector<VertexId> subplus_closure(const FGObject& f, const std::vector<VertexId>& seeds) {
    Bits a(f.size());
    for (const auto& id : seeds) a.or_with(f.descendants_ix(f.index_of(id)));
    Bits frontier = frontier_bits(f);
    bool grew = true;
    while (grew) {
        grew = false;
        for (int b = 0; b < f.size(); ++b) {
            if (a.test(b)) continue;
            Bits cone = f.descendants_ix(b);
            Bits floor = cone;
            for (size_t i = 0; i < floor.w.size(); ++i) floor.w[i] &= frontier.w[i];
            if (floor.subset_of(a)) {
                a.or_with(cone);
                grew = true;
            }
        }
    }
    std::vector<VertexId> out;
    for (int v : a.members()) out.push_back(f.id_of(v));
    std::sort(out.begin(), out.end());
    return out;
}

// ------------------------------------------------------------ constructions

FGObject from_gamma(const ExpansionSystem& sys, int depth) {
    LayeredDigraph g = expand(sys, depth);
    FGObject::Builder b(sys);
    for (int v = 0; v < g.size(); ++v) b.vertex(g.id_of(v));
    for (int v = 0; v < g.size(); ++v)
        for (int w : g.out(v)) b.edge(g.id_of(v), g.id_of(w));
    FGObject f = b.build();
    auto defects = f.validate();
    if (!defects.empty())
        throw invariant_error("from_gamma produced an invalid object: " +
                              defects.front().text());
    return f;
}

namespace {

// deterministic fresh name: the original, or original~t for the least t
std::string fresh_name(const std::string& want, const std::set<std::string>& used) {
    if (!used.count(want)) return want;
    for (int t = 1;; ++t) {
        std::string cand = want + "~" + std::to_string(t);
        if (!used.count(cand)) return cand;
    }
}

void validate_cones_of(const FGObject& f, const std::vector<VertexId>& fresh,
                       const char* who) {
    std::vector<int> ix;
    for (const auto& id : fresh) ix.push_back(f.index_of(id));
    auto defects = f.validate(&ix);
    if (!defects.empty())
        throw op_error(std::string(who) + ": validation failure: " + defects.front().text());
}

} // namespace

FGObject free_amalgam(const FGObject& b1, const FGObject& b2,
                      const std::vector<VertexId>& a_in_b1,
                      const std::map<VertexId, VertexId>& a_to_b2, FGEmbedding* emb_b2) {
    // the shared part must sit closed in both factors
    Verdict v1 = check_subplus(b1, a_in_b1);
    if (v1.status != Status::pass)
        throw op_error("free_amalgam: shared part not closed in the first factor: " +
                       (v1.witness ? v1.witness->what : std::string("")));
    std::set<VertexId> a_set(a_in_b1.begin(), a_in_b1.end());
    if (a_set.size() != a_to_b2.size())
        throw op_error("free_amalgam: embedding disagreement: domain mismatch");
    std::vector<VertexId> a_img;
    std::set<VertexId> img_set;
    for (const auto& id : a_in_b1) {
        auto it = a_to_b2.find(id);
        if (it == a_to_b2.end())
            throw op_error("free_amalgam: embedding disagreement: " + id + " unmapped");
        a_img.push_back(it->second);
        if (!img_set.insert(it->second).second)
            throw op_error("free_amalgam: embedding disagreement: not injective");
    }
    Verdict v2 = check_subplus(b2, a_img);
    if (v2.status != Status::pass)
        throw op_error("free_amalgam: shared part not closed in the second factor: " +
                       (v2.witness ? v2.witness->what : std::string("")));
    // edge and non-edge agreement on the shared part
    for (const auto& x : a_in_b1)
        for (const auto& y : a_in_b1) {
            bool e1 = false, e2 = false;
            int xi = b1.index_of(x), yi = b1.index_of(y);
            for (int w : b1.out(xi)) e1 |= (w == yi);
            int xj = b2.index_of(a_to_b2.at(x)), yj = b2.index_of(a_to_b2.at(y));
            for (int w : b2.out(xj)) e2 |= (w == yj);
            if (e1 != e2)
                throw op_error("free_amalgam: embedding disagreement on edge " + x + " -> " + y);
        }

    // rename B2-only vertices away from B1's namespace
    std::set<std::string> used(b1.ids().begin(), b1.ids().end());
    std::map<VertexId, VertexId> b2_name; // b2 id -> F id
    for (const auto& [a1, a2] : a_to_b2) b2_name[a2] = a1;
    std::vector<VertexId> fresh;
    for (const auto& id : b2.ids()) {
        if (b2_name.count(id)) continue;
        std::string nn = fresh_name(id, used);
        used.insert(nn);
        b2_name[id] = nn;
        fresh.push_back(nn);
    }

    FGObject::Builder fb(b1.gamma());
    for (const auto& id : b1.ids()) fb.vertex(id);
    for (const auto& id : fresh) fb.vertex(id);
    for (int v = 0; v < b1.size(); ++v)
        for (int w : b1.out(v)) fb.edge(b1.id_of(v), b1.id_of(w));
    std::set<std::pair<std::string, std::string>> have;
    for (int v = 0; v < b1.size(); ++v)
        for (int w : b1.out(v)) have.insert({b1.id_of(v), b1.id_of(w)});
    for (int v = 0; v < b2.size(); ++v)
        for (int w : b2.out(v)) {
            auto e = std::make_pair(b2_name.at(b2.id_of(v)), b2_name.at(b2.id_of(w)));
            if (!have.count(e)) fb.edge(e.first, e.second);
        }
    FGObject f = fb.build();

    if (f.size() != b1.size() + b2.size() - static_cast<int>(a_in_b1.size()))
        throw invariant_error("free_amalgam: size identity broken");
    validate_cones_of(f, fresh, "free_amalgam");
    // both factors must remain closed in the amalgam
    std::vector<VertexId> b1_ids = b1.ids();
    Verdict p1 = check_subplus(f, b1_ids);
    std::vector<VertexId> b2_ids;
    for (const auto& id : b2.ids()) b2_ids.push_back(b2_name.at(id));
    std::sort(b2_ids.begin(), b2_ids.end());
    Verdict p2 = check_subplus(f, b2_ids);
    if (p1.status != Status::pass || p2.status != Status::pass)
        throw op_error("free_amalgam: a factor is not closed in the amalgam (invalid input "
                       "triple)");
    if (emb_b2) emb_b2->map = b2_name;
    return f;
}

FGObject extend_task(const FGObject& dn, const std::vector<VertexId>& a, const FGObject& b,
                     const std::map<VertexId, VertexId>& f, FGEmbedding* emb_b) {
    return free_amalgam(dn, b, a, f, emb_b);
}

std::pair<FGObject, FGEmbedding> clone_over(const FGObject& f, const std::vector<VertexId>& a,
                                            const std::vector<VertexId>& b,
                                            const std::map<VertexId, VertexId>& h) {
    Bits ab = ids_to_bits(f, a), bb = ids_to_bits(f, b);
    if (!ab.subset_of(bb)) throw op_error("clone_over: A must lie inside B");
    // A closed in B, B closed in F (bounded proxies)
    Verdict va = check_sub(f, a);
    if (va.status != Status::pass) throw op_error("clone_over: A not descendant-closed");
    Verdict vb = check_subplus(f, b);
    if (vb.status != Status::pass)
        throw op_error("clone_over: B not closed in the ambient object: " +
                       (vb.witness ? vb.witness->what : std::string("")));
    Verdict vab = subplus_impl(f, ab, bb);
    if (vab.status != Status::pass)
        throw op_error("clone_over: A not closed in B: " +
                       (vab.witness ? vab.witness->what : std::string("")));

    // h must be an automorphism of the induced digraph on A
    if (h.size() != a.size()) throw op_error("clone_over: h does not cover A");
    std::set<VertexId> a_ids(a.begin(), a.end());
    std::set<VertexId> h_img;
    for (const auto& [x, y] : h) {
        if (!a_ids.count(x) || !a_ids.count(y))
            throw op_error("clone_over: h is not a map A -> A");
        if (!h_img.insert(y).second) throw op_error("clone_over: h not injective");
    }
    for (const auto& x : a)
        for (const auto& y : a) {
            int xi = f.index_of(x), yi = f.index_of(y);
            int hx = f.index_of(h.at(x)), hy = f.index_of(h.at(y));
            bool e = std::binary_search(f.out(xi).begin(), f.out(xi).end(), yi);
            bool he = std::binary_search(f.out(hx).begin(), f.out(hx).end(), hy);
            if (e != he) throw op_error("clone_over: h is not an automorphism of A");
        }

    // s : B -> B', h on A, fresh elsewhere
    std::set<std::string> used(f.ids().begin(), f.ids().end());
    std::map<VertexId, VertexId> s;
    for (const auto& x : a) s[x] = h.at(x);
    std::vector<VertexId> fresh;
    for (const auto& x : b) {
        if (a_ids.count(x)) continue;
        std::string nn = fresh_name(x, used);
        used.insert(nn);
        s[x] = nn;
        fresh.push_back(nn);
    }

    FGObject::Builder fb(f.gamma());
    for (const auto& id : f.ids()) fb.vertex(id);
    for (const auto& id : fresh) fb.vertex(id);
    for (int v = 0; v < f.size(); ++v)
        for (int w : f.out(v)) fb.edge(f.id_of(v), f.id_of(w));
    // transported edges: only those leaving the fixed part produce new edges
    for (const auto& x : b)
        for (int w : f.out(f.index_of(x))) {
            const VertexId& y = f.id_of(w);
            if (!bb.test(w)) throw invariant_error("clone_over: B not closed");
            if (a_ids.count(x)) continue; // s(x)=h(x), edge already present in A
            fb.edge(s.at(x), s.at(y));
        }
    FGObject out = fb.build();

    // B intersect sB must be exactly A
    std::set<VertexId> b_ids(b.begin(), b.end());
    std::set<VertexId> sb;
    for (const auto& x : b) sb.insert(s.at(x));
    std::vector<VertexId> meet;
    std::set_intersection(b_ids.begin(), b_ids.end(), sb.begin(), sb.end(),
                          std::back_inserter(meet));
    std::set<VertexId> a_sorted(a.begin(), a.end());
    if (std::set<VertexId>(meet.begin(), meet.end()) != a_sorted)
        throw invariant_error("clone_over: B intersect sB differs from A");
    for (const auto& x : a)
        if (s.at(x) != h.at(x)) throw invariant_error("clone_over: s does not extend h");

    validate_cones_of(out, fresh, "clone_over");
    FGEmbedding emb;
    emb.map = s;
    return {std::move(out), std::move(emb)};
}

std::pair<FGObject, VertexId> disjoint_witness(const FGObject& f, const VertexId& a,
                                               const VertexId& b, int depth) {
    f.index_of(a);
    f.index_of(b);
    if (depth < 0) depth = std::max(f.gamma().seed.depth(),
                                    f.cone_complete_depth(f.index_of(a)));
    FGObject copy = from_gamma(f.gamma(), depth);
    FGEmbedding emb;
    FGObject out = free_amalgam(f, copy, {}, {}, &emb);
    VertexId c = emb.map.at(copy.id_of(copy.generators()[0]));
    // re-check disjointness explicitly
    Bits dc = out.descendants_ix(out.index_of(c));
    for (const VertexId& x : {a, b}) {
        Bits dx = out.descendants_ix(out.index_of(x));
        if (dc.intersects(dx))
            throw invariant_error("disjoint_witness: fresh cone is not disjoint");
    }
    return {std::move(out), c};
}

// ------------------------------------------------------------- schedules

std::vector<TaskStep> parse_schedule(const std::string& text) {
    std::vector<TaskStep> steps;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::istringstream ls(line);
        std::string verb;
        if (!(ls >> verb) || verb[0] == '#') continue;
        TaskStep s;
        if (verb == "add-in-neighbour") {
            s.kind = TaskStep::Kind::add_in_neighbour;
            if (!(ls >> s.vertex)) throw parse_error("schedule line " + std::to_string(ln) +
                                                     ": vertex expected");
        } else if (verb == "add-fresh-copy") {
            s.kind = TaskStep::Kind::add_fresh_copy;
            ls >> s.depth; // optional
        } else if (verb == "amalgamate-over-cone") {
            s.kind = TaskStep::Kind::amalgamate_over_cone;
            if (!(ls >> s.vertex)) throw parse_error("schedule line " + std::to_string(ln) +
                                                     ": vertex expected");
        } else {
            throw parse_error("schedule line " + std::to_string(ln) + ": unknown task '" +
                              verb + "'");
        }
        steps.push_back(s);
    }
    return steps;
}

std::string write_schedule(const std::vector<TaskStep>& steps) {
    std::ostringstream os;
    for (const auto& s : steps) {
        switch (s.kind) {
            case TaskStep::Kind::add_in_neighbour:
                os << "add-in-neighbour " << s.vertex << "\n";
                break;
            case TaskStep::Kind::add_fresh_copy:
                os << "add-fresh-copy";
                if (s.depth >= 0) os << " " << s.depth;
                os << "\n";
                break;
            case TaskStep::Kind::amalgamate_over_cone:
                os << "amalgamate-over-cone " << s.vertex << "\n";
                break;
        }
    }
    return os.str();
}

FGObject add_in_neighbour(const FGObject& f, const VertexId& v) {
    if (f.gamma().seed.depth() != 1)
        throw op_error("add-in-neighbour is only defined for depth-1-seed systems; supply "
                       "the extension object through extend_task instead");
    int vi = f.index_of(v);
    int cd = f.cone_complete_depth(vi);
    // B: a new root over the cone of v plus m-1 fresh sibling cones
    FGObject::Builder bb(f.gamma());
    std::vector<int> lvl = f.cone_levels(vi);
    std::vector<VertexId> a_ids;
    for (int u = 0; u < f.size(); ++u)
        if (lvl[u] >= 0) {
            bb.vertex(f.id_of(u));
            a_ids.push_back(f.id_of(u));
        }
    for (int u = 0; u < f.size(); ++u)
        if (lvl[u] >= 0)
            for (int w : f.out(u)) bb.edge(f.id_of(u), f.id_of(w));
    std::sort(a_ids.begin(), a_ids.end());
    bb.vertex("c*");
    bb.edge("c*", v);
    LayeredDigraph sib = gamma_truncation(f.gamma(), cd);
    for (int s = 1; s < f.m(); ++s) {
        std::string prefix = "s" + std::to_string(s) + ".";
        for (int u = 0; u < sib.size(); ++u) bb.vertex(prefix + sib.id_of(u));
        for (int u = 0; u < sib.size(); ++u)
            for (int w : sib.out(u)) bb.edge(prefix + sib.id_of(u), prefix + sib.id_of(w));
        bb.edge("c*", prefix + sib.id_of(sib.root()));
    }
    FGObject b = bb.build();
    std::map<VertexId, VertexId> ident;
    for (const auto& id : a_ids) ident[id] = id;
    return free_amalgam(f, b, a_ids, ident);
}

FGObject amalgamate_over_cone(const FGObject& f, const VertexId& v) {
    int vi = f.index_of(v);
    // least generator whose cone holds v
    VertexId g;
    for (int gi : f.generators())
        if (f.descendants_ix(gi).test(vi)) {
            g = f.id_of(gi);
            break;
        }
    if (g.empty()) throw op_error("no generator above " + v);
    std::vector<VertexId> cone_ids;
    Bits cb = f.descendants_ix(vi);
    for (int u : cb.members()) cone_ids.push_back(f.id_of(u));
    std::sort(cone_ids.begin(), cone_ids.end());
    std::vector<VertexId> env = subplus_closure(f, {g});
    std::map<VertexId, VertexId> ident;
    for (const auto& id : cone_ids) ident[id] = id;
    return clone_over(f, cone_ids, env, ident).first;
}

FGObject build_limit_approx(const ExpansionSystem& sys, const std::vector<TaskStep>& schedule,
                            int depth, BuildStats* stats) {
    FGObject f = from_gamma(sys, depth);
    int step = 0;
    for (const auto& s : schedule) {
        ++step;
        int before = f.size();
        try {
            switch (s.kind) {
                case TaskStep::Kind::add_in_neighbour:
                    f = add_in_neighbour(f, s.vertex);
                    break;
                case TaskStep::Kind::add_fresh_copy: {
                    FGObject copy = from_gamma(sys, s.depth >= 0 ? s.depth : depth);
                    f = free_amalgam(f, copy, {}, {});
                    break;
                }
                case TaskStep::Kind::amalgamate_over_cone:
                    f = amalgamate_over_cone(f, s.vertex);
                    break;
            }
        } catch (const std::exception& e) {
            throw op_error("schedule step " + std::to_string(step) + ": " + e.what());
        }
        if (stats) {
            ++stats->steps;
            std::ostringstream os;
            os << "step " << step << ": " << before << " -> " << f.size() << " vertices";
            stats->log.push_back(os.str());
        }
    }
    return f;
}

// -------------------------------------------------------- separation trace

namespace {

std::vector<int> level_members(const FGObject& f, const std::vector<int>& lvl, int n) {
    std::vector<int> out;
    for (int v = 0; v < f.size(); ++v)
        if (lvl[v] == n) out.push_back(v);
    return out;
}

// sigma classes of the level-n slice of the cone of b, witnessed to `wit`
std::vector<std::vector<VertexId>> cone_sigma(const FGObject& f, int b, int k, int n, int wit) {
    LayeredDigraph cg = f.cone_as_digraph(b);
    SigmaPartition sp = sigma_partition(cg, k, n, std::min(wit, cg.depth()));
    std::vector<std::vector<VertexId>> out;
    for (auto& cls : sp.classes) {
        std::vector<VertexId> ids;
        for (int v : cls) ids.push_back(cg.id_of(v));
        std::sort(ids.begin(), ids.end());
        out.push_back(ids);
    }
    return out;
}

bool is_union_of(const std::vector<std::vector<VertexId>>& classes,
                 const std::set<VertexId>& z) {
    for (const auto& cls : classes) {
        int inside = 0;
        for (const auto& id : cls)
            if (z.count(id)) ++inside;
        if (inside != 0 && inside != static_cast<int>(cls.size())) return false;
    }
    return true;
}

} // namespace

std::string SeparationTrace::table() const {
    std::ostringstream os;
    os << "trace a=" << a << " b=" << b << " n=" << n << " K=" << K << "\n";
    os << "step |Y| |Z| h\n";
    for (size_t i = 0; i < steps.size(); ++i)
        os << (i + 1) << " " << steps[i].y_size << " " << steps[i].z_size << " "
           << (steps[i].h_desc.empty() ? "identity" : steps[i].h_desc) << "\n";
    os << "r=" << r << " Y_r " << (y_final_empty ? "empty" : "nonempty") << "\n";
    return os.str();
}

SeparationTrace separation_trace(const FGObject& f0, const VertexId& a, const VertexId& b,
                                 int horizon) {
    SeparationTrace tr;
    tr.a = a;
    tr.b = b;
    int ai = f0.index_of(a), bi = f0.index_of(b);
    if (a == b) throw op_error("separation_trace: a and b must differ");
    if (f0.descendants_ix(ai).test(bi) || f0.descendants_ix(bi).test(ai))
        throw op_error("separation_trace: one vertex descends from the other");
    Bits x0 = f0.descendants_ix(ai);
    Bits db = f0.descendants_ix(bi);
    for (size_t i = 0; i < x0.w.size(); ++i) x0.w[i] &= db.w[i];
    if (!x0.any())
        throw op_error("separation_trace: cones already disjoint; use disjoint_witness");

    int k = f0.gamma().k;
    int K = 2 * k - 1;
    tr.K = K;
    int avail = std::min(f0.cone_complete_depth(ai), f0.cone_complete_depth(bi));
    int hz = horizon < 0 ? avail : std::min(horizon, avail);

    // cone transitivity of the reference at the working horizon backs the
    // automorphism searches below
    Verdict p3 = check_p3(gamma_truncation(f0.gamma(), hz));
    if (p3.status != Status::pass)
        throw op_error("separation_trace: transitivity deficit at horizon");

    FGObject f = f0;

    // step 1: clone b over the cone of a with the identity
    std::vector<VertexId> cone_a;
    for (int u : f.descendants_ix(ai).members()) cone_a.push_back(f.id_of(u));
    std::sort(cone_a.begin(), cone_a.end());
    std::map<VertexId, VertexId> ident;
    for (const auto& id : cone_a) ident[id] = id;
    std::vector<VertexId> env = subplus_closure(f, {a, b});
    auto [f1, s1] = clone_over(f, cone_a, env, ident);
    f = std::move(f1);
    VertexId b2 = s1.map.at(b);
    tr.chain = {a, b, b2};

    // the shared cone and the sensor level n
    auto shared_ids = [&](const VertexId& p, const VertexId& q) {
        Bits dp = f.descendants_ix(f.index_of(p));
        Bits dq = f.descendants_ix(f.index_of(q));
        for (size_t i = 0; i < dp.w.size(); ++i) dp.w[i] &= dq.w[i];
        std::set<VertexId> out;
        for (int u : dp.members()) out.insert(f.id_of(u));
        return out;
    };
    std::set<VertexId> y = shared_ids(b, b2);
    {
        std::set<VertexId> orig;
        for (int u : x0.members()) orig.insert(f0.id_of(u));
        if (y != orig)
            throw invariant_error("separation_trace: clone changed the shared cone");
    }
    // n = K + deepest minimal generator of the shared cone
    std::vector<int> lvl_b = f.cone_levels(f.index_of(b));
    int gen_deep = 0;
    {
        Bits yb(f.size());
        for (const auto& id : y) yb.set(f.index_of(id));
        for (int g : minimal_generators(f, yb)) gen_deep = std::max(gen_deep, lvl_b[g]);
    }
    tr.n = K + gen_deep;
    if (tr.n + 1 > hz)
        throw op_error("separation_trace: horizon too shallow for the sensor level " +
                       std::to_string(tr.n));

    auto z_of = [&](const VertexId& p, const VertexId& q) {
        std::vector<int> lp = f.cone_levels(f.index_of(p));
        std::vector<int> lq = f.cone_levels(f.index_of(q));
        std::set<VertexId> z;
        for (int u = 0; u < f.size(); ++u)
            if (lp[u] == tr.n && lq[u] == tr.n) z.insert(f.id_of(u));
        return z;
    };

    VertexId prev = b, cur = b2;
    std::set<VertexId> z_prev = z_of(prev, cur);
    {
        // the first slice must agree with the shared cone at the sensor level
        std::set<VertexId> zx;
        for (const auto& id : y)
            if (lvl_b[f.index_of(id)] == tr.n) zx.insert(id);
        if (zx != z_prev)
            throw invariant_error("separation_trace: sensor slice mismatch");
    }

    auto audit = [&](TraceStep& st, const VertexId& p, const VertexId& q,
                     const std::set<VertexId>& ycur, const std::set<VertexId>& zcur,
                     const std::vector<VertexId>& js) {
        std::vector<int> lp = f.cone_levels(f.index_of(p));
        std::vector<int> lq = f.cone_levels(f.index_of(q));
        st.same_level_ok = true;
        for (const auto& id : ycur)
            if (lp[f.index_of(id)] != lq[f.index_of(id)]) st.same_level_ok = false;
        st.sigma_union_ok = true;
        for (const auto& j : js) {
            auto classes = cone_sigma(f, f.index_of(j), k, tr.n, hz);
            if (!is_union_of(classes, zcur)) st.sigma_union_ok = false;
        }
        // the shared cone is generated by its part at or above the sensor level
        Bits low(f.size());
        for (const auto& id : ycur)
            if (lp[f.index_of(id)] <= tr.n) low.set(f.index_of(id));
        Bits reach(f.size());
        for (int u : low.members()) reach.or_with(f.descendants_ix(u));
        st.generated_low_ok = true;
        for (const auto& id : ycur)
            if (!reach.test(f.index_of(id))) st.generated_low_ok = false;
        if (!st.same_level_ok)
            throw op_error("separation_trace: shared vertices at unequal levels");
        if (!st.sigma_union_ok || !st.generated_low_ok)
            throw invariant_error("separation_trace: step audit failed");
    };

    {
        TraceStep st;
        st.b_prev = a;
        st.b_cur = b;
        st.b_next = b2;
        st.y_size = static_cast<int>(y.size());
        st.z_size = static_cast<int>(z_prev.size());
        st.shrink_ok = true;
        audit(st, prev, cur, y, z_prev, {prev, cur});
        tr.steps.push_back(st);
    }

    int guard = static_cast<int>(z_prev.size()) + 2;
    while (!z_prev.empty()) {
        if (--guard < 0)
            throw invariant_error("separation_trace: slice not shrinking");
        // automorphism of the cone of `prev` moving the slice
        LayeredDigraph cg = f.cone_as_digraph(f.index_of(prev));
        DigraphView cv = view_of(cg);
        std::map<VertexId, int> pos;
        for (int i = 0; i < cv.n; ++i) pos[cg.id_of(cv.orig[i])] = i;
        std::vector<VertexId> slice; // the full sensor level of the cone
        for (int u = 0; u < cg.size(); ++u)
            if (cg.level_ix(u) == tr.n) slice.push_back(cg.id_of(u));
        std::sort(slice.begin(), slice.end());
        if (static_cast<int>(z_prev.size()) >= static_cast<int>(slice.size()))
            throw op_error("separation_trace: slice covers the whole sensor level; the "
                           "reference digraph fails the closure property here");
        std::map<VertexId, VertexId> h;
        std::string h_desc;
        for (const auto& zid : z_prev) {
            for (const auto& wid : slice) {
                if (z_prev.count(wid)) continue;
                IsoConstraints c;
                c.pins = {{pos.at(zid), pos.at(wid)}};
                auto m = iso_search(cv, cv, c);
                if (m) {
                    for (int i = 0; i < cv.n; ++i)
                        h[cg.id_of(cv.orig[i])] = cg.id_of(cv.orig[(*m)[i]]);
                    h_desc = "moved: " + zid + " -> " + wid;
                    break;
                }
            }
            if (!h.empty()) break;
        }
        if (h.empty()) throw op_error("separation_trace: transitivity deficit at horizon");

        std::vector<VertexId> cone_prev;
        for (int u : f.descendants_ix(f.index_of(prev)).members())
            cone_prev.push_back(f.id_of(u));
        std::sort(cone_prev.begin(), cone_prev.end());
        std::vector<VertexId> env2 = subplus_closure(f, {prev, cur});
        auto [f2, s2] = clone_over(f, cone_prev, env2, h);
        f = std::move(f2);
        VertexId nxt = s2.map.at(cur);
        tr.chain.push_back(nxt);

        std::set<VertexId> ycur = shared_ids(cur, nxt);
        std::set<VertexId> zcur = z_of(cur, nxt);
        TraceStep st;
        st.b_prev = prev;
        st.b_cur = cur;
        st.b_next = nxt;
        st.y_size = static_cast<int>(ycur.size());
        st.z_size = static_cast<int>(zcur.size());
        st.h_desc = h_desc;
        st.shrink_ok = zcur.size() < z_prev.size() &&
                       std::includes(z_prev.begin(), z_prev.end(), zcur.begin(), zcur.end());
        if (!st.shrink_ok)
            throw invariant_error("separation_trace: slice not strictly shrinking");
        std::vector<VertexId> js(tr.chain.begin() + 1, tr.chain.end());
        audit(st, cur, nxt, ycur, zcur, js);
        tr.steps.push_back(st);

        prev = cur;
        cur = nxt;
        z_prev = std::move(zcur);
        y = std::move(ycur);
    }
    tr.r = static_cast<int>(tr.steps.size());
    tr.y_final_empty = y.empty();
    if (!tr.y_final_empty)
        throw invariant_error("separation_trace: empty slice with nonempty shared cone");
    tr.final_object = std::move(f);
    return tr;
}

// ------------------------------------------------------ orbit certificates

namespace {

DigraphView envelope_view(const FGObject& f, const std::vector<VertexId>& env) {
    std::vector<int> verts;
    for (const auto& id : env) verts.push_back(f.index_of(id));
    std::sort(verts.begin(), verts.end());
    Bits inside(f.size());
    for (int v : verts) inside.set(v);
    // levels: distance from the envelope's own minimal vertices
    std::vector<int> lvl(f.size(), -1);
    std::deque<int> q;
    for (int v : verts) {
        bool src = true;
        for (int w : f.in(v))
            if (inside.test(w)) src = false;
        if (src) {
            lvl[v] = 0;
            q.push_back(v);
        }
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : f.out(u))
            if (inside.test(w) && lvl[w] < 0) {
                lvl[w] = lvl[u] + 1;
                q.push_back(w);
            }
    }
    DigraphView v;
    v.n = static_cast<int>(verts.size());
    std::vector<int> ord(verts);
    std::sort(ord.begin(), ord.end(), [&](int x, int y) {
        return lvl[x] != lvl[y] ? lvl[x] < lvl[y] : x < y;
    });
    std::map<int, int> posm;
    v.level.resize(v.n);
    v.out.assign(v.n, {});
    v.orig.resize(v.n);
    for (int i = 0; i < v.n; ++i) {
        v.level[i] = lvl[ord[i]];
        v.orig[i] = ord[i];
        posm[ord[i]] = i;
    }
    for (int i = 0; i < v.n; ++i)
        for (int w : f.out(v.orig[i]))
            if (inside.test(w)) v.out[i].push_back(posm[w]);
    v.finalize();
    return v;
}

} // namespace

std::optional<OrbitCertificate> orbit_certificate(const FGObject& f, const VertexId& u,
                                                  const VertexId& v, const VertexId& a,
                                                  const VertexId& b) {
    std::vector<VertexId> e1 = subplus_closure(f, {u, v});
    std::vector<VertexId> e2 = subplus_closure(f, {a, b});
    if (e1.size() != e2.size()) return std::nullopt;
    DigraphView v1 = envelope_view(f, e1);
    DigraphView v2 = envelope_view(f, e2);
    std::map<int, int> p1, p2;
    for (int i = 0; i < v1.n; ++i) p1[v1.orig[i]] = i;
    for (int i = 0; i < v2.n; ++i) p2[v2.orig[i]] = i;
    IsoConstraints c;
    auto pin = [&](const VertexId& x, const VertexId& y) -> bool {
        int xi = f.index_of(x), yi = f.index_of(y);
        if (!p1.count(xi) || !p2.count(yi)) return false;
        if (v1.level[p1.at(xi)] != v2.level[p2.at(yi)]) return false;
        c.pins.push_back({p1.at(xi), p2.at(yi)});
        return true;
    };
    if (!pin(u, a) || !pin(v, b)) return std::nullopt;
    auto m = iso_search(v1, v2, c);
    if (!m) return std::nullopt;
    std::string why;
    if (!verify_mapping(v1, v2, *m, false, false, &why))
        throw invariant_error("orbit certificate failed re-verification: " + why);
    OrbitCertificate cert;
    cert.uv = {u, v};
    cert.ab = {a, b};
    for (int i = 0; i < v1.n; ++i)
        cert.envelope_iso.push_back({f.id_of(v1.orig[i]), f.id_of(v2.orig[(*m)[i]])});
    return cert;
}

} // namespace descent
