#include "descent/fingerprint.hpp"

#include <algorithm>
#include <sstream>

#include "descent/iso.hpp"
#include "descent/properties.hpp"

namespace descent {

Fingerprint compute_m(const LayeredDigraph& g) {
    int k = compute_k(g).k();
    TStructure t = build_t(g, k);
    NResult n = compute_n(t);
    int m_depth = 2 * k + n.n_hat;
    if (g.depth() < m_depth)
        throw op_error("insufficient depth: need M = 2k + N = " + std::to_string(m_depth));
    Fingerprint fp;
    fp.k = k;
    fp.m_depth = m_depth;
    fp.canonical_text = canonical_form(g.truncate(m_depth)).text;
    return fp;
}

namespace {

// view-index lookup by underlying graph vertex
std::map<int, int> view_index(const DigraphView& v) {
    std::map<int, int> ix;
    for (int i = 0; i < v.n; ++i) ix[v.orig[i]] = i;
    return ix;
}

// the T-level-1 ancestor class of a class (walk parents)
int level1_ancestor(const TStructure& t, int cls) {
    while (t.classes[cls].level > 1) cls = t.classes[cls].parent;
    return t.classes[cls].level == 1 ? cls : -1;
}

std::map<int, int> class_image(const TStructure& t, const TStructure& s,
                               const std::map<int, int>& phi) {
    std::map<int, int> ci;
    for (auto [x, y] : phi) {
        int cx = t.class_of[x], cy = s.class_of[y];
        if (cx < 0 || cy < 0) continue;
        auto it = ci.find(cx);
        if (it == ci.end())
            ci[cx] = cy;
        else if (it->second != cy)
            throw op_error("ball mapping splits a class");
    }
    return ci;
}

} // namespace

bool verify_ball_iso(const BallIso& phi, const TStructure& t, const TStructure& s,
                     std::string* why) {
    DigraphView va = t_ball_view(t, phi.depth);
    DigraphView vb = t_ball_view(s, phi.depth);
    if (va.n != vb.n || va.n != static_cast<int>(phi.map.size())) {
        if (why) *why = "ball sizes differ from the mapping";
        return false;
    }
    auto ixa = view_index(va), ixb = view_index(vb);
    std::vector<int> m(va.n, -1);
    for (auto [x, y] : phi.map) {
        auto ia = ixa.find(x);
        auto ib = ixb.find(y);
        if (ia == ixa.end() || ib == ixb.end()) {
            if (why) *why = "mapping leaves the balls";
            return false;
        }
        m[ia->second] = ib->second;
    }
    return verify_mapping(va, vb, m, true, true, why);
}

BallIso initial_ball_iso(const TStructure& t, const TStructure& s, int d) {
    DigraphView va = t_ball_view(t, d);
    DigraphView vb = t_ball_view(s, d);
    IsoConstraints c;
    c.respect_cls = true;
    c.respect_colour = true;
    auto m = iso_search(va, vb, c);
    if (!m) throw op_error("no ball isomorphism at depth " + std::to_string(d));
    BallIso phi;
    phi.depth = d;
    for (int i = 0; i < va.n; ++i) phi.map[va.orig[i]] = vb.orig[(*m)[i]];
    return phi;
}

BallIso extend_ball_iso(const BallIso& phi, const TStructure& t, const TStructure& s,
                        int n_hat_s) {
    int d = phi.depth;
    if (d <= n_hat_s) throw op_error("extend_ball_iso requires depth > N of the target");
    if (t.t_depth < d + 1 || s.t_depth < d + 1)
        throw op_error("extend_ball_iso: structures too shallow for depth " +
                       std::to_string(d + 1));
    std::string why;
    if (!verify_ball_iso(phi, t, s, &why))
        throw op_error("extend_ball_iso: input is not a ball isomorphism: " + why);

    std::map<int, int> cimg = class_image(t, s, phi.map);
    std::map<int, int> psi;
    // the base layer carries over unchanged
    for (int b : t.base)
        for (int v : t.classes[b].members) psi[v] = phi.map.at(v);

    // classes at T-level 1 and their matched structure
    for (size_t ci = 0; ci < t.classes.size(); ++ci) {
        if (t.classes[ci].level != 1) continue;
        int vcls = static_cast<int>(ci);
        int wcls = cimg.at(vcls);
        int ucls = t.base[t.classes[vcls].colour]; // least matching base class
        // f : depth-d ball of the base class -> depth-d ball of vcls
        DigraphView bu = t_class_ball_view(t, ucls, d);
        DigraphView bv = t_class_ball_view(t, vcls, d);
        IsoConstraints rc;
        rc.respect_cls = true;
        rc.respect_colour = true;
        auto fm = iso_search(bu, bv, rc);
        if (!fm) throw op_error("extension failed: no structure match for a level-1 class");
        std::map<int, int> f, finv;
        for (int i = 0; i < bu.n; ++i) {
            f[bu.orig[i]] = bv.orig[(*fm)[i]];
            finv[bv.orig[(*fm)[i]]] = bu.orig[i];
        }
        int zcls = cimg.at(ucls);
        // alpha' on the members of z: phi . f . phi^{-1}
        std::map<int, int> phinv;
        for (auto [x, y] : phi.map) phinv[y] = x;
        DigraphView bz = t_class_ball_view(s, zcls, d);
        DigraphView bw = t_class_ball_view(s, wcls, d);
        auto ixz = view_index(bz), ixw = view_index(bw);
        IsoConstraints ac;
        ac.respect_cls = true;
        ac.respect_colour = true;
        for (int y : s.classes[zcls].members) {
            int img = phi.map.at(f.at(phinv.at(y)));
            ac.pins.push_back({ixz.at(y), ixw.at(img)});
        }
        auto am = iso_search(bz, bw, ac);
        if (!am)
            throw op_error("extension failed: pinned structure match missing (input invalid "
                           "or depth not above N)");
        std::map<int, int> alpha;
        for (int i = 0; i < bz.n; ++i) alpha[bz.orig[i]] = bw.orig[(*am)[i]];
        // psi = alpha . phi . f^{-1} on the depth-d ball around vcls
        for (auto [bvx, bux] : finv) psi[bvx] = alpha.at(phi.map.at(bux));
    }

    BallIso out;
    out.depth = d + 1;
    for (auto [x, y] : psi) out.map[x] = y;
    std::string bad;
    if (!verify_ball_iso(out, t, s, &bad))
        throw op_error("extension failed verification: " + bad);
    // the extension must agree with the input on levels 0..1
    for (auto [x, y] : phi.map)
        if (t.class_of[x] >= 0 && t.classes[t.class_of[x]].level <= 1 && out.map.at(x) != y)
            throw invariant_error("extension moved the inner ball");
    return out;
}

IsoContext make_iso_context(const LayeredDigraph& g) {
    IsoContext c;
    c.g = &g;
    c.kres = compute_k(g);
    if (!c.kres.report) {
        c.blocked = "no stabilization constant";
        return c;
    }
    int k = c.kres.report->k;
    if (g.depth() < 2 * k + 1) {
        c.blocked = "depth below 2k+1";
        return c;
    }
    c.t = build_t(g, k);
    c.n = compute_n(*c.t);
    int m_depth = 2 * k + c.n->n_hat;
    if (g.depth() < m_depth) {
        c.blocked = "depth below M";
        return c;
    }
    Fingerprint fp;
    fp.k = k;
    fp.m_depth = m_depth;
    fp.canonical_text = canonical_form(g.truncate(m_depth)).text;
    c.fp = fp;
    return c;
}

IsoDecision decide_iso(const IsoContext& a, const IsoContext& b) {
    IsoDecision d;
    if (a.g->m() != b.g->m()) {
        d.verdict = IsoVerdict::not_isomorphic;
        d.discriminator = "out-valency: " + std::to_string(a.g->m()) + " != " +
                          std::to_string(b.g->m());
        return d;
    }
    if (!a.kres.report || !b.kres.report) {
        d.verdict = IsoVerdict::insufficient_depth;
        d.detail = "stabilization constant unavailable";
        return d;
    }
    int ka = a.kres.report->k, kb = b.kres.report->k;
    if (ka != kb) {
        d.verdict = IsoVerdict::not_isomorphic;
        d.discriminator = "k: " + std::to_string(ka) + " != " + std::to_string(kb);
        return d;
    }
    if (!a.fp || !b.fp) {
        d.verdict = IsoVerdict::insufficient_depth;
        d.detail = !a.fp ? a.blocked : b.blocked;
        return d;
    }
    if (a.fp->m_depth != b.fp->m_depth) {
        d.verdict = IsoVerdict::not_isomorphic;
        d.discriminator = "M: " + std::to_string(a.fp->m_depth) + " != " +
                          std::to_string(b.fp->m_depth);
        return d;
    }
    if (a.fp->canonical_text != b.fp->canonical_text) {
        d.verdict = IsoVerdict::not_isomorphic;
        d.discriminator = "canonical ball at depth M";
        return d;
    }

    // certificate: compose the canonical labellings of the depth-M balls,
    // then extend the induced structure-ball isomorphism level by level
    int k = ka, M = a.fp->m_depth;
    int dmin = std::min(a.g->depth(), b.g->depth());
    LayeredDigraph ta = a.g->truncate(M), tb = b.g->truncate(M);
    CanonResult ca = canonical_form(ta), cb = canonical_form(tb);
    std::vector<int> at_pos(ta.size(), -1);
    for (int v = 0; v < tb.size(); ++v) at_pos[cb.order[v]] = v;
    std::map<int, int> theta; // a.g vertex -> b.g vertex, levels 0..M
    for (int v = 0; v < ta.size(); ++v) {
        int w = at_pos[ca.order[v]];
        theta[a.g->index_of(ta.id_of(v))] = b.g->index_of(tb.id_of(w));
    }

    BallIso phi;
    phi.depth = M - (2 * k - 1); // = N + 1
    for (auto [x, y] : theta)
        if (a.g->level_ix(x) >= 2 * k - 1) phi.map[x] = y;
    std::string why;
    if (!verify_ball_iso(phi, *a.t, *b.t, &why))
        throw invariant_error("canonical labellings do not induce a structure-ball "
                              "isomorphism: " + why);
    int target = dmin - (2 * k - 1);
    while (phi.depth < target) phi = extend_ball_iso(phi, *a.t, *b.t, b.n->n_hat);

    // assemble the full certificate on the common truncations
    std::map<int, int> full;
    for (auto [x, y] : theta)
        if (a.g->level_ix(x) < 2 * k - 1) full[x] = y;
    for (auto [x, y] : phi.map) full[x] = y;
    LayeredDigraph ga = a.g->truncate(dmin), gb = b.g->truncate(dmin);
    DigraphView va = view_of(ga), vb = view_of(gb);
    std::vector<int> m(va.n, -1);
    for (auto [x, y] : full)
        m[ga.index_of(a.g->id_of(x))] = gb.index_of(b.g->id_of(y));
    if (!verify_mapping(va, vb, m, false, false, &why))
        throw invariant_error("assembled certificate failed verification: " + why);
    d.verdict = IsoVerdict::isomorphic;
    d.detail = "certificate depth " + std::to_string(dmin);
    for (int v = 0; v < ga.size(); ++v) d.certificate.push_back({ga.id_of(v), gb.id_of(m[v])});
    return d;
}

} // namespace descent
