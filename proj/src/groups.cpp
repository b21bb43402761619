#include "descent/groups.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "descent/iso.hpp"

namespace descent {

bool GroupOnBase::operator==(const GroupOnBase& o) const {
    if (factors.size() != o.factors.size()) return false;
    for (size_t i = 0; i < factors.size(); ++i)
        if (factors[i].verts != o.factors[i].verts || factors[i].perms != o.factors[i].perms)
            return false;
    return true;
}

bool GroupOnBase::subgroup_of(const GroupOnBase& o) const {
    if (factors.size() != o.factors.size()) return false;
    for (size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].verts != o.factors[i].verts) return false;
        for (const auto& p : factors[i].perms)
            if (!std::binary_search(o.factors[i].perms.begin(), o.factors[i].perms.end(), p))
                return false;
    }
    return true;
}

uint64_t GroupOnBase::order() const {
    uint64_t n = 1;
    for (const auto& f : factors) n *= static_cast<uint64_t>(f.perms.size());
    return n;
}

std::vector<std::vector<int>> GroupOnBase::elements(uint64_t guard) const {
    if (order() > guard) throw op_error("group too large to enumerate explicitly");
    int width = 0;
    for (const auto& f : factors) width += static_cast<int>(f.verts.size());
    std::vector<std::vector<int>> out = {std::vector<int>()};
    for (const auto& f : factors) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : out)
            for (const auto& p : f.perms) {
                auto e = prefix;
                int off = static_cast<int>(prefix.size());
                for (int x : p) e.push_back(x + off);
                next.push_back(e);
            }
        out = std::move(next);
    }
    (void)width;
    std::sort(out.begin(), out.end());
    return out;
}

std::string GroupOnBase::describe() const {
    std::ostringstream os;
    os << "order " << order() << " on";
    for (const auto& f : factors) os << " [" << f.verts.size() << ":" << f.perms.size() << "]";
    return os.str();
}

namespace {

void permutations_of(int n, std::vector<std::vector<int>>& out) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
}

} // namespace

GroupOnBase induced_group(const TStructure& t, int d) {
    if (d < 0 || d > t.t_depth) throw op_error("induced_group: depth out of range");
    GroupOnBase g;
    g.depth = d;
    for (size_t bi = 0; bi < t.base.size(); ++bi) {
        const auto& cls = t.classes[t.base[bi]];
        int s = static_cast<int>(cls.members.size());
        if (s > kMaxBaseClassSize)
            throw op_error("base class too large for explicit group enumeration");
        GroupOnBase::Factor f;
        f.verts = cls.members;
        DigraphView ball = t_class_ball_view(t, t.base[bi], d);
        // positions of the base members inside the ball view
        std::vector<int> pos(s, -1);
        for (int i = 0; i < ball.n; ++i)
            for (int j = 0; j < s; ++j)
                if (ball.orig[i] == cls.members[j]) pos[j] = i;
        std::vector<std::vector<int>> cands;
        permutations_of(s, cands);
        for (const auto& p : cands) {
            IsoConstraints c;
            c.respect_cls = true;
            c.respect_colour = true;
            for (int j = 0; j < s; ++j) c.pins.push_back({pos[j], pos[p[j]]});
            if (iso_search(ball, ball, c)) f.perms.push_back(p);
        }
        std::sort(f.perms.begin(), f.perms.end());
        g.factors.push_back(std::move(f));
    }
    return g;
}

NResult compute_n(const TStructure& t) {
    if (t.t_depth < 2) throw op_error("compute_n: available depth below 2");
    std::vector<GroupOnBase> chain;
    for (int d = 1; d <= t.t_depth; ++d) {
        chain.push_back(induced_group(t, d));
        if (d >= 2 && !chain.back().subgroup_of(chain[chain.size() - 2]))
            throw invariant_error("group chain not decreasing");
    }
    NResult r;
    r.window_hi = t.t_depth;
    int n_hat = t.t_depth;
    while (n_hat > 1 && chain[n_hat - 2] == chain.back()) --n_hat;
    r.n_hat = n_hat;
    r.window_lo = n_hat;
    r.inconclusive = t.t_depth >= 2 && !(chain[t.t_depth - 2] == chain.back());
    for (const auto& g : chain) r.chain_orders.push_back(g.order());
    return r;
}

} // namespace descent
