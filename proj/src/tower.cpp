#include "uzz/tower.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace uzz {

int Tower::index_of(const std::string& id) const {
    for (int i = 0; i < size(); ++i)
        if (nodes[(std::size_t)i].id == id) return i;
    return -1;
}

int Tower::top_level() const {
    int m = 0;
    for (const auto& n : nodes) m = std::max(m, n.level);
    return m;
}

std::vector<std::vector<int>> Tower::levels() const {
    std::vector<std::vector<int>> out((std::size_t)top_level());
    for (int i = 0; i < size(); ++i) {
        int lev = nodes[(std::size_t)i].level;
        if (lev >= 1 && lev <= top_level()) out[(std::size_t)lev - 1].push_back(i);
    }
    return out;
}

std::vector<int> Tower::up_chain(int node) const {
    std::vector<int> out{node};
    int cur = node;
    int guard = size() + 1;
    while (nodes[(std::size_t)cur].succ != -1 && guard-- > 0) {
        cur = nodes[(std::size_t)cur].succ;
        out.push_back(cur);
    }
    if (guard <= 0) throw malformed_error("successor cycle in tower");
    return out;
}

int Tower::ancestor_at(int node, int level) const {
    int cur = node;
    while (cur != -1 && nodes[(std::size_t)cur].level < level) cur = nodes[(std::size_t)cur].succ;
    if (cur == -1 || nodes[(std::size_t)cur].level != level) return -1;
    return cur;
}

void check_tower_structure(const Tower& t) {
    std::set<std::string> ids;
    for (const auto& n : t.nodes) {
        if (!ids.insert(n.id).second) throw malformed_error("duplicate node id " + n.id);
        if (n.level < 1) throw malformed_error("node " + n.id + " has level < 1");
        if (n.succ != -1) {
            if (n.succ < 0 || n.succ >= t.size())
                throw malformed_error("node " + n.id + " has a dangling successor");
            if (t.nodes[(std::size_t)n.succ].level != n.level + 1)
                throw malformed_error("successor of " + n.id + " does not raise the level by 1");
        }
    }
    for (int i = 0; i < t.size(); ++i) t.up_chain(i); // cycle guard
}

TowerVerdict validate_tower(const Tower& t) {
    check_tower_structure(t);
    TowerVerdict v;
    if (t.size() == 0) {
        v.condition[1] = false;
        v.detail = "empty tower";
        return v;
    }
    // (1) finite posets are well-founded; (3) unique successors force linear
    // upper cones (re-checked via the cycle guard above)
    int tops = 0;
    for (const auto& n : t.nodes)
        if (n.succ == -1) ++tops;
    if (tops != 1) {
        v.condition[1] = false;
        v.detail = "pairwise sups need a unique top; found " + std::to_string(tops);
    }
    for (const auto& n : t.nodes) {
        if (n.succ == -1 && n.level != t.top_level()) {
            v.condition[2] = false;
            v.detail = "node " + n.id + " has no successor below the top level";
        }
    }
    // (4): |[x,a]| = lev(a) for minimal x <= a reduces to: minimal nodes sit at level 1
    std::vector<char> has_pred((std::size_t)t.size(), 0);
    for (const auto& n : t.nodes)
        if (n.succ != -1) has_pred[(std::size_t)n.succ] = 1;
    for (int i = 0; i < t.size(); ++i) {
        if (!has_pred[(std::size_t)i] && t.nodes[(std::size_t)i].level != 1) {
            v.condition[3] = false;
            v.detail = "minimal node " + t.nodes[(std::size_t)i].id + " sits at level " +
                       std::to_string(t.nodes[(std::size_t)i].level);
        }
    }
    return v;
}

int sup_node(const Tower& t, int a, int b) {
    if (a == b) return a;
    int x = a, y = b;
    while (t.nodes[(std::size_t)x].level < t.nodes[(std::size_t)y].level)
        x = t.nodes[(std::size_t)x].succ;
    while (t.nodes[(std::size_t)y].level < t.nodes[(std::size_t)x].level)
        y = t.nodes[(std::size_t)y].succ;
    while (x != y) {
        x = t.nodes[(std::size_t)x].succ;
        y = t.nodes[(std::size_t)y].succ;
        if (x == -1 || y == -1) throw domain_error("nodes with no common upper bound");
    }
    return x;
}

int path_metric(const Tower& t, int a, int b) {
    int s = sup_node(t, a, b);
    return 2 * t.nodes[(std::size_t)s].level -
           (t.nodes[(std::size_t)a].level + t.nodes[(std::size_t)b].level);
}

UltraSpace base_space(const Tower& t) {
    auto verdict = validate_tower(t);
    if (!verdict.ok()) throw malformed_error("invalid tower: " + verdict.detail);
    std::vector<int> base = t.levels().front();
    const std::size_t n = base.size();
    std::vector<std::string> labels;
    labels.reserve(n);
    for (int i : base) labels.push_back(t.nodes[(std::size_t)i].id);
    std::vector<Rational> d(n * n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Rational v(path_metric(t, base[i], base[j]));
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    return UltraSpace::from(DistMatrix::make(std::move(labels), std::move(d)));
}

Chain chain_of_tower(const Tower& t) {
    auto verdict = validate_tower(t);
    if (!verdict.ok()) throw malformed_error("invalid tower: " + verdict.detail);
    auto levels = t.levels();
    Chain c;
    c.flavor = Flavor::Dplus;
    c.lo = 1;
    c.hi = (int)levels.size();
    for (const auto& lev : levels) {
        std::vector<std::string> labels;
        labels.reserve(lev.size());
        for (int i : lev) labels.push_back(t.nodes[(std::size_t)i].id);
        c.levels.push_back(std::move(labels));
    }
    for (std::size_t p = 0; p + 1 < levels.size(); ++p) {
        std::vector<int> bond;
        bond.reserve(levels[p].size());
        for (int i : levels[p]) {
            int s = t.nodes[(std::size_t)i].succ;
            int at = (int)(std::find(levels[p + 1].begin(), levels[p + 1].end(), s) -
                           levels[p + 1].begin());
            bond.push_back(at);
        }
        c.bonds.push_back(std::move(bond));
    }
    c.stabilized_above = true; // unique top
    c.stabilized_below = false;
    return c;
}

Tower subtower(const Tower& t, const IndexMap& alpha) {
    if (alpha.values.empty() || !alpha.strictly_increasing())
        throw malformed_error("subtower needs a strictly increasing level sample");
    if (alpha.values.front() < 1) throw malformed_error("tower levels start at 1");
    const int top = t.top_level();
    auto levels = t.levels();
    Tower s;
    std::map<std::pair<int, int>, int> placed; // (sample position, original node) -> new index
    for (std::size_t j = 0; j < alpha.values.size(); ++j) {
        int lev = alpha.values[j];
        std::vector<int> members;
        if (lev <= top) {
            members = levels[(std::size_t)lev - 1];
        } else {
            members = levels[(std::size_t)top - 1]; // virtual copy of the singleton top
        }
        for (int orig : members) {
            TowerNode n;
            n.id = t.nodes[(std::size_t)orig].id;
            if (lev > top) n.id += "'" + std::to_string(lev - top); // spire copies stay distinct
            n.level = (int)j + 1;
            n.succ = -1;
            placed[{(int)j, orig}] = s.size();
            s.nodes.push_back(std::move(n));
        }
    }
    // composed successors: ancestor at the next sampled level (clamped at top)
    for (std::size_t j = 0; j + 1 < alpha.values.size(); ++j) {
        int lev = alpha.values[j];
        int next = alpha.values[j + 1];
        auto members = lev <= top ? levels[(std::size_t)lev - 1] : levels[(std::size_t)top - 1];
        for (int orig : members) {
            int anc = t.ancestor_at(orig, std::min(next, top));
            s.nodes[(std::size_t)placed[{(int)j, orig}]].succ =
                placed[{(int)j + 1, anc}];
        }
    }
    check_tower_structure(s);
    return s;
}

AdmissibleVerdict verify_admissible(const Tower& t1, const Tower& t2,
                                    const std::vector<std::pair<int, int>>& phi) {
    AdmissibleVerdict v;
    std::map<int, int> f;
    for (auto [a, b] : phi) {
        if (a < 0 || a >= t1.size() || b < 0 || b >= t2.size())
            throw malformed_error("morphism pair out of range");
        auto [it, fresh] = f.emplace(a, b);
        if (!fresh && it->second != b) throw malformed_error("morphism is not single-valued");
    }
    // precondition: the domain is a lower set of t1 (closed under taking the
    // nodes below; one successor step at a time suffices)
    for (int i = 0; i < t1.size(); ++i) {
        int s = t1.nodes[(std::size_t)i].succ;
        if (s != -1 && f.count(s) && !f.count(i)) {
            v.domain_is_lower = false;
            v.detail = "domain omits " + t1.nodes[(std::size_t)i].id + " below " +
                       t1.nodes[(std::size_t)s].id;
            return v;
        }
    }

    auto set_fail = [&](int c, std::string s) {
        v.condition[(std::size_t)c] = false;
        if (v.detail.empty()) v.detail = std::move(s);
    };
    // (1) level preservation
    for (auto& [a, b] : f)
        if (t1.nodes[(std::size_t)a].level != t2.nodes[(std::size_t)b].level)
            set_fail(0, "level changes at " + t1.nodes[(std::size_t)a].id);
    // (2) order preservation: a <= a' in A implies phi(a) <= phi(a'); single
    // successor steps generate the order and intervals stay inside a lower set
    for (auto& [a, b] : f) {
        int s = t1.nodes[(std::size_t)a].succ;
        if (s != -1 && f.count(s)) {
            auto up = t2.up_chain(b);
            if (std::find(up.begin(), up.end(), f[s]) == up.end())
                set_fail(1, "order breaks above " + t1.nodes[(std::size_t)a].id);
        }
    }
    // (3) collisions only between nodes sharing a successor
    for (auto& [a, b] : f)
        for (auto& [a2, b2] : f) {
            if (a2 <= a || b != b2) continue;
            int sa = t1.nodes[(std::size_t)a].succ;
            int sa2 = t1.nodes[(std::size_t)a2].succ;
            if (sa == -1 || sa != sa2)
                set_fail(2, "collision of " + t1.nodes[(std::size_t)a].id + " and " +
                                t1.nodes[(std::size_t)a2].id + " without a shared successor");
        }
    // (4) the image is a lower set of t2
    {
        std::set<int> image;
        for (auto& [a, b] : f) image.insert(b);
        for (int i = 0; i < t2.size(); ++i) {
            int s = t2.nodes[(std::size_t)i].succ;
            if (s != -1 && image.count(s) && !image.count(i))
                set_fail(3, "image omits " + t2.nodes[(std::size_t)i].id + " below " +
                                t2.nodes[(std::size_t)s].id);
        }
    }
    // (5) at most one image of max A
    {
        std::set<int> dom;
        for (auto& [a, b] : f) dom.insert(a);
        std::set<int> image_of_max;
        for (int a : dom) {
            int s = t1.nodes[(std::size_t)a].succ;
            if (s == -1 || !dom.count(s)) image_of_max.insert(f[a]);
        }
        if (image_of_max.size() > 1)
            set_fail(4, "max A has " + std::to_string(image_of_max.size()) + " images");
    }
    return v;
}

AdmissibleMorphism zigzag_to_admissible(const ZigZag& z, const Tower& t1, const Tower& t2) {
    Chain c1 = chain_of_tower(t1);
    Chain c2 = chain_of_tower(t2);
    auto verdict = verify_zigzag(z, c1, c2);
    if (!verdict.ok) throw malformed_error("zig-zag does not verify: " + verdict.detail);
    if (z.flavor != Flavor::Dplus) throw malformed_error("tower zig-zags are D+ chains");

    AdmissibleMorphism out;
    out.sub1 = subtower(t1, IndexMap{1, z.alpha});
    out.sub2 = subtower(t2, IndexMap{1, z.beta});
    auto lv1 = out.sub1.levels();
    auto lv2 = out.sub2.levels();
    const int m = (int)z.alpha.size();
    for (int j = 0; j < m; ++j) {
        const auto& odd = z.v[(std::size_t)(2 * j)].map; // X_{alpha(j+1)} -> Y_{beta(j+1)}
        for (std::size_t e = 0; e < lv1[(std::size_t)j].size(); ++e)
            out.phi.emplace_back(lv1[(std::size_t)j][e], lv2[(std::size_t)j][(std::size_t)odd[e]]);
    }
    out.verdict = verify_admissible(out.sub1, out.sub2, out.phi);
    return out;
}

DistortionReport check_base_rough_isometry(const Tower& t1, const Tower& t2,
                                           const std::vector<int>& base_map, const Rational& C) {
    UltraSpace b1 = base_space(t1);
    UltraSpace b2 = base_space(t2);
    return check_distortion(b1, b2, base_map, DistortionKind::Additive, Rational(1),
                            std::nullopt, C);
}

} // namespace uzz
