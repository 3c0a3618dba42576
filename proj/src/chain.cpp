#include "uzz/chain.hpp"

#include <algorithm>
#include <set>

namespace uzz {

namespace {

// largest k with 2^k strictly below t
int last_exponent_below(const Rational& t) {
    int m = t.floor_log2();
    return t.is_pow2() ? m - 1 : m;
}

std::vector<std::string> block_labels(const UltraSpace& u, const BallPartition& p) {
    std::vector<std::string> out;
    out.reserve(p.blocks.size());
    for (const auto& b : p.blocks) out.push_back(u.label(b.front()));
    return out;
}

} // namespace

int Chain::level_index(int pos, const std::string& label) const {
    const auto& lev = levels[(std::size_t)pos];
    for (int i = 0; i < (int)lev.size(); ++i)
        if (lev[i] == label) return i;
    return -1;
}

const std::vector<std::string>& Chain::level_at_extended(int index) const {
    if (index >= lo && index <= hi) return levels[(std::size_t)pos_of(index)];
    bool below = index < lo;
    bool fine_side = coarse_is_up() ? below : !below;
    if (fine_side ? fine_side_stabilized() : coarse_side_stabilized())
        return below ? levels.front() : levels.back();
    throw window_error("chain index " + std::to_string(index) +
                       " outside the window with no stabilized extension");
}

ChainVerdict validate_chain(const Chain& c) {
    auto fail = [](std::string s) { return ChainVerdict{false, std::move(s)}; };
    if (c.levels.empty()) return fail("chain has no levels");
    if (c.hi - c.lo + 1 != c.count()) return fail("window does not match the level count");
    if ((int)c.bonds.size() != c.count() - 1) return fail("bond count does not match the window");
    for (int p = 0; p < c.count(); ++p) {
        if (c.levels[p].empty()) return fail("empty level at index " + std::to_string(c.lo + p));
        std::set<std::string> seen(c.levels[p].begin(), c.levels[p].end());
        if ((int)seen.size() != (int)c.levels[p].size())
            return fail("duplicate labels at index " + std::to_string(c.lo + p));
    }
    for (int p = 0; p + 1 < c.count(); ++p) {
        int from = c.coarse_is_up() ? p : p + 1;
        int to = c.coarse_is_up() ? p + 1 : p;
        const auto& b = c.bonds[(std::size_t)p];
        if (b.size() != c.levels[(std::size_t)from].size())
            return fail("bond domain mismatch at step " + std::to_string(c.lo + p));
        std::vector<char> hit(c.levels[(std::size_t)to].size(), 0);
        for (int v : b) {
            if (v < 0 || v >= (int)c.levels[(std::size_t)to].size())
                return fail("bond image out of range at step " + std::to_string(c.lo + p));
            hit[(std::size_t)v] = 1;
        }
        if (!std::all_of(hit.begin(), hit.end(), [](char x) { return x != 0; }))
            return fail("bond not surjective at step " + std::to_string(c.lo + p));
    }
    if (c.coarse_side_stabilized() && c.levels[(std::size_t)c.coarse_pos()].size() != 1)
        return fail("coarse-side stabilization requires a singleton edge level");
    return ChainVerdict{};
}

Chain chain_of_space(const UltraSpace& u, Flavor flavor) {
    Chain c;
    c.flavor = flavor;
    auto dmin = u.min_positive_distance();
    const Rational diam = u.diameter();
    if (flavor == Flavor::Dminus && diam > Rational(1, 2))
        throw domain_error("D- chains use the 2^-n grid; rescale the space to diameter <= 1/2");

    if (!dmin) {
        c.lo = c.hi = (flavor == Flavor::D) ? 0 : 1;
    } else if (flavor == Flavor::Dminus) {
        c.lo = 1;
        c.hi = std::max(1, -last_exponent_below(*dmin));
    } else {
        int fine = last_exponent_below(*dmin);
        int coarse = diam.ceil_log2();
        if (flavor == Flavor::Dplus) {
            fine = std::max(1, fine);
            coarse = std::max(fine, std::max(1, coarse));
        }
        c.lo = fine;
        c.hi = std::max(coarse, fine);
    }

    std::vector<BallPartition> parts;
    for (int idx = c.lo; idx <= c.hi; ++idx) {
        Rational r = flavor == Flavor::Dminus ? Rational::pow2(-idx) : Rational::pow2(idx);
        parts.push_back(ball_partition(u, r));
        c.levels.push_back(block_labels(u, parts.back()));
    }
    for (int p = 0; p + 1 < c.count(); ++p) {
        const BallPartition& fine = c.coarse_is_up() ? parts[(std::size_t)p] : parts[(std::size_t)p + 1];
        const BallPartition& coarse = c.coarse_is_up() ? parts[(std::size_t)p + 1] : parts[(std::size_t)p];
        std::vector<int> bond;
        bond.reserve(fine.blocks.size());
        for (const auto& block : fine.blocks) bond.push_back(coarse.block_of[(std::size_t)block.front()]);
        c.bonds.push_back(std::move(bond));
    }

    bool fine_discrete = !dmin || c.levels[(std::size_t)c.fine_pos()].size() == (std::size_t)u.size();
    bool coarse_single = c.levels[(std::size_t)c.coarse_pos()].size() == 1;
    if (c.coarse_is_up()) {
        c.stabilized_below = fine_discrete;
        c.stabilized_above = coarse_single;
    } else {
        c.stabilized_above = fine_discrete;
        c.stabilized_below = coarse_single;
    }
    return c;
}

// map from level_at_extended(idx_fine) to level_at_extended(idx_coarse),
// composing in-window bonds; the stabilized stretches are identities
std::vector<int> composite_bond(const Chain& c, int idx_fine, int idx_coarse) {
    const auto& fine_level = c.level_at_extended(idx_fine);
    std::vector<int> map((std::size_t)fine_level.size());
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = (int)i;
    auto clamp = [&](int idx) { return std::max(c.lo, std::min(c.hi, idx)); };
    int a = clamp(idx_fine);
    int b = clamp(idx_coarse);
    if (c.coarse_is_up()) {
        for (int k = a; k < b; ++k) {
            const auto& step = c.bonds[(std::size_t)c.pos_of(k)];
            for (auto& v : map) v = step[(std::size_t)v];
        }
    } else {
        for (int k = a; k > b; --k) {
            const auto& step = c.bonds[(std::size_t)c.pos_of(k) - 1]; // level k -> k-1
            for (auto& v : map) v = step[(std::size_t)v];
        }
    }
    return map;
}

namespace {

Chain subchain_impl(const Chain& c, const IndexMap& alpha, bool extended) {
    if (alpha.values.empty()) throw malformed_error("empty subchain index map");
    if (!alpha.strictly_increasing())
        throw malformed_error("subchain index map must be strictly increasing");
    if (!extended) {
        for (int v : alpha.values)
            if (v < c.lo || v > c.hi)
                throw malformed_error("subchain index " + std::to_string(v) +
                                      " outside the window");
    }
    Chain s;
    s.flavor = c.flavor;
    s.lo = alpha.lo;
    s.hi = alpha.hi();
    for (int v : alpha.values) s.levels.push_back(c.level_at_extended(v));
    for (std::size_t j = 0; j + 1 < alpha.values.size(); ++j) {
        int fine_idx = c.coarse_is_up() ? alpha.values[j] : alpha.values[j + 1];
        int coarse_idx = c.coarse_is_up() ? alpha.values[j + 1] : alpha.values[j];
        s.bonds.push_back(composite_bond(c, fine_idx, coarse_idx));
    }
    int fine_val = c.coarse_is_up() ? alpha.values.front() : alpha.values.back();
    bool fine_flag = c.fine_side_stabilized() &&
                     (c.coarse_is_up() ? fine_val <= c.lo : fine_val >= c.hi);
    bool coarse_single = s.levels[(std::size_t)s.coarse_pos()].size() == 1;
    if (s.coarse_is_up()) {
        s.stabilized_below = fine_flag;
        s.stabilized_above = coarse_single;
    } else {
        s.stabilized_above = fine_flag;
        s.stabilized_below = coarse_single;
    }
    return s;
}

} // namespace

Chain subchain(const Chain& c, const IndexMap& alpha) { return subchain_impl(c, alpha, false); }

Chain subchain_extended(const Chain& c, const IndexMap& alpha) {
    return subchain_impl(c, alpha, true);
}

EndSpace end_space(const Chain& c) {
    auto verdict = validate_chain(c);
    if (!verdict.valid) throw malformed_error("invalid chain: " + verdict.detail);
    const bool up = c.coarse_is_up();
    if (up && c.levels[(std::size_t)c.coarse_pos()].size() != 1)
        throw domain_error("end space needs a trivial direct limit (singleton coarse level)");

    const int m = c.count();
    const int fine = c.fine_pos();
    const std::size_t nthreads = c.levels[(std::size_t)fine].size();
    std::vector<std::vector<int>> coords(nthreads, std::vector<int>((std::size_t)m, 0));
    for (std::size_t t = 0; t < nthreads; ++t) {
        coords[t][(std::size_t)fine] = (int)t;
        if (up) {
            for (int p = fine; p + 1 < m; ++p)
                coords[t][(std::size_t)p + 1] = c.bonds[(std::size_t)p][(std::size_t)coords[t][(std::size_t)p]];
        } else {
            for (int p = fine; p > 0; --p)
                coords[t][(std::size_t)p - 1] = c.bonds[(std::size_t)p - 1][(std::size_t)coords[t][(std::size_t)p]];
        }
    }

    std::vector<Rational> d(nthreads * nthreads, Rational(0));
    for (std::size_t s = 0; s < nthreads; ++s) {
        for (std::size_t t = s + 1; t < nthreads; ++t) {
            Rational dist;
            if (up) {
                int p = 0;
                while (p < m && coords[s][(std::size_t)p] != coords[t][(std::size_t)p]) ++p;
                dist = Rational::pow2(c.lo + p); // p < m by triviality
            } else {
                int p = m - 1;
                while (p >= 0 && coords[s][(std::size_t)p] != coords[t][(std::size_t)p]) --p;
                dist = Rational::pow2(-(c.lo + p)); // p == -1 is the never-agree cap
            }
            d[s * nthreads + t] = dist;
            d[t * nthreads + s] = dist;
        }
    }
    std::vector<std::string> labels = c.levels[(std::size_t)fine];
    EndSpace e{std::move(coords), UltraSpace::from(DistMatrix::make(std::move(labels), std::move(d)))};
    return e;
}

ReindexProfile reindex_profile(const Chain& c, const IndexMap& alpha) {
    const bool up = c.coarse_is_up();
    int fine_sample = up ? alpha.values.front() : alpha.values.back();
    if (fine_sample != (up ? c.lo : c.hi))
        throw window_error("reindexing is exact only when alpha samples the fine edge");

    Chain sub = subchain(c, alpha);
    EndSpace pe = end_space(c);
    EndSpace se = end_space(sub);

    ReindexProfile rp;
    rp.parent_lo = c.lo;
    const int cap_sentinel = alpha.lo - 1;
    // scales above the last sample are never realized once the sampled coarse
    // level is a singleton; end_space(sub) above has already enforced that
    const int z_hi = up ? std::min(c.hi, alpha.values.back()) : c.hi;
    for (int z = c.lo; z <= z_hi; ++z) {
        if (up) {
            int j = alpha.lo;
            while (j <= alpha.hi() && alpha.at(j) < z) ++j;
            rp.level_map.push_back(j);
        } else {
            int j = alpha.hi();
            while (j >= alpha.lo && alpha.at(j) > z) --j;
            rp.level_map.push_back(j >= alpha.lo ? j : cap_sentinel);
        }
    }

    rp.profile.points.emplace_back(Rational(0), Rational(0));
    if (up) {
        for (int z = c.lo; z <= z_hi; ++z)
            rp.profile.points.emplace_back(Rational::pow2(z), Rational::pow2(rp.at(z)));
    } else {
        for (int z = z_hi; z >= c.lo; --z)
            rp.profile.points.emplace_back(Rational::pow2(-z), Rational::pow2(-rp.at(z)));
        // the never-agree cap maps to the subchain's cap
        rp.profile.points.emplace_back(Rational::pow2(-(c.lo - 1)),
                                       Rational::pow2(-(alpha.lo - 1)));
    }

    // exactness: D' = profile(D) on every thread pair, checked on the nose
    const int sub_fine_idx = up ? alpha.lo : alpha.hi();
    const int sub_fine_parent_pos = c.pos_of(alpha.at(sub_fine_idx));
    const std::size_t n = pe.coords.size();
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = s + 1; t < n; ++t) {
            int es = pe.coords[s][(std::size_t)sub_fine_parent_pos];
            int et = pe.coords[t][(std::size_t)sub_fine_parent_pos];
            Rational actual = se.space.dist(es, et);
            Rational expected = rp.profile.eval(pe.space.dist((int)s, (int)t));
            if (actual != expected)
                throw contract_error("reindexed distance mismatch between threads " +
                                     pe.space.label((int)s) + " and " + pe.space.label((int)t));
        }
    }
    return rp;
}

MorphismVerdict verify_morphism(const ChainMorphism& m, const Chain& from, const Chain& to) {
    MorphismVerdict v;
    auto fail = [&](int idx, std::string s) {
        v.ok = false;
        v.failing_index = idx;
        v.detail = std::move(s);
        return v;
    };
    const int dom_hi = m.dom_lo + (int)m.sigma.size() - 1;
    if (m.sigma.size() != m.level_maps.size())
        throw malformed_error("morphism sigma/level size mismatch");
    if (m.dom_lo < from.lo || dom_hi > from.hi)
        throw malformed_error("morphism domain outside the source window");
    for (std::size_t i = 0; i < m.sigma.size(); ++i) {
        if (m.sigma[i] < to.lo || m.sigma[i] > to.hi)
            throw malformed_error("sigma lands outside the target window");
        if (i > 0 && m.sigma[i] < m.sigma[i - 1])
            return fail(m.dom_lo + (int)i, "sigma is not nondecreasing");
        const auto& src_level = from.levels[(std::size_t)from.pos_of(m.dom_lo + (int)i)];
        const auto& tgt_level = to.levels[(std::size_t)to.pos_of(m.sigma[i])];
        if (m.level_maps[i].size() != src_level.size())
            throw malformed_error("level map domain mismatch at " + std::to_string(m.dom_lo + (int)i));
        for (int x : m.level_maps[i])
            if (x < 0 || x >= (int)tgt_level.size())
                throw malformed_error("level map image out of range");
    }

    for (int k = m.dom_lo; k < dom_hi; ++k) {
        const auto& f_here = m.level_maps[(std::size_t)(k - m.dom_lo)];
        const auto& f_next = m.level_maps[(std::size_t)(k + 1 - m.dom_lo)];
        int s_here = m.sigma[(std::size_t)(k - m.dom_lo)];
        int s_next = m.sigma[(std::size_t)(k + 1 - m.dom_lo)];
        if (from.coarse_is_up()) {
            // f_{k+1} o Phi_k == Psi_{s(k)->s(k+1)} o f_k
            const auto& phi = from.bonds[(std::size_t)from.pos_of(k)];
            auto psi = composite_bond(to, s_here, s_next);
            for (std::size_t e = 0; e < phi.size(); ++e) {
                if (f_next[(std::size_t)phi[e]] != psi[(std::size_t)f_here[e]])
                    return fail(k, "rectangle fails at level element " +
                                       from.levels[(std::size_t)from.pos_of(k)][e]);
            }
        } else {
            // f_k o Phi_k == Psi_{s(k+1)->s(k)} o f_{k+1}, with Phi_k : X_{k+1} -> X_k
            const auto& phi = from.bonds[(std::size_t)from.pos_of(k)];
            auto psi = composite_bond(to, s_next, s_here);
            for (std::size_t e = 0; e < phi.size(); ++e) {
                if (f_here[(std::size_t)phi[e]] != psi[(std::size_t)f_next[e]])
                    return fail(k, "rectangle fails at level element " +
                                       from.levels[(std::size_t)from.pos_of(k + 1)][e]);
            }
        }
    }
    return v;
}

namespace {

// sigma value for a source index: gamma clamped into the target window where
// the stabilized extensions (or the 2^n / 2^-n grid boundary at 1) make it exact
int resolve_sigma(const Chain& to, const ScaleMap& gamma, int k) {
    const bool up = to.coarse_is_up();
    const int fine_edge = up ? to.lo : to.hi;
    const int coarse_edge = up ? to.hi : to.lo;
    auto g = gamma.eval(k);
    // a collapsed scale means the image is a single point; the finest level
    // already separates it, and the containment check below re-validates
    if (!g) return fine_edge;
    int v = *g;
    if (to.flavor != Flavor::D) v = std::max(v, 1); // indices live in the positive grid
    if (up ? v < to.lo : v > to.hi) {
        if (!to.fine_side_stabilized())
            throw window_error("sigma " + std::to_string(v) + " beyond the fine edge");
        return fine_edge;
    }
    if (up ? v > to.hi : v < to.lo) {
        if (!to.coarse_side_stabilized())
            throw window_error("sigma " + std::to_string(v) + " beyond the coarse edge");
        return coarse_edge;
    }
    return v;
}

} // namespace

ChainMorphism induce_morphism(const Chain& from, const Chain& to,
                              const std::vector<int>& thread_map, const ScaleMap& gamma) {
    EndSpace fe = end_space(from);
    EndSpace te = end_space(to);
    if (thread_map.size() != fe.coords.size())
        throw malformed_error("thread map is not total on the source end space");
    for (int v : thread_map)
        if (v < 0 || v >= (int)te.coords.size())
            throw malformed_error("thread map image out of range");

    ChainMorphism m;
    m.flavor = from.flavor;
    m.dom_lo = from.flavor == Flavor::Dminus ? std::max(from.lo, gamma.lo) : from.lo;
    for (int k = m.dom_lo; k <= from.hi; ++k) {
        int sk = resolve_sigma(to, gamma, k);
        m.sigma.push_back(sk);
        const auto& src_level = from.levels[(std::size_t)from.pos_of(k)];
        std::vector<int> f(src_level.size(), -1);
        const int spos = from.pos_of(k);
        const int tpos = to.pos_of(sk);
        for (std::size_t t = 0; t < fe.coords.size(); ++t) {
            int e = fe.coords[t][(std::size_t)spos];
            int img = te.coords[(std::size_t)thread_map[t]][(std::size_t)tpos];
            if (f[(std::size_t)e] == -1) {
                f[(std::size_t)e] = img;
            } else if (f[(std::size_t)e] != img) {
                throw contract_error("image of ball " + src_level[(std::size_t)e] +
                                     " at index " + std::to_string(k) +
                                     " is not contained in one target ball");
            }
        }
        // a surjective bond chain guarantees every level element carries threads
        for (std::size_t e = 0; e < f.size(); ++e)
            if (f[e] == -1)
                throw malformed_error("level element without threads at index " +
                                      std::to_string(k));
        m.level_maps.push_back(std::move(f));
    }
    // monotonicity of sigma after clamping
    for (std::size_t i = 1; i < m.sigma.size(); ++i)
        if (m.sigma[i] < m.sigma[i - 1])
            throw contract_error("induced sigma is not nondecreasing");
    return m;
}

std::vector<int> point_threads(const Chain& c, const UltraSpace& u) {
    Rational r = c.flavor == Flavor::Dminus ? Rational::pow2(-c.hi) : Rational::pow2(c.lo);
    BallPartition p = ball_partition(u, r);
    if (p.blocks.size() != c.levels[(std::size_t)c.fine_pos()].size())
        throw malformed_error("space does not match the chain's fine level");
    return p.block_of;
}

} // namespace uzz
