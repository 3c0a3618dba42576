#include "uzz/zigzag.hpp"

#include <algorithm>

namespace uzz {

namespace {

// min n in [from, window.hi] with gamma(n) >= target (D- threshold n_x)
std::optional<int> first_at_least(const ScaleMap& g, int from, int target) {
    for (int n = std::max(from, g.lo); n <= g.hi(); ++n)
        if (g.ge_at(n, target)) return n;
    return std::nullopt;
}

// max k in [window.lo, window.hi] with gamma(k) <= target (D backward threshold k_x)
std::optional<int> last_at_most(const ScaleMap& g, int target) {
    std::optional<int> out;
    for (int k = g.lo; k <= g.hi(); ++k)
        if (g.le_at(k, target)) out = k;
    return out;
}

int eval_up(const ScaleMap& g, int k, int floor_value) {
    auto v = g.eval(k);
    return v ? std::max(*v, floor_value) : floor_value;
}

Interleaving interleave_core(const ScaleMap& fwd, const ScaleMap& bwd, Flavor flavor,
                             int fwd_length, std::optional<int> a_target,
                             std::optional<int> b_target) {
    if (fwd_length < 1) throw malformed_error("interleaving length must be >= 1");
    Interleaving il;
    il.flavor = flavor;
    const int cap = fwd_length;
    auto reached = [&](int a, int b) {
        return a_target && b_target && a >= *a_target && b >= *b_target;
    };

    if (flavor == Flavor::Dminus) {
        il.dom_lo = 1;
        il.alpha.push_back(1);
        auto b1 = first_at_least(bwd, 1, 1);
        if (!b1) { il.truncated = true; il.alpha.clear(); return il; }
        il.beta.push_back(std::max(1, *b1));
        for (int i = 2; i <= cap; ++i) {
            if (reached(il.alpha.back(), il.beta.back())) break;
            auto na = first_at_least(fwd, 1, il.beta.back());
            if (!na) { il.truncated = true; break; }
            int a = std::max(il.alpha.back() + 1, *na);
            auto nb = first_at_least(bwd, 1, a);
            if (!nb) { il.truncated = true; break; }
            int b = std::max(il.beta.back() + 1, *nb);
            il.alpha.push_back(a);
            il.beta.push_back(b);
        }
        return il;
    }

    // D and D+ share the forward recursion; only the seeds and the index floor differ
    const bool natural = flavor == Flavor::Dplus;
    il.dom_lo = natural ? 1 : 0;
    const int floor_value = natural ? 1 : INT32_MIN / 2;
    {
        int a0 = natural ? 1 : 0;
        auto g0 = fwd.eval(a0);
        int b0;
        if (g0) {
            b0 = natural ? std::max(1, *g0) : *g0;
        } else {
            // collapsed at the seed scale: start at the finest scale around
            b0 = natural ? 1 : std::min(fwd.lo, bwd.lo) - 1;
        }
        il.alpha.push_back(a0);
        il.beta.push_back(std::max(b0, natural ? 1 : INT32_MIN / 2));
    }
    for (int i = 1; i < cap; ++i) {
        if (reached(il.alpha.back(), il.beta.back())) break;
        int a = std::max(il.alpha.back() + 1, eval_up(bwd, il.beta.back(), floor_value));
        int b = std::max(il.beta.back() + 1, eval_up(fwd, a, floor_value));
        il.alpha.push_back(a);
        il.beta.push_back(b);
    }

    if (flavor == Flavor::D) {
        // backward clauses, prepended until the thresholds leave the windows
        std::vector<int> ra, rb; // reversed prefixes, most recent first
        int a_next = il.alpha.front();
        int b_next = il.beta.front();
        const int fine_floor_a = fwd.lo;
        const int fine_floor_b = bwd.lo;
        for (int guard = 0; guard < 4096; ++guard) {
            if (a_next <= fine_floor_a && b_next <= fine_floor_b) break;
            auto ka = last_at_most(bwd, a_next);
            if (!ka) { il.truncated = true; break; }
            int b = std::min(b_next - 1, *ka);
            auto kb = last_at_most(fwd, b);
            if (!kb) { il.truncated = true; break; }
            int a = std::min(a_next - 1, *kb);
            ra.push_back(a);
            rb.push_back(b);
            a_next = a;
            b_next = b;
        }
        if (!ra.empty()) {
            il.dom_lo -= (int)ra.size();
            std::reverse(ra.begin(), ra.end());
            std::reverse(rb.begin(), rb.end());
            ra.insert(ra.end(), il.alpha.begin(), il.alpha.end());
            rb.insert(rb.end(), il.beta.begin(), il.beta.end());
            il.alpha = std::move(ra);
            il.beta = std::move(rb);
        }
    }
    return il;
}

} // namespace

Interleaving interleave(const ScaleMap& fwd, const ScaleMap& bwd, Flavor flavor, int length) {
    return interleave_core(fwd, bwd, flavor, length, std::nullopt, std::nullopt);
}

std::optional<int> interleaving_violation(const Interleaving& il, const ScaleMap& fwd,
                                          const ScaleMap& bwd) {
    const int m = (int)il.alpha.size();
    for (int i = 0; i < m; ++i) {
        const int idx = il.dom_lo + i;
        if (il.flavor == Flavor::Dminus) {
            if (!bwd.ge_at(il.beta[(std::size_t)i], il.alpha[(std::size_t)i])) return idx;
            if (i + 1 < m && !fwd.ge_at(il.alpha[(std::size_t)i + 1], il.beta[(std::size_t)i]))
                return idx;
        } else {
            if (!fwd.le_at(il.alpha[(std::size_t)i], il.beta[(std::size_t)i])) return idx;
            if (i + 1 < m && !bwd.le_at(il.beta[(std::size_t)i], il.alpha[(std::size_t)i + 1]))
                return idx;
        }
    }
    return std::nullopt;
}

namespace {

int coord_at_extended(const Chain& c, const EndSpace& e, int thread, int index) {
    int clamped = std::max(c.lo, std::min(c.hi, index));
    if (index != clamped) c.level_at_extended(index); // throws if not stabilized
    return e.coords[(std::size_t)thread][(std::size_t)c.pos_of(clamped)];
}

// level map induced by a thread relation: every source-level element must
// send all threads through it into a single target-level element
std::vector<int> induce_level_map(const Chain& src, const EndSpace& se, int src_idx,
                                  const Chain& tgt, const EndSpace& te, int tgt_idx,
                                  const std::vector<std::pair<int, int>>& pairs) {
    const auto& level = src.level_at_extended(src_idx);
    std::vector<int> f(level.size(), -1);
    for (auto [a, b] : pairs) {
        int e = coord_at_extended(src, se, a, src_idx);
        int img = coord_at_extended(tgt, te, b, tgt_idx);
        if (f[(std::size_t)e] == -1) {
            f[(std::size_t)e] = img;
        } else if (f[(std::size_t)e] != img) {
            throw contract_error("image of ball " + level[(std::size_t)e] + " at index " +
                                 std::to_string(src_idx) +
                                 " is not contained in one target ball");
        }
    }
    for (std::size_t e = 0; e < f.size(); ++e)
        if (f[e] == -1)
            throw contract_error("relation misses ball " + level[e] + " at index " +
                                 std::to_string(src_idx));
    return f;
}

std::vector<std::pair<int, int>> swapped(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<std::pair<int, int>> out;
    out.reserve(pairs.size());
    for (auto [a, b] : pairs) out.emplace_back(b, a);
    return out;
}

} // namespace

ZigZag build_zigzag(const Chain& X, const Chain& Y,
                    const std::vector<std::pair<int, int>>& phi_pairs) {
    if (X.flavor != Y.flavor) throw malformed_error("zig-zag needs chains of one flavor");
    const Flavor flavor = X.flavor;
    EndSpace ex = end_space(X);
    EndSpace ey = end_space(Y);
    MultiMap phi = MultiMap::make(ex.space, ey.space, phi_pairs);
    if (!phi.total_on_source() || !phi.surjective())
        throw malformed_error("zig-zag needs a total surjective relation both ways");
    if (flavor != Flavor::Dplus && !phi.bijective())
        throw malformed_error("this flavor needs a bijective thread map");

    ExpansionProfile rf = expansion_profile(phi);
    ExpansionProfile rb = expansion_profile(phi.inverse());
    if (flavor == Flavor::Dminus) {
        rf = capped_for_uniform(rf);
        rb = capped_for_uniform(rb);
    }
    ScaleMap gf = scale_map(rf, flavor);
    ScaleMap gb = scale_map(rb, flavor);

    const int span = (X.hi - X.lo + 1) + (Y.hi - Y.lo + 1) + 8;
    Interleaving il = interleave_core(gf, gb, flavor, span, X.hi, Y.hi);

    ZigZag z;
    z.flavor = flavor;
    z.dom_lo = il.dom_lo;
    z.alpha = il.alpha;
    z.beta = il.beta;
    z.truncated = il.truncated;
    const int m = (int)z.alpha.size();
    auto inv_pairs = swapped(phi_pairs);
    for (int i = 0; i < m; ++i) {
        if (flavor == Flavor::Dminus) {
            z.v.push_back({z.beta[(std::size_t)i],
                           induce_level_map(Y, ey, z.beta[(std::size_t)i], X, ex,
                                            z.alpha[(std::size_t)i], inv_pairs)});
            if (i + 1 < m)
                z.v.push_back({z.alpha[(std::size_t)i + 1],
                               induce_level_map(X, ex, z.alpha[(std::size_t)i + 1], Y, ey,
                                                z.beta[(std::size_t)i], phi_pairs)});
        } else {
            z.v.push_back({z.alpha[(std::size_t)i],
                           induce_level_map(X, ex, z.alpha[(std::size_t)i], Y, ey,
                                            z.beta[(std::size_t)i], phi_pairs)});
            if (i + 1 < m)
                z.v.push_back({z.beta[(std::size_t)i],
                               induce_level_map(Y, ey, z.beta[(std::size_t)i], X, ex,
                                                z.alpha[(std::size_t)i + 1], inv_pairs)});
        }
    }
    return z;
}

namespace {

bool strictly_increasing(const std::vector<int>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) return false;
    return true;
}

bool is_surjection(const std::vector<int>& f, std::size_t target_size) {
    std::vector<char> hit(target_size, 0);
    for (int v : f) {
        if (v < 0 || (std::size_t)v >= target_size) return false;
        hit[(std::size_t)v] = 1;
    }
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

std::vector<int> composed(const std::vector<int>& first, const std::vector<int>& then) {
    std::vector<int> out(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) out[i] = then[(std::size_t)first[i]];
    return out;
}

} // namespace

ZigZagVerdict verify_zigzag(const ZigZag& z, const Chain& X, const Chain& Y) {
    ZigZagVerdict out;
    auto fail = [&](int vi, std::string s) {
        out.ok = false;
        out.failing_v = vi;
        out.detail = std::move(s);
        return out;
    };
    const int m = (int)z.alpha.size();
    if (z.beta.size() != z.alpha.size()) throw malformed_error("alpha/beta length mismatch");
    if (m == 0) {
        out.degenerate = true;
        return out;
    }
    if (!strictly_increasing(z.alpha) || !strictly_increasing(z.beta))
        return fail(1, "sampling sequences must be strictly increasing");
    if ((int)z.v.size() != 2 * m - 1) return fail(1, "wrong number of V maps");
    if (m == 1) out.degenerate = true;

    const bool dm = z.flavor == Flavor::Dminus;
    for (int i = 0; i < m; ++i) {
        const auto& odd = z.v[(std::size_t)(2 * i)];
        const auto& src = dm ? Y.level_at_extended(z.beta[(std::size_t)i])
                             : X.level_at_extended(z.alpha[(std::size_t)i]);
        const auto& tgt = dm ? X.level_at_extended(z.alpha[(std::size_t)i])
                             : Y.level_at_extended(z.beta[(std::size_t)i]);
        int expect_from = dm ? z.beta[(std::size_t)i] : z.alpha[(std::size_t)i];
        if (odd.from_index != expect_from)
            return fail(2 * i + 1, "V leaves the wrong level");
        if (odd.map.size() != src.size()) return fail(2 * i + 1, "V domain mismatch");
        if (!is_surjection(odd.map, tgt.size())) return fail(2 * i + 1, "V not surjective");
        if (i + 1 == m) break;
        const auto& even = z.v[(std::size_t)(2 * i + 1)];
        const auto& esrc = dm ? X.level_at_extended(z.alpha[(std::size_t)i + 1])
                              : Y.level_at_extended(z.beta[(std::size_t)i]);
        const auto& etgt = dm ? Y.level_at_extended(z.beta[(std::size_t)i])
                              : X.level_at_extended(z.alpha[(std::size_t)i + 1]);
        int expect_efrom = dm ? z.alpha[(std::size_t)i + 1] : z.beta[(std::size_t)i];
        if (even.from_index != expect_efrom)
            return fail(2 * i + 2, "V leaves the wrong level");
        if (even.map.size() != esrc.size()) return fail(2 * i + 2, "V domain mismatch");
        if (!is_surjection(even.map, etgt.size())) return fail(2 * i + 2, "V not surjective");
    }

    // 2-step composites must be the subchain bonds induced by inclusion
    for (int i = 0; i + 1 < m; ++i) {
        const auto& odd = z.v[(std::size_t)(2 * i)];
        const auto& even = z.v[(std::size_t)(2 * i + 1)];
        const auto& next_odd = z.v[(std::size_t)(2 * i + 2)];
        if (dm) {
            // V_{2i-1} o V_{2i} : X_{a(i+1)} -> X_{a(i)}
            auto lhs = composed(even.map, odd.map);
            auto rhs = composite_bond(X, z.alpha[(std::size_t)i + 1],
                                                z.alpha[(std::size_t)i]);
            if (lhs != rhs) return fail(2 * i + 2, "composite is not the X subchain bond");
            // V_{2i} o V_{2i+1} : Y_{b(i+1)} -> Y_{b(i)}
            auto lhs2 = composed(next_odd.map, even.map);
            auto rhs2 = composite_bond(Y, z.beta[(std::size_t)i + 1],
                                                 z.beta[(std::size_t)i]);
            if (lhs2 != rhs2) return fail(2 * i + 3, "composite is not the Y subchain bond");
        } else {
            auto lhs = composed(odd.map, even.map);
            auto rhs = composite_bond(X, z.alpha[(std::size_t)i],
                                                z.alpha[(std::size_t)i + 1]);
            if (lhs != rhs) return fail(2 * i + 2, "composite is not the X subchain bond");
            auto lhs2 = composed(even.map, next_odd.map);
            auto rhs2 = composite_bond(Y, z.beta[(std::size_t)i],
                                                 z.beta[(std::size_t)i + 1]);
            if (lhs2 != rhs2) return fail(2 * i + 3, "composite is not the Y subchain bond");
        }
    }
    return out;
}

Chain zigzag_chain(const ZigZag& z, const Chain& X, const Chain& Y) {
    const int m = (int)z.alpha.size();
    if (m == 0) throw malformed_error("empty zig-zag");
    Chain c;
    c.flavor = z.flavor;
    c.lo = 1;
    c.hi = 2 * m - 1;
    // position p holds Z_{p+1}; for D/D+ bond p is V_{p+1} upward, for D- the
    // same V read as the step from position p+1 down to p
    for (int i = 0; i < m; ++i) {
        c.levels.push_back(X.level_at_extended(z.alpha[(std::size_t)i]));
        if (i + 1 < m) c.levels.push_back(Y.level_at_extended(z.beta[(std::size_t)i]));
    }
    for (std::size_t k = 0; k + 1 < (std::size_t)(2 * m - 1); ++k) c.bonds.push_back(z.v[k].map);
    bool coarse_single = c.levels[(std::size_t)c.coarse_pos()].size() == 1;
    if (c.coarse_is_up()) c.stabilized_above = coarse_single;
    else c.stabilized_below = coarse_single;
    auto verdict = validate_chain(c);
    if (!verdict.valid) throw contract_error("zig-zag does not assemble into a chain: " + verdict.detail);
    return c;
}

InducedThreadMap induced_fZ(const ZigZag& z, const Chain& X, const Chain& Y) {
    auto verdict = verify_zigzag(z, X, Y);
    if (!verdict.ok) throw malformed_error("zig-zag does not verify: " + verdict.detail);
    const int m = (int)z.alpha.size();
    const bool dm = z.flavor == Flavor::Dminus;

    InducedThreadMap out;
    IndexMap am{z.dom_lo, z.alpha};
    out.sub_from = subchain_extended(X, am);
    if (dm) {
        if (m < 2) throw malformed_error("D- induced map needs at least two levels");
        IndexMap bm{z.dom_lo, std::vector<int>(z.beta.begin(), z.beta.end() - 1)};
        out.sub_to = subchain_extended(Y, bm);
    } else {
        IndexMap bm{z.dom_lo, z.beta};
        out.sub_to = subchain_extended(Y, bm);
    }
    out.end_from = end_space(out.sub_from);
    out.end_to = end_space(out.sub_to);

    const int nt = (int)out.end_from.coords.size();
    for (int t = 0; t < nt; ++t) {
        std::vector<int> img((std::size_t)(dm ? m - 1 : m));
        for (int j = 0; j < m; ++j) {
            if (dm) {
                if (j + 1 < m)
                    img[(std::size_t)j] =
                        z.v[(std::size_t)(2 * j + 1)]
                            .map[(std::size_t)out.end_from.coords[(std::size_t)t][(std::size_t)j + 1]];
            } else {
                img[(std::size_t)j] =
                    z.v[(std::size_t)(2 * j)]
                        .map[(std::size_t)out.end_from.coords[(std::size_t)t][(std::size_t)j]];
            }
        }
        // the image coordinates must form a thread of the target subchain
        int fine_pos = out.sub_to.fine_pos();
        int key = img[(std::size_t)fine_pos];
        const auto& expect = out.end_to.coords[(std::size_t)key];
        for (std::size_t p = 0; p < img.size(); ++p)
            if (expect[p] != img[p])
                throw contract_error("induced image of a thread is not a thread");
        out.threads.push_back(key);
    }
    return out;
}

namespace {

// agreement-level distance of two coordinate sequences in a subchain;
// identical sequences score at the finest sampled scale
Rational agreement_distance(const Chain& sub, const std::vector<int>& a,
                            const std::vector<int>& b) {
    const int m = sub.count();
    if (sub.coarse_is_up()) {
        int p = 0;
        while (p < m && a[(std::size_t)p] != b[(std::size_t)p]) ++p;
        if (p == m) throw contract_error("threads never agree in a trivial chain");
        return Rational::pow2(sub.lo + p);
    }
    int p = m - 1;
    while (p >= 0 && a[(std::size_t)p] != b[(std::size_t)p]) --p;
    return Rational::pow2(-(sub.lo + p)); // p == -1 is the cap
}

} // namespace

DistortionReport check_fZ_distortion(const ZigZag& z, const Chain& X, const Chain& Y) {
    InducedThreadMap f = induced_fZ(z, X, Y);
    DistortionReport rep;
    rep.K = 2;
    switch (z.flavor) {
    case Flavor::D: rep.kind = DistortionKind::Bilipschitz; break;
    case Flavor::Dplus: rep.kind = DistortionKind::LargeScale; break;
    case Flavor::Dminus:
        rep.kind = DistortionKind::SmallScaleBilipschitz;
        rep.eps = Rational(1, 4);
        break;
    }
    const Rational two(2);
    const int n = (int)f.end_from.coords.size();
    for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
            Rational dx = f.end_from.space.dist(s, t);
            Rational dy = agreement_distance(f.sub_to, f.end_to.coords[(std::size_t)f.threads[(std::size_t)s]],
                                             f.end_to.coords[(std::size_t)f.threads[(std::size_t)t]]);
            bool bad = false;
            if (z.flavor == Flavor::D) {
                bad = dy > dx || dx > two * dy;
            } else if (z.flavor == Flavor::Dplus) {
                bad = dy > dx || (dx > two && dx > two * dy);
            } else {
                if (dx <= *rep.eps) bad = dx > dy || dy > two * dx;
            }
            if (bad) {
                rep.violation = PairWitness{s, t};
                return rep;
            }
        }
    }
    return rep;
}

} // namespace uzz
