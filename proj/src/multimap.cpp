#include "uzz/multimap.hpp"

#include <algorithm>

namespace uzz {

MultiMap MultiMap::make(UltraSpace source, UltraSpace target,
                        std::vector<std::pair<int, int>> pairs) {
    for (auto [a, b] : pairs) {
        if (a < 0 || a >= source.size() || b < 0 || b >= target.size())
            throw malformed_error("relation pair out of range");
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return MultiMap(std::move(source), std::move(target), std::move(pairs));
}

std::vector<int> MultiMap::image(const std::vector<int>& A) const {
    std::vector<char> in(src_.size(), 0);
    for (int a : A) {
        if (a < 0 || a >= src_.size()) throw malformed_error("image argument out of range");
        in[a] = 1;
    }
    std::vector<char> hit(tgt_.size(), 0);
    for (auto [a, b] : pairs_)
        if (in[a]) hit[b] = 1;
    std::vector<int> out;
    for (int b = 0; b < tgt_.size(); ++b)
        if (hit[b]) out.push_back(b);
    return out;
}

MultiMap MultiMap::inverse() const {
    std::vector<std::pair<int, int>> rev;
    rev.reserve(pairs_.size());
    for (auto [a, b] : pairs_) rev.emplace_back(b, a);
    return make(tgt_, src_, std::move(rev));
}

MultiMap MultiMap::compose_with(const MultiMap& psi) const {
    if (!(tgt_ == psi.src_))
        throw malformed_error("composition: middle spaces do not match");
    std::vector<std::pair<int, int>> out;
    for (auto [a, b] : pairs_)
        for (auto [c, d] : psi.pairs_)
            if (b == c) out.emplace_back(a, d);
    return make(src_, psi.tgt_, std::move(out));
}

bool MultiMap::total_on_source() const {
    std::vector<char> hit(src_.size(), 0);
    for (auto [a, b] : pairs_) hit[a] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

bool MultiMap::surjective() const {
    std::vector<char> hit(tgt_.size(), 0);
    for (auto [a, b] : pairs_) hit[b] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

bool MultiMap::single_valued() const {
    for (std::size_t i = 1; i < pairs_.size(); ++i)
        if (pairs_[i].first == pairs_[i - 1].first) return false;
    return true;
}

bool MultiMap::bijective() const {
    if (src_.size() != tgt_.size()) return false;
    if ((int)pairs_.size() != src_.size()) return false;
    return total_on_source() && surjective() && single_valued();
}

std::vector<int> MultiMap::as_function() const {
    if (!single_valued() || !total_on_source())
        throw malformed_error("relation is not a total single-valued function");
    std::vector<int> f(src_.size(), -1);
    for (auto [a, b] : pairs_) f[a] = b;
    return f;
}

Rational ExpansionProfile::eval(const Rational& t) const {
    if (t.is_negative()) throw domain_error("profile evaluated at a negative value");
    if (cap && t > *cap) throw domain_error("profile evaluated beyond its domain cap");
    for (const auto& [thr, val] : points)
        if (t <= thr) return val;
    return points.back().second;
}

Rational ExpansionProfile::value_at_scale(const Rational& t) const {
    if (t.is_negative()) throw domain_error("profile evaluated at a negative value");
    Rational out = points.front().second;
    for (const auto& [thr, val] : points) {
        if (thr <= t) out = val;
        else break;
    }
    return out;
}

namespace {

Rational set_diameter(const UltraSpace& u, const std::vector<int>& pts) {
    Rational d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = max(d, u.dist(pts[i], pts[j]));
    return d;
}

} // namespace

ExpansionProfile expansion_profile(const MultiMap& phi) {
    if (!phi.total_on_source()) throw malformed_error("expansion profile needs a total relation");
    ExpansionProfile rho;
    std::vector<Rational> breakpoints{Rational(0)};
    for (const auto& v : phi.source().distance_values()) breakpoints.push_back(v);
    for (const auto& t : breakpoints) {
        // any set of diameter <= t lies in a closed ball of radius t,
        // so the max over balls is the max over all such sets
        BallPartition p = ball_partition(phi.source(), t);
        Rational best = 0;
        for (const auto& block : p.blocks)
            best = max(best, set_diameter(phi.target(), phi.image(block)));
        rho.points.emplace_back(t, best);
    }
    return rho;
}

ExpansionProfile capped_for_uniform(const ExpansionProfile& rho) {
    const Rational half(1, 2);
    std::optional<Rational> cap;
    for (const auto& [t, v] : rho.points)
        if (t.is_positive() && v <= half) cap = t;
    if (!cap) throw domain_error("profile has no positive scale with value <= 1/2");
    ExpansionProfile out;
    out.cap = *cap;
    for (const auto& pt : rho.points)
        if (pt.first <= *cap) out.points.push_back(pt);
    return out;
}

ScaleMap scale_map(const ExpansionProfile& rho, Flavor flavor) {
    ScaleMap g;
    g.flavor = flavor;
    // scale range the profile genuinely varies over
    Rational tmin, tmax;
    {
        std::optional<Rational> first_pos;
        for (const auto& [t, v] : rho.points)
            if (t.is_positive() && !first_pos) first_pos = t;
        tmax = rho.points.back().first;
        tmin = first_pos ? *first_pos : tmax;
    }
    auto value_at = [&](int scale_exp) { return rho.value_at_scale(Rational::pow2(scale_exp)); };
    auto gamma_up = [&](int k) -> std::optional<int> {
        Rational v = value_at(k);
        if (v.is_zero()) return std::nullopt;
        return v.floor_log2() + 1;
    };
    auto gamma_down = [&](int n) -> std::optional<int> {
        Rational v = value_at(-n);
        if (v.is_zero()) return std::nullopt;
        return -v.ceil_log2(); // floor(-log2 v) exactly
    };

    if (flavor == Flavor::Dminus) {
        if (!rho.cap) throw domain_error("uniform scale map requires a capped profile");
        const Rational half(1, 2);
        for (const auto& [t, v] : rho.points)
            if (v > half) throw domain_error("uniform scale map requires values <= 1/2");
        int n0 = 1;
        if (*rho.cap < half) n0 = -(rho.cap->floor_log2()); // smallest n with 2^-n <= cap
        int nhi = n0;
        if (tmin.is_positive() && !tmin.is_zero()) {
            // saturate once 2^-n drops below the smallest positive breakpoint
            while (Rational::pow2(-nhi) >= tmin && nhi - n0 < 256) ++nhi;
        }
        g.lo = n0;
        for (int n = n0; n <= nhi; ++n) g.values.push_back(gamma_down(n));
    } else {
        int lo = tmin.is_positive() ? tmin.floor_log2() - 1 : 0;
        int hi = tmax.is_positive() ? tmax.ceil_log2() : 0;
        if (flavor == Flavor::Dplus) lo = std::max(lo, 1);
        if (hi < lo) hi = lo;
        g.lo = lo;
        for (int k = lo; k <= hi; ++k) g.values.push_back(gamma_up(k));
    }

    // contract sanity on the profile itself: rho(2^k) <= 2^gamma(k)
    for (int k = g.lo; k <= g.hi(); ++k) {
        auto v = g.eval(k);
        if (!v) continue;
        if (flavor == Flavor::Dminus) {
            if (value_at(-k) > Rational::pow2(-*v))
                throw contract_error("scale map does not bound the profile");
        } else {
            if (value_at(k) > Rational::pow2(*v))
                throw contract_error("scale map does not bound the profile");
        }
    }
    // nondecreasing by construction of floor-log2 over a nondecreasing profile
    return g;
}

ProfileTraits profile_traits(const ExpansionProfile& rho) {
    ProfileTraits t;
    t.single_valued = rho.points.front().second.is_zero();
    t.collapses_all = true;
    for (const auto& [x, v] : rho.points)
        if (!v.is_zero()) t.collapses_all = false;
    const Rational half(1, 2);
    for (const auto& [x, v] : rho.points)
        if (x.is_positive() && v <= half) t.uniform_cap = x;
    return t;
}

} // namespace uzz
