#include <doctest.h>

#include "support/gen.hpp"
#include "uzz/chain.hpp"

using namespace uzz;

namespace {

UltraSpace scaled(const UltraSpace& u, const Rational& factor) {
    std::vector<Rational> d;
    d.reserve((std::size_t)u.size() * (std::size_t)u.size());
    for (int i = 0; i < u.size(); ++i)
        for (int j = 0; j < u.size(); ++j) d.push_back(u.dist(i, j) * factor);
    return UltraSpace::from(DistMatrix::make(u.labels(), std::move(d)));
}

ScaleMap identity_gamma(Flavor f, int lo, int hi) {
    ScaleMap g;
    g.flavor = f;
    g.lo = lo;
    for (int k = lo; k <= hi; ++k) g.values.emplace_back(k);
    return g;
}

} // namespace

TEST_CASE("chain of the four-point fixture") {
    auto u4 = gen::fixture_u4();
    auto c = chain_of_space(u4, Flavor::D);
    CHECK(c.lo == -1);
    CHECK(c.hi == 3);
    REQUIRE(c.count() == 5);
    CHECK(c.levels[0].size() == 4);
    CHECK(c.levels[1] == std::vector<std::string>{"a", "c", "d"});
    CHECK(c.levels[2] == std::vector<std::string>{"a", "d"});
    CHECK(c.levels[3] == std::vector<std::string>{"a", "d"});
    CHECK(c.levels[4] == std::vector<std::string>{"a"});
    CHECK(c.stabilized_below);
    CHECK(c.stabilized_above);
    CHECK(validate_chain(c).valid);
}

TEST_CASE("one-point chains collapse to a single level") {
    auto one = UltraSpace::from(DistMatrix::make({"a"}, {Rational(0)}));
    for (Flavor f : {Flavor::D, Flavor::Dplus, Flavor::Dminus}) {
        auto c = chain_of_space(one, f);
        CHECK(c.count() == 1);
        CHECK(c.levels[0].size() == 1);
        CHECK(validate_chain(c).valid);
    }
}

TEST_CASE("D- chain mirrors the window over 2^-n") {
    auto u4 = gen::fixture_u4();
    auto small = scaled(u4, Rational(1, 32)); // distances 1/32, 1/16, 1/4
    auto c = chain_of_space(small, Flavor::Dminus);
    CHECK(c.lo == 1);
    CHECK(c.hi == 6);
    std::vector<std::size_t> sizes;
    for (const auto& lev : c.levels) sizes.push_back(lev.size());
    CHECK(sizes == std::vector<std::size_t>{1, 1, 2, 2, 3, 4});
    CHECK(validate_chain(c).valid);

    CHECK_THROWS_AS(chain_of_space(u4, Flavor::Dminus), domain_error);
}

TEST_CASE("subchains sample levels and compose bonds") {
    auto u4 = gen::fixture_u4();
    auto c = chain_of_space(u4, Flavor::D);

    IndexMap ident{-1, {-1, 0, 1, 2, 3}};
    auto same = subchain(c, ident);
    CHECK(same.levels == c.levels);
    CHECK(same.bonds == c.bonds);

    IndexMap out{-1, {-2, 0, 2}};
    CHECK_THROWS_AS(subchain(c, out), malformed_error);

    IndexMap three{0, {-1, 1, 3}};
    auto s = subchain(c, three);
    REQUIRE(s.count() == 3);
    CHECK(s.lo == 0);
    CHECK(s.levels[0].size() == 4);
    CHECK(s.levels[1] == std::vector<std::string>{"a", "d"});
    // two-step composite: a,b,c land in the ball labeled a, d stays
    CHECK(s.bonds[0] == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("end space of the fixture chain recovers the metric") {
    auto u4 = gen::fixture_u4();
    auto e = end_space(chain_of_space(u4, Flavor::D));
    REQUIRE(e.space.size() == 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(e.space.dist(i, j) == u4.dist(i, j));
}

TEST_CASE("end space distance rounds up to the next power of two") {
    std::vector<Rational> d{Rational(0), Rational(3, 4), Rational(3, 4), Rational(0)};
    auto u = UltraSpace::from(DistMatrix::make({"a", "b"}, std::move(d)));
    auto e = end_space(chain_of_space(u, Flavor::D));
    CHECK(e.space.dist(0, 1) == Rational(1));
    CHECK(u.dist(0, 1) <= e.space.dist(0, 1));
    CHECK(e.space.dist(0, 1) <= Rational(2) * u.dist(0, 1));
}

TEST_CASE("D- cap: threads that never agree sit at distance 1") {
    Chain c;
    c.flavor = Flavor::Dminus;
    c.lo = 1;
    c.hi = 2;
    c.levels = {{"u", "v"}, {"u1", "u2", "v1"}};
    c.bonds = {{0, 0, 1}};
    c.stabilized_above = true;
    REQUIRE(validate_chain(c).valid);
    auto e = end_space(c);
    CHECK(e.space.dist(0, 1) == Rational(1, 2)); // u1,u2 agree at n=1
    CHECK(e.space.dist(0, 2) == Rational(1));    // cap
}

TEST_CASE("reindexing profile is exact on the fixture") {
    auto u4 = gen::fixture_u4();
    auto c = chain_of_space(u4, Flavor::D);

    IndexMap ident{-1, {-1, 0, 1, 2, 3}};
    auto rp0 = reindex_profile(c, ident); // asserts exactness internally
    for (int z = -1; z <= 3; ++z) CHECK(rp0.at(z) == z);

    IndexMap three{0, {-1, 1, 3}};
    auto rp = reindex_profile(c, three);
    CHECK(rp.at(-1) == 0);
    CHECK(rp.at(0) == 1);
    CHECK(rp.at(1) == 1);
    CHECK(rp.at(2) == 2);
    CHECK(rp.at(3) == 2);
    CHECK(rp.profile.eval(Rational(1)) == Rational(2));
    CHECK(rp.profile.eval(Rational(8)) == Rational(4));
}

TEST_CASE("reindexing profiles on random chains of all flavors") {
    gen::Rng rng(7201);
    for (int it = 0; it < 60; ++it) {
        Flavor f = it % 3 == 0 ? Flavor::D : it % 3 == 1 ? Flavor::Dplus : Flavor::Dminus;
        auto u = f == Flavor::Dminus
                     ? gen::random_space(rng, gen::pick(rng, 2, 7), gen::Palette::SmallMixed, 0, 0)
                     : gen::random_space(rng, gen::pick(rng, 2, 7), gen::Palette::Mixed, -3, 4);
        auto c = chain_of_space(u, f);
        // random alpha sampling the fine edge; for D/D+ it must reach a
        // singleton level so the subchain has ends
        IndexMap alpha{f == Flavor::D ? 0 : 1, {}};
        if (c.coarse_is_up()) {
            alpha.values.push_back(c.lo);
            for (int k = c.lo + 1; k < c.hi; ++k)
                if (gen::pick(rng, 0, 1)) alpha.values.push_back(k);
            if (c.hi > c.lo) alpha.values.push_back(c.hi);
        } else {
            for (int k = c.lo; k < c.hi; ++k)
                if (gen::pick(rng, 0, 1)) alpha.values.push_back(k);
            alpha.values.push_back(c.hi); // the fine edge, always sampled
        }
        CHECK_NOTHROW(reindex_profile(c, alpha)); // the exactness check lives inside
    }
}

TEST_CASE("morphism verification and induction") {
    auto u4 = gen::fixture_u4();
    auto c = chain_of_space(u4, Flavor::D);

    // identity morphism
    ChainMorphism ident;
    ident.flavor = Flavor::D;
    ident.dom_lo = c.lo;
    for (int k = c.lo; k <= c.hi; ++k) {
        ident.sigma.push_back(k);
        std::vector<int> f((std::size_t)c.levels[(std::size_t)c.pos_of(k)].size());
        for (std::size_t e = 0; e < f.size(); ++e) f[e] = (int)e;
        ident.level_maps.push_back(std::move(f));
    }
    CHECK(verify_morphism(ident, c, c).ok);

    // perturb one level map
    auto broken = ident;
    broken.level_maps[1][0] = 2; // a-ball at index 0 rerouted to the d-ball
    auto verdict = verify_morphism(broken, c, c);
    REQUIRE(!verdict.ok);
    CHECK((*verdict.failing_index == -1 || *verdict.failing_index == 0));

    // induced identity equals the identity morphism
    std::vector<int> tid{0, 1, 2, 3};
    auto induced = induce_morphism(c, c, tid, identity_gamma(Flavor::D, -1, 3));
    CHECK(verify_morphism(induced, c, c).ok);
    CHECK(induced.sigma == ident.sigma);
    CHECK(induced.level_maps == ident.level_maps);
}

TEST_CASE("constant thread maps induce constant morphisms") {
    auto u4 = gen::fixture_u4();
    auto c = chain_of_space(u4, Flavor::D);
    std::vector<int> constant{0, 0, 0, 0};
    ScaleMap bottom;
    bottom.flavor = Flavor::D;
    bottom.lo = -1;
    for (int k = -1; k <= 3; ++k) bottom.values.emplace_back(std::nullopt);
    auto m = induce_morphism(c, c, constant, bottom);
    CHECK(verify_morphism(m, c, c).ok);
    for (const auto& f : m.level_maps)
        for (int v : f) CHECK(v == f.front());
}

TEST_CASE("induced morphisms agree with the thread map on every thread") {
    gen::Rng rng(7202);
    for (int it = 0; it < 40; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 2, 7), gen::Palette::Dyadic, -2, 4);
        auto copy = gen::relabeled_copy(rng, u);
        auto cx = chain_of_space(u, Flavor::D);
        auto cy = chain_of_space(copy.space, Flavor::D);
        auto ex = end_space(cx);
        auto ey = end_space(cy);

        // the permutation as a thread map (threads are keyed by points here)
        std::vector<int> tmap = copy.perm;
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < u.size(); ++i) pairs.emplace_back(i, tmap[(std::size_t)i]);
        auto phi = MultiMap::make(ex.space, ey.space, pairs);
        auto gamma = scale_map(expansion_profile(phi), Flavor::D);

        auto m = induce_morphism(cx, cy, tmap, gamma);
        CHECK(verify_morphism(m, cx, cy).ok);
        for (int t = 0; t < (int)ex.coords.size(); ++t) {
            for (int k = m.dom_lo; k <= cx.hi; ++k) {
                int e = ex.coords[(std::size_t)t][(std::size_t)cx.pos_of(k)];
                int img = m.level_maps[(std::size_t)(k - m.dom_lo)][(std::size_t)e];
                int expect = ey.coords[(std::size_t)tmap[(std::size_t)t]]
                                      [(std::size_t)cy.pos_of(m.sigma[(std::size_t)(k - m.dom_lo)])];
                CHECK(img == expect);
            }
        }
    }
}

TEST_CASE("end spaces sandwich the original metric") {
    gen::Rng rng(7203);
    for (int it = 0; it < 60; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 1, 12), gen::Palette::Mixed, -3, 4);
        auto e = end_space(chain_of_space(u, Flavor::D));
        REQUIRE(e.space.size() == u.size());
        for (int i = 0; i < u.size(); ++i)
            for (int j = i + 1; j < u.size(); ++j) {
                CHECK(u.dist(i, j) <= e.space.dist(i, j));
                CHECK(e.space.dist(i, j) <= Rational(2) * u.dist(i, j));
            }
    }
    for (int it = 0; it < 40; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 1, 10), gen::Palette::SmallMixed, 0, 0);
        auto e = end_space(chain_of_space(u, Flavor::Dminus));
        REQUIRE(e.space.size() == u.size());
        for (int i = 0; i < u.size(); ++i)
            for (int j = i + 1; j < u.size(); ++j) {
                CHECK(u.dist(i, j) <= e.space.dist(i, j));
                CHECK(e.space.dist(i, j) <= Rational(2) * u.dist(i, j));
            }
    }
}

TEST_CASE("the ball-membership relation onto the upward end space") {
    // relate each point to the thread of its radius-2 ball; the profile is 0
    // up to 2 and jumps to the next power of two above
    gen::Rng rng(7204);
    for (int it = 0; it < 30; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::Mixed, -2, 5);
        auto c = chain_of_space(u, Flavor::Dplus);
        auto e = end_space(c);
        auto fine = ball_partition(u, Rational::pow2(c.lo));
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < u.size(); ++x)
            for (std::size_t t = 0; t < e.coords.size(); ++t) {
                int rep = fine.blocks[t].front();
                if (u.dist(x, rep) <= Rational(2)) pairs.emplace_back(x, (int)t);
            }
        auto phi = MultiMap::make(u, e.space, std::move(pairs));
        auto rho = expansion_profile(phi);
        for (const auto& [t, v] : rho.points) {
            if (t <= Rational(2)) CHECK(v.is_zero());
            else CHECK(v == Rational::pow2(t.ceil_log2()));
        }
    }
}

TEST_CASE("morphisms on downward chains") {
    gen::Rng rng(7205);
    for (int it = 0; it < 20; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 2, 7), gen::Palette::SmallMixed, 0, 0);
        auto copy = gen::relabeled_copy(rng, u);
        auto cx = chain_of_space(u, Flavor::Dminus);
        auto cy = chain_of_space(copy.space, Flavor::Dminus);
        auto ex = end_space(cx);
        auto ey = end_space(cy);
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < u.size(); ++i) pairs.emplace_back(i, copy.perm[(std::size_t)i]);
        auto phi = MultiMap::make(ex.space, ey.space, pairs);
        auto gamma = scale_map(capped_for_uniform(expansion_profile(phi)), Flavor::Dminus);
        auto m = induce_morphism(cx, cy, copy.perm, gamma);
        CHECK(verify_morphism(m, cx, cy).ok);
    }
}

TEST_CASE("a scale map that is no bound fails containment with the ball named") {
    auto u4 = gen::fixture_u4();
    auto c = chain_of_space(u4, Flavor::D);
    ScaleMap tight;
    tight.flavor = Flavor::D;
    tight.lo = -1;
    for (int k = -1; k <= 3; ++k) tight.values.emplace_back(k - 1); // one below the identity
    std::vector<int> ident{0, 1, 2, 3};
    CHECK_THROWS_AS(induce_morphism(c, c, ident, tight), contract_error);
}

TEST_CASE("extension past an unstabilized edge is refused") {
    Chain c;
    c.flavor = Flavor::D;
    c.lo = 0;
    c.hi = 1;
    c.levels = {{"a", "b"}, {"a"}};
    c.bonds = {{0, 0}};
    c.stabilized_below = false; // a window cut out of something finer
    c.stabilized_above = true;
    REQUIRE(validate_chain(c).valid);
    CHECK_THROWS_AS(c.level_at_extended(-1), window_error);
    CHECK(c.level_at_extended(5).size() == 1);
}

TEST_CASE("single-thread chains reindex degenerately") {
    auto one = UltraSpace::from(DistMatrix::make({"a"}, {Rational(0)}));
    auto c = chain_of_space(one, Flavor::D);
    auto rp = reindex_profile(c, IndexMap{0, {c.lo}});
    CHECK(rp.profile.points.front() == std::pair<Rational, Rational>{Rational(0), Rational(0)});
}
