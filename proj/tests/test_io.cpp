#include <doctest.h>

#include "support/gen.hpp"
#include "uzz/io.hpp"

using namespace uzz;

TEST_CASE("space files round trip") {
    auto u4 = gen::fixture_u4();
    auto j = io::space_to_json(u4.matrix());
    auto back = UltraSpace::from(io::space_from_json(j));
    CHECK(back == u4);

    // rationals parse from strings and integers
    auto j2 = io::json::parse(R"({"points":["a","b"],"dist":[["0","3/4"],["3/4",0]]})");
    auto m = io::space_from_json(j2);
    CHECK(m.at(0, 1) == Rational(3, 4));

    CHECK_THROWS_AS(io::space_from_json(io::json::parse(R"({"points":["a"]})")), malformed_error);
    CHECK_THROWS_AS(
        io::space_from_json(io::json::parse(R"({"points":["a","b"],"dist":[["0"],["0"]]})")),
        malformed_error);
}

TEST_CASE("chain files round trip for every flavor") {
    gen::Rng rng(7601);
    for (Flavor f : {Flavor::D, Flavor::Dplus, Flavor::Dminus}) {
        auto u = f == Flavor::Dminus
                     ? gen::random_space(rng, 5, gen::Palette::SmallMixed, 0, 0)
                     : gen::random_space(rng, 5, gen::Palette::Mixed, -2, 4);
        auto c = chain_of_space(u, f);
        auto back = io::chain_from_json(io::chain_to_json(c));
        CHECK(back.flavor == c.flavor);
        CHECK(back.lo == c.lo);
        CHECK(back.hi == c.hi);
        CHECK(back.levels == c.levels);
        CHECK(back.bonds == c.bonds);
        CHECK(back.stabilized_below == c.stabilized_below);
        CHECK(back.stabilized_above == c.stabilized_above);
    }
}

TEST_CASE("multimap, zigzag and tower files round trip") {
    gen::Rng rng(7602);
    auto u = gen::random_space(rng, 4, gen::Palette::Dyadic, -1, 3);
    auto v = gen::random_space(rng, 3, gen::Palette::Dyadic, -1, 3);
    auto mm = gen::random_total_multimap(rng, u, v);
    auto mm2 = io::multimap_from_file(io::multimap_to_json(mm));
    CHECK(mm2.pairs() == mm.pairs());
    CHECK(mm2.source() == mm.source());

    // distances >= 4 keep the fine level discrete, so threads are points
    auto w = gen::random_space(rng, 4, gen::Palette::Dyadic, 2, 5);
    auto copy = gen::relabeled_copy(rng, w);
    auto cx = chain_of_space(w, Flavor::Dplus);
    auto cy = chain_of_space(copy.space, Flavor::Dplus);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < w.size(); ++i) pairs.emplace_back(i, copy.perm[(std::size_t)i]);
    auto z = build_zigzag(cx, cy, pairs);
    auto z2 = io::zigzag_from_json(io::zigzag_to_json(z, cx, cy), cx, cy);
    CHECK(z2.alpha == z.alpha);
    CHECK(z2.beta == z.beta);
    REQUIRE(z2.v.size() == z.v.size());
    for (std::size_t k = 0; k < z.v.size(); ++k) {
        CHECK(z2.v[k].from_index == z.v[k].from_index);
        CHECK(z2.v[k].map == z.v[k].map);
    }
    CHECK(verify_zigzag(z2, cx, cy).ok);

    auto t3 = gen::fixture_t3();
    auto t2 = io::tower_from_json(io::tower_to_json(t3));
    REQUIRE(t2.size() == t3.size());
    for (int i = 0; i < t3.size(); ++i) {
        CHECK(t2.nodes[(std::size_t)i].id == t3.nodes[(std::size_t)i].id);
        CHECK(t2.nodes[(std::size_t)i].level == t3.nodes[(std::size_t)i].level);
        CHECK(t2.nodes[(std::size_t)i].succ == t3.nodes[(std::size_t)i].succ);
    }
}
