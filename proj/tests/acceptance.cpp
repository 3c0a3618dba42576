// Acceptance suite: one line per criterion, exit code = number of failures.
// Every tolerance is exact rational equality or inequality; nothing is
// floating point and nothing is deferred to calibration.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "uzz/io.hpp"
#include "uzz/par.hpp"

using namespace uzz;

namespace {

std::string g_cli_path; // set from argv[1]

struct failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw failure(msg);
}

// point-level bijection -> thread pairs on the chains' end spaces
std::vector<std::pair<int, int>> thread_pairs(const Chain& cx, const UltraSpace& u,
                                              const Chain& cy, const UltraSpace& v,
                                              const std::vector<int>& point_map) {
    auto tx = point_threads(cx, u);
    auto ty = point_threads(cy, v);
    std::vector<std::pair<int, int>> out;
    for (int p = 0; p < u.size(); ++p)
        out.emplace_back(tx[(std::size_t)p], ty[(std::size_t)point_map[(std::size_t)p]]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void sandwich(const UltraSpace& u, const UltraSpace& e) {
    require(e.size() == u.size(), "end space must have one thread per point");
    for (int i = 0; i < u.size(); ++i)
        for (int j = i + 1; j < u.size(); ++j) {
            require(u.dist(i, j) <= e.dist(i, j), "lower sandwich bound failed");
            require(e.dist(i, j) <= Rational(2) * u.dist(i, j), "upper sandwich bound failed");
        }
}

// ---- criteria ---------------------------------------------------------------

void c1_end_sandwich() {
    gen::Rng rng(101);
    for (int it = 0; it < 500; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 1, 12), gen::Palette::Mixed, -3, 4);
        sandwich(u, end_space(chain_of_space(u, Flavor::D)).space);
    }
    for (int it = 0; it < 500; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 1, 12), gen::Palette::SmallMixed, 0, 0);
        require(u.diameter() <= Rational(1, 2), "generator bound");
        sandwich(u, end_space(chain_of_space(u, Flavor::Dminus)).space);
    }
}

void c2_profile_oracle() {
    gen::Rng rng(102);
    for (int it = 0; it < 200; ++it) {
        auto src = gen::random_space(rng, gen::pick(rng, 1, 8), gen::Palette::Mixed, -3, 4);
        auto tgt = gen::random_space(rng, gen::pick(rng, 1, 8), gen::Palette::Mixed, -3, 4);
        auto phi = gen::random_total_multimap(rng, src, tgt);
        auto fast = expansion_profile(phi);
        auto slow = oracle::subset_profile(phi);
        require(fast.points.size() == slow.points.size(), "breakpoint sets differ");
        for (std::size_t i = 0; i < fast.points.size(); ++i) {
            require(fast.points[i].first == slow.points[i].first, "breakpoint mismatch");
            require(fast.points[i].second == slow.points[i].second,
                    "ball profile differs from the subset oracle");
        }
    }
}

void c3_gamma_contract() {
    gen::Rng rng(103);
    // two-sided and upward grids on arbitrary multi-maps
    for (int it = 0; it < 150; ++it) {
        auto src = gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::Mixed, -3, 4);
        auto tgt = gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::Mixed, -3, 4);
        auto phi = gen::random_total_multimap(rng, src, tgt);
        auto rho = expansion_profile(phi);
        for (Flavor f : {Flavor::D, Flavor::Dplus}) {
            auto g = scale_map(rho, f);
            for (int k = g.lo - 2; k <= g.hi() + 2; ++k) {
                if (f == Flavor::Dplus && k < 1) continue;
                auto gk = g.eval(k);
                for (int x = 0; x < src.size(); ++x)
                    for (int y = x; y < src.size(); ++y) {
                        if (!(src.dist(x, y) <= Rational::pow2(k))) continue;
                        auto img = phi.image({x, y});
                        for (std::size_t i = 0; i < img.size(); ++i)
                            for (std::size_t j = i + 1; j < img.size(); ++j) {
                                if (gk)
                                    require(tgt.dist(img[i], img[j]) <= Rational::pow2(*gk),
                                            "scale contract failed");
                                else
                                    require(tgt.dist(img[i], img[j]).is_zero(),
                                            "collapsed scale with a spread image");
                            }
                    }
            }
        }
    }
    // downward grid on single-valued maps between small spaces
    for (int it = 0; it < 150; ++it) {
        auto src = gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::SmallMixed, 0, 0);
        auto tgt = gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::SmallMixed, 0, 0);
        std::vector<std::pair<int, int>> f;
        for (int a = 0; a < src.size(); ++a) f.emplace_back(a, gen::pick(rng, 0, tgt.size() - 1));
        auto phi = MultiMap::make(src, tgt, std::move(f));
        auto rho = capped_for_uniform(expansion_profile(phi));
        auto g = scale_map(rho, Flavor::Dminus);
        for (int n = g.lo; n <= g.hi() + 2; ++n) {
            auto gn = g.eval(n);
            for (int x = 0; x < src.size(); ++x)
                for (int y = x; y < src.size(); ++y) {
                    if (!(src.dist(x, y) <= Rational::pow2(-n))) continue;
                    auto img = phi.image({x, y});
                    for (std::size_t i = 0; i < img.size(); ++i)
                        for (std::size_t j = i + 1; j < img.size(); ++j) {
                            if (gn)
                                require(tgt.dist(img[i], img[j]) <= Rational::pow2(-*gn),
                                        "downward scale contract failed");
                            else
                                require(tgt.dist(img[i], img[j]).is_zero(),
                                        "collapsed scale with a spread image");
                        }
                }
        }
    }
}

void c4_interleavings() {
    gen::Rng rng(104);
    for (Flavor f : {Flavor::D, Flavor::Dplus, Flavor::Dminus}) {
        for (int it = 0; it < 100; ++it) {
            int lo = f == Flavor::D ? gen::pick(rng, -6, 0) : 1;
            auto fwd = gen::random_scale_map(rng, f, lo, lo + gen::pick(rng, 6, 12));
            auto bwd = gen::random_scale_map(rng, f, lo, lo + gen::pick(rng, 6, 12));
            auto il = interleave(fwd, bwd, f, gen::pick(rng, 1, 10));
            require(!il.alpha.empty(), "interleaving produced nothing");
            require(!interleaving_violation(il, fwd, bwd).has_value(),
                    "interleaving inequality failed");
        }
    }
}

void one_roundtrip(gen::Rng& rng, Flavor f, int e_lo, int e_hi) {
    auto u = gen::random_space(rng, gen::pick(rng, 2, 6), gen::Palette::Dyadic, e_lo, e_hi);
    auto copy = gen::relabeled_copy(rng, u);
    // the brute-force oracle: lexicographically first distance-preserving bijection
    auto iso = par::find_isometry(u.size(), u.matrix().d.data(), copy.space.matrix().d.data());
    require(iso.has_value(), "equal-profile pair admits no isometry");
    auto cx = chain_of_space(u, f);
    auto cy = chain_of_space(copy.space, f);
    auto z = build_zigzag(cx, cy, thread_pairs(cx, u, cy, copy.space, *iso));
    auto verdict = verify_zigzag(z, cx, cy);
    require(verdict.ok, "zig-zag verification failed: " + verdict.detail);
    auto rep = check_fZ_distortion(z, cx, cy);
    require(rep.clean(), "induced-map distortion out of bounds");
}

void c5_zigzag_roundtrip() {
    gen::Rng rng(105);
    for (int it = 0; it < 100; ++it) {
        one_roundtrip(rng, Flavor::D, -3, 4);
        one_roundtrip(rng, Flavor::Dplus, -3, 4);
        one_roundtrip(rng, Flavor::Dminus, -8, -1);
    }
}

void c6_reindex_exact() {
    gen::Rng rng(106);
    for (int it = 0; it < 100; ++it) {
        Flavor f = it % 3 == 0 ? Flavor::D : it % 3 == 1 ? Flavor::Dplus : Flavor::Dminus;
        auto u = f == Flavor::Dminus
                     ? gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::SmallMixed, 0, 0)
                     : gen::random_space(rng, gen::pick(rng, 2, 8), gen::Palette::Mixed, -3, 4);
        auto c = chain_of_space(u, f);
        IndexMap alpha{f == Flavor::D ? 0 : 1, {}};
        if (c.coarse_is_up()) {
            alpha.values.push_back(c.lo);
            for (int k = c.lo + 1; k < c.hi; ++k)
                if (gen::pick(rng, 0, 1)) alpha.values.push_back(k);
            if (c.hi > c.lo) alpha.values.push_back(c.hi);
        } else {
            for (int k = c.lo; k < c.hi; ++k)
                if (gen::pick(rng, 0, 1)) alpha.values.push_back(k);
            alpha.values.push_back(c.hi);
        }
        auto rp = reindex_profile(c, alpha); // asserts D' = profile(D) internally
        // and once more from the outside, pair by pair
        auto sub = subchain(c, alpha);
        auto pe = end_space(c);
        auto se = end_space(sub);
        int sub_fine_idx = c.coarse_is_up() ? alpha.lo : alpha.hi();
        int parent_pos = c.pos_of(alpha.at(sub_fine_idx));
        for (int s = 0; s < (int)pe.coords.size(); ++s)
            for (int t = s + 1; t < (int)pe.coords.size(); ++t) {
                int es = pe.coords[(std::size_t)s][(std::size_t)parent_pos];
                int et = pe.coords[(std::size_t)t][(std::size_t)parent_pos];
                require(se.space.dist(es, et) == rp.profile.eval(pe.space.dist(s, t)),
                        "reindexed distance differs from the profile");
            }
    }
}

void c7_towers() {
    gen::Rng rng(107);
    for (int it = 0; it < 200; ++it) {
        auto t1 = gen::random_tower(rng, gen::pick(rng, 1, 6), 30);
        require(validate_tower(t1).ok(), "generator produced an invalid tower");
        auto base = base_space(t1); // verified ultrametric by construction
        auto c1 = chain_of_tower(t1);
        auto e = end_space(c1);
        require((int)e.coords.size() == base.size(), "threads must match the base");
        for (int i = 0; i < base.size(); ++i)
            for (int j = i + 1; j < base.size(); ++j) {
                int dt = (int)base.dist(i, j).num();
                require(e.space.dist(i, j) == Rational::pow2((dt + 2) / 2),
                        "base correspondence failed");
            }
        if (t1.top_level() < 2) continue;

        Tower t2 = t1;
        for (auto& n : t2.nodes) n.id = "c_" + n.id;
        auto c2 = chain_of_tower(t2);
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i < e.coords.size(); ++i) pairs.emplace_back((int)i, (int)i);
        auto z = build_zigzag(c1, c2, pairs);
        require(verify_zigzag(z, c1, c2).ok, "tower zig-zag failed to verify");
        auto adm = zigzag_to_admissible(z, t1, t2);
        require(adm.verdict.domain_is_lower, "assembled domain is not a lower set");
        for (int c = 0; c < 5; ++c)
            require(adm.verdict.condition[(std::size_t)c],
                    "admissibility condition " + std::to_string(c + 1) + " failed");

        // base restriction is a rough isometry with C = 2
        auto lv1 = adm.sub1.levels();
        auto lv2 = adm.sub2.levels();
        std::vector<int> base_map;
        for (int node : lv1.front()) {
            int img = -1;
            for (auto [a, b] : adm.phi)
                if (a == node) img = b;
            require(img != -1, "morphism misses a base node");
            base_map.push_back((int)(std::find(lv2.front().begin(), lv2.front().end(), img) -
                                     lv2.front().begin()));
        }
        require(check_base_rough_isometry(adm.sub1, adm.sub2, base_map).clean(),
                "base restriction is not a rough isometry with C = 2");
    }
}

void c8_transforms() {
    gen::Rng rng(108);
    for (int it = 0; it < 50; ++it) {
        auto u = gen::random_space(rng, gen::pick(rng, 2, 6), gen::Palette::Mixed, -3, 4);
        for (int k = 0; k < 50; ++k)
            transform_metric(u, gen::random_step_function(rng, u)); // re-verifies inside
        require(!find_violating_transform(u.matrix()).has_value(),
                "violating transform found for an ultrametric");
    }
    for (int it = 0; it < 50; ++it) {
        auto m = gen::random_non_ultrametric_metric(rng, gen::pick(rng, 3, 5));
        auto cex = find_violating_transform(m);
        require(cex.has_value(), "no violating transform found");
        Rational a = cex->f.eval(m.at(cex->triangle.i, cex->triangle.j));
        Rational b = cex->f.eval(m.at(cex->triangle.i, cex->triangle.k));
        Rational c = cex->f.eval(m.at(cex->triangle.k, cex->triangle.j));
        require(a > b + c, "reported transform does not violate the triangle inequality");
    }
}

int run_cli(const std::string& args, const std::string& stdout_file) {
    std::string cmd = "\"" + g_cli_path + "\" " + args + " > " + stdout_file + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    if (status == -1) throw failure("cannot run the CLI");
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void c9_cli_determinism() {
    require(!g_cli_path.empty(), "CLI path not supplied (argv[1])");
    // inputs
    auto u4 = gen::fixture_u4();
    io::write_file("acc_space.json", io::space_to_json(u4.matrix()).dump(2));
    io::write_file("acc_tower.json", io::tower_to_json(gen::fixture_t3()).dump(2));
    std::vector<std::pair<int, int>> ident;
    for (int i = 0; i < 4; ++i) ident.emplace_back(i, i);
    io::write_file("acc_map.json",
                   io::multimap_to_json(MultiMap::make(u4, u4, ident)).dump(2));

    const std::vector<std::pair<std::string, int>> runs = {
        {"check acc_space.json", 0},
        {"partition acc_space.json --radius 1", 0},
        {"chain acc_space.json --flavor D", 0},
        {"expansion acc_map.json", 0},
        {"gamma acc_map.json --flavor D+", 0},
        {"interleave acc_map.json --flavor D --length 4", 0},
        {"zigzag-build acc_map.json --flavor D", 0},
        {"tower-validate acc_tower.json", 0},
        {"tower-metric acc_tower.json", 0},
        {"dot acc_tower.json", 0},
        {"distortion acc_map.json --kind additive --C 2", 0},
    };
    for (const auto& [args, want] : runs) {
        int r1 = run_cli(args, "acc_out1.txt");
        int r2 = run_cli(args, "acc_out2.txt");
        require(r1 == want && r2 == want, "unexpected exit code for: " + args);
        require(slurp("acc_out1.txt") == slurp("acc_out2.txt"),
                "output differs across runs for: " + args);
        require(!slurp("acc_out1.txt").empty(), "empty report for: " + args);
    }

    // chain and dot through --out files, byte-compared
    require(run_cli("chain acc_space.json --flavor D --out acc_chain1.json", "acc_d1.txt") == 0,
            "chain emission failed");
    require(run_cli("chain acc_space.json --flavor D --out acc_chain2.json", "acc_d2.txt") == 0,
            "chain emission failed");
    require(slurp("acc_chain1.json") == slurp("acc_chain2.json"), "chain files differ");
    require(run_cli("dot acc_chain1.json --out acc_dot1.dot", "acc_d3.txt") == 0, "dot failed");
    require(run_cli("dot acc_chain1.json --out acc_dot2.dot", "acc_d4.txt") == 0, "dot failed");
    require(slurp("acc_dot1.dot") == slurp("acc_dot2.dot"), "dot files differ");

    // exit code contract: violations are 1, malformed input is 2
    io::write_file("acc_bad.json", R"({"points":["a","b","c"],
        "dist":[["0","1","2"],["1","0","1"],["2","1","0"]]})");
    require(run_cli("check acc_bad.json", "acc_out1.txt") == 1, "violation must exit 1");
    io::write_file("acc_junk.json", "{");
    require(run_cli("check acc_junk.json", "acc_out1.txt") == 2, "malformed input must exit 2");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    struct Criterion {
        std::string name;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {"end-space sandwich d <= D <= 2d (D and D-, 500 spaces each)", c1_end_sandwich},
        {"ball expansion profile equals the all-subsets oracle (200 maps)", c2_profile_oracle},
        {"scale-map contract on all pairs and window scales", c3_gamma_contract},
        {"interleaving inequalities (100 scale-map pairs per flavor)", c4_interleavings},
        {"zig-zag round trip and distortion bounds (100 pairs, 3 flavors)", c5_zigzag_roundtrip},
        {"subchain reindexing is pointwise exact (100 chain/alpha pairs)", c6_reindex_exact},
        {"tower suite: base metric, correspondence, admissibility, C=2 (200 towers)", c7_towers},
        {"metric-transform characterization (50 + 50 instances)", c8_transforms},
        {"CLI determinism and exit codes", c9_cli_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        std::string verdict = "PASS";
        std::string detail;
        try {
            criteria[i].run();
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        std::printf("[%zu/9] %s  %s (%.2f s)%s%s\n", i + 1, verdict.c_str(),
                    criteria[i].name.c_str(), (double)ms / 1000.0,
                    detail.empty() ? "" : " -- ", detail.c_str());
    }
    return failures;
}
