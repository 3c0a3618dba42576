// Benchmark: the serial reference kernels against the OpenMP ones on inputs
// big enough to matter. Results must agree bit for bit; timings are printed
// side by side with the speedup.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "uzz/par.hpp"
#include "uzz/space.hpp"

using namespace uzz;
using Clock = std::chrono::steady_clock;

namespace {

std::mt19937_64 rng(42);

int pick(int lo, int hi) { return (int)(lo + (long long)(rng() % (unsigned long long)(hi - lo + 1))); }

// merge dendrogram, same construction the tests use, sized for benching
DistMatrix random_ultrametric(int n) {
    std::vector<Rational> heights;
    for (int i = 0; i + 1 < n; ++i) heights.push_back(Rational(pick(1, 64), pick(1, 8)));
    std::sort(heights.begin(), heights.end());
    std::vector<std::vector<int>> members((std::size_t)n);
    std::vector<int> alive((std::size_t)n);
    for (int i = 0; i < n; ++i) {
        members[(std::size_t)i] = {i};
        alive[(std::size_t)i] = i;
    }
    std::vector<Rational> d((std::size_t)n * (std::size_t)n, Rational(0));
    std::vector<std::string> labels((std::size_t)n);
    for (int i = 0; i < n; ++i) labels[(std::size_t)i] = "p" + std::to_string(i);
    for (const Rational& h : heights) {
        int ai = pick(0, (int)alive.size() - 1);
        int bi = pick(0, (int)alive.size() - 2);
        if (bi >= ai) ++bi;
        int a = alive[(std::size_t)ai], b = alive[(std::size_t)bi];
        for (int x : members[(std::size_t)a])
            for (int y : members[(std::size_t)b]) {
                d[(std::size_t)x * (std::size_t)n + (std::size_t)y] = h;
                d[(std::size_t)y * (std::size_t)n + (std::size_t)x] = h;
            }
        members[(std::size_t)a].insert(members[(std::size_t)a].end(),
                                       members[(std::size_t)b].begin(),
                                       members[(std::size_t)b].end());
        alive.erase(alive.begin() + bi);
    }
    return DistMatrix::make(std::move(labels), std::move(d));
}

template <class F>
double time_of(F&& f) {
    auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-34s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n", name, serial,
                parallel, parallel > 0 ? serial / parallel : 0.0, equal ? "match" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    int n_triples = argc > 1 ? std::atoi(argv[1]) : 420;
    int n_pairs = argc > 2 ? std::atoi(argv[2]) : 2400;
    int n_iso = argc > 3 ? std::atoi(argv[3]) : 11;

    std::printf("openmp available: %s\n", par::parallel_available() ? "yes" : "no");

    {
        auto m = random_ultrametric(n_triples);
        std::optional<par::Triple> rs, rp;
        double ts = time_of([&] { rs = par::ultrametric_violation(m.size(), m.d.data(), par::Exec::Serial); });
        double tp = time_of([&] { rp = par::ultrametric_violation(m.size(), m.d.data(), par::Exec::Parallel); });
        report("triple scan (clean)", ts, tp, rs == rp);

        // plant one violation late in the scan order
        auto bad = m;
        std::size_t n = (std::size_t)m.size();
        bad.d[(n - 3) * n + (n - 1)] = bad.d[(n - 3) * n + (n - 1)] + Rational(1, 3);
        bad.d[(n - 1) * n + (n - 3)] = bad.d[(n - 3) * n + (n - 1)];
        double ts2 = time_of([&] { rs = par::ultrametric_violation(bad.size(), bad.d.data(), par::Exec::Serial); });
        double tp2 = time_of([&] { rp = par::ultrametric_violation(bad.size(), bad.d.data(), par::Exec::Parallel); });
        report("triple scan (planted witness)", ts2, tp2, rs == rp && rs.has_value());
    }

    {
        // full scan with the multiply-heavy distortion predicate and no witness
        auto m = random_ultrametric(n_pairs);
        Rational big = Rational(65, 1);
        Rational K(3, 2);
        auto pred = [&](int i, int j) { return K * m.at(i, j) > big * big; };
        std::optional<std::pair<int, int>> rs, rp;
        double ts = time_of([&] { rs = par::find_pair(m.size(), pred, par::Exec::Serial); });
        double tp = time_of([&] { rp = par::find_pair(m.size(), pred, par::Exec::Parallel); });
        report("pair scan (full sweep)", ts, tp, rs == rp && !rs.has_value());
    }

    {
        // an equilateral space is the worst case: every bijection preserves
        // distances, so the enumeration walks all n! of them
        std::size_t n = (std::size_t)n_iso;
        std::vector<Rational> d(n * n, Rational(1));
        for (std::size_t i = 0; i < n; ++i) d[i * n + i] = Rational(0);
        std::vector<std::vector<int>> rs, rp;
        double ts = time_of([&] { rs = par::all_isometries((int)n, d.data(), d.data(), par::Exec::Serial); });
        double tp = time_of([&] { rp = par::all_isometries((int)n, d.data(), d.data(), par::Exec::Parallel); });
        report("isometry enumeration (n!)", ts, tp, rs == rp && !rs.empty());

        // and the exhaustive refusal: one perturbed entry, no solution at all
        auto db = d;
        db[0 * n + 1] = Rational(2);
        db[1 * n + 0] = Rational(2);
        std::optional<std::vector<int>> fs, fp;
        double ts2 = time_of([&] { fs = par::find_isometry((int)n, d.data(), db.data(), par::Exec::Serial); });
        double tp2 = time_of([&] { fp = par::find_isometry((int)n, d.data(), db.data(), par::Exec::Parallel); });
        report("isometry search (no solution)", ts2, tp2, fs == fp && !fs.has_value());
    }
    return 0;
}
