#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "uzz/rational.hpp"

// Data-parallel kernels for the hot scans: the O(n^3) triple scan behind
// metric verification, O(n^2) pair scans behind distortion checks, and the
// brute-force bijection searches used as oracles. Each kernel has a serial
// reference path and an OpenMP path producing identical results (violations
// are reduced to the lexicographically smallest witness, maxima are exact),
// so Exec::Serial is kept around as the reference implementation for tests
// and for the benchmark target.
namespace uzz::par {

enum class Exec { Auto, Serial, Parallel };

bool parallel_available();
// Auto resolves to Parallel only when OpenMP is compiled in and the problem
// is big enough to pay for the fork/join.
Exec resolve(Exec e, std::size_t work);

using Triple = std::array<int, 3>;

// First (lexicographic) oriented triple (i,j,k) with d(i,j) > max(d(i,k), d(k,j)),
// scanning unordered triples and orienting the witness at the strict-max side.
// Equivalent to "some triangle does not have its two largest sides equal".
std::optional<Triple> ultrametric_violation(int n, const Rational* d, Exec exec = Exec::Auto);

// First (lexicographic) pair i<j with bad(i,j). Pred must be pure.
template <class Pred>
std::optional<std::pair<int, int>> find_pair(int n, Pred&& bad, Exec exec = Exec::Auto);

// Lexicographically first bijection p with dy[p(i)][p(j)] == dx[i][j] for all i,j,
// or all of them sorted. n is the common point count of both matrices.
std::optional<std::vector<int>> find_isometry(int n, const Rational* dx, const Rational* dy,
                                              Exec exec = Exec::Auto);
std::vector<std::vector<int>> all_isometries(int n, const Rational* dx, const Rational* dy,
                                             Exec exec = Exec::Auto);

namespace detail {

template <class Pred>
std::optional<std::pair<int, int>> find_pair_serial(int n, Pred& bad) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (bad(i, j)) return std::make_pair(i, j);
    return std::nullopt;
}

} // namespace detail

template <class Pred>
std::optional<std::pair<int, int>> find_pair(int n, Pred&& bad, Exec exec) {
    const std::size_t work = (std::size_t)n * (std::size_t)(n > 0 ? n - 1 : 0) / 2;
    if (resolve(exec, work) == Exec::Serial) return detail::find_pair_serial(n, bad);
    long best = -1; // flattened i*n+j of the smallest witness
#if defined(_OPENMP)
#pragma omp parallel
    {
        long local = -1;
#pragma omp for schedule(static) nowait
        for (int i = 0; i < n; ++i) {
            if (local != -1 && local < (long)i * n) continue;
            for (int j = i + 1; j < n; ++j) {
                if (bad(i, j)) { local = (long)i * n + j; break; }
            }
        }
#pragma omp critical
        if (local != -1 && (best == -1 || local < best)) best = local;
    }
#else
    return detail::find_pair_serial(n, bad);
#endif
    if (best == -1) return std::nullopt;
    return std::make_pair((int)(best / n), (int)(best % n));
}

} // namespace uzz::par
