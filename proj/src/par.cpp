#include "uzz/par.hpp"

#include <algorithm>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace uzz::par {

bool parallel_available() {
#if defined(_OPENMP)
    return true;
#else
    return false;
#endif
}

Exec resolve(Exec e, std::size_t work) {
    if (e == Exec::Serial) return Exec::Serial;
    if (!parallel_available()) return Exec::Serial;
    if (e == Exec::Parallel) return Exec::Parallel;
    return work >= 32768 ? Exec::Parallel : Exec::Serial;
}

namespace {

// Orients an unordered triple {i,j,k}: returns the pair realizing the strict
// maximum side plus the third point, or nothing when the two largest sides tie.
std::optional<Triple> orient(int n, const Rational* d, int i, int j, int k) {
    const Rational& ij = d[(std::size_t)i * n + j];
    const Rational& ik = d[(std::size_t)i * n + k];
    const Rational& jk = d[(std::size_t)j * n + k];
    // two largest must be equal in an ultrametric triangle
    const Rational* lo = &ij;
    const Rational* mid = &ik;
    const Rational* hi = &jk;
    if (*mid < *lo) std::swap(lo, mid);
    if (*hi < *mid) { std::swap(mid, hi); if (*mid < *lo) std::swap(lo, mid); }
    if (*mid == *hi) return std::nullopt;
    if (hi == &ij) return Triple{i, j, k};
    if (hi == &ik) return Triple{i, k, j};
    return Triple{j, k, i};
}

std::optional<Triple> scan_serial(int n, const Rational* d) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                if (auto v = orient(n, d, i, j, k)) return v;
    return std::nullopt;
}

} // namespace

std::optional<Triple> ultrametric_violation(int n, const Rational* d, Exec exec) {
    const std::size_t work = (std::size_t)n * n * n / 6;
    if (resolve(exec, work) == Exec::Serial) return scan_serial(n, d);
#if defined(_OPENMP)
    // reduce to the smallest unordered (i,j,k); orientation is a function of the triple
    long besti = -1, bestj = -1, bestk = -1;
#pragma omp parallel
    {
        long li = -1, lj = -1, lk = -1;
#pragma omp for schedule(dynamic, 4) nowait
        for (int i = 0; i < n; ++i) {
            if (li != -1 && li < i) continue;
            for (int j = i + 1; j < n && (li == -1 || i < li || j <= lj); ++j) {
                for (int k = j + 1; k < n; ++k) {
                    if (orient(n, d, i, j, k)) {
                        if (li == -1 || std::make_tuple((long)i, (long)j, (long)k) <
                                            std::make_tuple(li, lj, lk)) {
                            li = i; lj = j; lk = k;
                        }
                        break;
                    }
                }
            }
        }
#pragma omp critical
        {
            if (li != -1 && (besti == -1 || std::make_tuple(li, lj, lk) <
                                                std::make_tuple(besti, bestj, bestk))) {
                besti = li; bestj = lj; bestk = lk;
            }
        }
    }
    if (besti == -1) return std::nullopt;
    return orient(n, d, (int)besti, (int)bestj, (int)bestk);
#else
    return scan_serial(n, d);
#endif
}

namespace {

// Backtracking over images in label order; emits permutations in lexicographic
// order, so the first completion is the lexicographic minimum.
template <class Sink>
bool isometry_search(int n, const Rational* dx, const Rational* dy, std::vector<int>& perm,
                     std::vector<char>& used, int depth, Sink&& sink) {
    if (depth == n) return sink(perm);
    for (int v = 0; v < n; ++v) {
        if (used[v]) continue;
        bool ok = true;
        for (int u = 0; u < depth && ok; ++u)
            ok = dx[(std::size_t)u * n + depth] == dy[(std::size_t)perm[u] * n + v];
        if (!ok) continue;
        perm[depth] = v;
        used[v] = 1;
        if (isometry_search(n, dx, dy, perm, used, depth + 1, sink)) return true;
        used[v] = 0;
    }
    return false;
}

} // namespace

std::optional<std::vector<int>> find_isometry(int n, const Rational* dx, const Rational* dy,
                                              Exec exec) {
    if (n == 0) return std::vector<int>{};
    bool parallel = resolve(exec, (std::size_t)1 << std::min(n, 40)) == Exec::Parallel;
    if (!parallel) {
        std::vector<int> perm(n);
        std::vector<char> used(n, 0);
        if (isometry_search(n, dx, dy, perm, used, 0, [](std::vector<int>&) { return true; }))
            return perm;
        return std::nullopt;
    }
    // one branch per image of point 0; the branch with the smallest completed
    // first coordinate wins, which is exactly the lexicographic minimum
    std::vector<std::optional<std::vector<int>>> found(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int v = 0; v < n; ++v) {
        std::vector<int> perm(n);
        std::vector<char> used(n, 0);
        perm[0] = v;
        used[v] = 1;
        if (isometry_search(n, dx, dy, perm, used, 1, [](std::vector<int>&) { return true; }))
            found[v] = perm;
    }
    for (int v = 0; v < n; ++v)
        if (found[v]) return found[v];
    return std::nullopt;
}

std::vector<std::vector<int>> all_isometries(int n, const Rational* dx, const Rational* dy,
                                             Exec exec) {
    std::vector<std::vector<int>> out;
    if (n == 0) { out.push_back({}); return out; }
    bool parallel = resolve(exec, (std::size_t)1 << std::min(n, 40)) == Exec::Parallel;
    if (!parallel) {
        std::vector<int> perm(n);
        std::vector<char> used(n, 0);
        isometry_search(n, dx, dy, perm, used, 0, [&](std::vector<int>& p) {
            out.push_back(p);
            return false; // keep enumerating
        });
        return out;
    }
    std::vector<std::vector<std::vector<int>>> buckets(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int v = 0; v < n; ++v) {
        std::vector<int> perm(n);
        std::vector<char> used(n, 0);
        perm[0] = v;
        used[v] = 1;
        isometry_search(n, dx, dy, perm, used, 1, [&](std::vector<int>& p) {
            buckets[v].push_back(p);
            return false;
        });
    }
    for (auto& b : buckets)
        for (auto& p : b) out.push_back(std::move(p));
    return out;
}

} // namespace uzz::par
