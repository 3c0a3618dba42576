#pragma once

#include <random>
#include <string>
#include <vector>

#include "uzz/multimap.hpp"
#include "uzz/space.hpp"
#include "uzz/tower.hpp"

// Deterministic generators for the property suites. Everything is seeded
// explicitly so failures replay.
namespace gen {

using Rng = std::mt19937_64;

int pick(Rng& rng, int lo, int hi); // uniform in [lo, hi]

// Random ultrametric space built as a merge dendrogram: n-1 nondecreasing
// merge heights drawn from the palette, distance = height of the joining
// merge. Palette choice:
//   dyadic      heights are 2^e, e in [e_lo, e_hi]
//   mixed       dyadic and small non-dyadic rationals
// For diameter <= 1/2 pass e_hi <= -1 (dyadic) or use small_mixed.
enum class Palette { Dyadic, Mixed, SmallMixed };

uzz::UltraSpace random_space(Rng& rng, int n, Palette palette, int e_lo, int e_hi);

// A relabeled copy with the same distance matrix under a random permutation;
// returns the space and the permutation (point i of the original corresponds
// to point perm[i] of the copy).
struct RelabeledCopy {
    uzz::UltraSpace space;
    std::vector<int> perm;
};
RelabeledCopy relabeled_copy(Rng& rng, const uzz::UltraSpace& u);

// Random total multi-map (every source point has at least one image).
uzz::MultiMap random_total_multimap(Rng& rng, uzz::UltraSpace src, uzz::UltraSpace tgt);

// Random nondecreasing step function covering the space's distance values,
// with f(t) > 0 for t > 0.
uzz::StepFunction random_step_function(Rng& rng, const uzz::UltraSpace& u);

// Random metric that is NOT ultrametric: distinct points on the rational
// line (collinear triples always break the strong triangle inequality).
uzz::DistMatrix random_non_ultrametric_metric(Rng& rng, int n);

// Random tower: `levels` levels, at most max_nodes nodes, unique top,
// successor surjective level by level (so minimal nodes sit at level 1).
uzz::Tower random_tower(Rng& rng, int levels, int max_nodes);

// Random nondecreasing scale map on [lo, hi] (no collapse entries).
uzz::ScaleMap random_scale_map(Rng& rng, uzz::Flavor flavor, int lo, int hi);

// Fixtures used across suites.
uzz::UltraSpace fixture_u4();
uzz::Tower fixture_t3();

} // namespace gen
