#pragma once

#include "uzz/multimap.hpp"

// Independent oracles kept away from the library's implementation paths.
namespace oracle {

// Expansion profile by brute force over ALL nonempty subsets of the source
// (not just balls): value at breakpoint t is max{diam(image(A)) : diam(A) <= t}.
// Breakpoints are 0 plus the source's distinct distances, like the library's.
// Exponential; guard at 16 points.
uzz::ExpansionProfile subset_profile(const uzz::MultiMap& phi);

} // namespace oracle
