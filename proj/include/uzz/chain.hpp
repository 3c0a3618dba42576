#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uzz/multimap.hpp"
#include "uzz/space.hpp"

namespace uzz {

// A finite window of partition levels with surjective bonds.
//
// Levels are stored by window index: position p holds the level at index
// lo + p. Bonds always run from the finer partition to the coarser one:
// for D and D+ that is bonds[p] : level p -> level p+1, for D- it is
// bonds[p] : level p+1 -> level p (radius 2^-n shrinks as n grows, so the
// high-index side is the fine side).
//
// The stabilization flags assert how the window extends to an infinite
// chain: the fine side extends by identity copies of the edge level, the
// coarse side by a constant singleton. The coarse-side flag therefore
// requires the coarse edge level to be a singleton.
struct Chain {
    Flavor flavor = Flavor::D;
    int lo = 0, hi = 0;
    std::vector<std::vector<std::string>> levels;
    std::vector<std::vector<int>> bonds;
    bool stabilized_below = false;
    bool stabilized_above = false;

    int count() const { return (int)levels.size(); }
    int pos_of(int index) const { return index - lo; }
    bool coarse_is_up() const { return flavor != Flavor::Dminus; }
    int fine_pos() const { return coarse_is_up() ? 0 : count() - 1; }
    int coarse_pos() const { return coarse_is_up() ? count() - 1 : 0; }
    bool fine_side_stabilized() const { return coarse_is_up() ? stabilized_below : stabilized_above; }
    bool coarse_side_stabilized() const { return coarse_is_up() ? stabilized_above : stabilized_below; }

    // the bond leaving the finer of two adjacent positions
    const std::vector<int>& step_from_fine(int fine_position) const {
        return coarse_is_up() ? bonds[(std::size_t)fine_position]
                              : bonds[(std::size_t)fine_position - 1];
    }
    int level_index(int pos, const std::string& label) const;

    // level at an arbitrary window index, using the stabilized extensions;
    // window_error when the index falls off an unstabilized side
    const std::vector<std::string>& level_at_extended(int index) const;
};

struct ChainVerdict {
    bool valid = true;
    std::string detail; // empty when valid
};

ChainVerdict validate_chain(const Chain& c);

// Ball-partition chain of a space on the flavor's dyadic grid. The window is
// canonical: the fine edge is the last discrete partition, the coarse edge
// the first single-block one (D- additionally requires diameter <= 1/2).
Chain chain_of_space(const UltraSpace& u, Flavor flavor);

// Levels sampled along alpha with composed bonds; alpha must map into the
// window (malformed_error otherwise). The subchain's window is alpha's domain.
Chain subchain(const Chain& c, const IndexMap& alpha);

// Like subchain, but alpha may run off the window on sides whose stabilized
// extension is declared; levels there are materialized from the extension.
Chain subchain_extended(const Chain& c, const IndexMap& alpha);

// The inclusion-induced map from the level at idx_fine to the level at
// idx_coarse (composed bonds; stabilized stretches contribute identities).
std::vector<int> composite_bond(const Chain& c, int idx_fine, int idx_coarse);

// Threads through the window (one per finest-level element) and their
// ultrametric: 2^(first agreement index) for D/D+, 2^-(last agreement index)
// for D-, with 2^-(lo-1) when two threads never agree in the window.
struct EndSpace {
    std::vector<std::vector<int>> coords; // coords[t][p]: element index at position p
    UltraSpace space;
};

EndSpace end_space(const Chain& c);

// The exact scale transfer between a chain's end space and a subchain's:
// level_map holds, for every parent index, the subchain index that realizes
// the distance (the fine-edge sentinel lo-1 encodes the D- cap). profile is
// the induced step function. Construction re-derives both end spaces and
// asserts the pointwise equality D' = profile(D).
struct ReindexProfile {
    int parent_lo = 0;
    std::vector<int> level_map;
    ExpansionProfile profile;

    int at(int parent_index) const { return level_map[(std::size_t)(parent_index - parent_lo)]; }
};

ReindexProfile reindex_profile(const Chain& c, const IndexMap& alpha);

// Level maps f_k : X_k -> Y_sigma(k) over a window of the source chain.
struct ChainMorphism {
    Flavor flavor = Flavor::D;
    int dom_lo = 0;                            // first source index carrying a map
    std::vector<int> sigma;                    // target index per source index
    std::vector<std::vector<int>> level_maps;  // per source index: element -> target element
};

struct MorphismVerdict {
    bool ok = true;
    std::optional<int> failing_index; // source index of the first bad rectangle
    std::string detail;
};

MorphismVerdict verify_morphism(const ChainMorphism& m, const Chain& from, const Chain& to);

// Induces the level maps of a single-valued total thread map under a scale
// map: f_k sends a ball to the unique target ball of radius 2^sigma(k)
// containing its image. contract_error (naming the ball) when the scale map
// is not actually a bound for the thread map.
ChainMorphism induce_morphism(const Chain& from, const Chain& to,
                              const std::vector<int>& thread_map, const ScaleMap& gamma);

// thread index of each source point of a chain_of_space chain (threads are
// keyed by the finest level, so this is the identity for discrete fine edges)
std::vector<int> point_threads(const Chain& c, const UltraSpace& u);

} // namespace uzz
