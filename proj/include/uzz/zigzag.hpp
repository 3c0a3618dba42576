#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uzz/chain.hpp"

namespace uzz {

// Interleaved sampling sequences produced by the flavor's recursion. dom_lo
// is the first index (0 for D, 1 for D+/D-); truncated marks a prefix cut
// short by a scale-map window instead of reaching the requested length.
struct Interleaving {
    Flavor flavor = Flavor::D;
    int dom_lo = 0;
    std::vector<int> alpha, beta;
    bool truncated = false;
};

// Runs the recursion for `length` entries:
//   D+:  a(1)=1, b(1)=gf(1);  a(i)=max(a+1, gb(b)),  b(i)=max(b+1, gf(a(i)))
//   D :  the same forward from a(0)=0, b(0)=gf(0), plus the backward clauses
//        b(i)=min(b(i+1)-1, max{k: gb(k)<=a(i+1)}), a(i)=min(a(i+1)-1, max{k: gf(k)<=b(i)})
//   D-:  a(1)=1, b(1)=min{n: gb(n)>=1};  a(i)=max(a+1, min{n: gf(n)>=b}), ...
// For D, `length` bounds the forward side; the backward side extends until the
// thresholds leave the scale-map windows.
Interleaving interleave(const ScaleMap& fwd, const ScaleMap& bwd, Flavor flavor, int length);

// First index whose entry breaks the interleaving inequalities, if any:
// D/D+: gf(a(i)) <= b(i) and gb(b(i)) <= a(i+1);  D-: gb(b(i)) >= a(i) and
// gf(a(i+1)) >= b(i), with collapsed scales comparing as -inf resp. +inf.
std::optional<int> interleaving_violation(const Interleaving& il, const ScaleMap& fwd,
                                          const ScaleMap& bwd);

struct LevelMap {
    int from_index = 0; // level index in the chain this map leaves
    std::vector<int> map;
};

// Alternating surjections over an interleaving. v[2i-2] is V_{2i-1} (between
// the i-th sampled levels), v[2i-1] is V_{2i} (the return map); for D/D+ the
// odd maps run X->Y, for D- they run Y->X per the flavor's diagram.
struct ZigZag {
    Flavor flavor = Flavor::D;
    int dom_lo = 0;
    std::vector<int> alpha, beta;
    bool truncated = false;
    std::vector<LevelMap> v;
};

// Builds the zig-zag certificate for a thread relation phi between the end
// spaces of X and Y (pairs of thread indices): expansion profiles both ways,
// scale maps, the interleaving, then each V by the unique-containing-ball
// rule. contract_error if some image fails containment, i.e. phi is not an
// equivalence of the flavor's kind on this window.
ZigZag build_zigzag(const Chain& X, const Chain& Y,
                    const std::vector<std::pair<int, int>>& phi_pairs);

struct ZigZagVerdict {
    bool ok = true;
    bool degenerate = false;          // too short to have any composite
    std::optional<int> failing_v;     // 1-based V index of the first failure
    std::string detail;
};

// Surjectivity of every V and equality of every 2-step composite with the
// corresponding subchain bond.
ZigZagVerdict verify_zigzag(const ZigZag& z, const Chain& X, const Chain& Y);

// The alternating levels of a verified zig-zag as a chain of its own.
Chain zigzag_chain(const ZigZag& z, const Chain& X, const Chain& Y);

// The induced map between the end spaces of the sampled subchains. For D-
// the image lives in the beta-subchain shortened by one level (its finest
// coordinate is produced by the last even V).
struct InducedThreadMap {
    Chain sub_from, sub_to;
    EndSpace end_from, end_to;
    std::vector<int> threads; // sub_from thread -> sub_to thread
};

InducedThreadMap induced_fZ(const ZigZag& z, const Chain& X, const Chain& Y);

// Distortion of the induced map, flavor by flavor (exact inequalities):
//   D :  DY <= DX <= 2 DY on all pairs           (reported as bilipschitz K=2)
//   D+:  DY <= DX, and DX <= 2 DY when DX > 2    (reported as large-scale K=2)
//   D-:  DX <= DY <= 2 DX when DX <= 1/4         (reported small-scale K=2, eps=1/4)
// Image distances are read off the coordinate sequences as agreement levels,
// so a collapsed pair scores at the finest sampled scale.
DistortionReport check_fZ_distortion(const ZigZag& z, const Chain& X, const Chain& Y);

} // namespace uzz
