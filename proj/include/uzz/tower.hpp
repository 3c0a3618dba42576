#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uzz/chain.hpp"
#include "uzz/zigzag.hpp"

namespace uzz {

// A leveled partial order stored successor-up: every non-top node points to
// its unique cover one level above, so linearly ordered upper cones are
// structural. Levels are 1-based; the base is level 1.
struct TowerNode {
    std::string id;
    int level = 1;
    int succ = -1; // node index, -1 for the top
};

struct Tower {
    std::vector<TowerNode> nodes;

    int size() const { return (int)nodes.size(); }
    int index_of(const std::string& id) const;
    int top_level() const;
    std::vector<std::vector<int>> levels() const; // levels()[i] = node indices at level i+1
    // the chain of covers from a node up to the top, inclusive
    std::vector<int> up_chain(int node) const;
    int ancestor_at(int node, int level) const; // -1 if the node's level is above
};

// succ must raise the level by exactly one; anything else is a structural
// error (malformed_error), distinct from the four axiom verdicts below.
void check_tower_structure(const Tower& t);

struct TowerVerdict {
    // well-founded / pairwise sups (unique top) / linear upper cones / level counts
    std::array<bool, 4> condition{true, true, true, true};
    std::string detail;
    bool ok() const { return condition[0] && condition[1] && condition[2] && condition[3]; }
};

TowerVerdict validate_tower(const Tower& t);

// join of two nodes; exists for all pairs once validate_tower passes
int sup_node(const Tower& t, int a, int b);

// 2*lev(sup(x,y)) - lev(x) - lev(y); an ultrametric on the base
int path_metric(const Tower& t, int a, int b);

// ([T], d_T): base nodes with the path metric. Verified ultrametric.
UltraSpace base_space(const Tower& t);

// The D+ chain with levels L_i and the successor bonds.
Chain chain_of_tower(const Tower& t);

// Nodes at levels alpha(1..m) with composed successors, levels renumbered
// 1..m. Values above the top level materialize virtual singleton copies of
// the top (the finite stand-in for the chain's constant extension).
Tower subtower(const Tower& t, const IndexMap& alpha);

struct AdmissibleVerdict {
    bool domain_is_lower = true;               // precondition on A
    std::array<bool, 5> condition{true, true, true, true, true};
    std::string detail;
    bool ok() const {
        if (!domain_is_lower) return false;
        for (bool c : condition)
            if (!c) return false;
        return true;
    }
};

// phi: pairs (node of t1 in the domain A, node of t2). Checks the five
// admissibility conditions independently: level preservation, monotonicity,
// collisions only between nodes sharing a successor, lower image, and at
// most one image of max A.
AdmissibleVerdict verify_admissible(const Tower& t1, const Tower& t2,
                                    const std::vector<std::pair<int, int>>& phi);

struct AdmissibleMorphism {
    Tower sub1, sub2;
    std::vector<std::pair<int, int>> phi; // domain = all of sub1
    AdmissibleVerdict verdict;
};

// Assembles the level maps of a verified zig-zag between two tower chains
// into a morphism between the sampled subtowers and checks admissibility.
AdmissibleMorphism zigzag_to_admissible(const ZigZag& z, const Tower& t1, const Tower& t2);

// d2(f x, f y) <= d1(x, y) <= d2(f x, f y) + C on all base pairs, via the
// additive distortion checker. base_map sends base indices of t1 (in base
// order) to base indices of t2.
DistortionReport check_base_rough_isometry(const Tower& t1, const Tower& t2,
                                           const std::vector<int>& base_map,
                                           const Rational& C = Rational(2));

} // namespace uzz
