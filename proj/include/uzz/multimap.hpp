#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "uzz/space.hpp"

namespace uzz {

// A relation between two spaces: any set of (source point, target point)
// pairs. Totality/surjectivity are properties, not type invariants.
class MultiMap {
public:
    static MultiMap make(UltraSpace source, UltraSpace target,
                         std::vector<std::pair<int, int>> pairs);

    const UltraSpace& source() const { return src_; }
    const UltraSpace& target() const { return tgt_; }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

    // {y : exists a in A with (a,y) in the relation}; A holds point indices.
    std::vector<int> image(const std::vector<int>& A) const;

    MultiMap inverse() const;
    // psi o this; requires target() == psi.source() structurally.
    MultiMap compose_with(const MultiMap& psi) const;

    bool total_on_source() const;
    bool surjective() const;
    bool single_valued() const;
    bool bijective() const; // graph of a bijective single-valued function

    // For a single-valued total relation: the function as a vector.
    std::vector<int> as_function() const;

private:
    MultiMap(UltraSpace s, UltraSpace t, std::vector<std::pair<int, int>> p)
        : src_(std::move(s)), tgt_(std::move(t)), pairs_(std::move(p)) {}
    UltraSpace src_, tgt_;
    std::vector<std::pair<int, int>> pairs_; // sorted, unique
};

// Diameter expansion bound as a step list: rho at a breakpoint t is the exact
// max over closed source balls of radius t of the image diameter. eval() uses
// right-closed steps (value at the smallest breakpoint >= t); value_at_scale()
// is the exact ball semantics (value at the largest breakpoint <= t), which is
// what the dyadic-scale constructions consume. Both agree at breakpoints.
struct ExpansionProfile {
    std::vector<std::pair<Rational, Rational>> points; // includes t = 0
    std::optional<Rational> cap;                       // domain [0, cap] when set

    Rational eval(const Rational& t) const;
    Rational value_at_scale(const Rational& t) const;
    Rational last_value() const { return points.back().second; }
};

// The minimal profile of a total multi-map, breakpoints at 0 plus the
// source's distinct distance values.
ExpansionProfile expansion_profile(const MultiMap& phi);

// Restricts the profile to a domain [0,S] with values <= 1/2: S is the largest
// breakpoint whose value is <= 1/2. domain_error if only t = 0 qualifies.
ExpansionProfile capped_for_uniform(const ExpansionProfile& rho);

enum class Flavor { D, Dplus, Dminus };

// Integer scale transfer derived from a profile:
//   D / D+ :  k -> floor(log2 rho(2^k)) + 1   so  rho(2^k) <= 2^gamma(k)
//   D-     :  n -> floor(-log2 rho(2^-n))     so  rho(2^-n) <= 2^-gamma(n)
// A collapsed scale (rho = 0 there) is the nullopt sentinel; it compares as
// -infinity for D/D+ and +infinity for D-. Values saturate outside the window,
// so eval() clamps.
struct ScaleMap {
    Flavor flavor = Flavor::D;
    int lo = 0;
    std::vector<std::optional<int>> values;

    int hi() const { return lo + (int)values.size() - 1; }
    std::optional<int> eval(int k) const {
        if (values.empty()) return std::nullopt;
        if (k < lo) k = lo;
        if (k > hi()) k = hi();
        return values[(std::size_t)(k - lo)];
    }
    // eval(k) <= b / >= b with the flavor's collapse semantics
    bool le_at(int k, int b) const {
        auto v = eval(k);
        if (!v) return flavor != Flavor::Dminus;
        return *v <= b;
    }
    bool ge_at(int k, int b) const {
        auto v = eval(k);
        if (!v) return flavor == Flavor::Dminus;
        return *v >= b;
    }
};

// Window chosen to cover the profile's scale range (it saturates outside).
// For D- the window starts at n_0, the smallest n with 2^-n <= cap; requires a
// capped profile (see capped_for_uniform).
ScaleMap scale_map(const ExpansionProfile& rho, Flavor flavor);

// Window-relative classification facts about a profile; never an absolute
// claim about the (finite) spaces.
struct ProfileTraits {
    bool single_valued = false;   // rho(0) == 0
    bool collapses_all = false;   // rho identically 0
    std::optional<Rational> uniform_cap; // largest breakpoint with value <= 1/2
};

ProfileTraits profile_traits(const ExpansionProfile& rho);

} // namespace uzz
