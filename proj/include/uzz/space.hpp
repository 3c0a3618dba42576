#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uzz/par.hpp"
#include "uzz/rational.hpp"

namespace uzz {

// A candidate distance matrix: symmetric, zero diagonal, nonnegative entries
// (enforced at construction), not yet known to be ultrametric.
struct DistMatrix {
    std::vector<std::string> labels;
    std::vector<Rational> d; // n*n row-major

    static DistMatrix make(std::vector<std::string> labels, std::vector<Rational> entries);

    int size() const { return (int)labels.size(); }
    const Rational& at(int i, int j) const { return d[(std::size_t)i * labels.size() + j]; }
    int index_of(const std::string& label) const; // -1 if absent
};

struct TripleWitness {
    int i = 0, j = 0, k = 0; // d(i,j) > max(d(i,k), d(k,j))
};

struct MetricVerdict {
    bool valid = false;
    std::optional<TripleWitness> witness;
};

// Accepts iff the strong triangle inequality holds on all triples; the scan
// equivalently certifies that every triangle has its two largest sides equal.
MetricVerdict verify_ultrametric(const DistMatrix& m, par::Exec exec = par::Exec::Auto);

// A verified finite ultrametric space. Immutable after construction.
class UltraSpace {
public:
    UltraSpace() = default; // the empty space

    // Verifies; throws domain_error with the witness if the matrix is not ultrametric.
    static UltraSpace from(DistMatrix m, par::Exec exec = par::Exec::Auto);

    int size() const { return m_.size(); }
    const std::string& label(int i) const { return m_.labels[i]; }
    const std::vector<std::string>& labels() const { return m_.labels; }
    const Rational& dist(int i, int j) const { return m_.at(i, j); }
    const DistMatrix& matrix() const { return m_; }
    int index_of(const std::string& label) const { return m_.index_of(label); }

    // Sorted distinct positive distance values.
    std::vector<Rational> distance_values() const;
    Rational diameter() const;
    // Smallest positive distance; nullopt for a one-point (or empty) space.
    std::optional<Rational> min_positive_distance() const;

    friend bool operator==(const UltraSpace& a, const UltraSpace& b) {
        return a.m_.labels == b.m_.labels && a.m_.d == b.m_.d;
    }

private:
    explicit UltraSpace(DistMatrix m) : m_(std::move(m)) {}
    DistMatrix m_;
};

// Partition into closed balls of the given radius: the equivalence classes of
// d(x,y) <= radius. Blocks are ordered by smallest member index.
struct BallPartition {
    Rational radius;
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of; // point index -> block index
};

BallPartition ball_partition(const UltraSpace& u, const Rational& radius);

// Nondecreasing step function given by right-closed steps: f(t) for t > 0 is
// the value at the smallest threshold >= t, and f(0) = 0. Thresholds must
// cover every value the function is applied to.
struct StepFunction {
    std::vector<std::pair<Rational, Rational>> steps; // (threshold, value), thresholds increasing

    void validate() const; // monotone thresholds/values, positive thresholds
    Rational eval(const Rational& t) const;
};

// (U, d) -> (U, f(d)). Requires f nondecreasing with f(t) > 0 on the occurring
// positive distances; the result is re-verified, not assumed.
UltraSpace transform_metric(const UltraSpace& u, const StepFunction& f);

// Strictly increasing integer values over the index window [lo, lo+len-1].
struct IndexMap {
    int lo = 0;
    std::vector<int> values;

    int hi() const { return lo + (int)values.size() - 1; }
    int at(int k) const { return values[(std::size_t)(k - lo)]; }
    bool strictly_increasing() const;
};

// d(gamma): every distance t in (2^g(k-1), 2^g(k)] becomes 2^k. The window must
// cover the positive distance range, else window_error.
UltraSpace rescale_by_gamma(const UltraSpace& u, const IndexMap& gamma);

// d(n_i): t >= 2^-n_1 becomes 1/2, t in (2^-n_{i+1}, 2^-n_i] becomes 2^-i.
// The sequence must reach below the smallest positive distance.
UltraSpace rescale_by_sequence(const UltraSpace& u, const std::vector<int>& n_seq);

enum class DistortionKind { Bilipschitz, SmallScaleBilipschitz, LargeScale, Additive };

struct PairWitness {
    int i = 0, j = 0;
};

struct DistortionReport {
    DistortionKind kind = DistortionKind::Bilipschitz;
    Rational K = 1;
    std::optional<Rational> eps;
    std::optional<Rational> C;
    std::optional<PairWitness> violation;

    bool clean() const { return !violation.has_value(); }
};

// Checks the inequality selected by `kind` on all point pairs of X under the
// total map f : X -> Y (point indices):
//   Bilipschitz            (1/K) dX <= dY <= K dX
//   SmallScaleBilipschitz  the same, restricted to pairs with dX < eps
//   LargeScale             dY <= dX, and dX <= K dY whenever dX > 2
//   Additive               dY <= dX <= dY + C
// Bilipschitz kinds require f injective. Missing constants -> malformed_error.
DistortionReport check_distortion(const UltraSpace& X, const UltraSpace& Y,
                                  const std::vector<int>& f, DistortionKind kind,
                                  const Rational& K, std::optional<Rational> eps,
                                  std::optional<Rational> C,
                                  par::Exec exec = par::Exec::Auto);

// Demonstration harness for the metric-transform characterization: for a
// matrix that is NOT ultrametric, finds a nondecreasing step function whose
// transform breaks the plain triangle inequality; returns nullopt when the
// matrix is ultrametric (no such function exists).
struct TransformCounterexample {
    StepFunction f;
    TripleWitness triangle; // f(d(i,j)) > f(d(i,k)) + f(d(k,j))
};

std::optional<TransformCounterexample> find_violating_transform(const DistMatrix& m);

} // namespace uzz
