#include "uzz/space.hpp"

#include <algorithm>
#include <set>

namespace uzz {

DistMatrix DistMatrix::make(std::vector<std::string> labels, std::vector<Rational> entries) {
    const std::size_t n = labels.size();
    if (entries.size() != n * n) throw malformed_error("distance matrix is not n x n");
    {
        std::set<std::string> seen(labels.begin(), labels.end());
        if (seen.size() != n) throw malformed_error("duplicate point labels");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!entries[i * n + i].is_zero())
            throw malformed_error("nonzero diagonal at " + labels[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (entries[i * n + j] != entries[j * n + i])
                throw malformed_error("asymmetric matrix at " + labels[i] + "," + labels[j]);
            if (entries[i * n + j].is_negative())
                throw malformed_error("negative distance at " + labels[i] + "," + labels[j]);
        }
    }
    DistMatrix m;
    m.labels = std::move(labels);
    m.d = std::move(entries);
    return m;
}

int DistMatrix::index_of(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (labels[i] == label) return i;
    return -1;
}

MetricVerdict verify_ultrametric(const DistMatrix& m, par::Exec exec) {
    MetricVerdict v;
    auto w = par::ultrametric_violation(m.size(), m.d.data(), exec);
    if (w) {
        v.valid = false;
        v.witness = TripleWitness{(*w)[0], (*w)[1], (*w)[2]};
    } else {
        v.valid = true;
    }
    return v;
}

UltraSpace UltraSpace::from(DistMatrix m, par::Exec exec) {
    for (int i = 0; i < m.size(); ++i)
        for (int j = i + 1; j < m.size(); ++j)
            if (m.at(i, j).is_zero())
                throw domain_error("zero distance between distinct points " + m.labels[i] +
                                   "," + m.labels[j]);
    auto verdict = verify_ultrametric(m, exec);
    if (!verdict.valid) {
        const auto& w = *verdict.witness;
        throw domain_error("not an ultrametric: d(" + m.labels[w.i] + "," + m.labels[w.j] +
                           ") > max of the other sides via " + m.labels[w.k]);
    }
    return UltraSpace(std::move(m));
}

std::vector<Rational> UltraSpace::distance_values() const {
    std::vector<Rational> vals;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j) vals.push_back(dist(i, j));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

Rational UltraSpace::diameter() const {
    Rational d = 0;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j) d = max(d, dist(i, j));
    return d;
}

std::optional<Rational> UltraSpace::min_positive_distance() const {
    std::optional<Rational> out;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            if (!out || dist(i, j) < *out) out = dist(i, j);
    return out;
}

BallPartition ball_partition(const UltraSpace& u, const Rational& radius) {
    if (radius.is_negative()) throw malformed_error("negative ball radius");
    BallPartition p;
    p.radius = radius;
    p.block_of.assign(u.size(), -1);
    for (int i = 0; i < u.size(); ++i) {
        if (p.block_of[i] != -1) continue;
        int b = (int)p.blocks.size();
        p.blocks.emplace_back();
        // d(i,.) <= r is an equivalence relation because d is ultrametric
        for (int j = i; j < u.size(); ++j) {
            if (p.block_of[j] == -1 && u.dist(i, j) <= radius) {
                p.block_of[j] = b;
                p.blocks[b].push_back(j);
            }
        }
    }
    return p;
}

void StepFunction::validate() const {
    if (steps.empty()) throw malformed_error("empty step function");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!steps[i].first.is_positive())
            throw malformed_error("step thresholds must be positive");
        if (i > 0) {
            if (!(steps[i - 1].first < steps[i].first))
                throw malformed_error("step thresholds must be strictly increasing");
            if (steps[i].second < steps[i - 1].second)
                throw malformed_error("step function is not nondecreasing");
        }
    }
}

Rational StepFunction::eval(const Rational& t) const {
    if (t.is_negative()) throw domain_error("step function of a negative value");
    if (t.is_zero()) return Rational(0);
    for (const auto& [thr, val] : steps)
        if (t <= thr) return val;
    throw window_error("value " + t.str() + " beyond the step function's last threshold");
}

UltraSpace transform_metric(const UltraSpace& u, const StepFunction& f) {
    f.validate();
    const int n = u.size();
    std::vector<Rational> d((std::size_t)n * n, Rational(0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Rational v = f.eval(u.dist(i, j));
            if (!v.is_positive())
                throw malformed_error("transform maps positive distance " + u.dist(i, j).str() +
                                      " to a non-positive value");
            d[(std::size_t)i * n + j] = v;
            d[(std::size_t)j * n + i] = v;
        }
    }
    // guaranteed ultrametric for nondecreasing f; UltraSpace::from re-checks it
    return UltraSpace::from(DistMatrix::make(u.labels(), std::move(d)));
}

bool IndexMap::strictly_increasing() const {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1]) return false;
    return true;
}

UltraSpace rescale_by_gamma(const UltraSpace& u, const IndexMap& gamma) {
    if (gamma.values.empty()) throw window_error("empty gamma window");
    if (!gamma.strictly_increasing()) throw malformed_error("gamma must be strictly increasing");
    auto vals = u.distance_values();
    if (vals.empty()) return u; // nothing to rescale
    if (gamma.values.size() < 2 || vals.back() > Rational::pow2(gamma.at(gamma.hi())) ||
        !(Rational::pow2(gamma.at(gamma.lo)) < vals.front()))
        throw window_error("gamma window does not cover the distance range");
    StepFunction f;
    // t in (2^g(k-1), 2^g(k)] -> 2^k
    for (int k = gamma.lo + 1; k <= gamma.hi(); ++k)
        f.steps.emplace_back(Rational::pow2(gamma.at(k)), Rational::pow2(k));
    return transform_metric(u, f);
}

UltraSpace rescale_by_sequence(const UltraSpace& u, const std::vector<int>& n_seq) {
    if (n_seq.empty()) throw window_error("empty rescaling sequence");
    for (std::size_t i = 0; i < n_seq.size(); ++i) {
        if (n_seq[i] <= 0) throw malformed_error("rescaling sequence must be positive");
        if (i > 0 && n_seq[i] <= n_seq[i - 1])
            throw malformed_error("rescaling sequence must be strictly increasing");
    }
    auto mind = u.min_positive_distance();
    if (!mind) return u; // nothing to rescale
    if (!(Rational::pow2(-n_seq.back()) < *mind))
        throw window_error("rescaling sequence too short for this space");
    StepFunction f;
    // t in (2^-n_{i+1}, 2^-n_i] -> 2^-i  (1-based i), plus t >= 2^-n_1 -> 1/2
    for (std::size_t i = n_seq.size(); i-- > 1;)
        f.steps.emplace_back(Rational::pow2(-n_seq[i - 1]), Rational::pow2(-(int)i));
    Rational top = max(u.diameter(), Rational::pow2(-n_seq.front()));
    if (f.steps.empty() || f.steps.back().first < top)
        f.steps.emplace_back(top, Rational(1, 2)); // the t >= 2^-n_1 clause
    return transform_metric(u, f);
}

DistortionReport check_distortion(const UltraSpace& X, const UltraSpace& Y,
                                  const std::vector<int>& f, DistortionKind kind,
                                  const Rational& K, std::optional<Rational> eps,
                                  std::optional<Rational> C, par::Exec exec) {
    if ((int)f.size() != X.size()) throw malformed_error("map is not total on the source");
    for (int v : f)
        if (v < 0 || v >= Y.size()) throw malformed_error("map image out of range");
    if (kind == DistortionKind::SmallScaleBilipschitz && !eps)
        throw malformed_error("small-scale check requires eps");
    if (kind == DistortionKind::Additive && !C)
        throw malformed_error("additive check requires C");
    if (!K.is_positive()) throw malformed_error("K must be positive");
    if (kind == DistortionKind::Bilipschitz || kind == DistortionKind::SmallScaleBilipschitz) {
        std::vector<char> hit(Y.size(), 0);
        for (int v : f) {
            if (hit[v]) throw malformed_error("bi-Lipschitz check requires an injective map");
            hit[v] = 1;
        }
    }

    DistortionReport rep;
    rep.kind = kind;
    rep.K = K;
    rep.eps = eps;
    rep.C = C;
    const Rational two(2);
    auto bad = [&](int i, int j) {
        const Rational& dx = X.dist(i, j);
        const Rational dy = Y.dist(f[i], f[j]);
        switch (kind) {
        case DistortionKind::Bilipschitz:
            return dx > K * dy || dy > K * dx;
        case DistortionKind::SmallScaleBilipschitz:
            if (!(dx < *eps)) return false;
            return dx > K * dy || dy > K * dx;
        case DistortionKind::LargeScale:
            if (dy > dx) return true;
            return dx > two && dx > K * dy;
        case DistortionKind::Additive:
            return dy > dx || dx > dy + *C;
        }
        return false;
    };
    if (auto w = par::find_pair(X.size(), bad, exec)) rep.violation = PairWitness{w->first, w->second};
    return rep;
}

std::optional<TransformCounterexample> find_violating_transform(const DistMatrix& m) {
    const int n = m.size();
    std::vector<Rational> vals;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) vals.push_back(m.at(i, j));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.size() < 2) return std::nullopt;

    // two-level step functions over the occurring values: low value on
    // (0, vals[s]], high value above; scan splits and a few value pairs
    const std::pair<std::int64_t, std::int64_t> shapes[] = {{1, 3}, {1, 4}, {2, 5}};
    for (std::size_t s = 0; s + 1 < vals.size(); ++s) {
        for (auto [lo, hi] : shapes) {
            StepFunction f;
            f.steps.emplace_back(vals[s], Rational(lo));
            f.steps.emplace_back(vals.back(), Rational(hi));
            // look for a plain triangle violation of f(d)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        if (k == i || k == j) continue;
                        Rational a = f.eval(m.at(i, j));
                        Rational b = f.eval(m.at(i, k));
                        Rational c = f.eval(m.at(k, j));
                        if (a > b + c)
                            return TransformCounterexample{f, TripleWitness{i, j, k}};
                    }
        }
    }
    return std::nullopt;
}

} // namespace uzz
