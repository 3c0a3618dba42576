#include "support/oracles.hpp"

#include <stdexcept>

namespace oracle {

using uzz::MultiMap;
using uzz::Rational;

uzz::ExpansionProfile subset_profile(const MultiMap& phi) {
    const int n = phi.source().size();
    if (n > 16) throw std::runtime_error("subset oracle guard: too many points");

    std::vector<Rational> breakpoints{Rational(0)};
    for (const auto& v : phi.source().distance_values()) breakpoints.push_back(v);
    std::vector<Rational> best(breakpoints.size(), Rational(0));

    for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
        std::vector<int> subset;
        for (int i = 0; i < n; ++i)
            if (mask & (1ul << i)) subset.push_back(i);
        Rational diam(0);
        for (std::size_t i = 0; i < subset.size(); ++i)
            for (std::size_t j = i + 1; j < subset.size(); ++j)
                diam = uzz::max(diam, phi.source().dist(subset[i], subset[j]));
        auto img = phi.image(subset);
        Rational idiam(0);
        for (std::size_t i = 0; i < img.size(); ++i)
            for (std::size_t j = i + 1; j < img.size(); ++j)
                idiam = uzz::max(idiam, phi.target().dist(img[i], img[j]));
        for (std::size_t b = 0; b < breakpoints.size(); ++b)
            if (diam <= breakpoints[b] && best[b] < idiam) best[b] = idiam;
    }

    uzz::ExpansionProfile out;
    for (std::size_t b = 0; b < breakpoints.size(); ++b)
        out.points.emplace_back(breakpoints[b], best[b]);
    return out;
}

} // namespace oracle
