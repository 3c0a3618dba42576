#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uzz/chain.hpp"
#include "uzz/multimap.hpp"
#include "uzz/space.hpp"
#include "uzz/tower.hpp"
#include "uzz/zigzag.hpp"

// File formats (all JSON, rationals as "p/q" or integer strings):
//   space:   {"points": ["a",...], "dist": [["0","1",...], ...]}
//   multimap:{"source": <space>, "target": <space>, "pairs": [["a","x"],...]}
//   chain:   {"flavor": "D"|"D+"|"D-", "window": [lo,hi],
//             "levels": {"k": ["label",...]}, "bonds": {"k": {"label":"label"}}}
//            bonds["k"] maps level k to level k+1 for D/D+, level k+1 to
//            level k for D- (the map's own subscript in either orientation);
//            optional "stabilized_below"/"stabilized_above" booleans.
//   zigzag:  {"alpha": [...], "beta": [...], "start": i0,
//             "V": [{"from_level": k, "map": {"label":"label"}}, ...]}
//   tower:   {"nodes": [{"id": "x", "level": 1, "succ": "p"}, ...]},
//            top node's succ absent
namespace uzz::io {

using nlohmann::json;

json space_to_json(const DistMatrix& m);
DistMatrix space_from_json(const json& j);

json multimap_to_json(const MultiMap& mm);
// returns (source matrix, target matrix, label pairs); spaces get verified by the caller
struct MultiMapFile {
    DistMatrix source, target;
    std::vector<std::pair<std::string, std::string>> pairs;
};
MultiMapFile multimap_from_json(const json& j);
MultiMap multimap_from_file(const json& j); // verifies both spaces

json chain_to_json(const Chain& c);
Chain chain_from_json(const json& j); // validates

json zigzag_to_json(const ZigZag& z, const Chain& X, const Chain& Y);
ZigZag zigzag_from_json(const json& j, const Chain& X, const Chain& Y);

json tower_to_json(const Tower& t);
Tower tower_from_json(const json& j); // structural checks only

json profile_to_json(const ExpansionProfile& p);
json scale_map_to_json(const ScaleMap& g);
json distortion_to_json(const DistortionReport& r, const UltraSpace& X);

json load_file(const std::string& path); // malformed_error with the path on failure
void write_file(const std::string& path, const std::string& text);

Rational rat(const json& j); // accepts "p/q" strings or integers

} // namespace uzz::io
