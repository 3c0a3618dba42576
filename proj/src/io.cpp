#include "uzz/io.hpp"

#include <fstream>
#include <sstream>

namespace uzz::io {

Rational rat(const json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw malformed_error("expected a rational as \"p/q\" string or integer");
}

json space_to_json(const DistMatrix& m) {
    json out;
    out["points"] = m.labels;
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.size(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    out["dist"] = std::move(rows);
    return out;
}

DistMatrix space_from_json(const json& j) {
    if (!j.contains("points") || !j.contains("dist"))
        throw malformed_error("space file needs \"points\" and \"dist\"");
    std::vector<std::string> labels = j.at("points").get<std::vector<std::string>>();
    const auto& rows = j.at("dist");
    if (!rows.is_array() || rows.size() != labels.size())
        throw malformed_error("dist must have one row per point");
    std::vector<Rational> d;
    d.reserve(labels.size() * labels.size());
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != labels.size())
            throw malformed_error("dist rows must have one entry per point");
        for (const auto& cell : row) d.push_back(rat(cell));
    }
    return DistMatrix::make(std::move(labels), std::move(d));
}

json multimap_to_json(const MultiMap& mm) {
    json out;
    out["source"] = space_to_json(mm.source().matrix());
    out["target"] = space_to_json(mm.target().matrix());
    json pairs = json::array();
    for (auto [a, b] : mm.pairs())
        pairs.push_back(json::array({mm.source().label(a), mm.target().label(b)}));
    out["pairs"] = std::move(pairs);
    return out;
}

MultiMapFile multimap_from_json(const json& j) {
    if (!j.contains("source") || !j.contains("target") || !j.contains("pairs"))
        throw malformed_error("multimap file needs \"source\", \"target\" and \"pairs\"");
    MultiMapFile f{space_from_json(j.at("source")), space_from_json(j.at("target")), {}};
    for (const auto& p : j.at("pairs")) {
        if (!p.is_array() || p.size() != 2)
            throw malformed_error("pairs must be [\"source label\", \"target label\"]");
        f.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return f;
}

MultiMap multimap_from_file(const json& j) {
    MultiMapFile f = multimap_from_json(j);
    UltraSpace src = UltraSpace::from(std::move(f.source));
    UltraSpace tgt = UltraSpace::from(std::move(f.target));
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [a, b] : f.pairs) {
        int ia = src.index_of(a);
        int ib = tgt.index_of(b);
        if (ia < 0 || ib < 0) throw malformed_error("pair references unknown label " +
                                                    (ia < 0 ? a : b));
        pairs.emplace_back(ia, ib);
    }
    return MultiMap::make(std::move(src), std::move(tgt), std::move(pairs));
}

namespace {

std::string flavor_str(Flavor f) {
    switch (f) {
    case Flavor::D: return "D";
    case Flavor::Dplus: return "D+";
    case Flavor::Dminus: return "D-";
    }
    return "D";
}

Flavor flavor_parse(const std::string& s) {
    if (s == "D") return Flavor::D;
    if (s == "D+") return Flavor::Dplus;
    if (s == "D-") return Flavor::Dminus;
    throw malformed_error("unknown flavor \"" + s + "\" (use D, D+ or D-)");
}

} // namespace

json chain_to_json(const Chain& c) {
    json out;
    out["flavor"] = flavor_str(c.flavor);
    out["window"] = json::array({c.lo, c.hi});
    json levels;
    for (int p = 0; p < c.count(); ++p) levels[std::to_string(c.lo + p)] = c.levels[(std::size_t)p];
    out["levels"] = std::move(levels);
    json bonds;
    for (int p = 0; p + 1 < c.count(); ++p) {
        json step;
        int from = c.coarse_is_up() ? p : p + 1;
        int to = c.coarse_is_up() ? p + 1 : p;
        for (std::size_t e = 0; e < c.levels[(std::size_t)from].size(); ++e)
            step[c.levels[(std::size_t)from][e]] =
                c.levels[(std::size_t)to][(std::size_t)c.bonds[(std::size_t)p][e]];
        bonds[std::to_string(c.lo + p)] = std::move(step);
    }
    out["bonds"] = std::move(bonds);
    out["stabilized_below"] = c.stabilized_below;
    out["stabilized_above"] = c.stabilized_above;
    return out;
}

Chain chain_from_json(const json& j) {
    if (!j.contains("flavor") || !j.contains("window") || !j.contains("levels") ||
        !j.contains("bonds"))
        throw malformed_error("chain file needs flavor, window, levels, bonds");
    Chain c;
    c.flavor = flavor_parse(j.at("flavor").get<std::string>());
    c.lo = j.at("window").at(0).get<int>();
    c.hi = j.at("window").at(1).get<int>();
    if (c.hi < c.lo) throw malformed_error("empty chain window");
    for (int k = c.lo; k <= c.hi; ++k) {
        const std::string key = std::to_string(k);
        if (!j.at("levels").contains(key))
            throw malformed_error("missing level " + key);
        c.levels.push_back(j.at("levels").at(key).get<std::vector<std::string>>());
    }
    for (int k = c.lo; k < c.hi; ++k) {
        const std::string key = std::to_string(k);
        if (!j.at("bonds").contains(key)) throw malformed_error("missing bond " + key);
        const json& step = j.at("bonds").at(key);
        int p = c.pos_of(k);
        int from = c.coarse_is_up() ? p : p + 1;
        int to = c.coarse_is_up() ? p + 1 : p;
        std::vector<int> bond(c.levels[(std::size_t)from].size(), -1);
        for (std::size_t e = 0; e < bond.size(); ++e) {
            const std::string& src = c.levels[(std::size_t)from][e];
            if (!step.contains(src))
                throw malformed_error("bond " + key + " misses label " + src);
            int img = -1;
            const std::string dst = step.at(src).get<std::string>();
            for (std::size_t x = 0; x < c.levels[(std::size_t)to].size(); ++x)
                if (c.levels[(std::size_t)to][x] == dst) img = (int)x;
            if (img < 0) throw malformed_error("bond " + key + " maps to unknown label " + dst);
            bond[e] = img;
        }
        c.bonds.push_back(std::move(bond));
    }
    // infer the stabilized extensions unless the file pins them down
    bool coarse_single = c.levels[(std::size_t)c.coarse_pos()].size() == 1;
    if (c.coarse_is_up()) {
        c.stabilized_below = j.value("stabilized_below", true);
        c.stabilized_above = j.value("stabilized_above", coarse_single) && coarse_single;
    } else {
        c.stabilized_below = j.value("stabilized_below", coarse_single) && coarse_single;
        c.stabilized_above = j.value("stabilized_above", true);
    }
    auto verdict = validate_chain(c);
    if (!verdict.valid) throw malformed_error("invalid chain: " + verdict.detail);
    return c;
}

json zigzag_to_json(const ZigZag& z, const Chain& X, const Chain& Y) {
    json out;
    out["alpha"] = z.alpha;
    out["beta"] = z.beta;
    out["start"] = z.dom_lo;
    const bool dm = z.flavor == Flavor::Dminus;
    json vs = json::array();
    for (std::size_t k = 0; k < z.v.size(); ++k) {
        bool odd = k % 2 == 0;
        const Chain& src = (odd == !dm) ? X : Y;
        const Chain& tgt = (odd == !dm) ? Y : X;
        int i = (int)(k / 2);
        int tgt_idx;
        if (!dm) tgt_idx = odd ? z.beta[(std::size_t)i] : z.alpha[(std::size_t)i + 1];
        else tgt_idx = odd ? z.alpha[(std::size_t)i] : z.beta[(std::size_t)i];
        const auto& src_level = src.level_at_extended(z.v[k].from_index);
        const auto& tgt_level = tgt.level_at_extended(tgt_idx);
        json m;
        for (std::size_t e = 0; e < src_level.size(); ++e)
            m[src_level[e]] = tgt_level[(std::size_t)z.v[k].map[e]];
        vs.push_back({{"from_level", z.v[k].from_index}, {"map", std::move(m)}});
    }
    out["V"] = std::move(vs);
    return out;
}

ZigZag zigzag_from_json(const json& j, const Chain& X, const Chain& Y) {
    if (!j.contains("alpha") || !j.contains("beta") || !j.contains("V"))
        throw malformed_error("zigzag file needs alpha, beta and V");
    ZigZag z;
    z.flavor = X.flavor;
    z.alpha = j.at("alpha").get<std::vector<int>>();
    z.beta = j.at("beta").get<std::vector<int>>();
    z.dom_lo = j.value("start", z.flavor == Flavor::D ? 0 : 1);
    if (z.alpha.size() != z.beta.size()) throw malformed_error("alpha/beta length mismatch");
    const bool dm = z.flavor == Flavor::Dminus;
    const auto& vs = j.at("V");
    for (std::size_t k = 0; k < vs.size(); ++k) {
        bool odd = k % 2 == 0;
        int i = (int)(k / 2);
        if (i >= (int)z.alpha.size() || (!odd && i + 1 >= (int)z.alpha.size()))
            throw malformed_error("more V maps than the interleaving supports");
        const Chain& src = (odd == !dm) ? X : Y;
        const Chain& tgt = (odd == !dm) ? Y : X;
        int tgt_idx;
        if (!dm) tgt_idx = odd ? z.beta[(std::size_t)i] : z.alpha[(std::size_t)i + 1];
        else tgt_idx = odd ? z.alpha[(std::size_t)i] : z.beta[(std::size_t)i];
        LevelMap lm;
        lm.from_index = vs[k].at("from_level").get<int>();
        const auto& src_level = src.level_at_extended(lm.from_index);
        const auto& tgt_level = tgt.level_at_extended(tgt_idx);
        lm.map.assign(src_level.size(), -1);
        const json& m = vs[k].at("map");
        for (std::size_t e = 0; e < src_level.size(); ++e) {
            if (!m.contains(src_level[e]))
                throw malformed_error("V map misses label " + src_level[e]);
            const std::string dst = m.at(src_level[e]).get<std::string>();
            for (std::size_t x = 0; x < tgt_level.size(); ++x)
                if (tgt_level[x] == dst) lm.map[e] = (int)x;
            if (lm.map[e] < 0) throw malformed_error("V maps to unknown label " + dst);
        }
        z.v.push_back(std::move(lm));
    }
    return z;
}

json tower_to_json(const Tower& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        json nd{{"id", n.id}, {"level", n.level}};
        if (n.succ != -1) nd["succ"] = t.nodes[(std::size_t)n.succ].id;
        nodes.push_back(std::move(nd));
    }
    return json{{"nodes", std::move(nodes)}};
}

Tower tower_from_json(const json& j) {
    if (!j.contains("nodes")) throw malformed_error("tower file needs \"nodes\"");
    Tower t;
    std::vector<std::string> succ_ids;
    for (const auto& nd : j.at("nodes")) {
        TowerNode n;
        n.id = nd.at("id").get<std::string>();
        n.level = nd.at("level").get<int>();
        succ_ids.push_back(nd.value("succ", std::string()));
        t.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (succ_ids[i].empty()) continue;
        int s = t.index_of(succ_ids[i]);
        if (s < 0) throw malformed_error("succ references unknown node " + succ_ids[i]);
        t.nodes[i].succ = s;
    }
    check_tower_structure(t);
    return t;
}

json profile_to_json(const ExpansionProfile& p) {
    json pts = json::array();
    for (const auto& [t, v] : p.points) pts.push_back(json::array({t.str(), v.str()}));
    json out{{"breakpoints", std::move(pts)}};
    if (p.cap) out["cap"] = p.cap->str();
    return out;
}

json scale_map_to_json(const ScaleMap& g) {
    json vals = json::array();
    for (const auto& v : g.values) {
        if (v) vals.push_back(*v);
        else vals.push_back(nullptr);
    }
    return json{{"flavor", g.flavor == Flavor::D ? "D" : g.flavor == Flavor::Dplus ? "D+" : "D-"},
                {"window", json::array({g.lo, g.hi()})},
                {"values", std::move(vals)}};
}

json distortion_to_json(const DistortionReport& r, const UltraSpace& X) {
    json out;
    switch (r.kind) {
    case DistortionKind::Bilipschitz: out["kind"] = "bilipschitz"; break;
    case DistortionKind::SmallScaleBilipschitz: out["kind"] = "small_scale_bilipschitz"; break;
    case DistortionKind::LargeScale: out["kind"] = "large_scale"; break;
    case DistortionKind::Additive: out["kind"] = "additive"; break;
    }
    out["K"] = r.K.str();
    if (r.eps) out["eps"] = r.eps->str();
    if (r.C) out["C"] = r.C->str();
    if (r.violation)
        out["violation"] = json::array({X.label(r.violation->i), X.label(r.violation->j)});
    out["clean"] = r.clean();
    return out;
}

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw malformed_error(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw malformed_error(path + ": " + e.what());
    }
    return j;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw malformed_error(path + ": cannot open for writing");
    out << text;
}

} // namespace uzz::io
