// uzz: ultrametric spaces, ball-partition chains, zig-zag certificates and
// towers from the command line. Verdicts are data: a refuted property is a
// JSON report and exit 1; only malformed input exits 2.
#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "uzz/io.hpp"

using namespace uzz;
using io::json;

namespace {

json load(const std::string& path) { return io::load_file(path); }

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty()) std::cout << text;
    else io::write_file(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) std::cout << text;
    else io::write_file(out_path, text);
}

Flavor parse_flavor(const std::string& s) {
    if (s == "D") return Flavor::D;
    if (s == "D+") return Flavor::Dplus;
    if (s == "D-") return Flavor::Dminus;
    throw malformed_error("unknown flavor \"" + s + "\" (use D, D+ or D-)");
}

UltraSpace load_space(const std::string& path) {
    return UltraSpace::from(io::space_from_json(load(path)));
}

// ---- dot emission ----------------------------------------------------------

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string chain_dot(const Chain& c) {
    std::ostringstream os;
    os << "digraph chain {\n  rankdir=BT;\n";
    for (int p = 0; p < c.count(); ++p) {
        os << "  { rank=same;";
        for (const auto& l : c.levels[(std::size_t)p])
            os << " \"" << c.lo + p << ":" << dot_escape(l) << "\";";
        os << " }\n";
    }
    for (int p = 0; p + 1 < c.count(); ++p) {
        int from = c.coarse_is_up() ? p : p + 1;
        int to = c.coarse_is_up() ? p + 1 : p;
        const auto& bond = c.bonds[(std::size_t)p];
        for (std::size_t e = 0; e < bond.size(); ++e)
            os << "  \"" << c.lo + from << ":" << dot_escape(c.levels[(std::size_t)from][e])
               << "\" -> \"" << c.lo + to << ":"
               << dot_escape(c.levels[(std::size_t)to][(std::size_t)bond[e]]) << "\";\n";
    }
    os << "}\n";
    return os.str();
}

std::string tower_dot(const Tower& t) {
    std::ostringstream os;
    os << "digraph tower {\n  rankdir=BT;\n";
    auto levels = t.levels();
    for (const auto& lev : levels) {
        os << "  { rank=same;";
        for (int i : lev) os << " \"" << dot_escape(t.nodes[(std::size_t)i].id) << "\";";
        os << " }\n";
    }
    for (const auto& n : t.nodes)
        if (n.succ != -1)
            os << "  \"" << dot_escape(n.id) << "\" -> \""
               << dot_escape(t.nodes[(std::size_t)n.succ].id) << "\";\n";
    os << "}\n";
    return os.str();
}

std::string zigzag_dot(const json& zj) {
    std::ostringstream os;
    os << "digraph zigzag {\n  rankdir=LR;\n";
    const auto& vs = zj.at("V");
    for (std::size_t k = 0; k < vs.size(); ++k) {
        os << "  { rank=same;";
        for (auto it = vs[k].at("map").begin(); it != vs[k].at("map").end(); ++it)
            os << " \"" << k << ":" << dot_escape(it.key()) << "\";";
        os << " }\n";
    }
    if (!vs.empty()) {
        os << "  { rank=same;";
        const auto& last = vs[vs.size() - 1].at("map");
        std::set<std::string> tail;
        for (auto it = last.begin(); it != last.end(); ++it)
            tail.insert(it.value().get<std::string>());
        for (const auto& l : tail) os << " \"" << vs.size() << ":" << dot_escape(l) << "\";";
        os << " }\n";
    }
    for (std::size_t k = 0; k < vs.size(); ++k)
        for (auto it = vs[k].at("map").begin(); it != vs[k].at("map").end(); ++it)
            os << "  \"" << k << ":" << dot_escape(it.key()) << "\" -> \"" << k + 1 << ":"
               << dot_escape(it.value().get<std::string>()) << "\";\n";
    os << "}\n";
    return os.str();
}

// closeness gap of two point maps with a common source and target:
// max over source points of the target distance between the two images
Rational closeness_gap(const MultiMap& f, const MultiMap& g) {
    if (!(f.source() == g.source()) || !(f.target() == g.target()))
        throw malformed_error("closeness needs maps with the same source and target");
    auto ff = f.as_function();
    auto gg = g.as_function();
    Rational gap(0);
    for (int x = 0; x < f.source().size(); ++x)
        gap = max(gap, f.target().dist(ff[(std::size_t)x], gg[(std::size_t)x]));
    return gap;
}

json thread_list(const Chain& c, const EndSpace& e) {
    json out = json::array();
    for (const auto& coords : e.coords) {
        json th = json::array();
        for (int p = 0; p < c.count(); ++p)
            th.push_back(c.levels[(std::size_t)p][(std::size_t)coords[(std::size_t)p]]);
        out.push_back(std::move(th));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ultrametric spaces, partition chains, zig-zag certificates, towers"};
    app.require_subcommand(1);

    std::string in_a, in_b, in_c, out_path, flavor_s = "D", radius_s, kind_s = "bilipschitz";
    std::string K_s = "1", eps_s, C_s, gamma_csv, sequence_csv, pair_s, closeness_path, type_s;
    int length = 8;
    int gamma_lo = 0;

    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_path, "write to a file"); };

    auto* c_check = app.add_subcommand("check", "verify the ultrametric inequality");
    c_check->add_option("space", in_a)->required();
    add_out(c_check);

    auto* c_part = app.add_subcommand("partition", "closed-ball partition at a radius");
    c_part->add_option("space", in_a)->required();
    c_part->add_option("--radius", radius_s, "rational radius")->required();
    add_out(c_part);

    auto* c_chain = app.add_subcommand("chain", "ball-partition chain of a space");
    c_chain->add_option("space", in_a)->required();
    c_chain->add_option("--flavor", flavor_s, "D, D+ or D-");
    add_out(c_chain);

    auto* c_end = app.add_subcommand("endspace", "threads and end metric of a chain");
    c_end->add_option("chain", in_a)->required();
    add_out(c_end);

    auto* c_exp = app.add_subcommand("expansion", "expansion profile of a multi-map");
    c_exp->add_option("multimap", in_a)->required();
    add_out(c_exp);

    auto* c_gamma = app.add_subcommand("gamma", "scale transfer map of a multi-map");
    c_gamma->add_option("multimap", in_a)->required();
    c_gamma->add_option("--flavor", flavor_s, "D, D+ or D-");
    add_out(c_gamma);

    auto* c_il = app.add_subcommand("interleave", "interleaving sequences for a multi-map");
    c_il->add_option("multimap", in_a)->required();
    c_il->add_option("--flavor", flavor_s, "D, D+ or D-");
    c_il->add_option("--length", length, "requested entries");
    add_out(c_il);

    auto* c_zb = app.add_subcommand("zigzag-build", "build the zig-zag certificate");
    c_zb->add_option("multimap", in_a)->required();
    c_zb->add_option("--flavor", flavor_s, "D, D+ or D-");
    add_out(c_zb);

    auto* c_zv = app.add_subcommand("zigzag-verify", "verify a zig-zag against two chains");
    c_zv->add_option("zigzag", in_a)->required();
    c_zv->add_option("chain_x", in_b)->required();
    c_zv->add_option("chain_y", in_c)->required();
    add_out(c_zv);

    auto* c_tv = app.add_subcommand("tower-validate", "check the four tower axioms");
    c_tv->add_option("tower", in_a)->required();
    add_out(c_tv);

    auto* c_tm = app.add_subcommand("tower-metric", "path metric / base space of a tower");
    c_tm->add_option("tower", in_a)->required();
    c_tm->add_option("--pair", pair_s, "two node ids, comma separated");
    add_out(c_tm);

    auto* c_adm = app.add_subcommand("admissible", "check the five admissibility conditions");
    c_adm->add_option("morphism", in_a)->required();
    c_adm->add_option("tower_1", in_b)->required();
    c_adm->add_option("tower_2", in_c)->required();
    add_out(c_adm);

    auto* c_rs = app.add_subcommand("rescale", "dyadic rescaling of a space");
    c_rs->add_option("space", in_a)->required();
    c_rs->add_option("--gamma", gamma_csv, "comma separated increasing integers");
    c_rs->add_option("--gamma-lo", gamma_lo, "first index of the gamma window");
    c_rs->add_option("--sequence", sequence_csv, "comma separated increasing naturals");
    add_out(c_rs);

    auto* c_dist = app.add_subcommand("distortion", "distortion report for a point map");
    c_dist->add_option("map", in_a, "multimap file holding a total single-valued map")->required();
    c_dist->add_option("tower_a", in_b, "optional: source tower (map file holds base node ids)");
    c_dist->add_option("tower_b", in_c, "optional: target tower");
    c_dist->add_option("--kind", kind_s, "bilipschitz|small_scale|large_scale|additive");
    c_dist->add_option("--K", K_s, "rational constant");
    c_dist->add_option("--eps", eps_s, "rational small-scale threshold");
    c_dist->add_option("--C", C_s, "rational additive constant");
    c_dist->add_option("--closeness", closeness_path, "second map; report the closeness gap");
    add_out(c_dist);

    auto* c_dot = app.add_subcommand("dot", "layered DOT diagram of a chain, tower or zigzag");
    c_dot->add_option("object", in_a)->required();
    c_dot->add_option("--type", type_s, "chain|tower|zigzag (default: detect)");
    add_out(c_dot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_check->parsed()) {
            auto m = io::space_from_json(load(in_a));
            auto verdict = verify_ultrametric(m);
            json rep;
            if (verdict.valid) {
                rep["ultrametric"] = "valid";
                emit(rep, out_path);
                return 0;
            }
            rep["ultrametric"] = "violation";
            rep["witness"] = json::array({m.labels[(std::size_t)verdict.witness->i],
                                          m.labels[(std::size_t)verdict.witness->j],
                                          m.labels[(std::size_t)verdict.witness->k]});
            emit(rep, out_path);
            return 1;
        }
        if (c_part->parsed()) {
            auto u = load_space(in_a);
            auto p = ball_partition(u, Rational::parse(radius_s));
            json blocks = json::array();
            for (const auto& b : p.blocks) {
                json blk = json::array();
                for (int i : b) blk.push_back(u.label(i));
                blocks.push_back(std::move(blk));
            }
            emit(json{{"radius", p.radius.str()}, {"blocks", std::move(blocks)}}, out_path);
            return 0;
        }
        if (c_chain->parsed()) {
            emit(io::chain_to_json(chain_of_space(load_space(in_a), parse_flavor(flavor_s))),
                 out_path);
            return 0;
        }
        if (c_end->parsed()) {
            auto c = io::chain_from_json(load(in_a));
            auto e = end_space(c);
            emit(json{{"threads", thread_list(c, e)},
                      {"space", io::space_to_json(e.space.matrix())}},
                 out_path);
            return 0;
        }
        if (c_exp->parsed()) {
            auto mm = io::multimap_from_file(load(in_a));
            auto rho = expansion_profile(mm);
            auto traits = profile_traits(rho);
            json rep = io::profile_to_json(rho);
            rep["single_valued"] = traits.single_valued;
            rep["collapses_all"] = traits.collapses_all;
            if (traits.uniform_cap) rep["uniform_cap"] = traits.uniform_cap->str();
            emit(rep, out_path);
            return 0;
        }
        if (c_gamma->parsed()) {
            auto mm = io::multimap_from_file(load(in_a));
            Flavor f = parse_flavor(flavor_s);
            auto rho = expansion_profile(mm);
            if (f == Flavor::Dminus) rho = capped_for_uniform(rho);
            emit(io::scale_map_to_json(scale_map(rho, f)), out_path);
            return 0;
        }
        if (c_il->parsed()) {
            auto mm = io::multimap_from_file(load(in_a));
            Flavor f = parse_flavor(flavor_s);
            auto rf = expansion_profile(mm);
            auto rb = expansion_profile(mm.inverse());
            if (f == Flavor::Dminus) {
                rf = capped_for_uniform(rf);
                rb = capped_for_uniform(rb);
            }
            auto il = interleave(scale_map(rf, f), scale_map(rb, f), f, length);
            emit(json{{"alpha", il.alpha},
                      {"beta", il.beta},
                      {"start", il.dom_lo},
                      {"truncated", il.truncated}},
                 out_path);
            return 0;
        }
        if (c_zb->parsed()) {
            auto mm = io::multimap_from_file(load(in_a));
            Flavor f = parse_flavor(flavor_s);
            auto cx = chain_of_space(mm.source(), f);
            auto cy = chain_of_space(mm.target(), f);
            auto tx = point_threads(cx, mm.source());
            auto ty = point_threads(cy, mm.target());
            std::vector<std::pair<int, int>> pairs;
            for (auto [a, b] : mm.pairs())
                pairs.emplace_back(tx[(std::size_t)a], ty[(std::size_t)b]);
            std::sort(pairs.begin(), pairs.end());
            pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
            auto z = build_zigzag(cx, cy, pairs);
            emit(io::zigzag_to_json(z, cx, cy), out_path);
            return 0;
        }
        if (c_zv->parsed()) {
            auto cx = io::chain_from_json(load(in_b));
            auto cy = io::chain_from_json(load(in_c));
            auto z = io::zigzag_from_json(load(in_a), cx, cy);
            auto verdict = verify_zigzag(z, cx, cy);
            json rep{{"ok", verdict.ok}, {"degenerate", verdict.degenerate}};
            if (!verdict.ok) {
                rep["failing_v"] = *verdict.failing_v;
                rep["detail"] = verdict.detail;
            }
            emit(rep, out_path);
            return verdict.ok ? 0 : 1;
        }
        if (c_tv->parsed()) {
            auto t = io::tower_from_json(load(in_a));
            auto v = validate_tower(t);
            json rep{{"conditions", json::array({v.condition[0], v.condition[1], v.condition[2],
                                                 v.condition[3]})},
                     {"ok", v.ok()}};
            if (!v.ok()) rep["detail"] = v.detail;
            emit(rep, out_path);
            return v.ok() ? 0 : 1;
        }
        if (c_tm->parsed()) {
            auto t = io::tower_from_json(load(in_a));
            if (!pair_s.empty()) {
                auto comma = pair_s.find(',');
                if (comma == std::string::npos)
                    throw malformed_error("--pair wants \"id1,id2\"");
                int a = t.index_of(pair_s.substr(0, comma));
                int b = t.index_of(pair_s.substr(comma + 1));
                if (a < 0 || b < 0) throw malformed_error("--pair references unknown nodes");
                emit(json{{"d_T", path_metric(t, a, b)}}, out_path);
                return 0;
            }
            emit(io::space_to_json(base_space(t).matrix()), out_path);
            return 0;
        }
        if (c_adm->parsed()) {
            auto t1 = io::tower_from_json(load(in_b));
            auto t2 = io::tower_from_json(load(in_c));
            auto mj = load(in_a);
            if (!mj.contains("map")) throw malformed_error("morphism file needs \"map\"");
            std::vector<std::pair<int, int>> phi;
            for (auto it = mj.at("map").begin(); it != mj.at("map").end(); ++it) {
                int a = t1.index_of(it.key());
                int b = t2.index_of(it.value().get<std::string>());
                if (a < 0 || b < 0) throw malformed_error("morphism references unknown nodes");
                phi.emplace_back(a, b);
            }
            auto v = verify_admissible(t1, t2, phi);
            json rep{{"domain_is_lower", v.domain_is_lower},
                     {"conditions", json::array({v.condition[0], v.condition[1], v.condition[2],
                                                 v.condition[3], v.condition[4]})},
                     {"ok", v.ok()}};
            if (!v.ok()) rep["detail"] = v.detail;
            emit(rep, out_path);
            return v.ok() ? 0 : 1;
        }
        if (c_rs->parsed()) {
            auto u = load_space(in_a);
            auto parse_csv = [](const std::string& s) {
                std::vector<int> out;
                std::stringstream ss(s);
                std::string item;
                while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
                return out;
            };
            if (!gamma_csv.empty() && !sequence_csv.empty())
                throw malformed_error("choose one of --gamma and --sequence");
            if (!gamma_csv.empty()) {
                IndexMap g{gamma_lo, parse_csv(gamma_csv)};
                emit(io::space_to_json(rescale_by_gamma(u, g).matrix()), out_path);
                return 0;
            }
            if (!sequence_csv.empty()) {
                emit(io::space_to_json(rescale_by_sequence(u, parse_csv(sequence_csv)).matrix()),
                     out_path);
                return 0;
            }
            throw malformed_error("rescale needs --gamma or --sequence");
        }
        if (c_dist->parsed()) {
            DistortionKind kind;
            if (kind_s == "bilipschitz") kind = DistortionKind::Bilipschitz;
            else if (kind_s == "small_scale") kind = DistortionKind::SmallScaleBilipschitz;
            else if (kind_s == "large_scale") kind = DistortionKind::LargeScale;
            else if (kind_s == "additive") kind = DistortionKind::Additive;
            else throw malformed_error("unknown distortion kind \"" + kind_s + "\"");
            std::optional<Rational> eps, C;
            if (!eps_s.empty()) eps = Rational::parse(eps_s);
            if (!C_s.empty()) C = Rational::parse(C_s);
            if (!in_b.empty() || !in_c.empty()) {
                // base map between two tower bases: the map file holds
                // {"map": {"base id": "base id", ...}}
                if (in_b.empty() || in_c.empty())
                    throw malformed_error("distortion over towers needs both tower files");
                auto ta = io::tower_from_json(load(in_b));
                auto tb = io::tower_from_json(load(in_c));
                auto ba = base_space(ta);
                auto bb = base_space(tb);
                auto mj = load(in_a);
                if (!mj.contains("map")) throw malformed_error("map file needs \"map\"");
                std::vector<int> f((std::size_t)ba.size(), -1);
                for (auto it = mj.at("map").begin(); it != mj.at("map").end(); ++it) {
                    int a = ba.index_of(it.key());
                    int b = bb.index_of(it.value().get<std::string>());
                    if (a < 0 || b < 0)
                        throw malformed_error("map references a node outside the bases");
                    f[(std::size_t)a] = b;
                }
                for (int v : f)
                    if (v < 0) throw malformed_error("map is not total on the source base");
                auto rep = check_distortion(ba, bb, f, kind, Rational::parse(K_s), eps, C);
                emit(io::distortion_to_json(rep, ba), out_path);
                return rep.clean() ? 0 : 1;
            }
            auto mm = io::multimap_from_file(load(in_a));
            if (!closeness_path.empty()) {
                auto mm2 = io::multimap_from_file(load(closeness_path));
                emit(json{{"closeness_gap", closeness_gap(mm, mm2).str()}}, out_path);
                return 0;
            }
            auto rep = check_distortion(mm.source(), mm.target(), mm.as_function(), kind,
                                        Rational::parse(K_s), eps, C);
            emit(io::distortion_to_json(rep, mm.source()), out_path);
            return rep.clean() ? 0 : 1;
        }
        if (c_dot->parsed()) {
            auto j = load(in_a);
            std::string type = type_s;
            if (type.empty()) {
                if (j.contains("nodes")) type = "tower";
                else if (j.contains("alpha")) type = "zigzag";
                else if (j.contains("levels")) type = "chain";
                else throw malformed_error("cannot detect the object type; pass --type");
            }
            if (type == "chain") emit_text(chain_dot(io::chain_from_json(j)), out_path);
            else if (type == "tower") emit_text(tower_dot(io::tower_from_json(j)), out_path);
            else if (type == "zigzag") emit_text(zigzag_dot(j), out_path);
            else throw malformed_error("unknown --type \"" + type + "\"");
            return 0;
        }
    } catch (const contract_error& e) {
        json rep{{"error", "contract"}, {"detail", e.what()}};
        std::cout << rep.dump(2) << "\n";
        return 1;
    } catch (const malformed_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const window_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
