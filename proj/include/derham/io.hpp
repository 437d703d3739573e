#pragma once

// JSON system documents, CSV tables and SVG polylines. Numbers are written
// with %.17g so every CSV value parses back to the same double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "derham/errors.hpp"
#include "derham/perturbation.hpp"
#include "derham/presets.hpp"
#include "derham/regularity.hpp"
#include "derham/solver.hpp"
#include "derham/system.hpp"

namespace derham {

using json = nlohmann::json;

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

struct PresetEntry {
    std::size_t min_params;
    std::size_t max_params;
    std::function<DeRhamSystem(const std::vector<double>&)> build;
};

inline const std::map<std::string, PresetEntry, std::less<>>& preset_table() {
    static const std::map<std::string, PresetEntry, std::less<>> table = [] {
        std::map<std::string, PresetEntry, std::less<>> t;
        auto none = [](DeRhamSystem (*f)()) { return PresetEntry{0, 0, [f](const std::vector<double>&) { return f(); }}; };
        auto one = [](DeRhamSystem (*f)(double)) {
            return PresetEntry{1, 1, [f](const std::vector<double>& p) { return f(p[0]); }};
        };
        t.emplace("cantor", none(presets::cantor));
        t.emplace("bernoulli", PresetEntry{2, 64, [](const std::vector<double>& p) {
                                               return presets::bernoulli(std::span<const double>(p));
                                           }});
        t.emplace("okamoto",
                  PresetEntry{2, 2, [](const std::vector<double>& p) { return presets::okamoto(p[0], p[1]); }});
        t.emplace("minkowski_inverse", none(presets::minkowski_inverse));
        t.emplace("derham", PresetEntry{2, 2, [](const std::vector<double>& p) {
                                            return presets::derham({p[0], p[1]});
                                        }});
        t.emplace("derham_literal", PresetEntry{2, 2, [](const std::vector<double>& p) {
                                                    return presets::derham_literal({p[0], p[1]});
                                                }});
        t.emplace("koch", none(presets::koch));
        t.emplace("quadratic", none(presets::quadratic));
        t.emplace("cubic", none(presets::cubic));
        t.emplace("anisotropic", none(presets::anisotropic));
        t.emplace("hata_yamaguti", one(presets::hata_yamaguti));
        t.emplace("quartic_perturbation", one(presets::quartic_perturbation));
        t.emplace("perturbed_minkowski", one(presets::perturbed_minkowski));
        t.emplace("example_2_2_i", t.at("quadratic"));
        t.emplace("example_2_2_ii", t.at("cubic"));
        t.emplace("remark_2_5", t.at("anisotropic"));
        t.emplace("example_2_8_i", t.at("quartic_perturbation"));
        t.emplace("example_2_8_ii", t.at("perturbed_minkowski"));
        return t;
    }();
    return table;
}

inline double number_at(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ParseError(path, "expected a number");
}

// "bernoulli(0.25, 0.75)" -> name + params.
inline std::pair<std::string, std::vector<double>> split_preset_call(const std::string& s, const std::string& path) {
    const auto open = s.find('(');
    if (open == std::string::npos) return {s, {}};
    if (s.back() != ')') throw ParseError(path, "unbalanced parentheses in preset '" + s + "'");
    std::vector<double> params;
    std::stringstream args(s.substr(open + 1, s.size() - open - 2));
    std::string item;
    while (std::getline(args, item, ',')) {
        try {
            std::size_t used = 0;
            params.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError(path, "bad preset argument '" + item + "'");
        }
    }
    return {s.substr(0, open), params};
}

inline DeRhamSystem build_preset(const std::string& name, const std::vector<double>& params, const std::string& path) {
    const auto& table = preset_table();
    const auto it = table.find(name);
    if (it == table.end()) throw ParseError(path, "unknown preset '" + name + "'");
    if (params.size() < it->second.min_params || params.size() > it->second.max_params) {
        throw ParseError(path, "preset '" + name + "' takes " + std::to_string(it->second.min_params) +
                                   (it->second.min_params == it->second.max_params
                                        ? ""
                                        : ".." + std::to_string(it->second.max_params)) +
                                   " parameters, got " + std::to_string(params.size()));
    }
    try {
        return it->second.build(params);
    } catch (const DomainError& e) {
        throw ParseError(path, e.what());
    }
}

inline DeRhamSystem parse_preset(const json& doc, const std::string& path) {
    if (doc.is_string()) {
        auto [name, params] = split_preset_call(doc.get<std::string>(), path);
        return build_preset(name, params, path);
    }
    if (!doc.is_object() || !doc.contains("preset")) throw ParseError(path, "expected a preset");
    const auto& p = doc.at("preset");
    if (!p.is_string()) throw ParseError(path + "/preset", "expected a string");
    auto [name, params] = split_preset_call(p.get<std::string>(), path + "/preset");
    if (doc.contains("params")) {
        if (!params.empty()) throw ParseError(path + "/params", "parameters given twice");
        const auto& arr = doc.at("params");
        if (!arr.is_array()) throw ParseError(path + "/params", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) params.push_back(number_at(arr[i], path + "/params/" + std::to_string(i)));
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "preset" && key != "params" && key != "name") {
            throw ParseError(path + "/" + key, "unexpected key next to preset");
        }
    }
    auto sys = build_preset(name, params, path + "/preset");
    if (!doc.contains("name")) return sys;
    if (!doc.at("name").is_string()) throw ParseError(path + "/name", "expected a string");
    return DeRhamSystem(sys.branches(), doc.at("name").get<std::string>());
}

inline DeRhamSystem parse_explicit(const json& doc) {
    for (const char* key : {"base", "space", "maps"}) {
        if (!doc.contains(key)) throw ParseError(std::string("/") + key, "missing key");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "base" && key != "space" && key != "maps" && key != "name") throw ParseError("/" + key, "unknown key");
    }
    if (!doc.at("base").is_number_integer()) throw ParseError("/base", "expected an integer");
    const int base = doc.at("base").get<int>();
    if (base < 2) throw ParseError("/base", "base must be >= 2");
    if (!doc.at("space").is_string()) throw ParseError("/space", "expected \"interval\" or \"plane\"");
    const auto space_name = doc.at("space").get<std::string>();
    if (space_name != "interval" && space_name != "plane") throw ParseError("/space", "expected \"interval\" or \"plane\"");
    const Space space = space_name == "interval" ? Space::interval : Space::plane;
    std::string name = "custom";
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) throw ParseError("/name", "expected a string");
        name = doc.at("name").get<std::string>();
    }
    const auto& maps = doc.at("maps");
    if (!maps.is_array()) throw ParseError("/maps", "expected an array");
    if (maps.size() != static_cast<std::size_t>(base)) {
        throw ParseError("/maps", "expected " + std::to_string(base) + " maps, got " + std::to_string(maps.size()));
    }
    std::vector<DifferentiableMap> branches;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const std::string at = "/maps/" + std::to_string(i);
        const auto& m = maps[i];
        if (!m.is_object()) throw ParseError(at, "expected an object");
        if (!m.contains("kind") || !m.at("kind").is_string()) throw ParseError(at + "/kind", "expected a map kind");
        if (!m.contains("params") || !m.at("params").is_array()) throw ParseError(at + "/params", "expected an array");
        for (const auto& [key, _] : m.items()) {
            if (key != "kind" && key != "params" && key != "lipschitz") throw ParseError(at + "/" + key, "unknown key");
        }
        const auto kind_name = m.at("kind").get<std::string>();
        const auto parsed_kind = map_kind_from_string(kind_name);
        if (!parsed_kind) throw ParseError(at + "/kind", "unknown map kind '" + kind_name + "'");
        const MapKind kind = *parsed_kind;
        if (space_of(kind) != space) throw ParseError(at + "/kind", "map kind does not act on the declared space");
        std::vector<double> params;
        const auto& arr = m.at("params");
        for (std::size_t k = 0; k < arr.size(); ++k) params.push_back(number_at(arr[k], at + "/params/" + std::to_string(k)));
        std::optional<double> lip;
        if (m.contains("lipschitz")) lip = number_at(m.at("lipschitz"), at + "/lipschitz");
        try {
            branches.emplace_back(kind, std::move(params), lip);
        } catch (const DomainError& e) {
            throw ParseError(at, e.what());
        }
    }
    try {
        return DeRhamSystem(std::move(branches), name);
    } catch (const DomainError& e) {
        throw ParseError("/maps", e.what());
    }
}

}  // namespace detail

/// Either a preset (string, or {"preset", "params"}) or {base, space, maps[, name]}.
/// Schema problems throw ParseError with a JSON-pointer path; a system that
/// fails validate_system throws ValidationError.
inline DeRhamSystem parse_system_spec(const json& doc) {
    DeRhamSystem sys = [&] {
        if (doc.is_string()) return detail::parse_preset(doc, "");
        if (!doc.is_object()) throw ParseError("", "expected an object or a preset string");
        if (doc.contains("preset")) {
            for (const char* key : {"base", "space", "maps"}) {
                if (doc.contains(key)) throw ParseError(std::string("/") + key, "preset and explicit maps are exclusive");
            }
            return detail::parse_preset(doc, "");
        }
        return detail::parse_explicit(doc);
    }();
    require_valid(sys);
    return sys;
}

inline DeRhamSystem parse_system_spec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", e.what());
    }
    return parse_system_spec(doc);
}

inline DeRhamSystem load_system_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_system_spec(std::string_view(buf.str()));
}

/// Explicit form; presets come back expanded. parse(serialize(s)) == s.
inline json serialize_system(const DeRhamSystem& sys) {
    json maps = json::array();
    for (const auto& f : sys.branches()) {
        json m{{"kind", std::string(to_string(f.kind()))}, {"params", f.params()}};
        if (f.declared_lipschitz()) m["lipschitz"] = *f.declared_lipschitz();
        maps.push_back(std::move(m));
    }
    return {{"base", sys.base()}, {"space", std::string(to_string(sys.space()))}, {"maps", maps}, {"name", sys.name()}};
}

// ---- CSV -------------------------------------------------------------------

inline void write_csv(std::ostream& out, const CurveSample& s) {
    out << (s.space == Space::interval ? "t,g\n" : "t,x,y\n");
    for (std::size_t k = 0; k < s.size(); ++k) {
        out << format_number(s.t[k]) << ',' << format_number(s.points[k].x);
        if (s.space == Space::plane) out << ',' << format_number(s.points[k].y);
        out << '\n';
    }
}

inline void write_csv(std::ostream& out, const IncrementTable& t) {
    out << "index,digits,t_n,increment\n";
    for (std::size_t k = 0; k < t.increments.size(); ++k) {
        const auto d = t.digits(k);
        out << k << ',' << d.to_string() << ',' << format_number(d.t_n()) << ',' << format_number(t.increments[k])
            << '\n';
    }
}

inline void write_csv(std::ostream& out, const VariationTable& v) {
    out << "n,p,s_n\n";
    for (std::size_t k = 0; k < v.sums.size(); ++k) {
        out << k + 1 << ',' << format_number(v.p) << ',' << format_number(v.sums[k]) << '\n';
    }
}

inline void write_csv(std::ostream& out, const ExponentTrace& tr) {
    out << "n,exponent\n";
    for (std::size_t k = 0; k < tr.values.size(); ++k) out << k + 1 << ',' << format_number(tr.values[k]) << '\n';
}

inline void write_csv(std::ostream& out, const StudyTable& t) {
    out << "eps,sup_distance,alpha,beta,margin\n";
    out << "0,0," << format_number(t.alpha0) << ',' << format_number(t.beta0) << ",0\n";
    for (const auto& r : t.rows) {
        out << format_number(r.eps) << ',' << format_number(r.sup_distance) << ',' << format_number(r.alpha) << ','
            << format_number(r.beta) << ',' << format_number(r.margin) << '\n';
    }
}

inline void write_csv(std::ostream& out, const RegularityEstimate& e, const RegularityVerdict& v) {
    auto opt = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string(); };
    out << "method,depth,eval_depth,samples,seed,alpha,beta,stderr_alpha,stderr_beta,margin,verdict\n";
    out << to_string(e.method) << ',' << e.depth << ',' << e.eval_depth << ',' << e.samples << ',' << e.seed << ','
        << format_number(e.alpha) << ',' << format_number(e.beta) << ',' << opt(e.stderr_alpha) << ','
        << opt(e.stderr_beta) << ',' << format_number(v.margin) << ',' << to_string(v.tag) << '\n';
}

template <class Table>
std::string to_csv(const Table& t) {
    std::ostringstream out;
    write_csv(out, t);
    return out.str();
}

inline std::string to_csv_estimate(const RegularityEstimate& e, const RegularityVerdict& v) {
    std::ostringstream out;
    write_csv(out, e, v);
    return out.str();
}

// ---- SVG -------------------------------------------------------------------

struct SvgOptions {
    int width = 640;
    int height = 640;
    std::string stroke = "#1f3b73";
    double stroke_width = 1.0;
};

/// One polyline. Interval curves are drawn as (t, G(t)) over the unit square,
/// plane curves over their bounding box plus a 5% margin; y points up.
inline void write_svg(std::ostream& out, const CurveSample& s, const SvgOptions& opt = {}) {
    if (s.size() == 0) throw DomainError("write_svg: empty sample");
    if (opt.width <= 0 || opt.height <= 0) throw DomainError("write_svg: width and height must be positive");
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (s.space == Space::plane) {
        x0 = x1 = s.points[0].x;
        y0 = y1 = s.points[0].y;
        for (const auto& p : s.points) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        const double span = std::max({x1 - x0, y1 - y0, 1e-12});
        x0 -= 0.05 * span;
        x1 += 0.05 * span;
        y0 -= 0.05 * span;
        y1 += 0.05 * span;
    }
    const double sx = opt.width / std::max(x1 - x0, 1e-12);
    const double sy = opt.height / std::max(y1 - y0, 1e-12);
    char buf[64];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << opt.width << ' ' << opt.height
        << "\" width=\"" << opt.width << "\" height=\"" << opt.height << "\">\n";
    out << "<polyline fill=\"none\" stroke=\"" << opt.stroke << "\" stroke-width=\"" << format_number(opt.stroke_width)
        << "\" points=\"";
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double u = s.space == Space::interval ? s.t[k] : s.points[k].x;
        const double v = s.space == Space::interval ? s.points[k].x : s.points[k].y;
        std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", k == 0 ? "" : " ", (u - x0) * sx, opt.height - (v - y0) * sy);
        out << buf;
    }
    out << "\"/>\n</svg>\n";
}

// ---- files -----------------------------------------------------------------

namespace detail {

template <class Write>
void write_file(const std::string& path, Write&& write) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    write(out);
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace detail

template <class Table>
void emit_csv(const Table& t, const std::string& path) {
    detail::write_file(path, [&](std::ostream& out) { write_csv(out, t); });
}

inline void emit_csv(const RegularityEstimate& e, const RegularityVerdict& v, const std::string& path) {
    detail::write_file(path, [&](std::ostream& out) { write_csv(out, e, v); });
}

inline void emit_svg(const CurveSample& s, const std::string& path, const SvgOptions& opt = {}) {
    if (s.size() == 0) throw DomainError("write_svg: empty sample");
    detail::write_file(path, [&](std::ostream& out) { write_svg(out, s, opt); });
}

}  // namespace derham
