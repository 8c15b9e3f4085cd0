#pragma once

#include "contraction.hpp"

#include <json.hpp>

namespace pgn {

using json = nlohmann::json;

inline json to_json(const Vec& v) { return to_strings(v); }

inline Scalar scalar_from(const json& j) {
    if (j.is_string()) return parse_scalar(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(Integer(j.get<long long>()));
    throw parse_error("expected a rational string");
}

inline Vec vec_from(const json& j, std::size_t d) {
    if (!j.is_array()) throw parse_error("expected an array of rationals");
    Vec v;
    for (auto& x : j) v.push_back(scalar_from(x));
    if (v.size() != d) throw parse_error("vector has length " + std::to_string(v.size()) + ", expected " + std::to_string(d));
    return v;
}

inline json tail_to_json(const Tail& tail) {
    return std::visit([](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, FiniteHorizon>) {
            return {{"kind", "none"}, {"horizon", to_string(t.horizon)}};
        } else if constexpr (std::is_same_v<T, Unbounded>) {
            return {{"kind", "linear"}};
        } else if constexpr (std::is_same_v<T, PeriodicDrift>) {
            return {{"kind", "periodic"}, {"start", to_string(t.start)}, {"period", to_string(t.period)}, {"drift", to_json(t.drift)}};
        } else {
            json blocks = json::array();
            for (auto& b : t.blocks) {
                json pat = json::array();
                for (auto& st : b.pattern) pat.push_back({{"weight", to_string(st.weight)}, {"slope", to_json(st.slope)}});
                blocks.push_back({{"duration", to_string(b.duration)}, {"pattern", pat}});
            }
            return {{"kind", "geometric"}, {"start", to_string(t.start)}, {"ratio", to_string(t.ratio)}, {"blocks", blocks}};
        }
    }, tail);
}

inline json path_to_json(const PiecewisePath& p) {
    json slopes = json::array();
    for (auto& s : p.slopes()) slopes.push_back(to_json(s));
    json bps = json::array();
    for (auto& b : p.breakpoints()) bps.push_back(to_string(b));
    return {{"d", p.dim()}, {"t0", to_string(p.t0())}, {"breakpoints", bps},
            {"values_at_t0", to_json(p.values_at_t0())}, {"slopes", slopes}, {"tail", tail_to_json(p.tail())}};
}

inline Tail tail_from_json(const json& j, std::size_t d) {
    if (!j.is_object()) throw parse_error("tail must be an object");
    std::string kind = j.value("kind", "");
    if (kind == "none") return FiniteHorizon{scalar_from(j.at("horizon"))};
    if (kind == "linear") return Unbounded{};
    if (kind == "periodic")
        return PeriodicDrift{scalar_from(j.at("start")), scalar_from(j.at("period")), vec_from(j.at("drift"), d)};
    if (kind == "geometric") {
        GeometricAlternation g{scalar_from(j.at("start")), {}, scalar_from(j.at("ratio"))};
        for (auto& b : j.at("blocks")) {
            Block blk{scalar_from(b.at("duration")), {}};
            for (auto& st : b.at("pattern")) blk.pattern.push_back({scalar_from(st.at("weight")), vec_from(st.at("slope"), d)});
            g.blocks.push_back(blk);
        }
        return g;
    }
    throw parse_error("unknown tail kind '" + kind + "'");
}

inline PiecewisePath path_from_json(const json& j) {
    try {
        int d = j.at("d").get<int>();
        if (d < 1) throw parse_error("d must be positive");
        std::vector<Scalar> bps;
        for (auto& b : j.value("breakpoints", json::array())) bps.push_back(scalar_from(b));
        std::vector<Vec> slopes;
        for (auto& s : j.value("slopes", json::array())) slopes.push_back(vec_from(s, d));
        Tail tail = j.contains("tail") ? tail_from_json(j.at("tail"), d) : Tail{Unbounded{}};
        return PiecewisePath(d, scalar_from(j.value("t0", json("0"))), bps, vec_from(j.at("values_at_t0"), d), slopes, tail);
    } catch (const json::exception& e) {
        throw parse_error(std::string("path format: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw parse_error(std::string("path structure: ") + e.what());
    }
}

struct TemplateFile {
    Dimensions dims;
    PiecewisePath path;
};

inline TemplateFile template_file_from_json(const json& j) {
    try {
        TemplateFile f{{j.at("m").get<int>(), j.at("n").get<int>()}, path_from_json(j)};
        if (f.dims.m < 1 || f.dims.n < 1) throw parse_error("m and n must be positive");
        if (f.path.dim() != f.dims.d()) throw parse_error("d must equal m+n");
        return f;
    } catch (const json::exception& e) {
        throw parse_error(std::string("template format: ") + e.what());
    }
}

inline json template_to_json(const Dimensions& dims, const PiecewisePath& p) {
    json j = path_to_json(p);
    j["m"] = dims.m;
    j["n"] = dims.n;
    return j;
}

inline json violations_to_json(const std::vector<Violation>& vs) {
    json a = json::array();
    for (auto& v : vs) a.push_back({{"axiom", v.axiom}, {"time", to_string(v.time)}, {"detail", v.detail}});
    return a;
}

inline json piece_to_json(const PieceAnalysis& p) {
    json blocks = json::array(), L = json::array(), M = json::array();
    for (auto [a, b] : p.blocks) blocks.push_back({a, b});
    for (auto [a, b] : p.L) L.push_back({a, b});
    for (auto [a, b] : p.M) M.push_back({a, b});
    return {{"interval", {to_string(p.a), to_string(p.b)}}, {"equality_blocks", blocks}, {"L", L}, {"M", M},
            {"S_plus", p.S_plus}, {"S_minus", p.S_minus}, {"delta", p.delta}};
}

inline json decision_to_json(Decision d) {
    if (d == Decision::undecidable) return "undecidable";
    return d == Decision::yes;
}

inline json analysis_to_json(const Template& f) {
    auto r = rate_limits(f);
    auto tau = uniform_dynamical_exponent(f);
    json pieces = json::array();
    for (auto& p : analysis_pieces(f)) pieces.push_back(piece_to_json(p));
    json j = {{"delta_lower", to_string(r.lower)}, {"delta_upper", to_string(r.upper)},
              {"tau_hat", to_string(tau.value)}, {"trivially_singular", decision_to_json(is_trivially_singular(f))},
              {"truncated", r.truncated}, {"per_piece", pieces}};
    if (tau.estimate) j["tau_hat_estimate_only"] = true;
    return j;
}

} // namespace pgn
