#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "estimators.hpp"
#include "piecewise_affine.hpp"
#include "point.hpp"
#include "rational.hpp"
#include "space.hpp"
#include "systems.hpp"

namespace mdimlab {

using json = nlohmann::json;

inline json point_to_json(const Point& p) {
    json j;
    if (p.is_real()) {
        j["t"] = "real";
        j["v"] = p.as_real();
    } else if (p.is_angle()) {
        j["t"] = "angle";
        j["v"] = p.as_angle();
    } else if (p.is_word()) {
        const auto& w = std::get<WordPoint>(p.rep);
        j["t"] = "word";
        j["symbols"] = w.symbols;
        j["tail"] = w.tail;
    } else {
        j["t"] = "tuple";
        json items = json::array();
        for (const auto& q : p.as_tuple()) items.push_back(point_to_json(q));
        j["items"] = std::move(items);
    }
    return j;
}

inline Point point_from_json(const json& j) {
    const std::string t = j.at("t").get<std::string>();
    if (t == "real") return Point::real(j.at("v").get<double>());
    if (t == "angle") return Point::angle(j.at("v").get<double>());
    if (t == "word")
        return Point::word(j.at("symbols").get<std::vector<std::uint8_t>>(),
                           j.at("tail").get<std::uint8_t>());
    if (t == "tuple") {
        std::vector<Point> items;
        for (const auto& q : j.at("items")) items.push_back(point_from_json(q));
        return Point::tuple(std::move(items));
    }
    fail(errc::invalid_config, "point_from_json: unknown point type '" + t + "'");
}

inline json space_to_json(const Space& s);

inline json space_to_json(const SpacePtr& s) {
    if (!s) fail(errc::invalid_config, "space_to_json: null space");
    return space_to_json(*s);
}

inline json space_to_json(const Space& s) {
    json j;
    if (std::holds_alternative<IntervalSpace>(s.kind)) {
        j["kind"] = "interval";
    } else if (std::holds_alternative<CircleSpace>(s.kind)) {
        j["kind"] = "circle";
    } else if (const auto* w = std::get_if<CantorWordsSpace>(&s.kind)) {
        j["kind"] = "cantor_words";
        j["depth"] = w->depth;
        j["alphabet"] = w->alphabet;
    } else if (const auto* p = std::get_if<ProductPowerSpace>(&s.kind)) {
        j["kind"] = "product_power";
        j["base"] = space_to_json(p->base);
        j["index"] = p->index == IndexSet::HalfLine ? "half_line" : "full_line";
        j["depth"] = p->depth;
    } else if (const auto* sp = std::get_if<SumProductSpace>(&s.kind)) {
        j["kind"] = "sum_product";
        j["left"] = space_to_json(sp->left);
        j["right"] = space_to_json(sp->right);
    } else if (const auto* c = std::get_if<FinitePointCloudSpace>(&s.kind)) {
        j["kind"] = "cloud";
        json pts = json::array();
        for (const auto& q : c->points) pts.push_back(point_to_json(q));
        j["points"] = std::move(pts);
        if (!c->table.empty()) j["table"] = c->table;
    } else {
        fail(errc::invalid_config, "space_to_json: unhandled space kind");
    }
    return j;
}

inline SpacePtr space_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "interval") return Space::interval();
    if (kind == "circle") return Space::circle();
    if (kind == "cantor_words") {
        auto alphabet = j.contains("alphabet")
                            ? j.at("alphabet").get<std::vector<std::uint8_t>>()
                            : std::vector<std::uint8_t>{0, 2};
        return Space::cantor_words(j.at("depth").get<int>(), std::move(alphabet));
    }
    if (kind == "product_power") {
        const std::string idx = j.at("index").get<std::string>();
        if (idx != "half_line" && idx != "full_line")
            fail(errc::invalid_config, "space_from_json: index must be half_line or full_line");
        return Space::product_power(space_from_json(j.at("base")),
                                    idx == "half_line" ? IndexSet::HalfLine : IndexSet::FullLine,
                                    j.at("depth").get<int>());
    }
    if (kind == "sum_product")
        return Space::sum_product(space_from_json(j.at("left")), space_from_json(j.at("right")));
    if (kind == "cloud") {
        std::vector<Point> pts;
        for (const auto& q : j.at("points")) pts.push_back(point_from_json(q));
        std::vector<std::vector<double>> table;
        if (j.contains("table")) table = j.at("table").get<std::vector<std::vector<double>>>();
        return Space::cloud(std::move(pts), std::move(table));
    }
    fail(errc::invalid_config, "space_from_json: unknown space kind '" + kind + "'");
}

inline json pam_to_json(const PiecewiseAffineMap& m) {
    json j;
    j["kind"] = "pam";
    std::vector<double> bx, by;
    bx.reserve(m.fx.size());
    by.reserve(m.fy.size());
    for (double v : m.fx) bx.push_back(v);
    for (double v : m.fy) by.push_back(v);
    j["breakpoints"] = std::move(bx);
    j["values"] = std::move(by);
    return j;
}

inline PiecewiseAffineMap pam_from_json(const json& j) {
    const auto bx = j.at("breakpoints").get<std::vector<double>>();
    const auto by = j.at("values").get<std::vector<double>>();
    if (bx.size() != by.size())
        fail(errc::invalid_config, "pam_from_json: breakpoints and values differ in length");
    return PiecewiseAffineMap::from_doubles(bx, by);
}

inline json system_to_json(const MapSystem& sys) {
    json j;
    if (const auto* a = std::get_if<AffineDynamics>(&sys.kind)) {
        j = pam_to_json(a->map);
        j["kind"] = "pam";
        j["on_circle"] = a->on_circle;
        j["label"] = sys.label;
    } else if (const auto* sh = std::get_if<ShiftDynamics>(&sys.kind)) {
        j["kind"] = "shift";
        j["space"] = space_to_json(sys.domain);
        j["block"] = sh->block;
        j["preserve"] = sh->preserve;
        j["label"] = sys.label;
    } else if (const auto* it = std::get_if<IterateDynamics>(&sys.kind)) {
        j["kind"] = "iterate";
        j["power"] = it->power;
        j["base"] = system_to_json(*it->base);
    } else if (const auto* pr = std::get_if<ProductDynamics>(&sys.kind)) {
        j["kind"] = "product";
        j["left"] = system_to_json(*pr->left);
        j["right"] = system_to_json(*pr->right);
    } else if (const auto* sc = std::get_if<ScaledDynamics>(&sys.kind)) {
        j["kind"] = "scaled";
        j["factor"] = sc->factor;
        j["base"] = system_to_json(*sc->base);
    } else if (std::holds_alternative<IdentityDynamics>(sys.kind)) {
        j["kind"] = "identity";
        j["space"] = space_to_json(sys.domain);
        j["label"] = sys.label;
    } else {
        fail(errc::invalid_config, "system_to_json: unhandled system kind");
    }
    return j;
}

inline MapSystemPtr system_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pam") {
        auto pam = pam_from_json(j);
        const bool on_circle = j.contains("on_circle") && j.at("on_circle").get<bool>();
        const std::string label = j.contains("label") ? j.at("label").get<std::string>() : "pam";
        return make_affine(std::move(pam), on_circle, label);
    }
    if (kind == "shift") {
        const std::string label = j.contains("label") ? j.at("label").get<std::string>() : "shift";
        return make_shift(space_from_json(j.at("space")), j.at("block").get<int>(),
                          j.contains("preserve") ? j.at("preserve").get<int>() : 0, label);
    }
    if (kind == "iterate")
        return make_iterate(system_from_json(j.at("base")), j.at("power").get<long long>());
    if (kind == "product")
        return make_product(system_from_json(j.at("left")), system_from_json(j.at("right")));
    if (kind == "scaled")
        return make_scaled(j.at("factor").get<double>(), system_from_json(j.at("base")));
    if (kind == "identity") {
        const std::string label =
            j.contains("label") ? j.at("label").get<std::string>() : "identity";
        return make_identity(space_from_json(j.at("space")), label);
    }
    fail(errc::invalid_config, "system_from_json: unknown system kind '" + kind + "'");
}

inline json report_to_json(const DimensionReport& rep) {
    json j;
    j["lower"] = rep.lower_estimate;
    j["upper"] = rep.upper_estimate;
    j["schedule"] = rep.schedule;
    j["caveats"] = rep.caveats;
    json rows = json::array();
    for (const auto& r : rep.per_epsilon) {
        rows.push_back({{"epsilon", r.epsilon},
                        {"rate", r.rate},
                        {"normalized", r.normalized},
                        {"lower_bound_only", r.lower_bound_only}});
    }
    j["per_epsilon"] = std::move(rows);
    return j;
}

inline json report_to_json(const BoxDimensionReport& rep) {
    json j;
    j["lower"] = rep.lower;
    j["upper"] = rep.upper;
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"epsilon", r.epsilon},
                        {"count", r.count},
                        {"normalized", r.normalized},
                        {"mode", to_string(r.mode)}});
    }
    j["per_epsilon"] = std::move(rows);
    return j;
}

} // namespace mdimlab
