#pragma once

// Scenario files: JSON with densities in BSs per km^2 (the file's explicit
// unit key), thresholds and biases in dB, powers and noise in linear units.
// Unknown keys are rejected. Internally everything is linear and
// unit-agnostic with the kilometre as the implicit length unit.

#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "model.hpp"

namespace hetnet {

struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
    if (!j.is_object()) throw ScenarioParseError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ScenarioParseError(where + ": unknown key '" + it.key() + "'");
}

inline double get_num(const nlohmann::json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ScenarioParseError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw ScenarioParseError(where + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline FadingDistribution parse_fading(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"kind", "mean", "sigma_db", "value"}, where);
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ScenarioParseError(where + ": fading needs a string 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return FadingDistribution::exponential(get_num(j, "mean", where));
    if (kind == "lognormal_db") return FadingDistribution::lognormal_db(get_num(j, "sigma_db", where));
    if (kind == "constant") return FadingDistribution::constant(get_num(j, "value", where));
    throw ScenarioParseError(where + ": unknown fading kind '" + kind + "'");
}

inline TierConfig parse_tier(const nlohmann::json& j, bool open, const std::string& where) {
    TierConfig t;
    if (open)
        check_keys(j, {"density", "power", "pathloss_exp", "fading", "threshold_db", "bias_db"},
                   where);
    else
        check_keys(j, {"density", "power", "pathloss_exp", "fading"}, where);
    t.density = get_num(j, "density", where);
    t.power = get_num(j, "power", where);
    t.pathloss_exp = get_num(j, "pathloss_exp", where);
    if (!j.contains("fading")) throw ScenarioParseError(where + ": missing key 'fading'");
    t.fading = parse_fading(j.at("fading"), where + ".fading");
    t.access = open ? Access::Open : Access::Closed;
    if (open) {
        t.sinr_threshold = db_to_linear(get_num(j, "threshold_db", where));
        t.bias = j.contains("bias_db") ? db_to_linear(get_num(j, "bias_db", where)) : 1.0;
    }
    return t;
}

}  // namespace detail

inline HetNetScenario scenario_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"density_unit", "noise", "open_tiers", "closed_tiers"}, "scenario");
    if (!j.contains("density_unit") || j.at("density_unit") != "per_km2")
        throw ScenarioParseError("scenario: density_unit must be present and equal \"per_km2\"");
    HetNetScenario sc;
    sc.noise = j.contains("noise") ? detail::get_num(j, "noise", "scenario") : 0.0;
    if (!j.contains("open_tiers") || !j.at("open_tiers").is_array())
        throw ScenarioParseError("scenario: open_tiers must be an array");
    std::size_t i = 0;
    for (const auto& tj : j.at("open_tiers"))
        sc.open_tiers.push_back(
            detail::parse_tier(tj, true, "open_tiers[" + std::to_string(i++) + "]"));
    if (j.contains("closed_tiers")) {
        if (!j.at("closed_tiers").is_array())
            throw ScenarioParseError("scenario: closed_tiers must be an array");
        i = 0;
        for (const auto& tj : j.at("closed_tiers"))
            sc.closed_tiers.push_back(
                detail::parse_tier(tj, false, "closed_tiers[" + std::to_string(i++) + "]"));
    }
    auto violations = validate_scenario(sc);
    if (!violations.empty()) {
        std::string msg = "scenario invalid:";
        for (const auto& v : violations) msg += " [" + v + "]";
        throw ScenarioParseError(msg);
    }
    return sc;
}

inline HetNetScenario scenario_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioParseError(std::string("scenario: malformed JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

inline nlohmann::json fading_to_json(const FadingDistribution& f) {
    nlohmann::json j;
    switch (f.kind) {
        case FadingKind::Exponential:
            j["kind"] = "exponential";
            j["mean"] = f.param;
            break;
        case FadingKind::LogNormalDb:
            j["kind"] = "lognormal_db";
            j["sigma_db"] = f.param;
            break;
        case FadingKind::Constant:
            j["kind"] = "constant";
            j["value"] = f.param;
            break;
    }
    return j;
}

inline nlohmann::json scenario_to_json(const HetNetScenario& sc) {
    nlohmann::json j;
    j["density_unit"] = "per_km2";
    j["noise"] = sc.noise;
    j["open_tiers"] = nlohmann::json::array();
    for (const auto& t : sc.open_tiers) {
        nlohmann::json tj;
        tj["density"] = t.density;
        tj["power"] = t.power;
        tj["pathloss_exp"] = t.pathloss_exp;
        tj["fading"] = fading_to_json(t.fading);
        tj["threshold_db"] = linear_to_db(t.sinr_threshold);
        tj["bias_db"] = linear_to_db(t.bias);
        j["open_tiers"].push_back(tj);
    }
    j["closed_tiers"] = nlohmann::json::array();
    for (const auto& t : sc.closed_tiers) {
        nlohmann::json tj;
        tj["density"] = t.density;
        tj["power"] = t.power;
        tj["pathloss_exp"] = t.pathloss_exp;
        tj["fading"] = fading_to_json(t.fading);
        j["closed_tiers"].push_back(tj);
    }
    return j;
}

}  // namespace hetnet
