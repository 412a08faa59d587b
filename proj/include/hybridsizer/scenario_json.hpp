#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybridsizer/model.hpp"
#include "hybridsizer/optimize.hpp"

namespace hybridsizer {

// Scenario and search-space files: JSON documents with one object per
// component keyed pv/wind/bg/dg/battery/converter/grid plus econ, emissions,
// load, resources and dispatch. Field names match the domain-type fields
// one for one. Unknown keys are errors.

/// Schema-level failure (unknown key, wrong type, bad enum value) as opposed
/// to a JSON syntax error, which surfaces as nlohmann::json::parse_error.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace jsondetail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& context) {
    if (!obj.is_object()) throw SchemaError(context + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(context + ": unknown key '" + key + "'");
    }
}

inline double number(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw SchemaError(context + ": missing key '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(context + "." + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const std::string& key, double fallback,
                        const std::string& context) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(context + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::optional<double> number_opt(const json& obj, const std::string& key,
                                        const std::string& context) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(context + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::string string(const json& obj, const std::string& key,
                          const std::string& context) {
    if (!obj.contains(key)) throw SchemaError(context + ": missing key '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_string()) throw SchemaError(context + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline void read_cost_block(const json& obj, const std::string& context, double& capital,
                            double& replacement, double& om, double& lifetime) {
    capital = number_or(obj, "capital_usd", capital, context);
    replacement = number_or(obj, "replacement_usd", replacement, context);
    om = number_or(obj, "om_usd_per_yr", om, context);
    lifetime = number_or(obj, "lifetime_yr", lifetime, context);
}

inline const std::vector<std::string> kCostKeys = {"capital_usd", "replacement_usd",
                                                   "om_usd_per_yr", "lifetime_yr"};

inline std::vector<std::string> with_cost_keys(std::vector<std::string> keys) {
    keys.insert(keys.end(), kCostKeys.begin(), kCostKeys.end());
    return keys;
}

}  // namespace jsondetail

inline DispatchStrategy strategy_from_string(const std::string& name) {
    if (name == "load_following") return DispatchStrategy::load_following;
    throw SchemaError("unknown dispatch strategy '" + name + "'");
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
    using namespace jsondetail;
    check_keys(doc,
               {"pv", "wind", "bg", "dg", "battery", "converter", "grid", "econ",
                "emissions", "load", "resources", "dispatch"},
               "scenario");
    ScenarioConfig cfg;

    if (doc.contains("pv")) {
        const auto& o = doc.at("pv");
        check_keys(o,
                   with_cost_keys({"rated_kw", "derating", "temp_coeff_per_degC",
                                   "ref_irradiance_kw_m2", "ref_cell_temp_degC",
                                   "noct_degC"}),
                   "pv");
        PvSpec s;
        s.rated_kw = number(o, "rated_kw", "pv");
        s.derating = number_or(o, "derating", s.derating, "pv");
        s.temp_coeff_per_degC = number_or(o, "temp_coeff_per_degC", s.temp_coeff_per_degC, "pv");
        s.ref_irradiance_kw_m2 =
            number_or(o, "ref_irradiance_kw_m2", s.ref_irradiance_kw_m2, "pv");
        s.ref_cell_temp_degC = number_or(o, "ref_cell_temp_degC", s.ref_cell_temp_degC, "pv");
        s.noct_degC = number_or(o, "noct_degC", s.noct_degC, "pv");
        read_cost_block(o, "pv", s.capital_usd, s.replacement_usd, s.om_usd_per_yr,
                        s.lifetime_yr);
        cfg.pv = s;
    }
    if (doc.contains("wind")) {
        const auto& o = doc.at("wind");
        check_keys(o,
                   with_cost_keys({"rated_kw", "cut_in_ms", "rated_ms", "cut_out_ms",
                                   "hub_height_m", "ref_height_m", "shear_alpha"}),
                   "wind");
        WindSpec s;
        s.rated_kw = number(o, "rated_kw", "wind");
        s.cut_in_ms = number_or(o, "cut_in_ms", s.cut_in_ms, "wind");
        s.rated_ms = number_or(o, "rated_ms", s.rated_ms, "wind");
        s.cut_out_ms = number_or(o, "cut_out_ms", s.cut_out_ms, "wind");
        s.hub_height_m = number_or(o, "hub_height_m", s.hub_height_m, "wind");
        s.ref_height_m = number_or(o, "ref_height_m", s.ref_height_m, "wind");
        s.shear_alpha = number_or(o, "shear_alpha", s.shear_alpha, "wind");
        read_cost_block(o, "wind", s.capital_usd, s.replacement_usd, s.om_usd_per_yr,
                        s.lifetime_yr);
        cfg.wind = s;
    }
    if (doc.contains("bg")) {
        const auto& o = doc.at("bg");
        check_keys(o,
                   with_cost_keys({"rated_kw", "cuf", "min_load_ratio",
                                   "calorific_value_kj_per_kg", "conversion_eff",
                                   "operating_hours_per_day", "marginal_cost_usd_per_kwh"}),
                   "bg");
        BgSpec s;
        s.rated_kw = number(o, "rated_kw", "bg");
        s.cuf = number_or(o, "cuf", s.cuf, "bg");
        s.min_load_ratio = number_or(o, "min_load_ratio", s.min_load_ratio, "bg");
        s.calorific_value_kj_per_kg =
            number_or(o, "calorific_value_kj_per_kg", s.calorific_value_kj_per_kg, "bg");
        s.conversion_eff = number_or(o, "conversion_eff", s.conversion_eff, "bg");
        s.operating_hours_per_day =
            number_or(o, "operating_hours_per_day", s.operating_hours_per_day, "bg");
        s.marginal_cost_usd_per_kwh =
            number_or(o, "marginal_cost_usd_per_kwh", s.marginal_cost_usd_per_kwh, "bg");
        read_cost_block(o, "bg", s.capital_usd, s.replacement_usd, s.om_usd_per_yr,
                        s.lifetime_yr);
        cfg.bg = s;
    }
    if (doc.contains("dg")) {
        const auto& o = doc.at("dg");
        check_keys(o,
                   with_cost_keys({"rated_kw", "fuel_intercept_l_per_h_per_kw",
                                   "fuel_slope_l_per_kwh", "min_load_ratio",
                                   "fuel_price_usd_per_l"}),
                   "dg");
        DgSpec s;
        s.rated_kw = number(o, "rated_kw", "dg");
        s.fuel_intercept_l_per_h_per_kw = number_or(
            o, "fuel_intercept_l_per_h_per_kw", s.fuel_intercept_l_per_h_per_kw, "dg");
        s.fuel_slope_l_per_kwh =
            number_or(o, "fuel_slope_l_per_kwh", s.fuel_slope_l_per_kwh, "dg");
        s.min_load_ratio = number_or(o, "min_load_ratio", s.min_load_ratio, "dg");
        s.fuel_price_usd_per_l =
            number_or(o, "fuel_price_usd_per_l", s.fuel_price_usd_per_l, "dg");
        read_cost_block(o, "dg", s.capital_usd, s.replacement_usd, s.om_usd_per_yr,
                        s.lifetime_yr);
        cfg.dg = s;
    }
    if (doc.contains("battery")) {
        const auto& o = doc.at("battery");
        check_keys(o,
                   with_cost_keys({"capacity_kwh_per_string", "strings", "soc_min_frac",
                                   "charge_eff", "discharge_eff", "max_charge_kw",
                                   "max_discharge_kw"}),
                   "battery");
        BatterySpec s;
        s.capacity_kwh_per_string =
            number(o, "capacity_kwh_per_string", "battery");
        const double strings = number(o, "strings", "battery");
        s.strings = static_cast<int>(strings);
        if (static_cast<double>(s.strings) != strings)
            throw SchemaError("battery.strings: expected an integer");
        s.soc_min_frac = number_or(o, "soc_min_frac", s.soc_min_frac, "battery");
        s.charge_eff = number_or(o, "charge_eff", s.charge_eff, "battery");
        s.discharge_eff = number_or(o, "discharge_eff", s.discharge_eff, "battery");
        s.max_charge_kw = number_opt(o, "max_charge_kw", "battery");
        s.max_discharge_kw = number_opt(o, "max_discharge_kw", "battery");
        read_cost_block(o, "battery", s.capital_usd, s.replacement_usd, s.om_usd_per_yr,
                        s.lifetime_yr);
        cfg.battery = s;
    }
    if (doc.contains("converter")) {
        const auto& o = doc.at("converter");
        check_keys(o, with_cost_keys({"rated_kw", "efficiency"}), "converter");
        ConverterSpec s;
        s.rated_kw = number(o, "rated_kw", "converter");
        s.efficiency = number_or(o, "efficiency", s.efficiency, "converter");
        read_cost_block(o, "converter", s.capital_usd, s.replacement_usd,
                        s.om_usd_per_yr, s.lifetime_yr);
        cfg.converter = s;
    }
    if (doc.contains("grid")) {
        const auto& o = doc.at("grid");
        check_keys(o,
                   {"purchase_usd_per_kwh", "sellback_usd_per_kwh", "max_purchase_kw",
                    "max_sale_kw", "present"},
                   "grid");
        GridSpec s;
        s.purchase_usd_per_kwh = number(o, "purchase_usd_per_kwh", "grid");
        s.sellback_usd_per_kwh =
            number_or(o, "sellback_usd_per_kwh", s.sellback_usd_per_kwh, "grid");
        s.max_purchase_kw = number_opt(o, "max_purchase_kw", "grid");
        s.max_sale_kw = number_opt(o, "max_sale_kw", "grid");
        if (o.contains("present")) {
            if (!o.at("present").is_boolean())
                throw SchemaError("grid.present: expected a boolean");
            s.present = o.at("present").get<bool>();
        }
        cfg.grid = s;
    }
    if (doc.contains("econ")) {
        const auto& o = doc.at("econ");
        check_keys(o, {"discount_rate_frac", "project_lifetime_yr"}, "econ");
        cfg.econ.discount_rate_frac =
            number_or(o, "discount_rate_frac", cfg.econ.discount_rate_frac, "econ");
        cfg.econ.project_lifetime_yr = static_cast<int>(number_or(
            o, "project_lifetime_yr", cfg.econ.project_lifetime_yr, "econ"));
    }
    if (doc.contains("emissions")) {
        const auto& o = doc.at("emissions");
        check_keys(o,
                   {"diesel_co2_kg_per_l", "diesel_co_kg_per_l", "diesel_so2_kg_per_l",
                    "diesel_nox_kg_per_l", "grid_co2_kg_per_kwh", "grid_co_kg_per_kwh",
                    "grid_so2_kg_per_kwh", "grid_nox_kg_per_kwh", "bg_co2_kg_per_kwh",
                    "bg_co_kg_per_kwh", "bg_so2_kg_per_kwh", "bg_nox_kg_per_kwh"},
                   "emissions");
        auto& e = cfg.emissions;
        e.diesel_co2_kg_per_l = number_or(o, "diesel_co2_kg_per_l", e.diesel_co2_kg_per_l, "emissions");
        e.diesel_co_kg_per_l = number_or(o, "diesel_co_kg_per_l", e.diesel_co_kg_per_l, "emissions");
        e.diesel_so2_kg_per_l = number_or(o, "diesel_so2_kg_per_l", e.diesel_so2_kg_per_l, "emissions");
        e.diesel_nox_kg_per_l = number_or(o, "diesel_nox_kg_per_l", e.diesel_nox_kg_per_l, "emissions");
        e.grid_co2_kg_per_kwh = number_or(o, "grid_co2_kg_per_kwh", e.grid_co2_kg_per_kwh, "emissions");
        e.grid_co_kg_per_kwh = number_or(o, "grid_co_kg_per_kwh", e.grid_co_kg_per_kwh, "emissions");
        e.grid_so2_kg_per_kwh = number_or(o, "grid_so2_kg_per_kwh", e.grid_so2_kg_per_kwh, "emissions");
        e.grid_nox_kg_per_kwh = number_or(o, "grid_nox_kg_per_kwh", e.grid_nox_kg_per_kwh, "emissions");
        e.bg_co2_kg_per_kwh = number_or(o, "bg_co2_kg_per_kwh", e.bg_co2_kg_per_kwh, "emissions");
        e.bg_co_kg_per_kwh = number_or(o, "bg_co_kg_per_kwh", e.bg_co_kg_per_kwh, "emissions");
        e.bg_so2_kg_per_kwh = number_or(o, "bg_so2_kg_per_kwh", e.bg_so2_kg_per_kwh, "emissions");
        e.bg_nox_kg_per_kwh = number_or(o, "bg_nox_kg_per_kwh", e.bg_nox_kg_per_kwh, "emissions");
    }
    if (doc.contains("load")) {
        const auto& o = doc.at("load");
        check_keys(o, {"daily_shape_csv", "scale_to_kwh_per_day"}, "load");
        cfg.load.daily_shape_csv = string(o, "daily_shape_csv", "load");
        cfg.load.scale_to_kwh_per_day = number_opt(o, "scale_to_kwh_per_day", "load");
    }
    if (doc.contains("resources")) {
        const auto& o = doc.at("resources");
        check_keys(o,
                   {"ghi_csv", "wind_csv", "biomass_csv", "temperature_csv", "wind_seed"},
                   "resources");
        if (o.contains("ghi_csv")) cfg.resources.ghi_csv = string(o, "ghi_csv", "resources");
        if (o.contains("wind_csv"))
            cfg.resources.wind_csv = string(o, "wind_csv", "resources");
        if (o.contains("biomass_csv"))
            cfg.resources.biomass_csv = string(o, "biomass_csv", "resources");
        if (o.contains("temperature_csv"))
            cfg.resources.temperature_csv = string(o, "temperature_csv", "resources");
        if (o.contains("wind_seed")) {
            const auto& v = o.at("wind_seed");
            if (!v.is_number_unsigned())
                throw SchemaError("resources.wind_seed: expected a non-negative integer");
            cfg.resources.wind_seed = v.get<unsigned long long>();
        }
    }
    if (doc.contains("dispatch")) {
        const auto& o = doc.at("dispatch");
        check_keys(o, {"strategy", "reliability_cap", "initial_soc_frac"}, "dispatch");
        if (o.contains("strategy"))
            cfg.dispatch.strategy = strategy_from_string(string(o, "strategy", "dispatch"));
        cfg.dispatch.reliability_cap =
            number_or(o, "reliability_cap", cfg.dispatch.reliability_cap, "dispatch");
        cfg.dispatch.initial_soc_frac =
            number_or(o, "initial_soc_frac", cfg.dispatch.initial_soc_frac, "dispatch");
    }
    return cfg;
}

inline nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Rephrase the byte offset as a line number.
        std::size_t line = 1;
        const std::size_t limit = std::min(e.byte, text.size());
        for (std::size_t i = 0; i < limit; ++i)
            if (text[i] == '\n') ++line;
        throw IoError(path + ":" + std::to_string(line) +
                      ": json syntax error: " + e.what());
    }
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    return scenario_from_json(parse_json_file(path));
}

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct ParsedSpace {
    SearchSpace space;
    std::optional<SweepSpec> sweep;
};

namespace jsondetail {

template <typename T, typename Conv>
SizeAxis<T> read_axis(const json& doc, const std::string& key, Conv conv) {
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw SchemaError(key + ": expected an array");
    SizeAxis<T> axis;
    for (const auto& e : arr) {
        if (e.is_null()) {
            axis.push_back(std::nullopt);
        } else if (e.is_number()) {
            axis.push_back(conv(e.get<double>()));
        } else {
            throw SchemaError(key + ": entries must be numbers or null (absent)");
        }
    }
    if (axis.empty()) throw SchemaError(key + ": axis must be non-empty");
    return axis;
}

}  // namespace jsondetail

/// Search-space file: a base scenario (inline under "base" or referenced via
/// "scenario" relative to the space file) plus per-component candidate size
/// arrays where null marks the absent entry, an optional grid/strategy axis,
/// the reliability cap, and an optional sweep definition.
inline ParsedSpace space_from_json(const nlohmann::json& doc,
                                   const std::filesystem::path& base_dir) {
    using namespace jsondetail;
    check_keys(doc,
               {"scenario", "base", "pv_kw", "wind_kw", "bg_kw", "dg_kw",
                "battery_strings", "converter_kw", "grid_present", "strategies",
                "reliability_cap", "sweep"},
               "space");
    ParsedSpace parsed;
    SearchSpace& space = parsed.space;

    if (doc.contains("base") == doc.contains("scenario"))
        throw SchemaError("space: exactly one of 'base' (inline) or 'scenario' (path) required");
    if (doc.contains("base")) {
        space.base = scenario_from_json(doc.at("base"));
    } else {
        const std::string rel = string(doc, "scenario", "space");
        space.base = load_scenario_file((base_dir / rel).string());
    }
    default_axes_from_base(space);

    auto as_double = [](double v) { return v; };
    if (doc.contains("pv_kw")) space.pv_kw = read_axis<double>(doc, "pv_kw", as_double);
    if (doc.contains("wind_kw"))
        space.wind_kw = read_axis<double>(doc, "wind_kw", as_double);
    if (doc.contains("bg_kw")) space.bg_kw = read_axis<double>(doc, "bg_kw", as_double);
    if (doc.contains("dg_kw")) space.dg_kw = read_axis<double>(doc, "dg_kw", as_double);
    if (doc.contains("converter_kw"))
        space.converter_kw = read_axis<double>(doc, "converter_kw", as_double);
    if (doc.contains("battery_strings"))
        space.battery_strings = read_axis<int>(doc, "battery_strings", [](double v) {
            const int n = static_cast<int>(v);
            if (static_cast<double>(n) != v)
                throw SchemaError("battery_strings: expected integers");
            return n;
        });
    if (doc.contains("grid_present")) {
        const auto& arr = doc.at("grid_present");
        if (!arr.is_array() || arr.empty())
            throw SchemaError("grid_present: expected a non-empty array of booleans");
        space.grid_present.clear();
        for (const auto& e : arr) {
            if (!e.is_boolean()) throw SchemaError("grid_present: expected booleans");
            space.grid_present.push_back(e.get<bool>());
        }
    }
    if (doc.contains("strategies")) {
        const auto& arr = doc.at("strategies");
        if (!arr.is_array() || arr.empty())
            throw SchemaError("strategies: expected a non-empty array");
        space.strategies.clear();
        for (const auto& e : arr) {
            if (!e.is_string()) throw SchemaError("strategies: expected strings");
            space.strategies.push_back(strategy_from_string(e.get<std::string>()));
        }
    }
    space.reliability_cap =
        number_or(doc, "reliability_cap", space.reliability_cap, "space");

    if (doc.contains("sweep")) {
        const auto& o = doc.at("sweep");
        check_keys(o, {"parameter", "values"}, "sweep");
        SweepSpec sweep;
        sweep.parameter = string(o, "parameter", "sweep");
        const auto& arr = o.at("values");
        if (!arr.is_array()) throw SchemaError("sweep.values: expected an array");
        for (const auto& e : arr) {
            if (!e.is_number()) throw SchemaError("sweep.values: expected numbers");
            sweep.values.push_back(e.get<double>());
        }
        parsed.sweep = sweep;
    }
    return parsed;
}

inline ParsedSpace load_space_file(const std::string& path) {
    return space_from_json(parse_json_file(path),
                           std::filesystem::path(path).parent_path());
}

}  // namespace hybridsizer
