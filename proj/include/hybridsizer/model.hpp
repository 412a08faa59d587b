#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hybridsizer/calendar.hpp"

namespace hybridsizer {

// Domain types shared by every other module. All powers are kW, energies
// kWh, one slot = one hour. Component absence is an absent optional in
// ScenarioConfig, never a zero-size spec, so search-space enumeration can
// tell "excluded" from "size 0". Everything here is immutable after
// construction and safe to share across concurrent evaluations.

struct PvSpec {
    double rated_kw = 0.0;
    double derating = 1.0;               // fraction [0,1]
    double temp_coeff_per_degC = 0.0;    // 1/degC, typically negative
    double ref_irradiance_kw_m2 = 1.0;
    double ref_cell_temp_degC = 25.0;
    double noct_degC = 45.0;
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 25.0;
};

struct WindSpec {
    double rated_kw = 0.0;
    double cut_in_ms = 3.0;
    double rated_ms = 12.0;
    double cut_out_ms = 24.0;
    double hub_height_m = 40.0;
    double ref_height_m = 10.0;
    double shear_alpha = 0.14;           // Hellmann exponent, 0.1..0.4
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 20.0;
};

struct BgSpec {
    double rated_kw = 0.0;
    double cuf = 0.25;                   // capacity utilization factor
    double min_load_ratio = 0.3;
    double calorific_value_kj_per_kg = 15000.0;
    double conversion_eff = 0.25;
    double operating_hours_per_day = 24.0;
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 20.0;
    double marginal_cost_usd_per_kwh = 0.0;
};

struct DgSpec {
    double rated_kw = 0.0;
    double fuel_intercept_l_per_h_per_kw = 0.08;  // f1
    double fuel_slope_l_per_kwh = 0.25;           // f2
    double min_load_ratio = 0.3;                  // defaults like the BG's
    double fuel_price_usd_per_l = 1.0;
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 15.0;
};

struct BatterySpec {
    double capacity_kwh_per_string = 1.0;
    int strings = 0;
    double soc_min_frac = 0.2;
    double charge_eff = 0.9;
    double discharge_eff = 0.9;
    // Power limits default to C/4 per hour when unspecified.
    std::optional<double> max_charge_kw;
    std::optional<double> max_discharge_kw;
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 10.0;

    double capacity_kwh() const { return capacity_kwh_per_string * strings; }
    double max_charge() const {
        return max_charge_kw ? *max_charge_kw : capacity_kwh() / 4.0;
    }
    double max_discharge() const {
        return max_discharge_kw ? *max_discharge_kw : capacity_kwh() / 4.0;
    }
};

struct ConverterSpec {
    double rated_kw = 0.0;
    double efficiency = 0.95;            // applied on every DC<->AC transfer
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 15.0;
};

struct GridSpec {
    double purchase_usd_per_kwh = 0.0;
    double sellback_usd_per_kwh = 0.0;
    // Absent limits mean "no cap" for purchases and "no sales" for sellback.
    std::optional<double> max_purchase_kw;
    std::optional<double> max_sale_kw;
    bool present = true;

    double max_purchase() const {
        return max_purchase_kw ? *max_purchase_kw
                               : std::numeric_limits<double>::infinity();
    }
    double max_sale() const { return max_sale_kw ? *max_sale_kw : 0.0; }
};

struct EconParams {
    double discount_rate_frac = 0.08;    // i, per year
    int project_lifetime_yr = 25;        // n
};

struct EmissionFactors {
    // Diesel, per liter of fuel burned.
    double diesel_co2_kg_per_l = 2.64;
    double diesel_co_kg_per_l = 0.0165;
    double diesel_so2_kg_per_l = 0.0033;
    double diesel_nox_kg_per_l = 0.0440;
    // Grid purchases, per kWh. CO2 back-solved from the case-study tables;
    // the remaining grid factors are derived the same way.
    double grid_co2_kg_per_kwh = 0.632;
    double grid_co_kg_per_kwh = 3.704e-6;
    double grid_so2_kg_per_kwh = 2.740e-3;
    double grid_nox_kg_per_kwh = 1.373e-3;
    // Biomass generation, per kWh. CO2 defaults to zero (biogenic); CO/NOx
    // from incomplete combustion are permitted.
    double bg_co2_kg_per_kwh = 0.0;
    double bg_co_kg_per_kwh = 2.6e-5;
    double bg_so2_kg_per_kwh = 0.0;
    double bg_nox_kg_per_kwh = 2.3e-4;
};

enum class DispatchStrategy { load_following };

struct DispatchOptions {
    DispatchStrategy strategy = DispatchStrategy::load_following;
    double reliability_cap = 0.001;      // max unmet fraction of demand
    double initial_soc_frac = 1.0;
};

/// Reference to the daily load shape (24 rows of `hour,kw`), scaled so each
/// day totals scale_to_kwh_per_day. A zero scale target keeps the shape as-is.
struct LoadRef {
    std::string daily_shape_csv;
    std::optional<double> scale_to_kwh_per_day;
};

/// References to the monthly resource CSVs (`month,value`, 12 rows each).
/// temperature_csv is optional (20 degC flat when absent). wind_seed enables
/// the mean-preserving diurnal perturbation of the wind series.
struct ResourceRefs {
    std::string ghi_csv;
    std::string wind_csv;
    std::string biomass_csv;
    std::optional<std::string> temperature_csv;
    std::optional<unsigned long long> wind_seed;
};

struct ScenarioConfig {
    std::optional<PvSpec> pv;
    std::optional<WindSpec> wind;
    std::optional<BgSpec> bg;
    std::optional<DgSpec> dg;
    std::optional<BatterySpec> battery;
    std::optional<ConverterSpec> converter;
    std::optional<GridSpec> grid;
    EconParams econ;
    EmissionFactors emissions;
    LoadRef load;
    ResourceRefs resources;
    DispatchOptions dispatch;

    bool has_grid() const { return grid && grid->present; }
    bool has_battery() const { return battery && battery->strings > 0; }
};

enum class Severity { error, warning };

struct Violation {
    Severity severity = Severity::error;
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool simulable() const {
        for (const auto& v : violations)
            if (v.severity == Severity::error) return false;
        return true;
    }
    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& v : violations)
            if (v.severity == Severity::error) ++n;
        return n;
    }
};

namespace detail {

inline void require(std::vector<Violation>& out, bool ok, const std::string& field,
                    const std::string& message, Severity sev = Severity::error) {
    if (!ok) out.push_back({sev, field, message});
}

}  // namespace detail

/// Checks every type invariant plus the cross-component rules. Pure:
/// identical input yields an identical report. An empty error list means the
/// dispatch engine accepts the scenario without precondition failures.
inline ValidationReport validate_scenario(const ScenarioConfig& cfg) {
    using detail::require;
    ValidationReport report;
    auto& v = report.violations;

    if (cfg.pv) {
        const auto& pv = *cfg.pv;
        require(v, pv.rated_kw >= 0.0, "pv.rated_kw", "rated_kw >= 0");
        require(v, pv.derating >= 0.0 && pv.derating <= 1.0, "pv.derating",
                "derating in [0,1]");
        require(v, pv.ref_irradiance_kw_m2 > 0.0, "pv.ref_irradiance_kw_m2",
                "ref_irradiance_kw_m2 > 0");
        require(v, pv.lifetime_yr > 0.0, "pv.lifetime_yr", "lifetime_yr > 0");
        require(v, pv.noct_degC >= 20.0, "pv.noct_degC", "noct_degC >= 20");
    }
    if (cfg.wind) {
        const auto& w = *cfg.wind;
        require(v, w.rated_kw >= 0.0, "wind.rated_kw", "rated_kw >= 0");
        require(v, w.cut_in_ms > 0.0 && w.cut_in_ms < w.rated_ms &&
                       w.rated_ms < w.cut_out_ms,
                "wind.cut_in_ms", "0 < cut_in < rated < cut_out");
        require(v, w.shear_alpha >= 0.1 && w.shear_alpha <= 0.4,
                "wind.shear_alpha", "shear_alpha in [0.1,0.4]");
        require(v, w.hub_height_m > 0.0 && w.ref_height_m > 0.0,
                "wind.hub_height_m", "heights > 0");
        require(v, w.lifetime_yr > 0.0, "wind.lifetime_yr", "lifetime_yr > 0");
    }
    if (cfg.bg) {
        const auto& b = *cfg.bg;
        require(v, b.rated_kw >= 0.0, "bg.rated_kw", "rated_kw >= 0");
        require(v, b.cuf >= 0.0 && b.cuf <= 1.0, "bg.cuf", "cuf in [0,1]");
        require(v, b.min_load_ratio >= 0.0 && b.min_load_ratio < 1.0,
                "bg.min_load_ratio", "min_load_ratio in [0,1)");
        require(v, b.calorific_value_kj_per_kg > 0.0,
                "bg.calorific_value_kj_per_kg", "calorific_value > 0");
        require(v, b.conversion_eff > 0.0 && b.conversion_eff <= 1.0,
                "bg.conversion_eff", "conversion_eff in (0,1]");
        require(v, b.operating_hours_per_day > 0.0 &&
                       b.operating_hours_per_day <= 24.0,
                "bg.operating_hours_per_day", "operating_hours_per_day in (0,24]");
        require(v, b.lifetime_yr > 0.0, "bg.lifetime_yr", "lifetime_yr > 0");
    }
    if (cfg.dg) {
        const auto& d = *cfg.dg;
        require(v, d.rated_kw >= 0.0, "dg.rated_kw", "rated_kw >= 0");
        require(v, d.fuel_intercept_l_per_h_per_kw >= 0.0,
                "dg.fuel_intercept_l_per_h_per_kw", "fuel coefficients >= 0");
        require(v, d.fuel_slope_l_per_kwh >= 0.0, "dg.fuel_slope_l_per_kwh",
                "fuel coefficients >= 0");
        require(v, d.min_load_ratio >= 0.0 && d.min_load_ratio < 1.0,
                "dg.min_load_ratio", "min_load_ratio in [0,1)");
        require(v, d.fuel_price_usd_per_l >= 0.0, "dg.fuel_price_usd_per_l",
                "fuel_price >= 0");
        require(v, d.lifetime_yr > 0.0, "dg.lifetime_yr", "lifetime_yr > 0");
    }
    if (cfg.battery) {
        const auto& b = *cfg.battery;
        require(v, b.strings >= 0, "battery.strings", "strings >= 0");
        require(v, b.capacity_kwh_per_string >= 0.0,
                "battery.capacity_kwh_per_string", "capacity_kwh_per_string >= 0");
        require(v, b.soc_min_frac >= 0.0 && b.soc_min_frac < 1.0,
                "battery.soc_min_frac", "soc_min_frac in [0,1)");
        require(v, b.charge_eff > 0.0 && b.charge_eff <= 1.0,
                "battery.charge_eff", "charge_eff in (0,1]");
        require(v, b.discharge_eff > 0.0 && b.discharge_eff <= 1.0,
                "battery.discharge_eff", "discharge_eff in (0,1]");
        require(v, !b.max_charge_kw || *b.max_charge_kw >= 0.0,
                "battery.max_charge_kw", "max_charge_kw >= 0");
        require(v, !b.max_discharge_kw || *b.max_discharge_kw >= 0.0,
                "battery.max_discharge_kw", "max_discharge_kw >= 0");
        require(v, b.lifetime_yr > 0.0, "battery.lifetime_yr", "lifetime_yr > 0");
    }
    if (cfg.converter) {
        const auto& c = *cfg.converter;
        require(v, c.rated_kw >= 0.0, "converter.rated_kw", "rated_kw >= 0");
        require(v, c.efficiency > 0.0 && c.efficiency <= 1.0,
                "converter.efficiency", "efficiency in (0,1]");
        require(v, c.lifetime_yr > 0.0, "converter.lifetime_yr",
                "lifetime_yr > 0");
    }
    if (cfg.grid) {
        const auto& g = *cfg.grid;
        require(v, g.purchase_usd_per_kwh >= 0.0, "grid.purchase_usd_per_kwh",
                "prices >= 0");
        require(v, g.sellback_usd_per_kwh >= 0.0, "grid.sellback_usd_per_kwh",
                "prices >= 0");
        require(v, !g.max_purchase_kw || *g.max_purchase_kw >= 0.0,
                "grid.max_purchase_kw", "max_purchase_kw >= 0");
        require(v, !g.max_sale_kw || *g.max_sale_kw >= 0.0, "grid.max_sale_kw",
                "max_sale_kw >= 0");
        // Selling above the purchase tariff is unusual; warn rather than reject.
        require(v, g.sellback_usd_per_kwh <= g.purchase_usd_per_kwh,
                "grid.sellback_usd_per_kwh", "sellback <= purchase",
                Severity::warning);
    }

    require(v, cfg.econ.discount_rate_frac >= 0.0, "econ.discount_rate_frac",
            "discount_rate_frac >= 0");
    require(v, cfg.econ.project_lifetime_yr >= 1, "econ.project_lifetime_yr",
            "project_lifetime_yr >= 1");

    {
        const auto& e = cfg.emissions;
        const double factors[] = {
            e.diesel_co2_kg_per_l, e.diesel_co_kg_per_l, e.diesel_so2_kg_per_l,
            e.diesel_nox_kg_per_l, e.grid_co2_kg_per_kwh, e.grid_co_kg_per_kwh,
            e.grid_so2_kg_per_kwh, e.grid_nox_kg_per_kwh, e.bg_co2_kg_per_kwh,
            e.bg_co_kg_per_kwh, e.bg_so2_kg_per_kwh, e.bg_nox_kg_per_kwh};
        bool ok = true;
        for (double f : factors) ok = ok && f >= 0.0;
        require(v, ok, "emissions", "all factors >= 0");
    }

    require(v, cfg.dispatch.reliability_cap >= 0.0 &&
                   cfg.dispatch.reliability_cap <= 1.0,
            "dispatch.reliability_cap", "reliability_cap in [0,1]");
    require(v, cfg.dispatch.initial_soc_frac >= 0.0 &&
                   cfg.dispatch.initial_soc_frac <= 1.0,
            "dispatch.initial_soc_frac", "initial_soc_frac in [0,1]");

    const bool any_source = cfg.pv.has_value() || cfg.wind.has_value() ||
                            cfg.bg.has_value() || cfg.dg.has_value() ||
                            cfg.has_grid();
    require(v, any_source, "scenario", "at least one generation source present");

    // The load is AC; PV and the battery live on the DC bus.
    const bool dc_side = cfg.pv.has_value() || cfg.has_battery();
    require(v, !dc_side || cfg.converter.has_value(), "scenario",
            "converter required");

    return report;
}

}  // namespace hybridsizer
