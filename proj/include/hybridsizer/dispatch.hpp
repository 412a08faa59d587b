#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hybridsizer/ingest.hpp"
#include "hybridsizer/model.hpp"
#include "hybridsizer/power.hpp"

namespace hybridsizer {

// Hour-by-hour energy balance over the 8,760-slot year. Load is served in
// priority order renewables -> battery discharge -> biomass -> diesel ->
// grid purchase -> unmet; surplus routes battery charge -> grid sale ->
// excess. Converter losses apply on every DC<->AC transfer. Infeasibility
// becomes unmet load, never a fault.

struct BatteryState {
    double soc_kwh = 0.0;
    double capacity_kwh = 0.0;
};

struct BatteryUpdate {
    BatteryState state;
    double charge_applied_kwh = 0.0;     // drawn from the bus at the terminals
    double discharge_applied_kwh = 0.0;  // delivered to the bus at the terminals
};

/// One SOC step. charge/discharge are terminal-side energies for the slot;
/// the cells gain charge*charge_eff and lose discharge/discharge_eff. Any
/// clamp against the SOC bounds is reflected back into the applied amounts
/// so no energy is silently lost.
inline BatteryUpdate battery_update(BatteryState state, double charge_kwh,
                                    double discharge_kwh, const BatterySpec& spec) {
    if (charge_kwh < 0.0 || discharge_kwh < 0.0)
        throw std::invalid_argument("battery flows must be non-negative");
    if (charge_kwh > 0.0 && discharge_kwh > 0.0)
        throw std::invalid_argument("simultaneous battery charge and discharge");

    const double soc_min = spec.soc_min_frac * state.capacity_kwh;
    BatteryUpdate out;
    out.charge_applied_kwh = charge_kwh;
    out.discharge_applied_kwh = discharge_kwh;
    double soc = state.soc_kwh + charge_kwh * spec.charge_eff -
                 discharge_kwh / spec.discharge_eff;
    if (soc > state.capacity_kwh) {
        out.charge_applied_kwh -= (soc - state.capacity_kwh) / spec.charge_eff;
        soc = state.capacity_kwh;
    }
    if (soc < soc_min) {
        out.discharge_applied_kwh -= (soc_min - soc) * spec.discharge_eff;
        soc = soc_min;
    }
    out.state = BatteryState{soc, state.capacity_kwh};
    return out;
}

/// Per-slot flow ledger. The first twelve fields are the trace-CSV columns;
/// served and conv_loss support the conservation checks.
struct SlotFlows {
    double load = 0.0;
    double pv = 0.0;
    double wind = 0.0;
    double bg = 0.0;
    double dg = 0.0;
    double grid_buy = 0.0;
    double grid_sell = 0.0;
    double charge = 0.0;
    double discharge = 0.0;
    double soc = 0.0;
    double unmet = 0.0;
    double excess = 0.0;
    double served = 0.0;
    double conv_loss = 0.0;
};

struct DispatchResult {
    double demand_kwh = 0.0;
    double load_served_kwh = 0.0;
    double unmet_kwh = 0.0;
    double excess_kwh = 0.0;
    double pv_kwh = 0.0;
    double wind_kwh = 0.0;
    double bg_kwh = 0.0;
    double dg_kwh = 0.0;
    double grid_purchase_kwh = 0.0;
    double grid_sale_kwh = 0.0;
    double battery_charge_kwh = 0.0;
    double battery_discharge_kwh = 0.0;
    double conversion_loss_kwh = 0.0;
    double dg_fuel_l = 0.0;
    double bg_feedstock_kg = 0.0;
    double renewable_fraction = 0.0;
    double min_renewable_penetration_frac = 0.0;
    double max_renewable_penetration_frac = 0.0;
    double initial_soc_kwh = 0.0;
    double final_soc_kwh = 0.0;
    std::vector<double> soc_trace;   // end-of-slot SOC, kept when tracing
    std::vector<SlotFlows> trace;    // kept when tracing

    double production_kwh() const {
        return pv_kwh + wind_kwh + bg_kwh + dg_kwh + grid_purchase_kwh;
    }
    double unmet_fraction() const {
        return demand_kwh > 0.0 ? unmet_kwh / demand_kwh : 0.0;
    }
};

/// Sizes of one candidate system. Zero means "not installed"; the
/// absent-vs-zero distinction lives in ScenarioConfig, not here.
struct CandidateSizes {
    double pv_kw = 0.0;
    double wind_kw = 0.0;
    double bg_kw = 0.0;
    double dg_kw = 0.0;
    double converter_kw = 0.0;
    int battery_strings = 0;
    bool grid = false;
};

/// Scenario-wide constants plus the size-independent hourly profiles. Built
/// once, then shared read-only across any number of candidate evaluations.
struct DispatchContext {
    std::vector<double> load_kw;
    std::vector<double> pv_per_kw;    // PV output per kW of nameplate
    std::vector<double> wind_frac;    // turbine output as a fraction of rated
    std::vector<double> bg_feed_kw;   // feedstock-limited BG power

    double converter_eff = 1.0;

    double batt_kwh_per_string = 0.0;
    double batt_soc_min_frac = 0.0;
    double batt_charge_eff = 1.0;
    double batt_discharge_eff = 1.0;
    std::optional<double> batt_max_charge_per_string;
    std::optional<double> batt_max_discharge_per_string;
    double initial_soc_frac = 1.0;

    double bg_min_load_ratio = 0.3;
    double bg_kg_per_kwh = 0.0;       // 3600 / (CV * eta)

    double dg_min_load_ratio = 0.3;
    double dg_fuel_intercept_l_per_h_per_kw = 0.0;
    double dg_fuel_slope_l_per_kwh = 0.0;

    double grid_max_purchase_kw = std::numeric_limits<double>::infinity();
    double grid_max_sale_kw = 0.0;
};

inline DispatchContext make_dispatch_context(const ScenarioConfig& cfg,
                                             const SeriesBundle& series) {
    const std::size_t n = series.load_kw.size();
    if (series.ghi_kw_m2.size() != n || series.wind_ms.size() != n ||
        series.biomass_kg_h.size() != n || series.ambient_degC.size() != n)
        throw std::invalid_argument("series length mismatch");

    DispatchContext ctx;
    ctx.load_kw = series.load_kw.values;

    ctx.pv_per_kw.assign(n, 0.0);
    if (cfg.pv) {
        PvSpec unit = *cfg.pv;
        unit.rated_kw = 1.0;
        const CellTempModel tm{unit.noct_degC};
        for (std::size_t t = 0; t < n; ++t) {
            const double ghi = series.ghi_kw_m2[t];
            const double tc = cell_temperature(tm, series.ambient_degC[t], ghi);
            ctx.pv_per_kw[t] = pv_output(unit, ghi, tc);
        }
    }

    ctx.wind_frac.assign(n, 0.0);
    if (cfg.wind) {
        WindSpec unit = *cfg.wind;
        unit.rated_kw = 1.0;
        for (std::size_t t = 0; t < n; ++t)
            ctx.wind_frac[t] = wind_output(unit, wind_speed_at_hub(unit, series.wind_ms[t]));
    }

    ctx.bg_feed_kw.assign(n, 0.0);
    if (cfg.bg) {
        const double kwh_per_kg =
            cfg.bg->calorific_value_kj_per_kg * cfg.bg->conversion_eff / 3600.0;
        ctx.bg_kg_per_kwh = kwh_per_kg > 0.0 ? 1.0 / kwh_per_kg : 0.0;
        for (std::size_t t = 0; t < n; ++t)
            ctx.bg_feed_kw[t] = series.biomass_kg_h[t] * kwh_per_kg;
        ctx.bg_min_load_ratio = cfg.bg->min_load_ratio;
    }

    if (cfg.converter) ctx.converter_eff = cfg.converter->efficiency;

    if (cfg.battery) {
        const auto& b = *cfg.battery;
        ctx.batt_kwh_per_string = b.capacity_kwh_per_string;
        ctx.batt_soc_min_frac = b.soc_min_frac;
        ctx.batt_charge_eff = b.charge_eff;
        ctx.batt_discharge_eff = b.discharge_eff;
        if (b.strings > 0) {
            if (b.max_charge_kw)
                ctx.batt_max_charge_per_string = *b.max_charge_kw / b.strings;
            if (b.max_discharge_kw)
                ctx.batt_max_discharge_per_string = *b.max_discharge_kw / b.strings;
        }
    }
    ctx.initial_soc_frac = cfg.dispatch.initial_soc_frac;

    if (cfg.dg) {
        ctx.dg_min_load_ratio = cfg.dg->min_load_ratio;
        ctx.dg_fuel_intercept_l_per_h_per_kw = cfg.dg->fuel_intercept_l_per_h_per_kw;
        ctx.dg_fuel_slope_l_per_kwh = cfg.dg->fuel_slope_l_per_kwh;
    }

    if (cfg.has_grid()) {
        ctx.grid_max_purchase_kw = cfg.grid->max_purchase();
        ctx.grid_max_sale_kw = cfg.grid->max_sale();
    }

    return ctx;
}

inline CandidateSizes sizes_from_config(const ScenarioConfig& cfg) {
    CandidateSizes s;
    if (cfg.pv) s.pv_kw = cfg.pv->rated_kw;
    if (cfg.wind) s.wind_kw = cfg.wind->rated_kw;
    if (cfg.bg) s.bg_kw = cfg.bg->rated_kw;
    if (cfg.dg) s.dg_kw = cfg.dg->rated_kw;
    if (cfg.converter) s.converter_kw = cfg.converter->rated_kw;
    if (cfg.battery) s.battery_strings = cfg.battery->strings;
    s.grid = cfg.has_grid();
    return s;
}

namespace detail {

inline double clamp0(double x) { return x > 0.0 ? x : 0.0; }

/// Dispatchable generator slot decision under the minimum-load rule: a unit
/// asked for less than its minimum runs at the minimum (surplus routed like
/// any other surplus); a unit whose available ceiling is below the minimum
/// stays off.
struct DispatchableRun {
    double run = 0.0;
    double to_load = 0.0;
    double surplus = 0.0;
};

inline DispatchableRun run_dispatchable(double remaining, double avail_kw,
                                        double min_run_kw) {
    DispatchableRun r;
    if (remaining <= 0.0 || avail_kw <= 0.0) return r;
    double run = std::min(remaining, avail_kw);
    if (run < min_run_kw) {
        if (min_run_kw > avail_kw) return r;
        run = min_run_kw;
    }
    r.run = run;
    r.to_load = std::min(run, remaining);
    r.surplus = run - r.to_load;
    return r;
}

}  // namespace detail

/// Load-following balance for one hourly slot (kW and kWh coincide).
/// `ren_soc`/`nonren_soc` split the battery's cell energy by charging origin
/// so the annual renewable fraction stays exact when forced diesel-minimum
/// surplus ends up stored. Returns the slot ledger; `ren_served` receives the
/// renewable-origin portion of the energy served.
inline SlotFlows step_hour(const DispatchContext& ctx, const CandidateSizes& sz,
                           double load, double pv, double wind, double bg_avail,
                           BatteryState& batt, const BatterySpec& batt_spec,
                           double& ren_soc, double& nonren_soc, double& ren_served,
                           double& dg_fuel_l, double& bg_feedstock_kg) {
    using detail::clamp0;
    SlotFlows f;
    f.load = load;
    f.pv = pv;
    f.wind = wind;

    const double eta = ctx.converter_eff;
    double inv_left = sz.converter_kw;   // AC output headroom, inverting
    double rect_left = sz.converter_kw;  // DC output headroom, rectifying
    double remaining = load;

    // Renewables first: wind is AC-coupled, PV inverts from the DC bus.
    const double wind_to_load = std::min(wind, remaining);
    remaining = clamp0(remaining - wind_to_load);

    double pv_to_load_ac = std::min({pv * eta, remaining, inv_left});
    pv_to_load_ac = clamp0(pv_to_load_ac);
    const double pv_used_dc = eta > 0.0 ? pv_to_load_ac / eta : 0.0;
    inv_left -= pv_to_load_ac;
    remaining = clamp0(remaining - pv_to_load_ac);
    f.conv_loss += pv_used_dc - pv_to_load_ac;
    double pv_surplus_dc = clamp0(pv - pv_used_dc);

    // Battery discharge, DC terminals -> inverter -> load.
    double discharge_to_load_ac = 0.0;
    const double capacity = batt.capacity_kwh;
    if (capacity > 0.0 && remaining > 0.0 && inv_left > 0.0) {
        const double soc_min = ctx.batt_soc_min_frac * capacity;
        const double max_rate = ctx.batt_max_discharge_per_string
                                    ? *ctx.batt_max_discharge_per_string * sz.battery_strings
                                    : capacity / 4.0;
        const double avail_term =
            std::min(max_rate, clamp0(batt.soc_kwh - soc_min) * ctx.batt_discharge_eff);
        discharge_to_load_ac = clamp0(std::min({avail_term * eta, remaining, inv_left}));
        if (discharge_to_load_ac > 0.0) {
            const double term = discharge_to_load_ac / eta;
            const auto upd = battery_update(batt, 0.0, term, batt_spec);
            batt = upd.state;
            f.discharge = upd.discharge_applied_kwh;
            f.conv_loss += f.discharge - discharge_to_load_ac;
            inv_left -= discharge_to_load_ac;
            remaining = clamp0(remaining - discharge_to_load_ac);
            // Draw down the origin buckets proportionally.
            const double cells = f.discharge / ctx.batt_discharge_eff;
            const double total = ren_soc + nonren_soc;
            const double ren_share = total > 0.0 ? ren_soc / total : 1.0;
            ren_soc = clamp0(ren_soc - cells * ren_share);
            nonren_soc = clamp0(nonren_soc - cells * (1.0 - ren_share));
            ren_served += discharge_to_load_ac * ren_share;
        }
    }

    // Dispatchables: biomass before diesel (renewable, no fuel bill).
    const auto bg = detail::run_dispatchable(
        remaining, std::min(sz.bg_kw, bg_avail), ctx.bg_min_load_ratio * sz.bg_kw);
    f.bg = bg.run;
    remaining = clamp0(remaining - bg.to_load);
    bg_feedstock_kg += bg.run * ctx.bg_kg_per_kwh;

    const auto dg = detail::run_dispatchable(remaining, sz.dg_kw,
                                             ctx.dg_min_load_ratio * sz.dg_kw);
    f.dg = dg.run;
    remaining = clamp0(remaining - dg.to_load);
    if (dg.run > 0.0)
        dg_fuel_l += ctx.dg_fuel_intercept_l_per_h_per_kw * sz.dg_kw +
                     ctx.dg_fuel_slope_l_per_kwh * dg.run;

    if (sz.grid) {
        f.grid_buy = std::min(remaining, ctx.grid_max_purchase_kw);
        remaining = clamp0(remaining - f.grid_buy);
    }
    f.unmet = remaining;
    f.served = load - f.unmet;
    ren_served += wind_to_load + pv_to_load_ac + bg.to_load;

    // Surplus routing: battery charge, then grid sale, then excess.
    double ac_surplus = (wind - wind_to_load) + bg.surplus + dg.surplus;
    if (capacity > 0.0 && f.discharge == 0.0 &&
        (pv_surplus_dc > 0.0 || ac_surplus > 0.0)) {
        const double max_rate = ctx.batt_max_charge_per_string
                                    ? *ctx.batt_max_charge_per_string * sz.battery_strings
                                    : capacity / 4.0;
        double headroom_term = std::min(
            max_rate, clamp0(capacity - batt.soc_kwh) / ctx.batt_charge_eff);

        // DC surplus charges directly; AC surplus rectifies in after it.
        const double chg_dc = std::min(pv_surplus_dc, headroom_term);
        headroom_term -= chg_dc;
        const double chg_from_ac_dc =
            clamp0(std::min({ac_surplus * eta, headroom_term, rect_left}));
        const double ac_used = eta > 0.0 ? chg_from_ac_dc / eta : 0.0;
        rect_left -= chg_from_ac_dc;
        f.conv_loss += ac_used - chg_from_ac_dc;

        const double requested = chg_dc + chg_from_ac_dc;
        if (requested > 0.0) {
            const auto upd = battery_update(batt, requested, 0.0, batt_spec);
            batt = upd.state;
            f.charge = upd.charge_applied_kwh;
            const double dg_share = ac_surplus > 0.0 ? dg.surplus / ac_surplus : 0.0;
            pv_surplus_dc -= chg_dc;
            ac_surplus -= ac_used;
            // Tag stored cell energy by origin: PV/wind/BG surplus is
            // renewable, forced diesel surplus is not.
            const double nonren_in = chg_from_ac_dc * ctx.batt_charge_eff * dg_share;
            nonren_soc += nonren_in;
            ren_soc += f.charge * ctx.batt_charge_eff - nonren_in;
        }
    }

    double sale_left = sz.grid ? ctx.grid_max_sale_kw : 0.0;
    const double sale_ac = std::min(ac_surplus, sale_left);
    ac_surplus -= sale_ac;
    sale_left -= sale_ac;

    // Remaining DC surplus passes the inverter (sold if possible, dumped on
    // the AC side otherwise); anything the converter cannot move strands on
    // the DC bus and counts as excess there.
    double pv_conv_ac = clamp0(std::min(pv_surplus_dc * eta, inv_left));
    const double pv_conv_dc = eta > 0.0 ? pv_conv_ac / eta : 0.0;
    pv_surplus_dc -= pv_conv_dc;
    inv_left -= pv_conv_ac;
    f.conv_loss += pv_conv_dc - pv_conv_ac;
    const double sale_pv = std::min(pv_conv_ac, sale_left);
    pv_conv_ac -= sale_pv;

    f.grid_sell = sale_ac + sale_pv;
    f.excess = ac_surplus + pv_conv_ac + pv_surplus_dc;
    f.soc = batt.soc_kwh;
    return f;
}

struct SimulateOptions {
    bool keep_trace = false;
};

/// Folds step_hour over the whole year from a prebuilt context. Pure and
/// deterministic; many candidates may run concurrently against one context.
inline DispatchResult run_dispatch(const DispatchContext& ctx, const CandidateSizes& sz,
                                   const SimulateOptions& opts = {}) {
    const std::size_t n = ctx.load_kw.size();
    DispatchResult r;

    BatterySpec batt_spec;
    batt_spec.capacity_kwh_per_string = ctx.batt_kwh_per_string;
    batt_spec.strings = sz.battery_strings;
    batt_spec.soc_min_frac = ctx.batt_soc_min_frac;
    batt_spec.charge_eff = ctx.batt_charge_eff;
    batt_spec.discharge_eff = ctx.batt_discharge_eff;

    BatteryState batt;
    batt.capacity_kwh = batt_spec.capacity_kwh();
    const double soc_min = ctx.batt_soc_min_frac * batt.capacity_kwh;
    batt.soc_kwh = std::clamp(ctx.initial_soc_frac * batt.capacity_kwh, soc_min,
                              batt.capacity_kwh);
    r.initial_soc_kwh = batt.soc_kwh;

    // Year-start stored energy is treated as renewable-origin.
    double ren_soc = batt.soc_kwh;
    double nonren_soc = 0.0;
    double ren_served = 0.0;

    double min_pen = std::numeric_limits<double>::infinity();
    double max_pen = 0.0;
    bool any_load = false;

    if (opts.keep_trace) {
        r.soc_trace.reserve(n);
        r.trace.reserve(n);
    }

    for (std::size_t t = 0; t < n; ++t) {
        const double load = ctx.load_kw[t];
        const double pv = sz.pv_kw * ctx.pv_per_kw[t];
        const double wind = sz.wind_kw * ctx.wind_frac[t];
        const double bg_avail = sz.bg_kw > 0.0 ? ctx.bg_feed_kw[t] : 0.0;

        const SlotFlows f =
            step_hour(ctx, sz, load, pv, wind, bg_avail, batt, batt_spec, ren_soc,
                      nonren_soc, ren_served, r.dg_fuel_l, r.bg_feedstock_kg);

        r.demand_kwh += load;
        r.load_served_kwh += f.served;
        r.unmet_kwh += f.unmet;
        r.excess_kwh += f.excess;
        r.pv_kwh += f.pv;
        r.wind_kwh += f.wind;
        r.bg_kwh += f.bg;
        r.dg_kwh += f.dg;
        r.grid_purchase_kwh += f.grid_buy;
        r.grid_sale_kwh += f.grid_sell;
        r.battery_charge_kwh += f.charge;
        r.battery_discharge_kwh += f.discharge;
        r.conversion_loss_kwh += f.conv_loss;

        if (load > 0.0) {
            any_load = true;
            const double pen = (f.pv + f.wind + f.bg) / load;
            min_pen = std::min(min_pen, pen);
            max_pen = std::max(max_pen, pen);
        }
        if (opts.keep_trace) {
            r.soc_trace.push_back(batt.soc_kwh);
            r.trace.push_back(f);
        }
    }

    r.final_soc_kwh = batt.soc_kwh;
    r.renewable_fraction =
        r.load_served_kwh > 0.0 ? ren_served / r.load_served_kwh : 0.0;
    r.min_renewable_penetration_frac = any_load ? min_pen : 0.0;
    r.max_renewable_penetration_frac = any_load ? max_pen : 0.0;
    return r;
}

/// Full-year simulation of one scenario: builds the context from the config
/// and series bundle, then dispatches. Series must all be the same length.
inline DispatchResult simulate_year(const ScenarioConfig& cfg, const SeriesBundle& series,
                                    const SimulateOptions& opts = {}) {
    const DispatchContext ctx = make_dispatch_context(cfg, series);
    return run_dispatch(ctx, sizes_from_config(cfg), opts);
}

}  // namespace hybridsizer
