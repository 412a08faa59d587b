#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybridsizer/econ.hpp"
#include "hybridsizer/emissions.hpp"
#include "hybridsizer/optimize.hpp"

namespace hybridsizer {

// Rendering of results into the published table shapes and plot-ready CSVs.
// Pure formatting: re-rendering identical inputs is byte-identical, and
// every numeric cell parses back to its source value within the stated
// formatting precision (kWh as integers, money in fixed dollars below 1e6
// and as "<x.xx>M" above, fractions as percentages with two decimals).

enum class TableId {
    T2_energy,
    T3_renewable,
    T4_cost_perf,
    T5_grid_econ,
    T6_sizing_emissions,
    T7_indicators,
};

inline std::optional<TableId> table_id_from_string(const std::string& name) {
    if (name == "T2" || name == "T2_energy") return TableId::T2_energy;
    if (name == "T3" || name == "T3_renewable") return TableId::T3_renewable;
    if (name == "T4" || name == "T4_cost_perf") return TableId::T4_cost_perf;
    if (name == "T5" || name == "T5_grid_econ") return TableId::T5_grid_econ;
    if (name == "T6" || name == "T6_sizing_emissions") return TableId::T6_sizing_emissions;
    if (name == "T7" || name == "T7_indicators") return TableId::T7_indicators;
    return std::nullopt;
}

inline const char* table_file_stem(TableId id) {
    switch (id) {
        case TableId::T2_energy: return "T2";
        case TableId::T3_renewable: return "T3";
        case TableId::T4_cost_perf: return "T4";
        case TableId::T5_grid_econ: return "T5";
        case TableId::T6_sizing_emissions: return "T6";
        case TableId::T7_indicators: return "T7";
    }
    return "T?";
}

namespace fmt {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::string kwh(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(v)));
    return buf;
}

inline std::string money(double v) {
    if (std::abs(v) >= 1e6) return fixed(v / 1e6, 2) + "M";
    return fixed(v, 2);
}

inline std::string pct(double frac) { return fixed(frac * 100.0, 2); }

inline std::string coe(double v) { return fixed(v, 4); }

inline std::string kw(double v) { return fixed(v, 1); }

inline std::string opt(const std::optional<double>& v, std::string (*f)(double)) {
    return v ? f(*v) : "undefined";
}

}  // namespace fmt

namespace detail {

inline double component_om(const CostReport& cost) {
    double om = 0.0;
    for (const auto& [name, a] : cost.components) om += a.om;
    return om;
}

inline void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
    }
    out += '\n';
}

}  // namespace detail

/// Renders one table over the feasible, rank-ordered designs. T7 compares
/// each design against a base case: the design whose digest matches
/// `t7_base_digest` when given, else the grid-only design in the list; with
/// no base available the table is header-only.
inline std::string render_table(TableId id, const std::vector<RankedDesign>& designs,
                                const EconParams& econ = {},
                                const std::string& t7_base_digest = {}) {
    using detail::append_row;
    std::string out;

    std::vector<const RankedDesign*> rows;
    for (const auto& d : designs)
        if (d.feasible) rows.push_back(&d);

    switch (id) {
        case TableId::T2_energy: {
            append_row(out, {"system", "wp_kwh_yr", "bg_kwh_yr", "pv_kwh_yr",
                             "dg_kwh_yr", "grid_kwh_yr", "production_kwh_yr"});
            for (const auto* d : rows)
                append_row(out, {d->label, fmt::kwh(d->dispatch.wind_kwh),
                                 fmt::kwh(d->dispatch.bg_kwh), fmt::kwh(d->dispatch.pv_kwh),
                                 fmt::kwh(d->dispatch.dg_kwh),
                                 fmt::kwh(d->dispatch.grid_purchase_kwh),
                                 fmt::kwh(d->dispatch.production_kwh())});
            return out;
        }
        case TableId::T3_renewable: {
            append_row(out, {"system", "ren_frac_pct", "excess_kwh_yr", "unmet_kwh_yr",
                             "min_rp_pct", "max_rp_pct"});
            for (const auto* d : rows)
                append_row(out,
                           {d->label, fmt::pct(d->dispatch.renewable_fraction),
                            fmt::kwh(d->dispatch.excess_kwh), fmt::kwh(d->dispatch.unmet_kwh),
                            fmt::pct(d->dispatch.min_renewable_penetration_frac),
                            fmt::pct(d->dispatch.max_renewable_penetration_frac)});
            return out;
        }
        case TableId::T4_cost_perf: {
            append_row(out, {"system", "coe_usd_per_kwh", "npc_usd", "initial_cost_usd",
                             "operating_cost_usd_per_yr", "om_usd_per_yr", "ren_frac_pct",
                             "excess_kwh_yr", "unmet_kwh_yr"});
            for (const auto* d : rows)
                append_row(out, {d->label, fmt::coe(d->cost.coe), fmt::money(d->cost.npc),
                                 fmt::money(d->cost.initial_cost),
                                 fmt::money(d->cost.operating_cost),
                                 fmt::money(detail::component_om(d->cost)),
                                 fmt::pct(d->dispatch.renewable_fraction),
                                 fmt::kwh(d->dispatch.excess_kwh),
                                 fmt::kwh(d->dispatch.unmet_kwh)});
            return out;
        }
        case TableId::T5_grid_econ: {
            append_row(out, {"system", "coe_usd_per_kwh", "npc_usd", "initial_cost_usd",
                             "operating_cost_usd_per_yr", "om_usd_per_yr"});
            for (const auto* d : rows)
                append_row(out, {d->label, fmt::coe(d->cost.coe), fmt::money(d->cost.npc),
                                 fmt::money(d->cost.initial_cost),
                                 fmt::money(d->cost.operating_cost),
                                 fmt::money(detail::component_om(d->cost))});
            return out;
        }
        case TableId::T6_sizing_emissions: {
            append_row(out, {"system", "pv_kw", "wind_kw", "bg_kw", "dg_kw",
                             "battery_strings", "converter_kw", "grid",
                             "production_kwh_yr", "grid_purchase_kwh_yr", "co2_kg_yr",
                             "co_kg_yr", "so2_kg_yr", "nox_kg_yr"});
            for (const auto* d : rows)
                append_row(out,
                           {d->label, fmt::kw(d->sizes.pv_kw), fmt::kw(d->sizes.wind_kw),
                            fmt::kw(d->sizes.bg_kw), fmt::kw(d->sizes.dg_kw),
                            std::to_string(d->sizes.battery_strings),
                            fmt::kw(d->sizes.converter_kw), d->sizes.grid ? "yes" : "no",
                            fmt::kwh(d->dispatch.production_kwh()),
                            fmt::kwh(d->dispatch.grid_purchase_kwh),
                            fmt::fixed(d->emissions.total.co2_kg, 2),
                            fmt::fixed(d->emissions.total.co_kg, 2),
                            fmt::fixed(d->emissions.total.so2_kg, 2),
                            fmt::fixed(d->emissions.total.nox_kg, 2)});
            return out;
        }
        case TableId::T7_indicators: {
            append_row(out, {"system", "base_case", "present_worth_usd",
                             "annual_worth_usd_per_yr", "roi_pct", "irr_pct",
                             "simple_payback_yr", "discounted_payback_yr"});
            const RankedDesign* base = nullptr;
            for (const auto* d : rows) {
                if (!t7_base_digest.empty() ? d->digest == t7_base_digest
                                            : d->label == "Grid") {
                    base = d;
                    break;
                }
            }
            if (!base) return out;
            for (const auto* d : rows) {
                const ComparisonReport cmp =
                    compare_to_base(d->cost, base->cost, econ, base->label);
                auto pct_of = [](const std::optional<double>& v) {
                    return v ? fmt::pct(*v) : std::string("undefined");
                };
                append_row(out, {d->label, cmp.base_case, fmt::money(cmp.present_worth),
                                 fmt::money(cmp.annual_worth), pct_of(cmp.roi_frac),
                                 pct_of(cmp.irr_frac),
                                 fmt::opt(cmp.simple_payback_yr,
                                          [](double v) { return fmt::fixed(v, 2); }),
                                 fmt::opt(cmp.discounted_payback_yr,
                                          [](double v) { return fmt::fixed(v, 2); })});
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown table id");
}

inline const std::vector<std::string>& trace_channels() {
    static const std::vector<std::string> channels = {
        "load",   "pv",        "wind",   "bg",        "dg",    "grid_buy",
        "grid_sell", "charge", "discharge", "soc",    "unmet", "excess"};
    return channels;
}

namespace detail {

inline double channel_value(const SlotFlows& f, const std::string& channel) {
    if (channel == "load") return f.load;
    if (channel == "pv") return f.pv;
    if (channel == "wind") return f.wind;
    if (channel == "bg") return f.bg;
    if (channel == "dg") return f.dg;
    if (channel == "grid_buy") return f.grid_buy;
    if (channel == "grid_sell") return f.grid_sell;
    if (channel == "charge") return f.charge;
    if (channel == "discharge") return f.discharge;
    if (channel == "soc") return f.soc;
    if (channel == "unmet") return f.unmet;
    if (channel == "excess") return f.excess;
    throw std::invalid_argument("unknown trace channel: " + channel);
}

}  // namespace detail

/// Full per-slot trace: `slot,load,pv,wind,bg,dg,grid_buy,grid_sell,charge,
/// discharge,soc,unmet,excess`.
inline std::string render_trace(const DispatchResult& result) {
    if (result.trace.empty())
        throw std::invalid_argument("trace not retained for this run");
    std::string out = "slot";
    for (const auto& c : trace_channels()) {
        out += ',';
        out += c;
    }
    out += '\n';
    for (std::size_t t = 0; t < result.trace.size(); ++t) {
        out += std::to_string(t);
        for (const auto& c : trace_channels()) {
            out += ',';
            out += fmt::fixed(detail::channel_value(result.trace[t], c), 6);
        }
        out += '\n';
    }
    return out;
}

/// Single-channel slot-indexed CSV for plotting.
inline std::string render_timeseries(const DispatchResult& result,
                                     const std::string& channel) {
    if (result.trace.empty())
        throw std::invalid_argument("trace not retained for this run");
    std::string out = "slot," + channel + "\n";
    for (std::size_t t = 0; t < result.trace.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += fmt::fixed(detail::channel_value(result.trace[t], channel), 6);
        out += '\n';
    }
    return out;
}

// ---- machine-readable summaries -----------------------------------------

inline nlohmann::ordered_json to_json(const DispatchResult& r) {
    return nlohmann::ordered_json{
        {"demand_kwh", r.demand_kwh},
        {"load_served_kwh", r.load_served_kwh},
        {"unmet_kwh", r.unmet_kwh},
        {"unmet_fraction", r.unmet_fraction()},
        {"excess_kwh", r.excess_kwh},
        {"pv_kwh", r.pv_kwh},
        {"wind_kwh", r.wind_kwh},
        {"bg_kwh", r.bg_kwh},
        {"dg_kwh", r.dg_kwh},
        {"grid_purchase_kwh", r.grid_purchase_kwh},
        {"grid_sale_kwh", r.grid_sale_kwh},
        {"battery_charge_kwh", r.battery_charge_kwh},
        {"battery_discharge_kwh", r.battery_discharge_kwh},
        {"conversion_loss_kwh", r.conversion_loss_kwh},
        {"dg_fuel_l", r.dg_fuel_l},
        {"bg_feedstock_kg", r.bg_feedstock_kg},
        {"renewable_fraction", r.renewable_fraction},
        {"min_renewable_penetration_frac", r.min_renewable_penetration_frac},
        {"max_renewable_penetration_frac", r.max_renewable_penetration_frac},
        {"initial_soc_kwh", r.initial_soc_kwh},
        {"final_soc_kwh", r.final_soc_kwh},
    };
}

inline nlohmann::ordered_json to_json(const CostReport& r) {
    nlohmann::ordered_json components = nlohmann::ordered_json::object();
    for (const auto& [name, a] : r.components)
        components[name] = {{"capital_usd_per_yr", a.capital},
                            {"replacement_usd_per_yr", a.replacement},
                            {"om_usd_per_yr", a.om},
                            {"fuel_usd_per_yr", a.fuel},
                            {"salvage_usd_per_yr", a.salvage},
                            {"total_usd_per_yr", a.total}};
    return nlohmann::ordered_json{
        {"crf", r.crf},
        {"c_ann_tot_usd_per_yr", r.c_ann_tot},
        {"npc_usd", r.npc},
        {"coe_usd_per_kwh", r.coe},
        {"initial_cost_usd", r.initial_cost},
        {"operating_cost_usd_per_yr", r.operating_cost},
        {"e_served_kwh", r.e_served_kwh},
        {"components", components},
    };
}

inline nlohmann::ordered_json to_json(const GasTotals& g) {
    return nlohmann::ordered_json{{"co2_kg", g.co2_kg},
                                  {"co_kg", g.co_kg},
                                  {"so2_kg", g.so2_kg},
                                  {"nox_kg", g.nox_kg}};
}

inline nlohmann::ordered_json to_json(const EmissionReport& r) {
    return nlohmann::ordered_json{{"diesel", to_json(r.diesel)},
                                  {"grid", to_json(r.grid)},
                                  {"biomass", to_json(r.biomass)},
                                  {"total", to_json(r.total)}};
}

inline nlohmann::ordered_json to_json(const ValidationReport& r) {
    nlohmann::ordered_json violations = nlohmann::ordered_json::array();
    for (const auto& v : r.violations)
        violations.push_back({{"severity", v.severity == Severity::error ? "error" : "warning"},
                              {"field", v.field},
                              {"message", v.message}});
    return nlohmann::ordered_json{{"simulable", r.simulable()},
                                  {"violations", violations}};
}

inline nlohmann::ordered_json to_json(const RankedDesign& d) {
    return nlohmann::ordered_json{
        {"rank", d.rank ? nlohmann::ordered_json(*d.rank) : nlohmann::ordered_json()},
        {"feasible", d.feasible},
        {"digest", d.digest},
        {"system", d.label},
        {"sizes",
         {{"pv_kw", d.sizes.pv_kw},
          {"wind_kw", d.sizes.wind_kw},
          {"bg_kw", d.sizes.bg_kw},
          {"dg_kw", d.sizes.dg_kw},
          {"battery_strings", d.sizes.battery_strings},
          {"converter_kw", d.sizes.converter_kw},
          {"grid", d.sizes.grid}}},
        {"dispatch", to_json(d.dispatch)},
        {"cost", to_json(d.cost)},
        {"emissions", to_json(d.emissions)},
    };
}

// Inverse of the summaries above, enough to re-render tables from a stored
// summary.json.

inline DispatchResult dispatch_from_json(const nlohmann::json& j) {
    DispatchResult r;
    r.demand_kwh = j.at("demand_kwh").get<double>();
    r.load_served_kwh = j.at("load_served_kwh").get<double>();
    r.unmet_kwh = j.at("unmet_kwh").get<double>();
    r.excess_kwh = j.at("excess_kwh").get<double>();
    r.pv_kwh = j.at("pv_kwh").get<double>();
    r.wind_kwh = j.at("wind_kwh").get<double>();
    r.bg_kwh = j.at("bg_kwh").get<double>();
    r.dg_kwh = j.at("dg_kwh").get<double>();
    r.grid_purchase_kwh = j.at("grid_purchase_kwh").get<double>();
    r.grid_sale_kwh = j.at("grid_sale_kwh").get<double>();
    r.battery_charge_kwh = j.at("battery_charge_kwh").get<double>();
    r.battery_discharge_kwh = j.at("battery_discharge_kwh").get<double>();
    r.conversion_loss_kwh = j.at("conversion_loss_kwh").get<double>();
    r.dg_fuel_l = j.at("dg_fuel_l").get<double>();
    r.bg_feedstock_kg = j.at("bg_feedstock_kg").get<double>();
    r.renewable_fraction = j.at("renewable_fraction").get<double>();
    r.min_renewable_penetration_frac =
        j.at("min_renewable_penetration_frac").get<double>();
    r.max_renewable_penetration_frac =
        j.at("max_renewable_penetration_frac").get<double>();
    r.initial_soc_kwh = j.at("initial_soc_kwh").get<double>();
    r.final_soc_kwh = j.at("final_soc_kwh").get<double>();
    return r;
}

inline CostReport cost_from_json(const nlohmann::json& j) {
    CostReport r;
    r.crf = j.at("crf").get<double>();
    r.c_ann_tot = j.at("c_ann_tot_usd_per_yr").get<double>();
    r.npc = j.at("npc_usd").get<double>();
    r.coe = j.at("coe_usd_per_kwh").get<double>();
    r.initial_cost = j.at("initial_cost_usd").get<double>();
    r.operating_cost = j.at("operating_cost_usd_per_yr").get<double>();
    r.e_served_kwh = j.at("e_served_kwh").get<double>();
    for (const auto& [name, c] : j.at("components").items()) {
        ComponentAnnualCost a;
        a.capital = c.at("capital_usd_per_yr").get<double>();
        a.replacement = c.at("replacement_usd_per_yr").get<double>();
        a.om = c.at("om_usd_per_yr").get<double>();
        a.fuel = c.at("fuel_usd_per_yr").get<double>();
        a.salvage = c.at("salvage_usd_per_yr").get<double>();
        a.total = c.at("total_usd_per_yr").get<double>();
        r.components.emplace_back(name, a);
    }
    return r;
}

inline GasTotals gas_from_json(const nlohmann::json& j) {
    return {j.at("co2_kg").get<double>(), j.at("co_kg").get<double>(),
            j.at("so2_kg").get<double>(), j.at("nox_kg").get<double>()};
}

inline EmissionReport emissions_from_json(const nlohmann::json& j) {
    EmissionReport r;
    r.diesel = gas_from_json(j.at("diesel"));
    r.grid = gas_from_json(j.at("grid"));
    r.biomass = gas_from_json(j.at("biomass"));
    r.total = gas_from_json(j.at("total"));
    return r;
}

inline RankedDesign design_from_json(const nlohmann::json& j) {
    RankedDesign d;
    if (j.contains("rank") && !j.at("rank").is_null())
        d.rank = j.at("rank").get<int>();
    d.feasible = j.at("feasible").get<bool>();
    d.digest = j.at("digest").get<std::string>();
    d.label = j.at("system").get<std::string>();
    const auto& s = j.at("sizes");
    d.sizes.pv_kw = s.at("pv_kw").get<double>();
    d.sizes.wind_kw = s.at("wind_kw").get<double>();
    d.sizes.bg_kw = s.at("bg_kw").get<double>();
    d.sizes.dg_kw = s.at("dg_kw").get<double>();
    d.sizes.battery_strings = s.at("battery_strings").get<int>();
    d.sizes.converter_kw = s.at("converter_kw").get<double>();
    d.sizes.grid = s.at("grid").get<bool>();
    d.dispatch = dispatch_from_json(j.at("dispatch"));
    d.cost = cost_from_json(j.at("cost"));
    d.emissions = emissions_from_json(j.at("emissions"));
    return d;
}

}  // namespace hybridsizer
