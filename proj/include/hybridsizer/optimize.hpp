#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hybridsizer/digest.hpp"
#include "hybridsizer/dispatch.hpp"
#include "hybridsizer/econ.hpp"
#include "hybridsizer/emissions.hpp"
#include "hybridsizer/model.hpp"

namespace hybridsizer {

// Sizing search: enumerate the Cartesian product of per-component candidate
// size lists, simulate and cost every candidate, filter on the reliability
// cap, and rank the feasible set by NPC. The search is exhaustive, not
// heuristic; every ranking is reproducible from the space file alone.

/// One axis of the search space: candidate sizes in ascending order, where
/// an empty optional means the component is excluded (not size zero).
template <typename T>
using SizeAxis = std::vector<std::optional<T>>;

struct SearchSpace {
    ScenarioConfig base;  // prototype specs, economics, factors, dispatch options
    SizeAxis<double> pv_kw{std::nullopt};
    SizeAxis<double> wind_kw{std::nullopt};
    SizeAxis<double> bg_kw{std::nullopt};
    SizeAxis<double> dg_kw{std::nullopt};
    SizeAxis<int> battery_strings{std::nullopt};
    SizeAxis<double> converter_kw{std::nullopt};
    std::vector<bool> grid_present{false};
    std::vector<DispatchStrategy> strategies{DispatchStrategy::load_following};
    double reliability_cap = 0.001;
};

/// Fills single-entry axes from the base scenario so a space file only has
/// to list the components it actually varies.
inline void default_axes_from_base(SearchSpace& space) {
    auto base_axis = [](auto& axis, const auto& spec, auto size_of) {
        using V = std::decay_t<decltype(size_of(*spec))>;
        axis = SizeAxis<V>{spec ? std::optional<V>(size_of(*spec)) : std::nullopt};
    };
    base_axis(space.pv_kw, space.base.pv, [](const PvSpec& s) { return s.rated_kw; });
    base_axis(space.wind_kw, space.base.wind,
              [](const WindSpec& s) { return s.rated_kw; });
    base_axis(space.bg_kw, space.base.bg, [](const BgSpec& s) { return s.rated_kw; });
    base_axis(space.dg_kw, space.base.dg, [](const DgSpec& s) { return s.rated_kw; });
    base_axis(space.battery_strings, space.base.battery,
              [](const BatterySpec& s) { return s.strings; });
    base_axis(space.converter_kw, space.base.converter,
              [](const ConverterSpec& s) { return s.rated_kw; });
    space.grid_present = {space.base.has_grid()};
    space.strategies = {space.base.dispatch.strategy};
    space.reliability_cap = space.base.dispatch.reliability_cap;
}

namespace detail {

template <typename T>
void check_axis(const SizeAxis<T>& axis, const char* name) {
    if (axis.empty())
        throw std::invalid_argument(std::string(name) + " axis must be non-empty");
    std::optional<T> last;
    for (const auto& e : axis) {
        if (!e) continue;
        if (*e < T{0})
            throw std::invalid_argument(std::string(name) + " sizes must be >= 0");
        if (last && *e < *last)
            throw std::invalid_argument(std::string(name) + " sizes must ascend");
        last = e;
    }
}

inline void scale_cost_block(double& capital, double& replacement, double& om,
                             double ratio) {
    capital *= ratio;
    replacement *= ratio;
    om *= ratio;
}

}  // namespace detail

inline void validate_space(const SearchSpace& space) {
    detail::check_axis(space.pv_kw, "pv_kw");
    detail::check_axis(space.wind_kw, "wind_kw");
    detail::check_axis(space.bg_kw, "bg_kw");
    detail::check_axis(space.dg_kw, "dg_kw");
    detail::check_axis(space.battery_strings, "battery_strings");
    detail::check_axis(space.converter_kw, "converter_kw");
    if (space.grid_present.empty() || space.strategies.empty())
        throw std::invalid_argument("grid/strategy axes must be non-empty");
    auto needs_proto = [](const auto& axis, const auto& spec, const char* name) {
        for (const auto& e : axis)
            if (e && !spec)
                throw std::invalid_argument(std::string(name) +
                                            " sizes listed but the base scenario has "
                                            "no prototype spec for it");
    };
    needs_proto(space.pv_kw, space.base.pv, "pv");
    needs_proto(space.wind_kw, space.base.wind, "wind");
    needs_proto(space.bg_kw, space.base.bg, "bg");
    needs_proto(space.dg_kw, space.base.dg, "dg");
    needs_proto(space.battery_strings, space.base.battery, "battery");
    needs_proto(space.converter_kw, space.base.converter, "converter");
    bool any_grid = false;
    for (bool g : space.grid_present) any_grid = any_grid || g;
    if (any_grid && !space.base.grid)
        throw std::invalid_argument(
            "grid enabled in the space but the base scenario has no grid spec");
}

inline std::size_t candidate_count(const SearchSpace& space) {
    return space.pv_kw.size() * space.wind_kw.size() * space.bg_kw.size() *
           space.dg_kw.size() * space.battery_strings.size() *
           space.converter_kw.size() * space.grid_present.size() *
           space.strategies.size();
}

/// Digit vector of one candidate in lexicographic order (pv most
/// significant, strategy fastest-varying).
struct CandidateDigits {
    std::size_t pv, wind, bg, dg, battery, converter, grid, strategy;
};

inline CandidateDigits candidate_digits(const SearchSpace& space, std::size_t index) {
    CandidateDigits d{};
    auto next = [&index](std::size_t radix) {
        const std::size_t digit = index % radix;
        index /= radix;
        return digit;
    };
    d.strategy = next(space.strategies.size());
    d.grid = next(space.grid_present.size());
    d.converter = next(space.converter_kw.size());
    d.battery = next(space.battery_strings.size());
    d.dg = next(space.dg_kw.size());
    d.bg = next(space.bg_kw.size());
    d.wind = next(space.wind_kw.size());
    d.pv = next(space.pv_kw.size());
    return d;
}

/// Materializes candidate `index` as a full scenario: absent entries drop the
/// component, present entries rescale the prototype spec with costs (and any
/// explicit battery power limits) proportional to size.
inline ScenarioConfig materialize_candidate(const SearchSpace& space, std::size_t index) {
    if (index >= candidate_count(space))
        throw std::out_of_range("candidate index out of range");
    const CandidateDigits d = candidate_digits(space, index);
    ScenarioConfig cfg = space.base;

    if (const auto& v = space.pv_kw[d.pv]; v && cfg.pv) {
        const double ratio = cfg.pv->rated_kw > 0.0 ? *v / cfg.pv->rated_kw : 0.0;
        cfg.pv->rated_kw = *v;
        detail::scale_cost_block(cfg.pv->capital_usd, cfg.pv->replacement_usd,
                                 cfg.pv->om_usd_per_yr, ratio);
    } else {
        cfg.pv.reset();
    }
    if (const auto& v = space.wind_kw[d.wind]; v && cfg.wind) {
        const double ratio = cfg.wind->rated_kw > 0.0 ? *v / cfg.wind->rated_kw : 0.0;
        cfg.wind->rated_kw = *v;
        detail::scale_cost_block(cfg.wind->capital_usd, cfg.wind->replacement_usd,
                                 cfg.wind->om_usd_per_yr, ratio);
    } else {
        cfg.wind.reset();
    }
    if (const auto& v = space.bg_kw[d.bg]; v && cfg.bg) {
        const double ratio = cfg.bg->rated_kw > 0.0 ? *v / cfg.bg->rated_kw : 0.0;
        cfg.bg->rated_kw = *v;
        detail::scale_cost_block(cfg.bg->capital_usd, cfg.bg->replacement_usd,
                                 cfg.bg->om_usd_per_yr, ratio);
    } else {
        cfg.bg.reset();
    }
    if (const auto& v = space.dg_kw[d.dg]; v && cfg.dg) {
        const double ratio = cfg.dg->rated_kw > 0.0 ? *v / cfg.dg->rated_kw : 0.0;
        cfg.dg->rated_kw = *v;
        detail::scale_cost_block(cfg.dg->capital_usd, cfg.dg->replacement_usd,
                                 cfg.dg->om_usd_per_yr, ratio);
    } else {
        cfg.dg.reset();
    }
    if (const auto& v = space.battery_strings[d.battery]; v && cfg.battery) {
        const double ratio =
            cfg.battery->strings > 0
                ? static_cast<double>(*v) / static_cast<double>(cfg.battery->strings)
                : 0.0;
        cfg.battery->strings = *v;
        detail::scale_cost_block(cfg.battery->capital_usd, cfg.battery->replacement_usd,
                                 cfg.battery->om_usd_per_yr, ratio);
        if (cfg.battery->max_charge_kw) *cfg.battery->max_charge_kw *= ratio;
        if (cfg.battery->max_discharge_kw) *cfg.battery->max_discharge_kw *= ratio;
    } else {
        cfg.battery.reset();
    }
    if (const auto& v = space.converter_kw[d.converter]; v && cfg.converter) {
        const double ratio =
            cfg.converter->rated_kw > 0.0 ? *v / cfg.converter->rated_kw : 0.0;
        cfg.converter->rated_kw = *v;
        detail::scale_cost_block(cfg.converter->capital_usd,
                                 cfg.converter->replacement_usd,
                                 cfg.converter->om_usd_per_yr, ratio);
    } else {
        cfg.converter.reset();
    }
    if (space.grid_present[d.grid] && cfg.grid) {
        cfg.grid->present = true;
    } else {
        cfg.grid.reset();
    }
    cfg.dispatch.strategy = space.strategies[d.strategy];
    cfg.dispatch.reliability_cap = space.reliability_cap;
    return cfg;
}

/// Streams every candidate in enumeration order through the callback.
template <typename Fn>
void enumerate(const SearchSpace& space, Fn&& fn) {
    validate_space(space);
    const std::size_t count = candidate_count(space);
    for (std::size_t idx = 0; idx < count; ++idx) fn(materialize_candidate(space, idx));
}

inline const char* strategy_name(DispatchStrategy s) {
    switch (s) {
        case DispatchStrategy::load_following:
            return "load_following";
    }
    return "unknown";
}

/// Compact component label, e.g. "PV/BG/batt/conv/Grid".
inline std::string design_label(const ScenarioConfig& cfg) {
    std::string label;
    auto append = [&label](const char* part) {
        if (!label.empty()) label += '/';
        label += part;
    };
    if (cfg.pv) append("PV");
    if (cfg.wind) append("WP");
    if (cfg.bg) append("BG");
    if (cfg.dg) append("DG");
    if (cfg.has_battery()) append("batt");
    if (cfg.converter) append("conv");
    if (cfg.has_grid()) append("Grid");
    if (label.empty()) label = "none";
    return label;
}

/// Content digest of a candidate (sizes, strategy, cap), hex encoded.
inline std::string candidate_digest(const ScenarioConfig& cfg) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "pv=" << (cfg.pv ? cfg.pv->rated_kw : -1.0)
       << ";wind=" << (cfg.wind ? cfg.wind->rated_kw : -1.0)
       << ";bg=" << (cfg.bg ? cfg.bg->rated_kw : -1.0)
       << ";dg=" << (cfg.dg ? cfg.dg->rated_kw : -1.0)
       << ";batt=" << (cfg.battery ? cfg.battery->strings : -1)
       << ";conv=" << (cfg.converter ? cfg.converter->rated_kw : -1.0)
       << ";grid=" << (cfg.has_grid() ? 1 : 0)
       << ";strategy=" << strategy_name(cfg.dispatch.strategy)
       << ";cap=" << cfg.dispatch.reliability_cap;
    return fnv1a64_hex(ss.str());
}

struct RankedDesign {
    std::size_t candidate_index = 0;
    std::string digest;
    std::string label;
    CandidateSizes sizes;
    DispatchResult dispatch;
    CostReport cost;
    EmissionReport emissions;
    bool feasible = false;
    std::optional<int> rank;  // 1..k over the feasible set, NPC ascending
};

/// Evaluates every candidate: simulate, cost, emission-score, then rank the
/// feasible set by (NPC, COE, digest). Infeasible candidates are retained,
/// flagged, and listed after the ranked set in enumeration order. `jobs`
/// changes wall time only: work is merged by candidate index, so parallel
/// and serial runs produce identical results.
inline std::vector<RankedDesign> evaluate_all(const SearchSpace& space,
                                              const SeriesBundle& series,
                                              unsigned jobs = 1) {
    validate_space(space);
    const std::size_t count = candidate_count(space);
    const DispatchContext ctx = make_dispatch_context(space.base, series);

    std::vector<RankedDesign> designs(count);
    auto evaluate_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const ScenarioConfig cfg = materialize_candidate(space, idx);
            RankedDesign& d = designs[idx];
            d.candidate_index = idx;
            d.digest = candidate_digest(cfg);
            d.label = design_label(cfg);
            d.sizes = sizes_from_config(cfg);
            d.dispatch = run_dispatch(ctx, d.sizes);
            d.cost = cost_report(cfg, d.dispatch);
            d.emissions = compute_emissions(d.dispatch, cfg.emissions);
            d.feasible = validate_scenario(cfg).simulable() &&
                         d.dispatch.unmet_fraction() <= space.reliability_cap;
        }
    };

    const unsigned workers = std::clamp(jobs, 1u, 64u);
    if (workers <= 1 || count < 2) {
        evaluate_range(0, count);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(evaluate_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    // Deterministic ranking, independent of evaluation order.
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const RankedDesign& da = designs[a];
        const RankedDesign& db = designs[b];
        if (da.feasible != db.feasible) return da.feasible;
        if (!da.feasible) return da.candidate_index < db.candidate_index;
        if (da.cost.npc != db.cost.npc) return da.cost.npc < db.cost.npc;
        if (da.cost.coe != db.cost.coe) return da.cost.coe < db.cost.coe;
        if (da.digest != db.digest) return da.digest < db.digest;
        return da.candidate_index < db.candidate_index;
    });

    std::vector<RankedDesign> out;
    out.reserve(count);
    int rank = 0;
    for (std::size_t i : order) {
        out.push_back(std::move(designs[i]));
        if (out.back().feasible) out.back().rank = ++rank;
    }
    return out;
}

struct SweepRow {
    double value = 0.0;
    std::optional<std::string> winner_label;
    std::optional<std::string> winner_digest;
    std::optional<double> npc;
    std::optional<double> coe;
    std::size_t feasible_count = 0;
};

/// Applies a sweep parameter to a copy of the space/series. Known paths:
/// scalar fields of the base scenario ("dg.fuel_price_usd_per_l",
/// "bg.marginal_cost_usd_per_kwh", "grid.purchase_usd_per_kwh",
/// "grid.sellback_usd_per_kwh", "econ.discount_rate_frac",
/// "econ.project_lifetime_yr", "dispatch.reliability_cap") and series
/// scalings ("scale.load", "scale.ghi", "scale.wind", "scale.biomass").
inline void apply_sweep_parameter(SearchSpace& space, SeriesBundle& series,
                                  const std::string& path, double value) {
    auto scale_series = [&](HourlySeries& s) {
        for (double& v : s.values) v *= value;
    };
    if (path == "econ.discount_rate_frac") {
        space.base.econ.discount_rate_frac = value;
    } else if (path == "econ.project_lifetime_yr") {
        space.base.econ.project_lifetime_yr = static_cast<int>(value);
    } else if (path == "dispatch.reliability_cap") {
        space.base.dispatch.reliability_cap = value;
        space.reliability_cap = value;
    } else if (path == "dg.fuel_price_usd_per_l") {
        if (!space.base.dg) throw std::invalid_argument("no dg in base scenario");
        space.base.dg->fuel_price_usd_per_l = value;
    } else if (path == "bg.marginal_cost_usd_per_kwh") {
        if (!space.base.bg) throw std::invalid_argument("no bg in base scenario");
        space.base.bg->marginal_cost_usd_per_kwh = value;
    } else if (path == "grid.purchase_usd_per_kwh") {
        if (!space.base.grid) throw std::invalid_argument("no grid in base scenario");
        space.base.grid->purchase_usd_per_kwh = value;
    } else if (path == "grid.sellback_usd_per_kwh") {
        if (!space.base.grid) throw std::invalid_argument("no grid in base scenario");
        space.base.grid->sellback_usd_per_kwh = value;
    } else if (path == "scale.load") {
        scale_series(series.load_kw);
    } else if (path == "scale.ghi") {
        scale_series(series.ghi_kw_m2);
    } else if (path == "scale.wind") {
        scale_series(series.wind_ms);
    } else if (path == "scale.biomass") {
        scale_series(series.biomass_kg_h);
    } else {
        throw std::invalid_argument("unknown sweep parameter path: " + path);
    }
}

/// Re-runs evaluate_all per sweep value and reports the winner of each.
inline std::vector<SweepRow> sensitivity_sweep(const SearchSpace& base_space,
                                               const SeriesBundle& base_series,
                                               const std::string& parameter_path,
                                               const std::vector<double>& values,
                                               unsigned jobs = 1) {
    std::vector<SweepRow> table;
    table.reserve(values.size());
    for (double value : values) {
        SearchSpace space = base_space;
        SeriesBundle series = base_series;
        apply_sweep_parameter(space, series, parameter_path, value);
        const auto designs = evaluate_all(space, series, jobs);
        SweepRow row;
        row.value = value;
        for (const auto& d : designs) {
            if (!d.feasible) break;
            ++row.feasible_count;
        }
        if (!designs.empty() && designs.front().feasible) {
            const auto& best = designs.front();
            row.winner_label = best.label;
            row.winner_digest = best.digest;
            row.npc = best.cost.npc;
            row.coe = best.cost.coe;
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace hybridsizer
