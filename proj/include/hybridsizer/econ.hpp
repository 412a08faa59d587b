#pragma once

#include <cmath>
#include <optional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hybridsizer/dispatch.hpp"
#include "hybridsizer/model.hpp"

namespace hybridsizer {

// Lifetime economics: capital recovery, per-component annualization, NPC and
// COE, and the against-a-base-case indicator suite (present/annual worth,
// ROI, IRR, paybacks). Pure functions over value inputs.

/// Capital recovery factor i(1+i)^n / ((1+i)^n - 1); the zero-interest limit
/// is 1/n. Valid for fractional n (used for component lifetimes).
inline double crf(double i, double n) {
    if (n <= 0.0) throw std::invalid_argument("crf requires n >= 1");
    if (i < 0.0) throw std::invalid_argument("crf requires i >= 0");
    if (i == 0.0) return 1.0 / n;
    const double growth = std::pow(1.0 + i, n);
    return i * growth / (growth - 1.0);
}

/// Sinking-fund factor: the annuity that accumulates to 1 at year n.
inline double sinking_fund_factor(double i, double n) { return crf(i, n) - i; }

/// Inverse of crf in the rate: the discount rate whose CRF over n years hits
/// the target. Used to calibrate the rate behind a published CRF. Returns
/// nothing when the target is below the zero-interest floor 1/n.
inline std::optional<double> discount_rate_for_crf(double target_crf, int n) {
    if (n < 1) throw std::invalid_argument("n >= 1 required");
    if (target_crf < 1.0 / n) return std::nullopt;
    if (target_crf == 1.0 / n) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (crf(hi, n) < target_crf) {
        hi *= 2.0;
        if (hi > 1e6) return std::nullopt;
    }
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-15; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (crf(mid, n) < target_crf ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// NPV of a cash-flow series with flows[0] at year 0.
inline double npv(std::span<const double> flows, double rate) {
    double value = 0.0;
    double discount = 1.0;
    for (std::size_t t = 0; t < flows.size(); ++t) {
        if (t > 0) discount /= (1.0 + rate);
        value += flows[t] * discount;
    }
    return value;
}

/// IRR by bisection on [-0.99, 10]. The bracket is tightened well past the
/// 1e-7 contract so NPV at the returned rate is near machine zero. Returns
/// nothing when the bracket shows no sign change.
inline std::optional<double> irr(std::span<const double> flows, double lo = -0.99,
                                 double hi = 10.0) {
    double f_lo = npv(flows, lo);
    double f_hi = npv(flows, hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = npv(flows, mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// The common capital/replacement/O&M cost block every component spec carries.
struct CostFields {
    double capital_usd = 0.0;
    double replacement_usd = 0.0;
    double om_usd_per_yr = 0.0;
    double lifetime_yr = 1.0;
};

struct ComponentAnnualCost {
    double capital = 0.0;      // capital * CRF(i, project n)
    double replacement = 0.0;  // replacement annuity when lifetime < project
    double om = 0.0;
    double fuel = 0.0;
    double salvage = 0.0;      // negative: end-of-project residual value
    double total = 0.0;
};

/// Annualized cost of one component: capital recovered over the project,
/// replacement spread as an annuity over the component lifetime, O&M and
/// fuel as-is, minus a straight-line salvage annuity for the remaining life
/// at project end (sinking-fund discounted, replacement-cost basis).
inline ComponentAnnualCost annualize_component(const CostFields& cost,
                                               double fuel_cost_usd_per_yr,
                                               const EconParams& econ) {
    if (cost.lifetime_yr <= 0.0) throw std::invalid_argument("lifetime_yr > 0 required");
    const double i = econ.discount_rate_frac;
    const double n = static_cast<double>(econ.project_lifetime_yr);
    const double L = cost.lifetime_yr;

    ComponentAnnualCost a;
    a.capital = cost.capital_usd * crf(i, n);
    a.om = cost.om_usd_per_yr;
    a.fuel = fuel_cost_usd_per_yr;
    if (L < n) a.replacement = cost.replacement_usd * crf(i, L);
    const double remaining = L * std::ceil(n / L) - n;
    if (remaining > 0.0) {
        const double salvage_value = cost.replacement_usd * remaining / L;
        a.salvage = -salvage_value * sinking_fund_factor(i, n);
    }
    a.total = a.capital + a.replacement + a.om + a.fuel + a.salvage;
    return a;
}

struct CostReport {
    double crf = 0.0;
    std::vector<std::pair<std::string, ComponentAnnualCost>> components;
    double c_ann_tot = 0.0;       // $/yr
    double npc = 0.0;             // $
    double coe = 0.0;             // $/kWh
    double initial_cost = 0.0;    // $
    double operating_cost = 0.0;  // $/yr, everything except the capital annuity
    double e_served_kwh = 0.0;
};

/// NPC = C_ann/CRF and COE = C_ann/E_served. Energy served must be positive
/// unless the annual cost is itself zero.
inline std::pair<double, double> npc_and_coe(double c_ann_tot, double e_served_kwh,
                                             const EconParams& econ) {
    const double k = crf(econ.discount_rate_frac,
                         static_cast<double>(econ.project_lifetime_yr));
    const double npc_val = c_ann_tot / k;
    double coe_val = 0.0;
    if (e_served_kwh > 0.0) {
        coe_val = c_ann_tot / e_served_kwh;
    } else if (c_ann_tot != 0.0) {
        throw std::invalid_argument("COE undefined: no energy served");
    }
    return {npc_val, coe_val};
}

namespace detail {

inline CostFields cost_fields_of(const PvSpec& s) {
    return {s.capital_usd, s.replacement_usd, s.om_usd_per_yr, s.lifetime_yr};
}
inline CostFields cost_fields_of(const WindSpec& s) {
    return {s.capital_usd, s.replacement_usd, s.om_usd_per_yr, s.lifetime_yr};
}
inline CostFields cost_fields_of(const BgSpec& s) {
    return {s.capital_usd, s.replacement_usd, s.om_usd_per_yr, s.lifetime_yr};
}
inline CostFields cost_fields_of(const DgSpec& s) {
    return {s.capital_usd, s.replacement_usd, s.om_usd_per_yr, s.lifetime_yr};
}
inline CostFields cost_fields_of(const BatterySpec& s) {
    return {s.capital_usd, s.replacement_usd, s.om_usd_per_yr, s.lifetime_yr};
}
inline CostFields cost_fields_of(const ConverterSpec& s) {
    return {s.capital_usd, s.replacement_usd, s.om_usd_per_yr, s.lifetime_yr};
}

}  // namespace detail

/// Full cost report for a simulated scenario. Diesel fuel is priced per
/// liter, biomass feedstock per generated kWh, and the grid energy bill
/// (purchases minus sellback revenue) is booked as grid O&M.
inline CostReport cost_report(const ScenarioConfig& cfg, const DispatchResult& result) {
    const EconParams& econ = cfg.econ;
    CostReport r;
    r.crf = crf(econ.discount_rate_frac, static_cast<double>(econ.project_lifetime_yr));
    r.e_served_kwh = result.load_served_kwh;

    auto add = [&](const std::string& name, const CostFields& fields, double fuel) {
        const auto a = annualize_component(fields, fuel, econ);
        r.components.emplace_back(name, a);
        r.c_ann_tot += a.total;
        r.initial_cost += fields.capital_usd;
    };

    if (cfg.pv) add("pv", detail::cost_fields_of(*cfg.pv), 0.0);
    if (cfg.wind) add("wind", detail::cost_fields_of(*cfg.wind), 0.0);
    if (cfg.bg)
        add("bg", detail::cost_fields_of(*cfg.bg),
            result.bg_kwh * cfg.bg->marginal_cost_usd_per_kwh);
    if (cfg.dg)
        add("dg", detail::cost_fields_of(*cfg.dg),
            result.dg_fuel_l * cfg.dg->fuel_price_usd_per_l);
    if (cfg.battery) add("battery", detail::cost_fields_of(*cfg.battery), 0.0);
    if (cfg.converter) add("converter", detail::cost_fields_of(*cfg.converter), 0.0);
    if (cfg.has_grid()) {
        CostFields grid_fields;
        grid_fields.lifetime_yr = static_cast<double>(econ.project_lifetime_yr);
        grid_fields.om_usd_per_yr =
            result.grid_purchase_kwh * cfg.grid->purchase_usd_per_kwh -
            result.grid_sale_kwh * cfg.grid->sellback_usd_per_kwh;
        add("grid", grid_fields, 0.0);
    }

    // Zero-served degenerate candidates (possible mid-search) get an
    // undefined COE instead of a fault; they can never rank.
    r.npc = r.c_ann_tot / r.crf;
    if (r.e_served_kwh > 0.0) {
        r.coe = r.c_ann_tot / r.e_served_kwh;
    } else {
        r.coe = r.c_ann_tot == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    r.operating_cost = r.c_ann_tot - r.initial_cost * r.crf;
    return r;
}

/// Year-by-year cost stream of a design: capital at year 0, then the annual
/// non-capital cost each project year.
struct AnnualCashFlow {
    double initial_usd = 0.0;
    std::vector<double> annual_cost_usd;
};

inline AnnualCashFlow cost_cash_flows(const CostReport& report, const EconParams& econ) {
    AnnualCashFlow f;
    f.initial_usd = report.initial_cost;
    f.annual_cost_usd.assign(static_cast<std::size_t>(econ.project_lifetime_yr),
                             report.operating_cost);
    return f;
}

struct ComparisonReport {
    double present_worth = 0.0;  // NPV of the differential flows at i
    double annual_worth = 0.0;   // present_worth * CRF
    std::optional<double> roi_frac;
    std::optional<double> irr_frac;
    std::optional<double> simple_payback_yr;
    std::optional<double> discounted_payback_yr;
    std::string base_case;
};

/// Indicators of a candidate against a base case: the differential cash flow
/// is the base-minus-candidate annual cost against the extra initial capital.
/// ROI is the mean annual saving over that capital; IRR the root of the
/// differential NPV; paybacks the (discounted) recovery time of the capital.
inline ComparisonReport compare_cash_flows(const AnnualCashFlow& candidate_flows,
                                           const AnnualCashFlow& base_flows,
                                           const EconParams& econ,
                                           std::string base_tag = "base") {
    if (candidate_flows.annual_cost_usd.size() != base_flows.annual_cost_usd.size())
        throw std::invalid_argument("cash-flow series length mismatch");
    const std::size_t n = candidate_flows.annual_cost_usd.size();
    const double i = econ.discount_rate_frac;
    const double k = crf(i, static_cast<double>(econ.project_lifetime_yr));

    const double delta_capital = candidate_flows.initial_usd - base_flows.initial_usd;
    std::vector<double> flows(n + 1);
    flows[0] = -delta_capital;
    double saving_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        flows[t + 1] = base_flows.annual_cost_usd[t] - candidate_flows.annual_cost_usd[t];
        saving_sum += flows[t + 1];
    }
    const double mean_saving = n > 0 ? saving_sum / static_cast<double>(n) : 0.0;

    ComparisonReport rep;
    rep.base_case = std::move(base_tag);
    rep.present_worth = npv(flows, i);
    rep.annual_worth = rep.present_worth * k;

    if (delta_capital != 0.0) {
        rep.roi_frac = mean_saving / delta_capital;
    } else if (mean_saving == 0.0) {
        rep.roi_frac = 0.0;
    }
    rep.irr_frac = irr(flows);
    if (delta_capital > 0.0 && mean_saving > 0.0)
        rep.simple_payback_yr = delta_capital / mean_saving;
    if (delta_capital > 0.0) {
        double cumulative = 0.0;
        for (std::size_t t = 1; t <= n; ++t) {
            const double discounted = flows[t] / std::pow(1.0 + i, static_cast<double>(t));
            if (cumulative + discounted >= delta_capital && discounted > 0.0) {
                rep.discounted_payback_yr =
                    static_cast<double>(t - 1) + (delta_capital - cumulative) / discounted;
                break;
            }
            cumulative += discounted;
        }
    }
    return rep;
}

inline ComparisonReport compare_to_base(const CostReport& candidate,
                                        const CostReport& base, const EconParams& econ,
                                        std::string base_tag = "base") {
    return compare_cash_flows(cost_cash_flows(candidate, econ),
                              cost_cash_flows(base, econ), econ, std::move(base_tag));
}

}  // namespace hybridsizer
