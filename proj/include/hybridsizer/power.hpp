#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hybridsizer/model.hpp"

namespace hybridsizer {

// Per-slot and per-year component output models. Pure stateless functions,
// safe for parallel evaluation.

/// Standard NOCT cell-temperature estimate: the cell runs (noct - 20) degC
/// above ambient at 0.8 kW/m2, linearly in irradiance.
struct CellTempModel {
    double noct_degC = 45.0;
    static constexpr double ref_ambient_noct_degC = 20.0;
    static constexpr double noct_irradiance_kw_m2 = 0.8;
};

inline double cell_temperature(const CellTempModel& model, double ambient_degC,
                               double ghi_kw_m2) {
    return ambient_degC + (model.noct_degC - CellTempModel::ref_ambient_noct_degC) /
                              CellTempModel::noct_irradiance_kw_m2 * ghi_kw_m2;
}

/// PV array output: nameplate derated, scaled by irradiance and corrected
/// for cell temperature. Clamped at zero so a strongly negative temperature
/// term can never produce negative power.
inline double pv_output(const PvSpec& spec, double ghi_kw_m2, double cell_temp_degC) {
    if (ghi_kw_m2 < 0.0) throw std::invalid_argument("negative irradiance");
    const double thermal =
        1.0 + spec.temp_coeff_per_degC * (cell_temp_degC - spec.ref_cell_temp_degC);
    const double p =
        spec.rated_kw * spec.derating * (ghi_kw_m2 / spec.ref_irradiance_kw_m2) * thermal;
    return std::max(p, 0.0);
}

/// Power-law extrapolation of the reference-height wind speed to hub height.
inline double wind_speed_at_hub(const WindSpec& spec, double v_ref_ms) {
    if (v_ref_ms < 0.0) throw std::invalid_argument("negative wind speed");
    return v_ref_ms * std::pow(spec.hub_height_m / spec.ref_height_m, spec.shear_alpha);
}

/// Turbine power curve: zero below cut-in and at/above cut-out, cubic ramp
/// between cut-in and rated, flat at rated power up to cut-out.
inline double wind_output(const WindSpec& spec, double v_hub_ms) {
    if (v_hub_ms < 0.0) throw std::invalid_argument("negative wind speed");
    const double v = v_hub_ms;
    if (v <= spec.cut_in_ms || v >= spec.cut_out_ms) return 0.0;
    if (v < spec.rated_ms) {
        const double v3 = v * v * v;
        const double ci3 = spec.cut_in_ms * spec.cut_in_ms * spec.cut_in_ms;
        const double r3 = spec.rated_ms * spec.rated_ms * spec.rated_ms;
        return spec.rated_kw * (v3 - ci3) / (r3 - ci3);
    }
    return spec.rated_kw;
}

/// Gasifier capacity supportable by an annual feedstock supply: tons/yr of
/// feedstock at the given calorific value and conversion efficiency, spread
/// over the operating hours (kJ/yr -> kW).
inline double bg_rated_power(double feedstock_t_per_yr, const BgSpec& spec) {
    if (feedstock_t_per_yr < 0.0) throw std::invalid_argument("negative feedstock");
    if (spec.operating_hours_per_day <= 0.0)
        throw std::invalid_argument("operating_hours_per_day must be positive");
    const double kj_per_yr = feedstock_t_per_yr * 1000.0 *
                             spec.calorific_value_kj_per_kg * spec.conversion_eff;
    const double seconds = 365.0 * spec.operating_hours_per_day * 3600.0;
    return kj_per_yr / seconds;
}

/// Planning-level annual energy of the gasifier at its capacity utilization
/// factor. Dispatch does not use this; it reflects the sizing convention the
/// energy tables are quoted in.
inline double bg_annual_energy(const BgSpec& spec) {
    return spec.rated_kw * spec.cuf * 365.0 * spec.operating_hours_per_day;
}

/// Linear diesel fuel curve: intercept on rated size plus slope on output.
inline double dg_fuel(const DgSpec& spec, double p_out_kw, bool running) {
    if (p_out_kw < 0.0 || p_out_kw > spec.rated_kw)
        throw std::invalid_argument("diesel output outside [0, rated]");
    if (!running) return 0.0;
    return spec.fuel_intercept_l_per_h_per_kw * spec.rated_kw +
           spec.fuel_slope_l_per_kwh * p_out_kw;
}

/// Converter rating needed to pass the peak load.
inline double converter_required(double peak_load_kw, double inverter_eff) {
    if (inverter_eff <= 0.0) throw std::invalid_argument("inverter efficiency must be > 0");
    return peak_load_kw / inverter_eff;
}

}  // namespace hybridsizer
