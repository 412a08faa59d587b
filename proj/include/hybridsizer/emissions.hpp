#pragma once

#include "hybridsizer/dispatch.hpp"
#include "hybridsizer/model.hpp"

namespace hybridsizer {

// Annual pollutant accounting: diesel by the liter, grid purchases and
// biomass generation by the kWh. Strictly linear in the flows.

struct GasTotals {
    double co2_kg = 0.0;
    double co_kg = 0.0;
    double so2_kg = 0.0;
    double nox_kg = 0.0;

    GasTotals& operator+=(const GasTotals& other) {
        co2_kg += other.co2_kg;
        co_kg += other.co_kg;
        so2_kg += other.so2_kg;
        nox_kg += other.nox_kg;
        return *this;
    }
};

struct EmissionReport {
    GasTotals diesel;
    GasTotals grid;
    GasTotals biomass;
    GasTotals total;
};

inline EmissionReport compute_emissions(const DispatchResult& result,
                                        const EmissionFactors& factors) {
    EmissionReport r;
    r.diesel = {result.dg_fuel_l * factors.diesel_co2_kg_per_l,
                result.dg_fuel_l * factors.diesel_co_kg_per_l,
                result.dg_fuel_l * factors.diesel_so2_kg_per_l,
                result.dg_fuel_l * factors.diesel_nox_kg_per_l};
    r.grid = {result.grid_purchase_kwh * factors.grid_co2_kg_per_kwh,
              result.grid_purchase_kwh * factors.grid_co_kg_per_kwh,
              result.grid_purchase_kwh * factors.grid_so2_kg_per_kwh,
              result.grid_purchase_kwh * factors.grid_nox_kg_per_kwh};
    r.biomass = {result.bg_kwh * factors.bg_co2_kg_per_kwh,
                 result.bg_kwh * factors.bg_co_kg_per_kwh,
                 result.bg_kwh * factors.bg_so2_kg_per_kwh,
                 result.bg_kwh * factors.bg_nox_kg_per_kwh};
    r.total += r.diesel;
    r.total += r.grid;
    r.total += r.biomass;
    return r;
}

}  // namespace hybridsizer
