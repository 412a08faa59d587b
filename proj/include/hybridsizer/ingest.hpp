#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridsizer/calendar.hpp"
#include "hybridsizer/model.hpp"

namespace hybridsizer {

enum class SeriesUnit {
    kilowatts,       // power
    kw_per_m2,       // irradiance
    m_per_s,         // wind speed
    kg_per_h,        // feedstock availability
    celsius,         // ambient temperature
};

enum class ResourceUnit {
    kwh_per_m2_day,
    m_per_s,
    kg_per_day,
    celsius,
};

/// Twelve monthly mean values with a unit tag (GHI, wind speed, biomass
/// availability, or ambient temperature).
struct MonthlyResource {
    std::array<double, 12> values{};
    ResourceUnit unit = ResourceUnit::kwh_per_m2_day;
};

/// The universal simulation currency: one value per hour of the 365-day
/// year. The origin month of any slot follows the fixed calendar
/// (month_of_slot).
struct HourlySeries {
    std::vector<double> values;
    SeriesUnit unit = SeriesUnit::kilowatts;

    HourlySeries() : values(kHoursPerYear, 0.0) {}
    explicit HourlySeries(SeriesUnit u) : values(kHoursPerYear, 0.0), unit(u) {}

    double operator[](std::size_t slot) const { return values[slot]; }
    double& operator[](std::size_t slot) { return values[slot]; }
    std::size_t size() const { return values.size(); }
    static int month_of(std::size_t slot) { return month_of_slot(slot); }
};

/// One row of the appliance inventory behind the daily-load estimate.
struct ApplianceEntry {
    double count = 0.0;          // A_n
    double rated_power_w = 0.0;  // P_n, watts
    double hours_per_day = 0.0;  // H_n
};

/// Total daily load in kWh/day: sum of A*P*H converted W -> kW.
inline double daily_load_from_appliances(const std::vector<ApplianceEntry>& entries) {
    double wh = 0.0;
    for (const auto& e : entries) wh += e.count * e.rated_power_w * e.hours_per_day;
    return wh / 1000.0;
}

/// Thrown on malformed CSV input; carries the 1-based line number.
struct CsvError : std::runtime_error {
    std::string file;
    int line;
    CsvError(std::string f, int l, const std::string& msg)
        : std::runtime_error(f + ":" + std::to_string(l) + ": " + msg),
          file(std::move(f)),
          line(l) {}
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_csv_number(const std::string& cell, const std::string& file,
                               int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
            ++pos;
        if (pos != cell.size())
            throw CsvError(file, line, "trailing characters in numeric cell '" + cell + "'");
        if (!std::isfinite(v)) throw CsvError(file, line, "non-finite value");
        return v;
    } catch (const std::invalid_argument&) {
        throw CsvError(file, line, "not a number: '" + cell + "'");
    } catch (const std::out_of_range&) {
        throw CsvError(file, line, "number out of range: '" + cell + "'");
    }
}

/// Reads a two-column CSV with a required header row. Returns rows of
/// (first column as int, second as double), validated to be exactly
/// keys first..first+count-1 in order.
inline std::vector<double> read_keyed_csv(const std::string& path, int first_key,
                                          int count) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string lineText;
    int lineNo = 0;
    if (!std::getline(in, lineText)) throw CsvError(path, 1, "missing header row");
    ++lineNo;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    int expected = first_key;
    while (std::getline(in, lineText)) {
        ++lineNo;
        // Tolerate a trailing blank line and CR-LF input.
        if (!lineText.empty() && lineText.back() == '\r') lineText.pop_back();
        if (lineText.empty()) continue;
        std::istringstream ss(lineText);
        std::string keyCell, valueCell;
        if (!std::getline(ss, keyCell, ',') || !std::getline(ss, valueCell))
            throw CsvError(path, lineNo, "expected two comma-separated columns");
        const double key = parse_csv_number(keyCell, path, lineNo);
        if (key != static_cast<double>(expected))
            throw CsvError(path, lineNo,
                           "expected key " + std::to_string(expected) + ", got '" +
                               keyCell + "'");
        out.push_back(parse_csv_number(valueCell, path, lineNo));
        ++expected;
    }
    if (static_cast<int>(out.size()) != count)
        throw CsvError(path, lineNo,
                       "expected " + std::to_string(count) + " data rows, got " +
                           std::to_string(out.size()));
    return out;
}

}  // namespace detail

/// `month,value` CSV (12 rows, months 1-12, header required).
inline MonthlyResource read_monthly_csv(const std::string& path, ResourceUnit unit) {
    const auto rows = detail::read_keyed_csv(path, 1, 12);
    MonthlyResource r;
    r.unit = unit;
    std::copy(rows.begin(), rows.end(), r.values.begin());
    if (unit != ResourceUnit::celsius) {
        for (std::size_t m = 0; m < 12; ++m)
            if (r.values[m] < 0.0)
                throw IoError(path + ": negative value for month " + std::to_string(m + 1));
    }
    return r;
}

/// `hour,kw` CSV (24 rows, hours 0-23, header required).
inline std::array<double, 24> read_daily_shape_csv(const std::string& path) {
    const auto rows = detail::read_keyed_csv(path, 0, 24);
    std::array<double, 24> shape{};
    for (std::size_t h = 0; h < 24; ++h) {
        if (rows[h] < 0.0)
            throw IoError(path + ": negative load at hour " + std::to_string(h));
        shape[h] = rows[h];
    }
    return shape;
}

/// Hourly irradiance from monthly mean daily totals: each day is a half-sine
/// over the fixed 06:00-18:00 daylight window (the study site is ~11N;
/// seasonal daylight variation is below the slot width), sampled at slot
/// midpoints and renormalized so every day integrates exactly to the month's
/// mean daily total. Deterministic.
inline HourlySeries synthesize_ghi(const MonthlyResource& monthly) {
    if (monthly.unit != ResourceUnit::kwh_per_m2_day)
        throw std::invalid_argument("synthesize_ghi expects kWh/m2/day input");
    for (double v : monthly.values)
        if (v < 0.0) throw std::invalid_argument("negative monthly GHI");

    constexpr int sunrise = 6;
    constexpr int sunset = 18;
    constexpr int daylight = sunset - sunrise;
    std::array<double, 24> shape{};
    double shapeSum = 0.0;
    for (int h = sunrise; h < sunset; ++h) {
        const double t = (static_cast<double>(h - sunrise) + 0.5) / daylight;
        shape[static_cast<std::size_t>(h)] = std::sin(std::numbers::pi * t);
        shapeSum += shape[static_cast<std::size_t>(h)];
    }

    HourlySeries out(SeriesUnit::kw_per_m2);
    for (std::size_t slot = 0; slot < kHoursPerYear; ++slot) {
        const double daily = monthly.values[static_cast<std::size_t>(month_of_slot(slot))];
        out[slot] = daily * shape[static_cast<std::size_t>(hour_of_slot(slot))] / shapeSum;
    }
    return out;
}

/// Hourly wind speed: constant within each month at the monthly mean. With a
/// seed, a diurnal perturbation is layered on and the month block rescaled so
/// the monthly mean is preserved exactly; identical (input, seed) pairs give
/// bit-identical output.
inline HourlySeries synthesize_wind(const MonthlyResource& monthly,
                                    std::optional<unsigned long long> seed = {}) {
    if (monthly.unit != ResourceUnit::m_per_s)
        throw std::invalid_argument("synthesize_wind expects m/s input");
    for (double v : monthly.values)
        if (v < 0.0) throw std::invalid_argument("negative monthly wind speed");

    HourlySeries out(SeriesUnit::m_per_s);
    if (!seed) {
        for (std::size_t slot = 0; slot < kHoursPerYear; ++slot)
            out[slot] = monthly.values[static_cast<std::size_t>(month_of_slot(slot))];
        return out;
    }

    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> amp(0.05, 0.25);
    std::uniform_real_distribution<double> phase(0.0, 24.0);
    std::size_t slot = 0;
    for (std::size_t m = 0; m < kMonthsPerYear; ++m) {
        const double mean = monthly.values[m];
        const double a = amp(rng);
        const double p = phase(rng);
        const std::size_t hours =
            static_cast<std::size_t>(kDaysInMonth[m]) * kHoursPerDay;
        double sum = 0.0;
        const std::size_t start = slot;
        for (std::size_t k = 0; k < hours; ++k, ++slot) {
            const double h = static_cast<double>(hour_of_slot(slot));
            const double v =
                mean * (1.0 + a * std::sin(2.0 * std::numbers::pi * (h - p) / 24.0));
            out[slot] = std::max(v, 0.0);
            sum += out[slot];
        }
        if (sum > 0.0) {
            const double scale = mean * static_cast<double>(hours) / sum;
            for (std::size_t k = start; k < start + hours; ++k) out[k] *= scale;
        }
    }
    return out;
}

/// Hourly feedstock availability: the month's kg/day spread flat, kg/h.
inline HourlySeries synthesize_biomass(const MonthlyResource& monthly) {
    if (monthly.unit != ResourceUnit::kg_per_day)
        throw std::invalid_argument("synthesize_biomass expects kg/day input");
    for (double v : monthly.values)
        if (v < 0.0) throw std::invalid_argument("negative monthly biomass");

    HourlySeries out(SeriesUnit::kg_per_h);
    for (std::size_t slot = 0; slot < kHoursPerYear; ++slot)
        out[slot] =
            monthly.values[static_cast<std::size_t>(month_of_slot(slot))] / 24.0;
    return out;
}

/// Hourly ambient temperature, constant within each month.
inline HourlySeries synthesize_temperature(const MonthlyResource& monthly) {
    if (monthly.unit != ResourceUnit::celsius)
        throw std::invalid_argument("synthesize_temperature expects degC input");
    HourlySeries out(SeriesUnit::celsius);
    for (std::size_t slot = 0; slot < kHoursPerYear; ++slot)
        out[slot] = monthly.values[static_cast<std::size_t>(month_of_slot(slot))];
    return out;
}

inline HourlySeries flat_temperature(double degC = 20.0) {
    HourlySeries out(SeriesUnit::celsius);
    std::fill(out.values.begin(), out.values.end(), degC);
    return out;
}

/// The 24-slot daily shape repeated 365 days, linearly rescaled so every day
/// totals scale_to_kwh_per_day. Output is non-negative and 24-periodic.
inline HourlySeries load_profile(const std::array<double, 24>& daily_shape_kw,
                                 std::optional<double> scale_to_kwh_per_day = {}) {
    double shapeSum = 0.0;
    for (double v : daily_shape_kw) {
        if (v < 0.0) throw std::invalid_argument("negative load shape value");
        shapeSum += v;
    }
    double scale = 1.0;
    if (scale_to_kwh_per_day) {
        if (*scale_to_kwh_per_day < 0.0)
            throw std::invalid_argument("negative daily energy target");
        if (shapeSum <= 0.0 && *scale_to_kwh_per_day > 0.0)
            throw std::invalid_argument(
                "all-zero daily shape cannot be scaled to a nonzero total");
        scale = shapeSum > 0.0 ? *scale_to_kwh_per_day / shapeSum : 0.0;
    }
    HourlySeries out(SeriesUnit::kilowatts);
    for (std::size_t slot = 0; slot < kHoursPerYear; ++slot)
        out[slot] = daily_shape_kw[static_cast<std::size_t>(hour_of_slot(slot))] * scale;
    return out;
}

/// Everything simulate_year consumes, synthesized once per scenario.
struct SeriesBundle {
    HourlySeries load_kw{SeriesUnit::kilowatts};
    HourlySeries ghi_kw_m2{SeriesUnit::kw_per_m2};
    HourlySeries wind_ms{SeriesUnit::m_per_s};       // at reference height
    HourlySeries biomass_kg_h{SeriesUnit::kg_per_h};
    HourlySeries ambient_degC{SeriesUnit::celsius};
};

/// Reads the referenced CSVs (paths resolved against resources_dir) and
/// synthesizes the full hourly bundle. Missing optional temperature data
/// falls back to a 20 degC flat year.
inline SeriesBundle build_series(const LoadRef& load, const ResourceRefs& res,
                                 const std::filesystem::path& resources_dir) {
    auto resolve = [&](const std::string& name) {
        return (resources_dir / name).string();
    };
    if (load.daily_shape_csv.empty()) throw IoError("no load daily_shape_csv configured");
    if (res.ghi_csv.empty() || res.wind_csv.empty() || res.biomass_csv.empty())
        throw IoError("resources require ghi_csv, wind_csv and biomass_csv");

    SeriesBundle bundle;
    bundle.load_kw = load_profile(read_daily_shape_csv(resolve(load.daily_shape_csv)),
                                  load.scale_to_kwh_per_day);
    bundle.ghi_kw_m2 = synthesize_ghi(
        read_monthly_csv(resolve(res.ghi_csv), ResourceUnit::kwh_per_m2_day));
    bundle.wind_ms = synthesize_wind(
        read_monthly_csv(resolve(res.wind_csv), ResourceUnit::m_per_s), res.wind_seed);
    bundle.biomass_kg_h = synthesize_biomass(
        read_monthly_csv(resolve(res.biomass_csv), ResourceUnit::kg_per_day));
    bundle.ambient_degC =
        res.temperature_csv
            ? synthesize_temperature(
                  read_monthly_csv(resolve(*res.temperature_csv), ResourceUnit::celsius))
            : flat_temperature(20.0);
    return bundle;
}

}  // namespace hybridsizer
