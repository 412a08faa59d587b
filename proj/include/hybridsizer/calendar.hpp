#pragma once

#include <array>
#include <cstddef>

namespace hybridsizer {

// 365-day year, no leap day: 8,760 hourly slots. Annual totals in the
// shipped case study (11,214.66 kWh/day x 365 = 4,093,351 kWh) depend on
// this convention.
inline constexpr std::size_t kHoursPerDay = 24;
inline constexpr std::size_t kDaysPerYear = 365;
inline constexpr std::size_t kHoursPerYear = kHoursPerDay * kDaysPerYear;
inline constexpr std::size_t kMonthsPerYear = 12;

inline constexpr std::array<int, 12> kDaysInMonth = {31, 28, 31, 30, 31, 30,
                                                     31, 31, 30, 31, 30, 31};

constexpr int first_day_of_month(int month) {
    int day = 0;
    for (int m = 0; m < month; ++m) day += kDaysInMonth[static_cast<std::size_t>(m)];
    return day;
}

/// Month index (0-11) a day of year (0-364) falls in.
constexpr int month_of_day(int day_of_year) {
    int m = 0;
    int d = day_of_year;
    while (d >= kDaysInMonth[static_cast<std::size_t>(m)]) {
        d -= kDaysInMonth[static_cast<std::size_t>(m)];
        ++m;
    }
    return m;
}

/// Month index (0-11) an hourly slot (0-8759) falls in.
constexpr int month_of_slot(std::size_t slot) {
    return month_of_day(static_cast<int>(slot / kHoursPerDay));
}

constexpr int hour_of_slot(std::size_t slot) {
    return static_cast<int>(slot % kHoursPerDay);
}

}  // namespace hybridsizer
