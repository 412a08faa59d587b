#pragma once

// Exhaustive dispatch oracle for short quantized instances, independent of
// the engine's closed-form clamps. Everything lives on a 0.5 kWh lattice
// (tracked in integer half-units) with unit efficiencies, so an engine run
// on the same instance must agree exactly. Each slot enumerates every
// feasible (discharge, generator run, grid purchase) lattice decision and
// keeps the lexicographic best under the documented priority order:
// maximize served, then battery contribution, then generator contribution,
// then purchases; never run the generator above what that requires; a
// discharged battery does not also charge; maximal surplus goes to storage,
// the rest is excess.

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

namespace dispatch_oracle {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

struct Instance {
    std::vector<int> load_halves;   // 24 slots, 0.5 kWh units
    std::vector<int> pv_halves;     // DC-coupled renewable
    int battery_capacity_halves = 0;  // multiple of 4 so C/4 stays on-lattice
    int bg_rated_halves = 0;          // 0, 10 or 20 (min-load 0.3 stays on-lattice)
    bool grid = false;
    int grid_cap_halves = kInf;
};

struct Totals {
    int served_halves = 0;
    int unmet_halves = 0;
    int excess_halves = 0;
    int final_soc_halves = 0;
};

inline Totals run(const Instance& in) {
    const int capacity = in.battery_capacity_halves;
    const int max_rate = capacity / 4;  // default C/4 power limit
    const int bg_min = in.bg_rated_halves * 3 / 10;  // 0.3 of rated
    int soc = capacity;                 // starts full

    Totals totals;
    for (std::size_t t = 0; t < in.load_halves.size(); ++t) {
        const int load = in.load_halves[t];
        const int pv = in.pv_halves[t];
        const int pv_to_load = std::min(pv, load);
        const int rem1 = load - pv_to_load;

        struct Decision {
            int served = -1, d = -1, bg_to_load = -1, buy = -1, neg_run = -1;
            int charge = 0, excess = 0, soc_next = 0;
            bool better_than(const Decision& o) const {
                if (served != o.served) return served > o.served;
                if (d != o.d) return d > o.d;
                if (bg_to_load != o.bg_to_load) return bg_to_load > o.bg_to_load;
                if (buy != o.buy) return buy > o.buy;
                return neg_run > o.neg_run;
            }
        };
        Decision best;

        const int d_max = std::min({max_rate, soc, rem1});
        for (int d = 0; d <= d_max; ++d) {
            const int rem2 = rem1 - d;
            for (int run = 0; run <= in.bg_rated_halves; ++run) {
                if (run > 0 && run < bg_min) continue;  // below stable minimum
                const int bg_to_load = std::min(run, rem2);
                const int bg_surplus = run - bg_to_load;
                const int rem3 = rem2 - bg_to_load;
                const int buy_cap = in.grid ? std::min(in.grid_cap_halves, rem3) : 0;
                for (int buy = 0; buy <= buy_cap; ++buy) {
                    Decision cand;
                    cand.served = load - (rem3 - buy);
                    cand.d = d;
                    cand.bg_to_load = bg_to_load;
                    cand.buy = buy;
                    cand.neg_run = -run;
                    const int pv_surplus = pv - pv_to_load;
                    const int surplus = pv_surplus + bg_surplus;
                    const int headroom = std::min(max_rate, capacity - soc);
                    cand.charge = d == 0 ? std::min(surplus, headroom) : 0;
                    cand.excess = surplus - cand.charge;
                    cand.soc_next = soc + cand.charge - d;
                    if (best.served < 0 || cand.better_than(best)) best = cand;
                }
            }
        }

        totals.served_halves += best.served;
        totals.unmet_halves += load - best.served;
        totals.excess_halves += best.excess;
        soc = best.soc_next;
    }
    totals.final_soc_halves = soc;
    return totals;
}

}  // namespace dispatch_oracle
