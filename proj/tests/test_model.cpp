#include <gtest/gtest.h>

#include "hybridsizer/dispatch.hpp"
#include "hybridsizer/model.hpp"
#include "test_helpers.hpp"

using namespace hybridsizer;

namespace {

bool has_violation(const ValidationReport& r, const std::string& needle,
                   Severity sev = Severity::error) {
    for (const auto& v : r.violations)
        if (v.severity == sev && v.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Model, PvOnlyWithoutConverterIsRejected) {
    ScenarioConfig cfg;
    cfg.pv = hstest::pv_spec(100.0);
    const auto report = validate_scenario(cfg);
    EXPECT_FALSE(report.simulable());
    EXPECT_TRUE(has_violation(report, "converter required"));
}

TEST(Model, OrderedWindSpeedsPass) {
    ScenarioConfig cfg;
    WindSpec w;
    w.rated_kw = 10.0;
    w.cut_in_ms = 3.0;
    w.rated_ms = 12.0;
    w.cut_out_ms = 24.0;
    cfg.wind = w;
    const auto report = validate_scenario(cfg);
    EXPECT_TRUE(report.simulable());
    EXPECT_FALSE(has_violation(report, "cut_in"));
}

TEST(Model, MisorderedWindSpeedsFail) {
    ScenarioConfig cfg;
    WindSpec w;
    w.cut_in_ms = 12.0;
    w.rated_ms = 3.0;
    cfg.wind = w;
    EXPECT_FALSE(validate_scenario(cfg).simulable());
}

TEST(Model, NegativeStringsFail) {
    ScenarioConfig cfg = hstest::grid_only_config();
    BatterySpec b;
    b.strings = -1;
    cfg.battery = b;
    cfg.converter = hstest::converter(100.0);
    const auto report = validate_scenario(cfg);
    EXPECT_FALSE(report.simulable());
    EXPECT_TRUE(has_violation(report, "strings >= 0"));
}

TEST(Model, SellbackAbovePurchaseIsOnlyAWarning) {
    ScenarioConfig cfg = hstest::grid_only_config(0.10);
    cfg.grid->sellback_usd_per_kwh = 0.20;
    const auto report = validate_scenario(cfg);
    EXPECT_TRUE(report.simulable());
    EXPECT_TRUE(has_violation(report, "sellback <= purchase", Severity::warning));
}

TEST(Model, AtLeastOneSourceRequired) {
    ScenarioConfig cfg;
    EXPECT_FALSE(validate_scenario(cfg).simulable());
    cfg.grid = GridSpec{};
    cfg.grid->present = false;  // a disconnected grid is not a source
    EXPECT_FALSE(validate_scenario(cfg).simulable());
}

TEST(Model, ValidationIsPure) {
    ScenarioConfig cfg;
    cfg.pv = hstest::pv_spec(10.0);
    cfg.battery = hstest::small_battery(-3);
    const auto a = validate_scenario(cfg);
    const auto b = validate_scenario(cfg);
    ASSERT_EQ(a.violations.size(), b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
        EXPECT_EQ(a.violations[i].field, b.violations[i].field);
        EXPECT_EQ(a.violations[i].message, b.violations[i].message);
        EXPECT_EQ(a.violations[i].severity, b.violations[i].severity);
    }
}

// Every scenario the validator accepts must run through the dispatch engine
// without a precondition fault.
TEST(Model, AcceptedScenariosSimulate) {
    std::vector<ScenarioConfig> accepted;
    accepted.push_back(hstest::grid_only_config());
    {
        ScenarioConfig cfg;
        cfg.pv = hstest::pv_spec(50.0);
        cfg.battery = hstest::small_battery(100);
        cfg.converter = hstest::converter(40.0);
        cfg.bg = hstest::bg_spec(20.0);
        accepted.push_back(cfg);
    }
    {
        ScenarioConfig cfg;
        cfg.dg = hstest::dg_spec(30.0);
        cfg.wind = WindSpec{};
        cfg.wind->rated_kw = 10.0;
        accepted.push_back(cfg);
    }
    const auto series = hstest::flat_series(20.0, 0.5, 5.0, 1000.0);
    for (const auto& cfg : accepted) {
        ASSERT_TRUE(validate_scenario(cfg).simulable());
        EXPECT_NO_THROW({
            const auto result = simulate_year(cfg, series);
            EXPECT_GE(result.load_served_kwh, 0.0);
        });
    }
}

TEST(Model, BatteryDefaultsToQuarterCRate) {
    BatterySpec b = hstest::small_battery(100);  // 100 kWh bank
    EXPECT_DOUBLE_EQ(b.max_charge(), 25.0);
    EXPECT_DOUBLE_EQ(b.max_discharge(), 25.0);
    b.max_charge_kw = 40.0;
    EXPECT_DOUBLE_EQ(b.max_charge(), 40.0);
}

TEST(Model, GridDefaultsUnboundedPurchaseNoSale) {
    GridSpec g;
    EXPECT_TRUE(std::isinf(g.max_purchase()));
    EXPECT_DOUBLE_EQ(g.max_sale(), 0.0);
}
