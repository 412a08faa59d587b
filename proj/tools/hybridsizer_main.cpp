// Command-line entry point: simulate | optimize | sweep | validate | render.
//
// Exit codes are a stable scripting contract: 0 success, 1 I/O failure
// (missing/unreadable files, CSV/JSON syntax errors), 2 validation or
// configuration failure (schema violations, invariant violations, unknown
// parameters). Every run writes <out>/manifest.json before exiting, even on
// failure paths that get past argument parsing.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hybridsizer/hybridsizer.hpp"

namespace fs = std::filesystem;
namespace hs = hybridsizer;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw hs::IoError("cannot write " + path.string());
    out << text;
}

void write_json_file(const fs::path& path, const nlohmann::ordered_json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

unsigned default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

hs::RankedDesign evaluate_single(const hs::ScenarioConfig& cfg,
                                 const hs::SeriesBundle& series,
                                 const hs::SimulateOptions& opts) {
    hs::RankedDesign d;
    d.digest = hs::candidate_digest(cfg);
    d.label = hs::design_label(cfg);
    d.sizes = hs::sizes_from_config(cfg);
    d.dispatch = hs::simulate_year(cfg, series, opts);
    d.cost = hs::cost_report(cfg, d.dispatch);
    d.emissions = hs::compute_emissions(d.dispatch, cfg.emissions);
    d.feasible = d.dispatch.unmet_fraction() <= cfg.dispatch.reliability_cap;
    if (d.feasible) d.rank = 1;
    return d;
}

void add_resource_inputs(hs::RunManifest& manifest, const hs::ScenarioConfig& cfg,
                         const fs::path& resources_dir) {
    if (!cfg.load.daily_shape_csv.empty())
        manifest.add_input((resources_dir / cfg.load.daily_shape_csv).string());
    if (!cfg.resources.ghi_csv.empty())
        manifest.add_input((resources_dir / cfg.resources.ghi_csv).string());
    if (!cfg.resources.wind_csv.empty())
        manifest.add_input((resources_dir / cfg.resources.wind_csv).string());
    if (!cfg.resources.biomass_csv.empty())
        manifest.add_input((resources_dir / cfg.resources.biomass_csv).string());
    if (cfg.resources.temperature_csv)
        manifest.add_input((resources_dir / *cfg.resources.temperature_csv).string());
    manifest.seed = cfg.resources.wind_seed;
}

void print_violations(const hs::ValidationReport& report) {
    for (const auto& v : report.violations)
        std::cerr << (v.severity == hs::Severity::error ? "error" : "warning") << ": "
                  << v.field << ": " << v.message << "\n";
}

void write_design_tables(const fs::path& out_dir,
                         const std::vector<hs::RankedDesign>& designs,
                         const hs::EconParams& econ, const std::string& base_digest) {
    using hs::TableId;
    for (TableId id : {TableId::T2_energy, TableId::T3_renewable, TableId::T4_cost_perf,
                       TableId::T5_grid_econ, TableId::T6_sizing_emissions,
                       TableId::T7_indicators}) {
        const std::string csv = hs::render_table(id, designs, econ, base_digest);
        write_text_file(out_dir / "tables" / (std::string(hs::table_file_stem(id)) + ".csv"),
                        csv);
    }
}

int cmd_validate(const std::string& scenario_path, const fs::path& out_dir,
                 hs::RunManifest& manifest) {
    manifest.add_input(scenario_path);
    const hs::ScenarioConfig cfg = hs::load_scenario_file(scenario_path);
    const hs::ValidationReport report = hs::validate_scenario(cfg);
    print_violations(report);
    write_json_file(out_dir / "summary.json",
                    nlohmann::ordered_json{{"validation", hs::to_json(report)}});
    manifest.outputs.push_back((out_dir / "summary.json").string());
    if (!report.simulable()) return 2;
    std::cout << "scenario OK (" << report.violations.size() << " warning(s))\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const fs::path& resources_dir,
                 const fs::path& out_dir, bool keep_trace, hs::RunManifest& manifest) {
    manifest.add_input(scenario_path);
    const hs::ScenarioConfig cfg = hs::load_scenario_file(scenario_path);
    add_resource_inputs(manifest, cfg, resources_dir);

    const hs::ValidationReport report = hs::validate_scenario(cfg);
    print_violations(report);
    if (!report.simulable()) {
        write_json_file(out_dir / "summary.json",
                        nlohmann::ordered_json{{"validation", hs::to_json(report)}});
        manifest.outputs.push_back((out_dir / "summary.json").string());
        return 2;
    }

    const hs::SeriesBundle series =
        hs::build_series(cfg.load, cfg.resources, resources_dir);
    hs::SimulateOptions opts;
    opts.keep_trace = keep_trace;
    const hs::RankedDesign design = evaluate_single(cfg, series, opts);

    nlohmann::ordered_json summary{
        {"engine", hs::kEngineName},
        {"engine_version", hs::kEngineVersion},
        {"command", "simulate"},
        {"validation", hs::to_json(report)},
        {"candidate_count", 1},
        {"feasible_count", design.feasible ? 1 : 0},
        {"designs", nlohmann::ordered_json::array({hs::to_json(design)})},
    };
    write_json_file(out_dir / "summary.json", summary);
    manifest.outputs.push_back((out_dir / "summary.json").string());

    write_design_tables(out_dir, {design}, cfg.econ, "");
    manifest.outputs.push_back((out_dir / "tables").string());

    if (keep_trace) {
        write_text_file(out_dir / "trace" / "dispatch.csv",
                        hs::render_trace(design.dispatch));
        manifest.outputs.push_back((out_dir / "trace" / "dispatch.csv").string());
    }

    std::cout << design.label << ": served " << hs::fmt::kwh(design.dispatch.load_served_kwh)
              << " kWh/yr, unmet " << hs::fmt::kwh(design.dispatch.unmet_kwh)
              << " kWh/yr, NPC $" << hs::fmt::money(design.cost.npc) << ", COE $"
              << hs::fmt::coe(design.cost.coe) << "/kWh, RF "
              << hs::fmt::pct(design.dispatch.renewable_fraction) << "%\n";
    return 0;
}

nlohmann::ordered_json ranking_summary(const std::vector<hs::RankedDesign>& designs,
                                       const char* command) {
    std::size_t feasible = 0;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& d : designs) {
        if (d.feasible) {
            ++feasible;
            rows.push_back(hs::to_json(d));
        }
    }
    return nlohmann::ordered_json{
        {"engine", hs::kEngineName},
        {"engine_version", hs::kEngineVersion},
        {"command", command},
        {"candidate_count", designs.size()},
        {"feasible_count", feasible},
        {"designs", rows},
    };
}

int cmd_optimize(const std::string& space_path, const fs::path& resources_dir,
                 const fs::path& out_dir, unsigned jobs, std::optional<double> cap,
                 const std::string& base_digest, hs::RunManifest& manifest) {
    manifest.add_input(space_path);
    hs::ParsedSpace parsed = hs::load_space_file(space_path);
    if (cap) {
        parsed.space.reliability_cap = *cap;
        parsed.space.base.dispatch.reliability_cap = *cap;
    }
    add_resource_inputs(manifest, parsed.space.base, resources_dir);

    const hs::SeriesBundle series =
        hs::build_series(parsed.space.base.load, parsed.space.base.resources,
                         resources_dir);
    const auto designs = hs::evaluate_all(parsed.space, series, jobs);

    write_json_file(out_dir / "summary.json", ranking_summary(designs, "optimize"));
    write_design_tables(out_dir, designs, parsed.space.base.econ, base_digest);
    manifest.outputs.push_back((out_dir / "summary.json").string());
    manifest.outputs.push_back((out_dir / "tables").string());

    std::size_t feasible = 0;
    for (const auto& d : designs)
        if (d.feasible) ++feasible;
    std::cout << "evaluated " << designs.size() << " candidates, " << feasible
              << " feasible\n";
    if (feasible > 0) {
        const auto& best = designs.front();
        std::cout << "best: " << best.label << " NPC $" << hs::fmt::money(best.cost.npc)
                  << " COE $" << hs::fmt::coe(best.cost.coe) << "/kWh\n";
    }
    return 0;
}

int cmd_sweep(const std::string& space_path, const fs::path& resources_dir,
              const fs::path& out_dir, unsigned jobs, std::optional<double> cap,
              std::string parameter, std::vector<double> values,
              const std::string& base_digest, hs::RunManifest& manifest) {
    manifest.add_input(space_path);
    hs::ParsedSpace parsed = hs::load_space_file(space_path);
    if (cap) {
        parsed.space.reliability_cap = *cap;
        parsed.space.base.dispatch.reliability_cap = *cap;
    }
    if (parameter.empty()) {
        if (!parsed.sweep)
            throw hs::SchemaError(
                "no sweep defined: add a \"sweep\" object to the space file or pass "
                "--param/--values");
        parameter = parsed.sweep->parameter;
        if (values.empty()) values = parsed.sweep->values;
    }
    add_resource_inputs(manifest, parsed.space.base, resources_dir);

    const hs::SeriesBundle base_series =
        hs::build_series(parsed.space.base.load, parsed.space.base.resources,
                         resources_dir);

    std::string winners = "value,system,digest,npc_usd,coe_usd_per_kwh,feasible_count\n";
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < values.size(); ++k) {
        hs::SearchSpace space = parsed.space;
        hs::SeriesBundle series = base_series;
        hs::apply_sweep_parameter(space, series, parameter, values[k]);
        const auto designs = hs::evaluate_all(space, series, jobs);

        const fs::path run_dir = out_dir / ("sweep_" + std::to_string(k));
        write_json_file(run_dir / "summary.json", ranking_summary(designs, "sweep"));
        write_design_tables(run_dir, designs, space.base.econ, base_digest);

        std::size_t feasible = 0;
        for (const auto& d : designs)
            if (d.feasible) ++feasible;
        std::ostringstream row;
        row.precision(12);
        row << values[k] << ",";
        if (feasible > 0) {
            const auto& best = designs.front();
            row << best.label << "," << best.digest << ","
                << hs::fmt::money(best.cost.npc) << "," << hs::fmt::coe(best.cost.coe);
        } else {
            row << "none,none,undefined,undefined";
        }
        row << "," << feasible << "\n";
        winners += row.str();
        runs.push_back({{"value", values[k]},
                        {"dir", run_dir.string()},
                        {"feasible_count", feasible}});
        manifest.outputs.push_back(run_dir.string());
    }
    write_text_file(out_dir / "winners.csv", winners);
    write_json_file(out_dir / "summary.json",
                    nlohmann::ordered_json{{"engine", hs::kEngineName},
                                           {"command", "sweep"},
                                           {"parameter", parameter},
                                           {"runs", runs}});
    manifest.outputs.push_back((out_dir / "winners.csv").string());
    std::cout << "swept " << parameter << " over " << values.size() << " value(s)\n";
    return 0;
}

int cmd_render(const fs::path& run_dir, const fs::path& out_dir,
               const std::string& table, const std::string& channel,
               hs::RunManifest& manifest) {
    if (table.empty() == channel.empty())
        throw hs::SchemaError("render: pass exactly one of --table or --channel");
    if (!table.empty()) {
        const auto id = hs::table_id_from_string(table);
        if (!id) throw hs::SchemaError("unknown table id '" + table + "'");
        const fs::path summary_path = run_dir / "summary.json";
        manifest.add_input(summary_path.string());
        const nlohmann::json summary = hs::parse_json_file(summary_path.string());
        if (!summary.contains("designs"))
            throw hs::SchemaError(summary_path.string() + ": no designs to render");
        std::vector<hs::RankedDesign> designs;
        for (const auto& j : summary.at("designs"))
            designs.push_back(hs::design_from_json(j));
        const std::string csv = hs::render_table(*id, designs);
        const fs::path out_path =
            out_dir / "tables" / (std::string(hs::table_file_stem(*id)) + ".csv");
        write_text_file(out_path, csv);
        manifest.outputs.push_back(out_path.string());
        std::cout << "wrote " << out_path.string() << "\n";
        return 0;
    }

    // Channel extraction from the stored full trace.
    const fs::path trace_path = run_dir / "trace" / "dispatch.csv";
    manifest.add_input(trace_path.string());
    std::ifstream in(trace_path);
    if (!in) throw hs::IoError("cannot open " + trace_path.string() + " (run simulate with --trace)");
    std::string header;
    if (!std::getline(in, header)) throw hs::IoError(trace_path.string() + ": empty");
    std::vector<std::string> columns;
    {
        std::istringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) columns.push_back(col);
    }
    std::size_t target = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == channel) target = i;
    if (target == columns.size())
        throw hs::SchemaError("channel absent from trace: '" + channel + "'");

    std::string out_text = "slot," + channel + "\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell, slot, value;
        for (std::size_t i = 0; std::getline(ss, cell, ','); ++i) {
            if (i == 0) slot = cell;
            if (i == target) value = cell;
        }
        out_text += slot + "," + value + "\n";
    }
    const fs::path out_path = out_dir / "trace" / (channel + ".csv");
    write_text_file(out_path, out_text);
    manifest.outputs.push_back(out_path.string());
    std::cout << "wrote " << out_path.string() << "\n";
    return 0;
}

int run_guarded(const std::string& command, const fs::path& out_dir,
                const std::function<int(hs::RunManifest&)>& body) {
    hs::RunManifest manifest;
    manifest.command = command;
    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        code = body(manifest);
    } catch (const hs::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        code = 2;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "json syntax error: " << e.what() << "\n";
        code = 1;
    } catch (const hs::CsvError& e) {
        std::cerr << "csv error: " << e.what() << "\n";
        code = 1;
    } catch (const hs::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        code = 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = 1;
    }
    manifest.exit_status = code;
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    hs::write_manifest(manifest, out_dir);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "hybridsizer: techno-economic design engine for hybrid renewable "
        "microgrids.\nPrecedence for shared settings: command-line flag > "
        "HYBRIDSIZER_* environment variable > input file > built-in default."};
    app.require_subcommand(1);
    app.fallthrough();

    // Empty sentinel: resolved per command ("run", or the --run directory
    // for render) after flags and environment are applied.
    std::string out_dir;
    unsigned jobs = default_jobs();
    app.add_option("--out", out_dir, "Output directory (HYBRIDSIZER_OUT; default ./run)")
        ->envname("HYBRIDSIZER_OUT");
    app.add_option("--jobs", jobs,
                   "Worker threads; changes wall time only, never output bytes "
                   "(HYBRIDSIZER_JOBS)")
        ->envname("HYBRIDSIZER_JOBS");

    std::string scenario_path, space_path, run_dir, table, channel, base_digest,
        sweep_param;
    std::string resources_dir = ".";
    std::vector<double> sweep_values;
    bool keep_trace = false;
    double cap_value = 0.0;

    auto* sim = app.add_subcommand("simulate", "Simulate one scenario for a year");
    sim->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sim->add_option("--resources", resources_dir, "Directory holding the input CSVs");
    sim->add_flag("--trace", keep_trace, "Write the per-slot trace CSV");

    auto* opt = app.add_subcommand("optimize", "Enumerate, filter and rank a search space");
    opt->add_option("--space", space_path, "Search-space JSON file")->required();
    opt->add_option("--resources", resources_dir, "Directory holding the input CSVs");
    auto* opt_cap = opt->add_option("--cap", cap_value,
                                    "Reliability cap (max unmet fraction); overrides "
                                    "the space file");
    opt->add_option("--base-digest", base_digest,
                    "Digest of the base design for the indicators table (default: the "
                    "grid-only design)");

    auto* swp = app.add_subcommand("sweep", "Sensitivity sweep over a parameter");
    swp->add_option("--space", space_path, "Search-space JSON file")->required();
    swp->add_option("--resources", resources_dir, "Directory holding the input CSVs");
    auto* swp_cap = swp->add_option("--cap", cap_value, "Reliability cap override");
    swp->add_option("--param", sweep_param,
                    "Parameter path (overrides the space file sweep definition)");
    swp->add_option("--values", sweep_values, "Sweep values (with --param)");
    swp->add_option("--base-digest", base_digest, "Base design digest for T7");

    auto* val = app.add_subcommand("validate", "Validate a scenario file");
    val->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    auto* ren = app.add_subcommand("render", "Re-render tables or trace channels from a run");
    ren->add_option("--run", run_dir, "Run directory holding summary.json / trace/")
        ->required();
    ren->add_option("--table", table, "Table id (T2..T7)");
    ren->add_option("--channel", channel, "Trace channel (e.g. soc, load, unmet)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage/config errors map to the contract's 2
    }

    if (out_dir.empty()) out_dir = ren->parsed() && !run_dir.empty() ? run_dir : "run";

    if (sim->parsed())
        return run_guarded("simulate", out_dir, [&](hs::RunManifest& m) {
            return cmd_simulate(scenario_path, resources_dir, out_dir, keep_trace, m);
        });
    if (opt->parsed())
        return run_guarded("optimize", out_dir, [&](hs::RunManifest& m) {
            return cmd_optimize(space_path, resources_dir, out_dir, jobs,
                                opt_cap->count() ? std::optional<double>(cap_value)
                                                 : std::nullopt,
                                base_digest, m);
        });
    if (swp->parsed())
        return run_guarded("sweep", out_dir, [&](hs::RunManifest& m) {
            return cmd_sweep(space_path, resources_dir, out_dir, jobs,
                             swp_cap->count() ? std::optional<double>(cap_value)
                                              : std::nullopt,
                             sweep_param, sweep_values, base_digest, m);
        });
    if (val->parsed())
        return run_guarded("validate", out_dir, [&](hs::RunManifest& m) {
            return cmd_validate(scenario_path, out_dir, m);
        });
    if (ren->parsed())
        return run_guarded("render", out_dir, [&](hs::RunManifest& m) {
            return cmd_render(run_dir, out_dir, table, channel, m);
        });
    return 2;
}
