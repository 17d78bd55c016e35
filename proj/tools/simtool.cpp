// simtool: scenario runner and analysis front end.
//
//   simtool run <scenario> [--config f] [--check] [--out dir] [--seedless] ...
//   simtool sweep --param p --values v1,v2,... [--scenario s] [--out dir]
//   simtool export --input trace.json --format csv|json --output file
//   simtool acceptance
//   simtool schema [--trace]
//
// Exit codes: 0 success, 1 runtime error, 2 acceptance-check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "adsim/acceptance.hpp"
#include "adsim/config.hpp"
#include "adsim/scenarios.hpp"
#include "adsim/trace_io.hpp"

namespace fs = std::filesystem;
using namespace adsim;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

int run_command(const std::string& scenario, const std::string& config_path,
                const std::string& out_dir, bool check, bool seedless,
                double line_resistance, double ratio, double duration) {
    ScenarioSpec spec;
    if (!config_path.empty()) {
        ScenarioSpec from_file = load_config(config_path);
        if (scenario != "custom" && from_file.name != scenario) {
            // The command line names the scenario; the file carries overrides.
            json doc;
            std::ifstream in(config_path);
            in >> doc;
            doc["scenario"] = scenario;
            spec = spec_from_json(doc);
        } else {
            spec = from_file;
        }
    } else if (scenario == "custom") {
        throw std::runtime_error("the custom scenario requires --config");
    } else if (scenario == "sharing") {
        spec = builtin_sharing(ratio);
    } else {
        spec = builtin_by_name(scenario);
    }
    if (line_resistance >= 0.0) {
        apply_parameter(spec, "network.r_line", line_resistance);
    }
    if (seedless) {
        spec.pll_seed = false;
    }
    if (duration > 0.0) {
        spec.duration = duration;
    }

    const json resolved = spec_to_json(spec);
    const std::string hash = config_hash(resolved);
    const std::string started = iso8601_now();

    const RunResult result = run_scenario(spec);

    fs::path dir = out_dir.empty() ? fs::path("out-" + scenario) : fs::path(out_dir);
    fs::create_directories(dir);
    export_csv(result.trace, (dir / "trace.csv").string());
    export_trace_json(result.trace, (dir / "trace.json").string());
    write_text(dir / "summary.json", summary_to_json(result.summary).dump(2) + "\n");
    write_text(dir / "config.json", resolved.dump(2) + "\n");
    const json manifest = run_manifest(
        spec.name, hash, started, iso8601_now(),
        {(dir / "trace.csv").string(), (dir / "trace.json").string(),
         (dir / "summary.json").string(), (dir / "config.json").string()});
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    if (!result.summary.completed) {
        std::cerr << "run aborted: " << result.summary.abort_reason << "\n";
        return 1;
    }
    std::cout << "scenario " << spec.name << " finished; outputs in " << dir.string()
              << "\n";
    for (std::size_t k = 0; k < result.summary.converters.size(); ++k) {
        const ConverterSummary& c = result.summary.converters[k];
        std::printf("  converter %zu: P = %.1f W, dtheta = %.5f rad, "
                    "droop residual = %.3f W, V_dc = %.1f V\n",
                    k, c.p_steady, c.delta_theta_steady, c.droop_residual, c.v_dc_final);
    }
    if (result.summary.converters.size() >= 2) {
        std::printf("  angle difference 1-2 = %.5f rad, load power = %.1f W\n",
                    result.summary.angle_diff_12, result.summary.load_power);
    }

    if (check) {
        bool all = true;
        for (const CriterionResult& r : check_scenario(scenario, result)) {
            std::cout << format_criterion(r) << "\n";
            all = all && r.pass;
        }
        if (!all) {
            return 2;
        }
    }
    return 0;
}

int sweep_command(const std::string& scenario, const std::string& config_path,
                  const std::string& param, const std::vector<double>& values,
                  const std::string& out_dir) {
    ScenarioSpec spec =
        config_path.empty() ? builtin_by_name(scenario) : load_config(config_path);
    const std::vector<SummaryReport> reports = sweep(spec, param, values);
    json out = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        json r = summary_to_json(reports[i]);
        r["parameter"] = param;
        r["value"] = values[i];
        out.push_back(r);
        std::printf("%s = %-12g P = %8.1f W  dtheta = %+.6f rad  min f = %.4f Hz\n",
                    param.c_str(), values[i], reports[i].converters[0].p_steady,
                    reports[i].converters[0].delta_theta_steady,
                    reports[i].converters[0].min_freq_hz);
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "sweep.json", out.dump(2) + "\n");
        std::cout << "reports written to " << (fs::path(out_dir) / "sweep.json").string()
                  << "\n";
    }
    return 0;
}

int export_command(const std::string& input, const std::string& format,
                   const std::string& output) {
    const TraceRecorder trace = import_trace_json(input);
    if (format == "csv") {
        export_csv(trace, output);
    } else if (format == "json") {
        export_trace_json(trace, output);
    } else {
        throw std::runtime_error("unknown export format '" + format + "'");
    }
    std::cout << "wrote " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Angular-droop converter simulator"};
    app.require_subcommand(1);

    // run
    std::string scenario = "blackstart";
    std::string config_path, out_dir;
    bool check = false, seedless = false;
    double line_resistance = -1.0, ratio = 1.0, duration = -1.0;
    CLI::App* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("scenario", scenario,
                    "blackstart | loadstep | sync | sharing | drift | custom");
    run->add_option("--config", config_path, "JSON config (overrides the built-in)");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--check", check, "verify the scenario's acceptance criteria");
    run->add_flag("--seedless", seedless,
                  "skip the PLL angle seeding at interconnection");
    run->add_option("--line-resistance", line_resistance, "line resistance [ohm]");
    run->add_option("--ratio", ratio, "sharing ratio P*_1/P*_2");
    run->add_option("--duration", duration, "simulated time [s]");

    // sweep
    std::string sweep_scenario = "loadstep", sweep_param;
    std::vector<double> sweep_values;
    std::string sweep_out;
    std::string sweep_config;
    CLI::App* sw = app.add_subcommand("sweep", "run a parameter sweep");
    sw->add_option("--scenario", sweep_scenario, "base scenario");
    sw->add_option("--config", sweep_config, "JSON config for the base scenario");
    sw->add_option("--param", sweep_param,
                   "droop.alpha | droop.gamma | droop.p_star | network.r_load | "
                   "network.r_line | clock.delta_epsilon")
        ->required();
    sw->add_option("--values", sweep_values, "comma-separated values")
        ->required()
        ->delimiter(',');
    sw->add_option("--out", sweep_out, "output directory");

    // export
    std::string exp_input, exp_format = "csv", exp_output;
    CLI::App* ex = app.add_subcommand("export", "convert a recorded trace");
    ex->add_option("--input", exp_input, "trace JSON file")->required();
    ex->add_option("--format", exp_format, "csv | json");
    ex->add_option("--output", exp_output, "destination file")->required();

    // acceptance
    CLI::App* acc = app.add_subcommand("acceptance", "run every acceptance criterion");

    // schema
    bool schema_trace = false;
    CLI::App* sch = app.add_subcommand("schema", "print the config JSON schema");
    sch->add_flag("--trace", schema_trace, "print the trace schema instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return run_command(scenario, config_path, out_dir, check, seedless,
                               line_resistance, ratio, duration);
        }
        if (sw->parsed()) {
            return sweep_command(sweep_scenario, sweep_config, sweep_param, sweep_values,
                                 sweep_out);
        }
        if (ex->parsed()) {
            return export_command(exp_input, exp_format, exp_output);
        }
        if (acc->parsed()) {
            bool all = true;
            for (const CriterionResult& r : run_acceptance()) {
                std::cout << format_criterion(r) << "\n";
                all = all && r.pass;
            }
            return all ? 0 : 2;
        }
        if (sch->parsed()) {
            std::cout << (schema_trace ? trace_schema() : config_schema()).dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
