// coprosim — batch front-end for the FPGA/VPU co-processing simulator.
//
// Runs end-to-end benchmark scenarios (frame in -> bus -> kernel -> bus ->
// verify), reproduces the reference evaluation table, and compares outputs
// against golden images.
//
// Exit codes: 0 pass, 1 functional failure, 2 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coprosim/scenario.hpp"

namespace {

int run_scenario_command(const std::string& scenario_path, const coprosim::RunOptions& options,
                         bool quiet) {
    const coprosim::Scenario scenario = coprosim::load_scenario(scenario_path);
    const coprosim::RunReport report = coprosim::run_scenario(scenario, options);

    const auto j = coprosim::run_report_json(report);
    const auto report_path = options.out_dir / (scenario.name + "_report.json");
    std::ofstream out(report_path);
    out << j.dump(2) << '\n';

    if (!quiet) {
        std::cout << "scenario " << scenario.name << " [" << to_string(report.benchmark) << ", "
                  << to_string(report.mode) << "]\n"
                  << "  crc: in " << (report.input_crc_ok ? "ok" : "FAIL") << ", out "
                  << (report.output_crc_ok ? "ok" : "FAIL") << "\n";
        if (report.golden)
            std::cout << "  golden: max diff " << report.golden->max_abs_diff << " (tolerance "
                      << report.golden->tolerance << ") "
                      << (report.golden->pass ? "ok" : "FAIL") << "\n";
        std::cout << "  latency " << coprosim::us_to_ms(report.metrics.latency_us)
                  << " ms, throughput " << report.metrics.throughput_fps << " fps\n"
                  << "  report: " << report_path.string() << "\n";
    }

    if (options.strict && !report.functional_pass) return 1;
    return report.input_crc_ok && report.output_crc_ok ? 0 : 1;
}

int table2_command(const std::string& dataset_path, const std::optional<std::string>& row,
                   const std::filesystem::path& out_dir) {
    const auto dataset = coprosim::load_table2_dataset(dataset_path);
    const auto report = coprosim::reproduce_table2(
        dataset, row && !row->empty() ? row : std::optional<std::string>{});

    coprosim::print_table2(std::cout, report);

    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "table2.csv");
    coprosim::write_table2_csv(csv, report);
    std::ofstream js(out_dir / "table2.json");
    js << coprosim::table2_report_json(report).dump(2) << '\n';
    std::cout << (report.all_within_tolerance ? "all cells within tolerance\n"
                                              : "CELLS OUT OF TOLERANCE\n");
    return report.all_within_tolerance ? 0 : 1;
}

int compare_command(const std::string& out_path, const std::string& golden_path,
                    double tolerance) {
    const coprosim::Frame a = coprosim::read_frame(out_path);
    const coprosim::Frame b = coprosim::read_frame(golden_path);
    const auto r = coprosim::compare_golden(a, b, tolerance);
    std::cout << "max diff " << r.max_abs_diff << ", mean diff " << r.mean_abs_diff << ": "
              << (r.pass ? "pass" : "FAIL") << "\n";
    return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale simulator of the FPGA & VPU co-processing architecture"};

    std::string scenario_path;
    std::string dataset_path = "data/table2.json";
    std::string row_filter;
    std::string mode;
    std::string out_dir = "out";
    bool strict = false;
    bool full_size = false;
    bool reproduce_table2 = false;
    bool dump_bus_events = false;
    bool quiet = false;
    std::vector<std::string> compare_paths;
    double tolerance = 0;

    app.add_option("--scenario", scenario_path, "Scenario JSON to run");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--mode", mode, "Override I/O mode: unmasked|masked");
    app.add_flag("--strict", strict, "Any CRC failure or golden mismatch fails the run");
    app.add_flag("--full-size", full_size,
                 "Run at the scenario's full-size geometry with synthesized inputs");
    app.add_flag("--reproduce-table2", reproduce_table2,
                 "Recompute the reference evaluation table from the bundled dataset");
    app.add_option("--dataset", dataset_path, "Timing dataset path")->capture_default_str();
    app.add_option("--row", row_filter, "Restrict --reproduce-table2 to one benchmark row");
    app.add_flag("--dump-bus-events", dump_bus_events, "Write the input bus event stream CSV");
    app.add_option("--compare-golden", compare_paths,
                   "Compare two images: <output> <golden>")
        ->expected(2);
    app.add_option("--tolerance", tolerance, "Golden comparison tolerance (max abs diff)");
    app.add_flag("--quiet", quiet, "Suppress per-run console output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reproduce_table2) {
            return table2_command(dataset_path,
                                  row_filter.empty() ? std::optional<std::string>{}
                                                     : std::optional<std::string>{row_filter},
                                  out_dir);
        }
        if (compare_paths.size() == 2)
            return compare_command(compare_paths[0], compare_paths[1], tolerance);
        if (scenario_path.empty()) {
            std::cerr << "nothing to do: give --scenario, --reproduce-table2, or "
                         "--compare-golden (see --help)\n";
            return 2;
        }
        coprosim::RunOptions options;
        options.out_dir = out_dir;
        options.strict = strict;
        options.full_size = full_size;
        options.dump_bus_events = dump_bus_events;
        if (!mode.empty()) {
            if (mode != "unmasked" && mode != "masked")
                throw coprosim::ConfigError("unknown I/O mode: " + mode);
            options.mode_override =
                mode == "masked" ? coprosim::IoMode::Masked : coprosim::IoMode::Unmasked;
        }
        return run_scenario_command(scenario_path, options, quiet);
    } catch (const coprosim::FramingError& e) {
        std::cerr << "framing error: " << e.what() << "\n";
        return 1;
    } catch (const coprosim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
