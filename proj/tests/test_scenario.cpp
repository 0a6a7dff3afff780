#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "coprosim/scenario.hpp"
#include "oracles.hpp"

using namespace coprosim;

namespace {

std::filesystem::path source_dir() { return COPROSIM_SOURCE_DIR; }

std::filesystem::path out_dir(const std::string& name) {
    const auto dir = std::filesystem::path(COPROSIM_BINARY_DIR) / "scenario_out" / name;
    std::filesystem::create_directories(dir);
    return dir;
}

Scenario load(const std::string& file) {
    return load_scenario(source_dir() / "data" / "scenarios" / file);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("binning scenario runs clean end to end") {
    RunOptions opt;
    opt.out_dir = out_dir("binning");
    const RunReport r = run_scenario(load("binning_64.json"), opt);
    CHECK(r.input_crc_ok);
    CHECK(r.output_crc_ok);
    REQUIRE(r.golden.has_value());
    CHECK(r.golden->max_abs_diff == 0);
    CHECK(r.golden->pass);
    CHECK(r.functional_pass);
    // every timing entry carries a provenance tag; vpu comes from the paper
    CHECK(r.vpu.provenance == Provenance::Paper);
    CHECK(r.cif.provenance == Provenance::Derived);
}

TEST_CASE("binning on a constant image matches a constant golden") {
    const auto dir = out_dir("binning_const");
    const Frame constant = Frame::filled(16, 16, PixelDepth::Bpp8, 55);
    write_pgm(dir / "const.pgm", constant);
    write_pgm(dir / "golden.pgm", Frame::filled(8, 8, PixelDepth::Bpp8, 55));

    nlohmann::json j{{"name", "binning_const"},
                     {"benchmark", "binning"},
                     {"inputs", {{"image", "const.pgm"}, {"golden", "golden.pgm"}}},
                     {"timing", {{"vpu_ms", 3.0}}}};
    const Scenario s = parse_scenario(j, dir);
    RunOptions opt;
    opt.out_dir = dir;
    const RunReport r = run_scenario(s, opt);
    REQUIRE(r.golden.has_value());
    CHECK(r.golden->pass);
}

TEST_CASE("conv scenario with the published component times reports 20 FPS unmasked") {
    RunOptions opt;
    opt.out_dir = out_dir("conv3_paper");
    const RunReport r = run_scenario(load("conv3_paper_timing.json"), opt);
    CHECK(r.functional_pass);
    CHECK(r.metrics.throughput_fps == Catch::Approx(20.0));
    CHECK(us_to_ms(r.metrics.latency_us) == Catch::Approx(50.0));
    // overridden entries are paper numbers, and tagged as such
    CHECK(r.cif.provenance == Provenance::Paper);
    CHECK(r.lcd.provenance == Provenance::Paper);
}

TEST_CASE("render scenario matches its golden through the masked pipeline") {
    RunOptions opt;
    opt.out_dir = out_dir("render");
    const RunReport r = run_scenario(load("render_64.json"), opt);
    CHECK(r.functional_pass);
    REQUIRE(r.golden.has_value());
    CHECK(r.golden->max_abs_diff == 0);
    CHECK(r.mode == IoMode::Masked);
    CHECK(r.cif_buffer.provenance == Provenance::Paper);  // the pinned 42 ms override
}

TEST_CASE("cnn scenario scores its patch grid and round-trips the bus") {
    RunOptions opt;
    opt.out_dir = out_dir("cnn");
    const RunReport r = run_scenario(load("cnn_256.json"), opt);
    CHECK(r.input_crc_ok);
    CHECK(r.output_crc_ok);
    REQUIRE(r.golden.has_value());
    CHECK(r.golden->pass);
    // scores strip plus report artifacts were written
    bool scores_json = false;
    for (const auto& p : r.outputs) scores_json |= p.string().ends_with("_scores.json");
    CHECK(scores_json);
}

TEST_CASE("an injected bus error fails strict mode") {
    Scenario s = load("binning_64.json");
    s.injected_errors.push_back({17, 2});
    RunOptions opt;
    opt.out_dir = out_dir("binning_bad");
    opt.strict = true;
    const RunReport r = run_scenario(s, opt);
    CHECK_FALSE(r.input_crc_ok);
    CHECK_FALSE(r.functional_pass);
}

TEST_CASE("injected errors parse from the scenario file") {
    nlohmann::json j{{"name", "x"},
                     {"benchmark", "binning"},
                     {"inputs", {{"image", "i.pgm"}}},
                     {"inject_errors", {{{"cycle", 5}, {"bit", 3}}}},
                     {"timing", {{"vpu_ms", 1.0}}}};
    const Scenario s = parse_scenario(j, ".");
    REQUIRE(s.injected_errors.size() == 1);
    CHECK(s.injected_errors[0].cycle == 5);
    CHECK(s.injected_errors[0].bit == 3);
}

TEST_CASE("scenario runs are byte-identical across repeats") {
    const auto dir_a = out_dir("repeat_a");
    const auto dir_b = out_dir("repeat_b");
    RunOptions a, b;
    a.out_dir = dir_a;
    b.out_dir = dir_b;
    const Scenario s = load("conv3_64.json");
    const RunReport first = run_scenario(s, a);
    const RunReport again = run_scenario(s, a);  // same output directory
    CHECK(run_report_json(first).dump() == run_report_json(again).dump());
    run_scenario(s, b);
    CHECK(slurp(dir_a / "conv3_64_out.pgm") == slurp(dir_b / "conv3_64_out.pgm"));
}

TEST_CASE("missing vpu time is a configuration error") {
    nlohmann::json j{{"name", "x"}, {"benchmark", "binning"},
                     {"inputs", {{"image", "../fixtures/gradient_64.pgm"}}}};
    const Scenario s = parse_scenario(j, source_dir() / "data" / "scenarios");
    RunOptions opt;
    opt.out_dir = out_dir("no_vpu");
    CHECK_THROWS_AS(run_scenario(s, opt), ConfigError);
}

TEST_CASE("rendered depth passes golden comparison against the ray-cast oracle") {
    TriangleMesh mesh;
    mesh.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    mesh.triangles = {{{0, 2, 4}}, {{2, 1, 4}}, {{1, 3, 4}}, {{3, 0, 4}},
                      {{2, 0, 5}}, {{1, 2, 5}}, {{3, 1, 5}}, {{0, 3, 5}}};
    Pose6D pose;
    pose.translation = {0, 0, 3};
    pose.rotation_xyz = {0.4, 0.3, 0.2};
    const CameraIntrinsics cam{16, 16, 8, 8};
    const DepthRange range{0.1, 100};

    const Frame rendered = render_depth(mesh, pose, cam, 16, 16, range);
    Frame oracle_image(16, 16, PixelDepth::Bpp16);
    for (std::uint32_t y = 0; y < 16; ++y)
        for (std::uint32_t x = 0; x < 16; ++x) {
            const auto hit = oracles::raycast_pixel(mesh, pose, cam, x + 0.5, y + 0.5);
            oracle_image.at(x, y) = hit.hit ? quantize_depth(hit.distance, range) : kDepthNoHit;
        }
    const GoldenReport r = compare_golden(rendered, oracle_image, 1.0);
    CHECK(r.pass);  // within one quantization step everywhere on this mesh
}

TEST_CASE("compare_golden basics") {
    const Frame a = Frame::filled(8, 8, PixelDepth::Bpp8, 100);
    Frame b = a;
    CHECK(compare_golden(a, b, 0).pass);
    CHECK(compare_golden(a, b, 0).max_abs_diff == 0);

    b.pixels[13] = 101;  // one LSB in one pixel
    const GoldenReport r = compare_golden(a, b, 0);
    CHECK_FALSE(r.pass);
    CHECK(r.max_abs_diff == 1);
    CHECK(compare_golden(a, b, 1).pass);

    const Frame c = Frame::filled(8, 4, PixelDepth::Bpp8, 100);
    CHECK_THROWS_AS(compare_golden(a, c, 0), GeometryError);
}

TEST_CASE("reproduce_table2 from the bundled dataset is within tolerance") {
    const auto dataset = load_table2_dataset(source_dir() / "data" / "table2.json");
    const Table2Report report = reproduce_table2(dataset);
    REQUIRE(report.rows.size() == 6);
    CHECK(report.all_within_tolerance);
    for (const auto& row : report.rows) {
        CAPTURE(row.name);
        CHECK(row.unmasked.within_tolerance);
        CHECK(row.masked.within_tolerance);
    }
}

TEST_CASE("reproduce_table2 row filter and empty dataset") {
    const auto dataset = load_table2_dataset(source_dir() / "data" / "table2.json");
    const Table2Report one = reproduce_table2(dataset, std::optional<std::string>{"binning"});
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].name == "binning");

    CHECK_THROWS_AS(reproduce_table2(dataset, std::optional<std::string>{"nope"}), ConfigError);

    CHECK_THROWS_AS(parse_table2_dataset(nlohmann::json{{"rows", nlohmann::json::array()}}),
                    ConfigError);
    CHECK_THROWS_AS(load_table2_dataset(source_dir() / "data" / "missing.json"), ConfigError);
}

TEST_CASE("table2 exports") {
    const auto dataset = load_table2_dataset(source_dir() / "data" / "table2.json");
    const Table2Report report = reproduce_table2(dataset);
    std::ostringstream csv;
    write_table2_csv(csv, report);
    CHECK(csv.str().find("binning") != std::string::npos);
    const auto j = table2_report_json(report);
    CHECK(j["rows"].size() == 6);
    CHECK(j["all_within_tolerance"] == true);
}

TEST_CASE("bus event dump lands next to the other artifacts") {
    Scenario s = load("conv3_64.json");
    RunOptions opt;
    opt.out_dir = out_dir("dump");
    opt.dump_bus_events = true;
    const RunReport r = run_scenario(s, opt);
    bool found = false;
    for (const auto& p : r.outputs)
        if (p.string().ends_with("_bus_events.csv")) {
            found = true;
            CHECK(slurp(p).starts_with("cycle,kind,value\n"));
        }
    CHECK(found);
}
