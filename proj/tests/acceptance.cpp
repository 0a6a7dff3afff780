// Acceptance suite: runs every acceptance criterion at its pinned tolerance
// and prints one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "coprosim/pixel_bus.hpp"
#include "coprosim/scenario.hpp"
#include "oracles.hpp"

using namespace coprosim;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criterion1_table2() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
        const auto dataset =
            load_table2_dataset(std::filesystem::path(COPROSIM_SOURCE_DIR) / "data/table2.json");
        const Table2Report rep = reproduce_table2(dataset);
        int cells = 0;
        double worst_latency = 0, worst_fps = 0;
        for (const auto& row : rep.rows) {
            for (const auto* cell : {&row.unmasked, &row.masked}) {
                ++cells;
                pass &= cell->within_tolerance;
                worst_latency = std::max(worst_latency, cell->latency_delta_ms);
                worst_fps = std::max(worst_fps, cell->fps_delta);
            }
        }
        const double elapsed = seconds_since(t0);
        pass &= cells == 12;
        pass &= elapsed < 1.0;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%d cells, worst |dlatency| %.3f ms, worst |dfps| %.3f, %.3f s", cells,
                      worst_latency, worst_fps, elapsed);
        detail = buf;
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(1, "reference table reproduction within ±max(2ms,2%) / ±0.1 FPS", pass, detail);
}

void criterion2_transfer_law() {
    bool pass = true;
    const double t = transfer_time_s(1024ull * 1024, 50e6);
    pass &= std::abs(t - 0.02097152) < 1e-12;
    pass &= std::abs(t - 0.0209) / 0.0209 < 0.005;  // the published 20.9 ms

    // serialize_frame consumes exactly one cycle per pixel
    std::mt19937 rng(2);
    std::uniform_int_distribution<std::uint32_t> px(0, 255);
    Frame f(48, 36, PixelDepth::Bpp8);
    for (auto& p : f.pixels) p = px(rng);
    const FramedPayload payload = append_crc_trailer(f);
    const BusConfig config{50e6, f.depth, f.width, f.height + 1};
    const BusEventStream stream = serialize_frame(payload, config);
    const std::uint64_t pixels = static_cast<std::uint64_t>(f.width) * (f.height + 1);
    pass &= stream.pixel_events() == pixels;
    pass &= stream.final_cycle() == pixels;

    char buf[120];
    std::snprintf(buf, sizeof buf, "1024^2 @ 50MHz = %.5f ms; cycle count == pixel count (%llu)",
                  t * 1e3, static_cast<unsigned long long>(pixels));
    report(2, "transfer-rate law", pass, buf);
}

void criterion3_crossover() {
    bool pass = true;
    std::string detail;
    try {
        const auto dataset =
            load_table2_dataset(std::filesystem::path(COPROSIM_SOURCE_DIR) / "data/table2.json");
        auto fps = [&](const std::string& name, IoMode mode) {
            for (const auto& row : dataset.rows)
                if (row.name == name)
                    return mode == IoMode::Masked ? masked_metrics(row.times).throughput_fps
                                                  : unmasked_metrics(row.times).throughput_fps;
            throw ConfigError("row not found: " + name);
        };
        // masking pays off exactly where the table says it does
        for (const char* gain : {"conv13", "render", "cnn"})
            pass &= fps(gain, IoMode::Masked) > fps(gain, IoMode::Unmasked);
        for (const char* loss : {"binning", "conv3"})
            pass &= fps(loss, IoMode::Masked) < fps(loss, IoMode::Unmasked);
        detail = "gain: conv13 " + std::to_string(fps("conv13", IoMode::Unmasked)) + "->" +
                 std::to_string(fps("conv13", IoMode::Masked)) + "; loss: binning " +
                 std::to_string(fps("binning", IoMode::Unmasked)) + "->" +
                 std::to_string(fps("binning", IoMode::Masked));
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(3, "masked/unmasked crossover pattern", pass, detail);
}

void criterion4_formula_vs_simulation() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::mt19937 rng(4);
    std::uniform_int_distribution<Micros> us(0, 500000);
    Micros worst = 0;
    for (int round = 0; round < 1000; ++round) {
        const ComponentTimes t{us(rng), us(rng) + 1, us(rng), us(rng), us(rng)};
        for (IoMode mode : {IoMode::Unmasked, IoMode::Masked}) {
            const Metrics analytical =
                mode == IoMode::Masked ? masked_metrics(t) : unmasked_metrics(t);
            const PipelineReport sim = simulate_stream(t, mode, 4);
            const Micros period =
                static_cast<Micros>(std::llround(1e6 / analytical.throughput_fps));
            worst = std::max(worst, std::abs(sim.steady_period_us - period));
            pass &= std::abs(sim.steady_period_us - period) <= 1;
        }
    }
    const double elapsed = seconds_since(t0);
    pass &= elapsed < 30.0;
    char buf[120];
    std::snprintf(buf, sizeof buf, "1000 random vectors, worst period gap %lld us, %.2f s",
                  static_cast<long long>(worst), elapsed);
    report(4, "formula/simulation equivalence within 1 us", pass, buf);
}

void criterion5_protocol_soundness() {
    bool pass = true;
    std::string detail;

    // CRC check value
    const std::vector<std::uint8_t> check{'1', '2', '3', '4', '5', '6', '7', '8', '9'};
    pass &= crc16_xmodem(check) == 0x31C3;

    // 500+ random frames <= 64x64 at all depths, codec + bus round trip
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::uint32_t> dim(1, 64);
    int frames = 0;
    for (PixelDepth depth : {PixelDepth::Bpp8, PixelDepth::Bpp16, PixelDepth::Bpp24}) {
        std::uniform_int_distribution<std::uint32_t> px(0, pixel_value_mask(depth));
        for (int round = 0; round < 170; ++round, ++frames) {
            Frame f(std::max(depth == PixelDepth::Bpp8 ? 2u : 1u, dim(rng)), dim(rng), depth);
            for (auto& p : f.pixels) p = px(rng);
            const FramedPayload payload = append_crc_trailer(f);
            const BusConfig config{50e6, depth, f.width, f.height + 1};
            const auto received =
                verify_and_strip(deserialize_frame(serialize_frame(payload, config), config));
            pass &= received.crc_ok && received.frame == f;
        }
    }

    // exhaustive single-bit-flip sweep over a 16x16 8bpp frame's wire image
    Frame f(16, 16, PixelDepth::Bpp8);
    std::uniform_int_distribution<std::uint32_t> px(0, 255);
    for (auto& p : f.pixels) p = px(rng);
    const FramedPayload payload = append_crc_trailer(f);
    const BusConfig config{50e6, f.depth, 16, 17};
    const BusEventStream clean = serialize_frame(payload, config);
    int detected = 0, flips = 0;
    for (std::uint64_t cycle = 0; cycle < 16ull * 17; ++cycle) {
        for (unsigned bit = 0; bit < 8; ++bit, ++flips) {
            const BitFlip flip{cycle, bit};
            const auto received = deserialize_frame(
                inject_errors(clean, std::span(&flip, 1), config.depth), config);
            detected += !verify_and_strip(received).crc_ok;
        }
    }
    pass &= detected == flips;

    detail = std::to_string(frames) + " round trips; " + std::to_string(detected) + "/" +
             std::to_string(flips) + " flips detected; crc16(\"123456789\")=0x31C3";
    report(5, "protocol soundness", pass, detail);
}

void criterion6_kernel_oracles() {
    bool pass = true;
    std::string detail;
    std::mt19937 rng(6);

    // convolution vs quadruple-loop oracle, 50 random pairs
    {
        std::uniform_int_distribution<int> size_pick(0, 5);
        const unsigned sizes[] = {3, 5, 7, 9, 11, 13};
        std::uniform_int_distribution<std::uint32_t> px(0, 255);
        std::uniform_real_distribution<float> tap(-0.5f, 0.5f);
        bool ok = true;
        for (int round = 0; round < 50; ++round) {
            Frame in(16 + (round % 9), 16 + (round % 7), PixelDepth::Bpp8);
            for (auto& p : in.pixels) p = px(rng);
            ConvKernel k{sizes[size_pick(rng)], {}};
            k.taps.resize(static_cast<std::size_t>(k.size) * k.size);
            for (auto& t : k.taps) t = tap(rng);
            ok &= fp_convolution(in, k) == oracles::convolution(in, k);
        }
        pass &= ok;
        detail += std::string("conv ") + (ok ? "exact" : "MISMATCH");
    }

    // binning vs sequential oracle under 1/12/dynamic partitions
    {
        std::uniform_int_distribution<std::uint32_t> px(0, 255);
        Frame in(64, 64, PixelDepth::Bpp8);
        for (auto& p : in.pixels) p = px(rng);
        const Frame expected = oracles::binning(in);
        const bool ok =
            average_binning(in, partition_bands(32, 1, 1, PartitionMode::Static)) == expected &&
            average_binning(in, partition_bands(32, 32, 12, PartitionMode::Static)) == expected &&
            average_binning(in, partition_bands(32, 16, 12, PartitionMode::Dynamic)) == expected;
        pass &= ok;
        detail += std::string("; binning ") + (ok ? "exact x3 partitions" : "MISMATCH");
    }

    // 16x16 depth render vs ray-casting oracle
    {
        TriangleMesh mesh;
        mesh.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        mesh.triangles = {{{0, 2, 4}}, {{2, 1, 4}}, {{1, 3, 4}}, {{3, 0, 4}},
                          {{2, 0, 5}}, {{1, 2, 5}}, {{3, 1, 5}}, {{0, 3, 5}}};
        Pose6D pose;
        pose.translation = {0, 0, 3};
        pose.rotation_xyz = {0.4, 0.3, 0.2};
        const CameraIntrinsics cam{16, 16, 8, 8};
        const DepthRange range{0.1, 100};
        const Frame out = render_depth(mesh, pose, cam, 16, 16, range);
        std::size_t covered = 0, agree = 0;
        for (std::uint32_t y = 0; y < 16; ++y)
            for (std::uint32_t x = 0; x < 16; ++x) {
                const auto hit = oracles::raycast_pixel(mesh, pose, cam, x + 0.5, y + 0.5);
                const bool raster_hit = out.at(x, y) != kDepthNoHit;
                if (!hit.hit && !raster_hit) continue;
                ++covered;
                if (hit.hit && raster_hit &&
                    std::abs(static_cast<int>(out.at(x, y)) -
                             static_cast<int>(quantize_depth(hit.distance, range))) <= 1)
                    ++agree;
            }
        const bool ok = covered > 0 && agree >= 0.95 * static_cast<double>(covered);
        pass &= ok;
        detail += "; render " + std::to_string(agree) + "/" + std::to_string(covered);
    }

    // CNN half inference vs 32-bit oracle on 100 random patches
    {
        const CnnModel model = CnnModel::seeded(7);
        std::mt19937_64 rng64(60);
        std::uniform_int_distribution<int> dist(0, 65535);
        float worst = 0;
        for (int round = 0; round < 100; ++round) {
            RgbImage img(128, 128);
            for (std::size_t i = 0; i < img.pixel_count(); ++i) {
                img.r[i] = static_cast<std::uint16_t>(dist(rng64));
                img.g[i] = static_cast<std::uint16_t>(dist(rng64));
                img.b[i] = static_cast<std::uint16_t>(dist(rng64));
            }
            const auto patch = extract_patch(img, 0, 0);
            worst = std::max(worst, std::abs(infer_patch(model, patch) -
                                             oracles::cnn_infer_f32(model, patch)));
        }
        pass &= worst <= 0.02f;
        char buf[48];
        std::snprintf(buf, sizeof buf, "; cnn worst |dscore| %.5f", worst);
        detail += buf;
    }

    report(6, "kernel oracle equivalence", pass, detail);
}

void criterion7_non_reproducible() {
    bool pass = true;
    std::string detail;
    try {
        const auto dataset =
            load_table2_dataset(std::filesystem::path(COPROSIM_SOURCE_DIR) / "data/table2.json");
        const auto& nr = dataset.non_reproducible;
        for (const char* key :
             {"vpu_processing_times_ms", "leon_baseline_speedups", "vpu_power_w",
              "cnn_training_accuracy"}) {
            pass &= nr.contains(key);
            pass &= nr.contains(key) && nr[key].value("provenance", "") == "paper";
        }
        // VPU compute times enter the model only as tagged dataset values
        for (const auto& row : dataset.rows) pass &= row.provenance.vpu == Provenance::Paper;
        detail = "silicon-/training-specific values present as tagged data only, "
                 "not asserted as model outputs";
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(7, "non-reproducible items stated, not targeted", pass, detail);
}

}  // namespace

int main() {
    criterion1_table2();
    criterion2_transfer_law();
    criterion3_crossover();
    criterion4_formula_vs_simulation();
    criterion5_protocol_soundness();
    criterion6_kernel_oracles();
    criterion7_non_reproducible();
    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
