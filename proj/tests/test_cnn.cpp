#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "coprosim/kernels/cnn.hpp"
#include "oracles.hpp"

using namespace coprosim;

namespace {

float infer_patch_f32(const CnnModel& m, std::span<const Half> patch) {
    return oracles::cnn_infer_f32(m, patch);
}

RgbImage random_rgb(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
    RgbImage img(w, h);
    std::uniform_int_distribution<int> dist(0, 65535);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.r[i] = static_cast<std::uint16_t>(dist(rng));
        img.g[i] = static_cast<std::uint16_t>(dist(rng));
        img.b[i] = static_cast<std::uint16_t>(dist(rng));
    }
    return img;
}

}  // namespace

TEST_CASE("parameter count matches the 132K contract") {
    const CnnModel m = CnnModel::seeded(7);
    CHECK(m.parameter_count() == 132009);
    CHECK(m.parameter_count() >= 125400);  // 132K - 5%
    CHECK(m.parameter_count() <= 138600);  // 132K + 5%
}

TEST_CASE("identical patches get identical scores") {
    std::mt19937_64 rng(51);
    RgbImage img = random_rgb(rng, 256, 128);
    // copy patch (0,0) over patch (1,0)
    for (unsigned y = 0; y < 128; ++y)
        for (unsigned x = 0; x < 128; ++x) {
            const std::size_t src = static_cast<std::size_t>(y) * 256 + x;
            const std::size_t dst = static_cast<std::size_t>(y) * 256 + 128 + x;
            img.r[dst] = img.r[src];
            img.g[dst] = img.g[src];
            img.b[dst] = img.b[src];
        }
    const CnnModel m = CnnModel::seeded(7);
    const auto scores = cnn_ship_detect(img, m);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == scores[1]);
}

TEST_CASE("scores stay in the sigmoid range") {
    std::mt19937_64 rng(52);
    const RgbImage img = random_rgb(rng, 256, 256);
    const auto scores = cnn_ship_detect(img, CnnModel::seeded(3));
    REQUIRE(scores.size() == 4);
    for (float s : scores) {
        REQUIRE(s >= 0.0f);
        REQUIRE(s <= 1.0f);
    }
}

TEST_CASE("permuting two input patches permutes exactly those two scores") {
    std::mt19937_64 rng(53);
    RgbImage img = random_rgb(rng, 256, 256);
    const CnnModel m = CnnModel::seeded(7);
    const auto before = cnn_ship_detect(img, m);

    // swap patches (0,0) and (1,1)
    for (unsigned y = 0; y < 128; ++y)
        for (unsigned x = 0; x < 128; ++x) {
            const std::size_t a = static_cast<std::size_t>(y) * 256 + x;
            const std::size_t b = static_cast<std::size_t>(y + 128) * 256 + 128 + x;
            std::swap(img.r[a], img.r[b]);
            std::swap(img.g[a], img.g[b]);
            std::swap(img.b[a], img.b[b]);
        }
    const auto after = cnn_ship_detect(img, m);
    REQUIRE(after.size() == 4);
    CHECK(after[0] == before[3]);
    CHECK(after[3] == before[0]);
    CHECK(after[1] == before[1]);
    CHECK(after[2] == before[2]);
}

TEST_CASE("half-precision inference tracks the 32-bit oracle within 0.02") {
    std::mt19937_64 rng(54);
    const CnnModel m = CnnModel::seeded(7);
    float max_delta = 0;
    for (int round = 0; round < 100; ++round) {
        const RgbImage img = random_rgb(rng, 128, 128);
        const auto patch = extract_patch(img, 0, 0);
        const float half_score = infer_patch(m, patch);
        const float f32_score = infer_patch_f32(m, patch);
        max_delta = std::max(max_delta, std::abs(half_score - f32_score));
    }
    CHECK(max_delta <= 0.02f);
}

TEST_CASE("input must tile into 128-pixel patches") {
    const RgbImage img(100, 128);
    CHECK_THROWS_AS(cnn_ship_detect(img, CnnModel::seeded(1)), GeometryError);
}

TEST_CASE("scores quantize into a 16 bpp strip frame") {
    const std::vector<float> scores{0.0f, 0.5f, 1.0f};
    const Frame f = scores_to_frame(scores);
    REQUIRE(f.width == 3);
    REQUIRE(f.height == 1);
    CHECK(f.pixels[0] == 0);
    CHECK(f.pixels[1] == 32768);
    CHECK(f.pixels[2] == 65535);
}
