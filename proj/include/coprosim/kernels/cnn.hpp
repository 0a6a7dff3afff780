#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"
#include "coprosim/half.hpp"

namespace coprosim {

// Ship-detection CNN: a 6-layer network with 132,009 parameters running on
// 128x128 RGB patches. Weights and activations live in 16-bit floating
// point; products are accumulated at single precision and every stored
// activation is narrowed back to half, which models the VPU's 16-bit FP
// inference path. The 1024x1024 benchmark input is tiled into the 8x8 grid
// of patches, each scored independently.
//
// Topology (channels-major tensors, same padding, stride 1):
//   conv 3x3,  3 ->  8, relu      128x128 -> 128x128x8
//   maxpool 2x2                   -> 64x64x8
//   conv 3x3,  8 ->  8, relu      -> 64x64x8
//   maxpool 4x4                   -> 16x16x8
//   dense 2048 -> 64, relu
//   dense   64 ->  1, sigmoid

inline constexpr unsigned kCnnPatchSize = 128;
inline constexpr unsigned kCnnInputChannels = 3;

struct CnnModel {
    static constexpr unsigned conv1_out = 8;
    static constexpr unsigned conv2_out = 8;
    static constexpr unsigned pool1 = 2;
    static constexpr unsigned pool2 = 4;
    static constexpr unsigned fc1_in = 2048;  // 8 channels x 16 x 16
    static constexpr unsigned fc1_out = 64;

    std::vector<Half> conv1_w, conv1_b;  // [8][3][3][3], [8]
    std::vector<Half> conv2_w, conv2_b;  // [8][8][3][3], [8]
    std::vector<Half> fc1_w, fc1_b;      // [64][2048], [64]
    std::vector<Half> fc2_w, fc2_b;      // [1][64], [1]

    std::size_t parameter_count() const {
        return conv1_w.size() + conv1_b.size() + conv2_w.size() + conv2_b.size() + fc1_w.size() +
               fc1_b.size() + fc2_w.size() + fc2_b.size();
    }

    void validate() const {
        if (conv1_w.size() != conv1_out * kCnnInputChannels * 9 || conv1_b.size() != conv1_out ||
            conv2_w.size() != conv2_out * conv1_out * 9 || conv2_b.size() != conv2_out ||
            fc1_w.size() != static_cast<std::size_t>(fc1_out) * fc1_in ||
            fc1_b.size() != fc1_out || fc2_w.size() != fc1_out || fc2_b.size() != 1)
            throw ConfigError("CNN weight tensor sizes do not match the fixed topology");
        const std::size_t params = parameter_count();
        if (params < 125400 || params > 138600)  // 132K +/- 5%
            throw ConfigError("CNN parameter count out of range: " + std::to_string(params));
    }

    /// Deterministic He-style initialization from a seed.
    static CnnModel seeded(std::uint64_t seed) {
        CnnModel m;
        std::mt19937_64 rng(seed);
        auto fill = [&rng](std::vector<Half>& v, std::size_t n, double stddev) {
            std::normal_distribution<double> dist(0.0, stddev);
            v.resize(n);
            for (auto& h : v) h = Half::from_float(static_cast<float>(dist(rng)));
        };
        fill(m.conv1_w, conv1_out * kCnnInputChannels * 9,
             std::sqrt(2.0 / (kCnnInputChannels * 9)));
        fill(m.conv1_b, conv1_out, 0.01);
        fill(m.conv2_w, conv2_out * conv1_out * 9, std::sqrt(2.0 / (conv1_out * 9)));
        fill(m.conv2_b, conv2_out, 0.01);
        fill(m.fc1_w, static_cast<std::size_t>(fc1_out) * fc1_in, std::sqrt(2.0 / fc1_in));
        fill(m.fc1_b, fc1_out, 0.01);
        fill(m.fc2_w, fc1_out, std::sqrt(2.0 / fc1_out));
        fill(m.fc2_b, 1, 0.01);
        m.validate();
        return m;
    }
};

/// A 128x128 RGB patch normalized to [0, 1], channels-major, in half
/// precision — the inference engine's input buffer contents.
inline std::vector<Half> extract_patch(const RgbImage& image, std::uint32_t patch_x,
                                       std::uint32_t patch_y) {
    constexpr unsigned n = kCnnPatchSize;
    if ((patch_x + 1) * n > image.width || (patch_y + 1) * n > image.height)
        throw GeometryError("patch coordinates outside the image grid");
    std::vector<Half> patch(static_cast<std::size_t>(kCnnInputChannels) * n * n);
    const std::uint32_t x0 = patch_x * n;
    const std::uint32_t y0 = patch_y * n;
    const std::vector<std::uint16_t>* channels[3] = {&image.r, &image.g, &image.b};
    for (unsigned c = 0; c < kCnnInputChannels; ++c)
        for (unsigned y = 0; y < n; ++y)
            for (unsigned x = 0; x < n; ++x) {
                const std::uint16_t raw =
                    (*channels[c])[static_cast<std::size_t>(y0 + y) * image.width + x0 + x];
                patch[(static_cast<std::size_t>(c) * n + y) * n + x] =
                    Half::from_float(static_cast<float>(raw) / 65535.0f);
            }
    return patch;
}

namespace detail {

// Same-padded 3x3 convolution + relu, half tensors, float accumulation.
inline std::vector<Half> conv3x3_relu(std::span<const Half> input, unsigned size,
                                      unsigned in_ch, unsigned out_ch,
                                      std::span<const Half> weights, std::span<const Half> bias) {
    std::vector<Half> out(static_cast<std::size_t>(out_ch) * size * size);
    for (unsigned oc = 0; oc < out_ch; ++oc) {
        for (unsigned y = 0; y < size; ++y) {
            for (unsigned x = 0; x < size; ++x) {
                float acc = bias[oc].to_float();
                for (unsigned ic = 0; ic < in_ch; ++ic) {
                    for (int ky = -1; ky <= 1; ++ky) {
                        const int sy = static_cast<int>(y) + ky;
                        if (sy < 0 || sy >= static_cast<int>(size)) continue;
                        for (int kx = -1; kx <= 1; ++kx) {
                            const int sx = static_cast<int>(x) + kx;
                            if (sx < 0 || sx >= static_cast<int>(size)) continue;
                            const float w =
                                weights[((static_cast<std::size_t>(oc) * in_ch + ic) * 3 +
                                         (ky + 1)) *
                                            3 +
                                        (kx + 1)]
                                    .to_float();
                            const float a =
                                input[(static_cast<std::size_t>(ic) * size + sy) * size + sx]
                                    .to_float();
                            acc += w * a;
                        }
                    }
                }
                out[(static_cast<std::size_t>(oc) * size + y) * size + x] =
                    Half::from_float(acc > 0.0f ? acc : 0.0f);
            }
        }
    }
    return out;
}

inline std::vector<Half> maxpool(std::span<const Half> input, unsigned size, unsigned channels,
                                 unsigned window) {
    const unsigned out_size = size / window;
    std::vector<Half> out(static_cast<std::size_t>(channels) * out_size * out_size);
    for (unsigned c = 0; c < channels; ++c)
        for (unsigned y = 0; y < out_size; ++y)
            for (unsigned x = 0; x < out_size; ++x) {
                float best = -std::numeric_limits<float>::infinity();
                for (unsigned dy = 0; dy < window; ++dy)
                    for (unsigned dx = 0; dx < window; ++dx) {
                        const float v = input[(static_cast<std::size_t>(c) * size + y * window +
                                               dy) *
                                                  size +
                                              x * window + dx]
                                            .to_float();
                        best = std::max(best, v);
                    }
                out[(static_cast<std::size_t>(c) * out_size + y) * out_size + x] =
                    Half::from_float(best);
            }
    return out;
}

}  // namespace detail

/// Scores one 128x128 patch; sigmoid output in [0, 1].
inline float infer_patch(const CnnModel& model, std::span<const Half> patch) {
    model.validate();
    if (patch.size() != static_cast<std::size_t>(kCnnInputChannels) * kCnnPatchSize * kCnnPatchSize)
        throw ConfigError("patch tensor has the wrong size");

    auto a1 = detail::conv3x3_relu(patch, kCnnPatchSize, kCnnInputChannels, CnnModel::conv1_out,
                                   model.conv1_w, model.conv1_b);
    auto a2 = detail::maxpool(a1, kCnnPatchSize, CnnModel::conv1_out, CnnModel::pool1);
    auto a3 = detail::conv3x3_relu(a2, kCnnPatchSize / CnnModel::pool1, CnnModel::conv1_out,
                                   CnnModel::conv2_out, model.conv2_w, model.conv2_b);
    auto a4 = detail::maxpool(a3, kCnnPatchSize / CnnModel::pool1, CnnModel::conv2_out,
                              CnnModel::pool2);

    std::vector<Half> a5(CnnModel::fc1_out);
    for (unsigned o = 0; o < CnnModel::fc1_out; ++o) {
        float acc = model.fc1_b[o].to_float();
        for (unsigned i = 0; i < CnnModel::fc1_in; ++i)
            acc += model.fc1_w[static_cast<std::size_t>(o) * CnnModel::fc1_in + i].to_float() *
                   a4[i].to_float();
        a5[o] = Half::from_float(acc > 0.0f ? acc : 0.0f);
    }

    float acc = model.fc2_b[0].to_float();
    for (unsigned i = 0; i < CnnModel::fc1_out; ++i)
        acc += model.fc2_w[i].to_float() * a5[i].to_float();
    const float score = 1.0f / (1.0f + std::exp(-acc));
    return Half::from_float(score).to_float();
}

/// Tiles the image into its grid of 128x128 patches (row-major) and scores
/// each; the 1024x1024 benchmark input yields 64 scores.
inline std::vector<float> cnn_ship_detect(const RgbImage& image, const CnnModel& model) {
    image.validate();
    if (image.width % kCnnPatchSize != 0 || image.height % kCnnPatchSize != 0)
        throw GeometryError("image dimensions must be multiples of the 128-pixel patch size");
    const std::uint32_t grid_x = image.width / kCnnPatchSize;
    const std::uint32_t grid_y = image.height / kCnnPatchSize;
    std::vector<float> scores;
    scores.reserve(static_cast<std::size_t>(grid_x) * grid_y);
    for (std::uint32_t py = 0; py < grid_y; ++py)
        for (std::uint32_t px = 0; px < grid_x; ++px)
            scores.push_back(infer_patch(model, extract_patch(image, px, py)));
    return scores;
}

/// Scores quantized to a 16 bpp Nx1 frame for the return transfer.
inline Frame scores_to_frame(std::span<const float> scores) {
    Frame f(static_cast<std::uint32_t>(scores.size()), 1, PixelDepth::Bpp16);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const long q = std::lround(static_cast<double>(scores[i]) * 65535.0);
        f.pixels[i] = static_cast<std::uint32_t>(std::clamp(q, 0l, 65535l));
    }
    return f;
}

}  // namespace coprosim
