#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"
#include "coprosim/kernels/partition.hpp"

namespace coprosim {

// Floating-point convolution over 8 bpp frames. The operation is a
// correlation (no kernel flip) with zero-padded borders, accumulated in
// 32-bit floats in a fixed row-major tap order; output pixels are rounded
// to nearest and clamped to [0, 255] so the frame keeps its geometry and
// depth. Kernel sizes 3x3 through 13x13, odd only.

struct ConvKernel {
    unsigned size = 0;
    std::vector<float> taps;  // row-major, size*size entries

    void validate() const {
        if (size < 3 || size > 13 || size % 2 == 0)
            throw ConfigError("kernel size must be odd and within 3..13");
        if (taps.size() != static_cast<std::size_t>(size) * size)
            throw ConfigError("kernel tap count does not match its size");
    }

    static ConvKernel delta(unsigned size) {
        ConvKernel k{size, std::vector<float>(static_cast<std::size_t>(size) * size, 0.0f)};
        k.validate();
        k.taps[(static_cast<std::size_t>(size) * size) / 2] = 1.0f;
        return k;
    }

    static ConvKernel box(unsigned size) {
        ConvKernel k{size, {}};
        k.taps.assign(static_cast<std::size_t>(size) * size,
                      1.0f / (static_cast<float>(size) * static_cast<float>(size)));
        k.validate();
        return k;
    }

    static ConvKernel gaussian(unsigned size, float sigma) {
        ConvKernel k{size, std::vector<float>(static_cast<std::size_t>(size) * size, 0.0f)};
        k.validate();
        const int r = static_cast<int>(size) / 2;
        float sum = 0.0f;
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const float v =
                    std::exp(-(static_cast<float>(dx * dx + dy * dy)) / (2.0f * sigma * sigma));
                k.taps[static_cast<std::size_t>(dy + r) * size + (dx + r)] = v;
                sum += v;
            }
        for (float& t : k.taps) t /= sum;
        return k;
    }
};

/// Unclamped, unrounded correlation; the band-parallel stage underneath
/// fp_convolution. Kept separate so linearity holds exactly in float space.
inline std::vector<float> convolve_raw(const Frame& input, const ConvKernel& kernel,
                                       const BandPartition& output_bands) {
    input.validate();
    kernel.validate();
    if (input.depth != PixelDepth::Bpp8)
        throw GeometryError("convolution expects an 8 bpp frame");
    if (output_bands.image_height != input.height)
        throw ConfigError("band partition does not cover the output height");

    const int w = static_cast<int>(input.width);
    const int h = static_cast<int>(input.height);
    const int r = static_cast<int>(kernel.size) / 2;
    std::vector<float> out(static_cast<std::size_t>(w) * h, 0.0f);
    for (std::uint32_t band : band_execution_order(output_bands)) {
        const int y0 = static_cast<int>(output_bands.band_begin[band]);
        const int y1 = y0 + static_cast<int>(output_bands.band_height[band]);
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                float acc = 0.0f;
                for (int ky = -r; ky <= r; ++ky) {
                    const int sy = y + ky;
                    if (sy < 0 || sy >= h) continue;  // zero padding
                    for (int kx = -r; kx <= r; ++kx) {
                        const int sx = x + kx;
                        if (sx < 0 || sx >= w) continue;
                        acc += kernel.taps[static_cast<std::size_t>(ky + r) * kernel.size +
                                           (kx + r)] *
                               static_cast<float>(input.pixels[static_cast<std::size_t>(sy) * w +
                                                               sx]);
                    }
                }
                out[static_cast<std::size_t>(y) * w + x] = acc;
            }
        }
    }
    return out;
}

inline std::vector<float> convolve_raw(const Frame& input, const ConvKernel& kernel) {
    input.validate();
    const std::uint32_t n_bands = std::min<std::uint32_t>(36, input.height);
    return convolve_raw(
        input, kernel,
        partition_bands(input.height, n_bands, kDefaultWorkerCount, PartitionMode::Static));
}

inline std::uint32_t quantize_to_u8(float v) {
    const long q = std::lround(v);
    return static_cast<std::uint32_t>(std::clamp(q, 0l, 255l));
}

inline Frame fp_convolution(const Frame& input, const ConvKernel& kernel,
                            const BandPartition& output_bands) {
    const std::vector<float> raw = convolve_raw(input, kernel, output_bands);
    Frame out(input.width, input.height, PixelDepth::Bpp8);
    for (std::size_t i = 0; i < raw.size(); ++i) out.pixels[i] = quantize_to_u8(raw[i]);
    return out;
}

inline Frame fp_convolution(const Frame& input, const ConvKernel& kernel) {
    input.validate();
    const std::uint32_t n_bands = std::min<std::uint32_t>(36, input.height);
    return fp_convolution(
        input, kernel,
        partition_bands(input.height, n_bands, kDefaultWorkerCount, PartitionMode::Static));
}

}  // namespace coprosim
