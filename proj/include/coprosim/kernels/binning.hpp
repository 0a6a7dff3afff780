#pragma once

#include <algorithm>
#include <cstdint>

#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"
#include "coprosim/kernels/partition.hpp"

namespace coprosim {

// Averaging binning: 2x2 regions with stride 2 reduced to their mean,
// floor-rounded. Halves both dimensions of an 8 bpp frame. Bands partition
// the output rows (one output row consumes exactly two input rows), so any
// partition yields a bit-identical result.

inline Frame average_binning(const Frame& input, const BandPartition& output_bands) {
    input.validate();
    if (input.depth != PixelDepth::Bpp8)
        throw GeometryError("binning expects an 8 bpp frame");
    if (input.width % 2 != 0 || input.height % 2 != 0)
        throw GeometryError("binning expects even frame dimensions");
    const std::uint32_t out_w = input.width / 2;
    const std::uint32_t out_h = input.height / 2;
    if (output_bands.image_height != out_h)
        throw ConfigError("band partition does not cover the output height");

    Frame out(out_w, out_h, PixelDepth::Bpp8);
    for (std::uint32_t band : band_execution_order(output_bands)) {
        const std::uint32_t y0 = output_bands.band_begin[band];
        const std::uint32_t y1 = y0 + output_bands.band_height[band];
        for (std::uint32_t y = y0; y < y1; ++y) {
            for (std::uint32_t x = 0; x < out_w; ++x) {
                const std::uint32_t sum = input.at(2 * x, 2 * y) + input.at(2 * x + 1, 2 * y) +
                                          input.at(2 * x, 2 * y + 1) +
                                          input.at(2 * x + 1, 2 * y + 1);
                out.at(x, y) = sum / 4;
            }
        }
    }
    return out;
}

/// Default static partition: up to 36 bands across the 12 workers, the
/// reference split for the 2048x2048 input.
inline Frame average_binning(const Frame& input) {
    input.validate();
    if (input.height % 2 != 0)
        throw GeometryError("binning expects even frame dimensions");
    const std::uint32_t out_h = input.height / 2;
    const std::uint32_t n_bands = std::min<std::uint32_t>(36, out_h);
    return average_binning(
        input, partition_bands(out_h, n_bands, kDefaultWorkerCount, PartitionMode::Static));
}

}  // namespace coprosim
