#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coprosim/errors.hpp"

namespace coprosim {

/// Pixel bit width supported by the CIF/LCD buses.
enum class PixelDepth : std::uint8_t { Bpp8 = 8, Bpp16 = 16, Bpp24 = 24 };

constexpr unsigned bits_per_pixel(PixelDepth d) { return static_cast<unsigned>(d); }
constexpr unsigned bytes_per_pixel(PixelDepth d) { return bits_per_pixel(d) / 8u; }

/// How many pixels fit in one 32-bit bus word: 4 at 8 bpp, 2 at 16 bpp, 1 at 24 bpp.
constexpr unsigned pixels_per_word(PixelDepth d) {
    switch (d) {
        case PixelDepth::Bpp8: return 4;
        case PixelDepth::Bpp16: return 2;
        case PixelDepth::Bpp24: return 1;
    }
    return 0;
}

constexpr std::uint32_t pixel_value_mask(PixelDepth d) {
    return (1u << bits_per_pixel(d)) - 1u;
}

inline PixelDepth depth_from_bits(unsigned bits) {
    switch (bits) {
        case 8: return PixelDepth::Bpp8;
        case 16: return PixelDepth::Bpp16;
        case 24: return PixelDepth::Bpp24;
        default: throw ConfigError("unsupported pixel depth: " + std::to_string(bits) + " bpp");
    }
}

/// A rectangular raster of unsigned pixel values with a declared bit depth.
/// Pixels are stored row-major; every value must be < 2^bpp.
struct Frame {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    PixelDepth depth = PixelDepth::Bpp8;
    std::vector<std::uint32_t> pixels;

    Frame() = default;
    Frame(std::uint32_t w, std::uint32_t h, PixelDepth d)
        : width(w), height(h), depth(d), pixels(static_cast<std::size_t>(w) * h, 0) {}

    static Frame filled(std::uint32_t w, std::uint32_t h, PixelDepth d, std::uint32_t value) {
        Frame f(w, h, d);
        for (auto& p : f.pixels) p = value;
        return f;
    }

    std::size_t pixel_count() const { return pixels.size(); }

    std::uint32_t& at(std::uint32_t x, std::uint32_t y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint32_t at(std::uint32_t x, std::uint32_t y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }

    std::span<const std::uint32_t> row(std::uint32_t y) const {
        return {pixels.data() + static_cast<std::size_t>(y) * width, width};
    }

    /// Throws GeometryError if any invariant is violated.
    void validate() const {
        if (width == 0 || height == 0)
            throw GeometryError("frame dimensions must be at least 1x1");
        if (pixels.size() != static_cast<std::size_t>(width) * height)
            throw GeometryError("pixel buffer size does not match width x height");
        const std::uint32_t mask = pixel_value_mask(depth);
        for (std::uint32_t p : pixels)
            if (p > mask)
                throw GeometryError("pixel value exceeds declared bit depth");
    }

    bool operator==(const Frame&) const = default;
};

/// Canonical byte serialization: row-major pixel order, each pixel
/// little-endian in bytes_per_pixel bytes. This layout is the normative
/// on-disk and on-wire format (see docs/protocol.md) and is the byte
/// sequence the frame CRC is computed over.
inline std::vector<std::uint8_t> frame_to_bytes(const Frame& frame) {
    frame.validate();
    const unsigned bpp = bytes_per_pixel(frame.depth);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(frame.pixels.size() * bpp);
    for (std::uint32_t p : frame.pixels)
        for (unsigned b = 0; b < bpp; ++b)
            bytes.push_back(static_cast<std::uint8_t>((p >> (8 * b)) & 0xFFu));
    return bytes;
}

/// Tri-plane image with 16 bits per channel; the CNN benchmark's input.
/// Over the bus it travels as three consecutive 16 bpp frames (R, G, B).
struct RgbImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint16_t> r, g, b;

    RgbImage() = default;
    RgbImage(std::uint32_t w, std::uint32_t h)
        : width(w), height(h),
          r(static_cast<std::size_t>(w) * h, 0),
          g(static_cast<std::size_t>(w) * h, 0),
          b(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    void validate() const {
        if (width == 0 || height == 0)
            throw GeometryError("image dimensions must be at least 1x1");
        const std::size_t n = pixel_count();
        if (r.size() != n || g.size() != n || b.size() != n)
            throw GeometryError("channel buffer size does not match width x height");
    }

    /// Splits into three 16 bpp frames in R, G, B order.
    std::vector<Frame> to_planes() const {
        validate();
        std::vector<Frame> planes;
        for (const auto* ch : {&r, &g, &b}) {
            Frame f(width, height, PixelDepth::Bpp16);
            for (std::size_t i = 0; i < ch->size(); ++i) f.pixels[i] = (*ch)[i];
            planes.push_back(std::move(f));
        }
        return planes;
    }

    static RgbImage from_planes(const Frame& r_plane, const Frame& g_plane, const Frame& b_plane) {
        for (const Frame* f : {&r_plane, &g_plane, &b_plane}) {
            f->validate();
            if (f->depth != PixelDepth::Bpp16)
                throw GeometryError("RGB planes must be 16 bpp");
            if (f->width != r_plane.width || f->height != r_plane.height)
                throw GeometryError("RGB planes must share geometry");
        }
        RgbImage img(r_plane.width, r_plane.height);
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
            img.r[i] = static_cast<std::uint16_t>(r_plane.pixels[i]);
            img.g[i] = static_cast<std::uint16_t>(g_plane.pixels[i]);
            img.b[i] = static_cast<std::uint16_t>(b_plane.pixels[i]);
        }
        return img;
    }

    bool operator==(const RgbImage&) const = default;
};

}  // namespace coprosim
