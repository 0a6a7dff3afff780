#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"

namespace coprosim {

// Binary PGM (P5) and PPM (P6) image I/O. 8 bpp frames map to maxval-255
// PGM, 16 bpp to maxval-65535 PGM (big-endian samples, per the format), and
// 24 bpp to maxval-255 PPM. RgbImage uses maxval-65535 PPM.

namespace detail {

inline int next_pnm_value(std::istream& in, const std::string& path) {
    // skips whitespace and '#' comments
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw IoError("malformed PNM header: " + path);
    return value;
}

struct PnmHeader {
    std::string magic;
    std::uint32_t width = 0, height = 0;
    std::uint32_t maxval = 0;
};

inline PnmHeader read_pnm_header(std::istream& in, const std::string& path) {
    PnmHeader h;
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw IoError("not a binary PGM/PPM file: " + path);
    h.magic = {m0, m1};
    h.width = static_cast<std::uint32_t>(next_pnm_value(in, path));
    h.height = static_cast<std::uint32_t>(next_pnm_value(in, path));
    h.maxval = static_cast<std::uint32_t>(next_pnm_value(in, path));
    in.get();  // single whitespace before raster
    if (!in || h.width == 0 || h.height == 0 || h.maxval == 0 || h.maxval > 65535)
        throw IoError("malformed PNM header: " + path);
    return h;
}

}  // namespace detail

inline void write_pgm(const std::filesystem::path& path, const Frame& frame) {
    frame.validate();
    if (frame.depth == PixelDepth::Bpp24)
        throw IoError("24 bpp frames are written as PPM, not PGM");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const bool wide = frame.depth == PixelDepth::Bpp16;
    out << "P5\n" << frame.width << ' ' << frame.height << '\n' << (wide ? 65535 : 255) << '\n';
    for (std::uint32_t p : frame.pixels) {
        if (wide) out.put(static_cast<char>((p >> 8) & 0xFF));
        out.put(static_cast<char>(p & 0xFF));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline void write_ppm(const std::filesystem::path& path, const Frame& frame) {
    frame.validate();
    if (frame.depth != PixelDepth::Bpp24) throw IoError("PPM output expects a 24 bpp frame");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P6\n" << frame.width << ' ' << frame.height << '\n' << 255 << '\n';
    for (std::uint32_t p : frame.pixels) {
        out.put(static_cast<char>(p & 0xFF));          // R in the low byte
        out.put(static_cast<char>((p >> 8) & 0xFF));   // G
        out.put(static_cast<char>((p >> 16) & 0xFF));  // B
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline void write_ppm16(const std::filesystem::path& path, const RgbImage& image) {
    image.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P6\n" << image.width << ' ' << image.height << '\n' << 65535 << '\n';
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        for (std::uint16_t v : {image.r[i], image.g[i], image.b[i]}) {
            out.put(static_cast<char>((v >> 8) & 0xFF));
            out.put(static_cast<char>(v & 0xFF));
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

/// Reads a binary PGM as an 8 or 16 bpp frame (by maxval) or a maxval-255
/// PPM as a 24 bpp frame.
inline Frame read_frame(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    const auto h = detail::read_pnm_header(in, path.string());
    const bool color = h.magic == "P6";
    const bool wide = h.maxval > 255;
    if (color && wide)
        throw IoError("16-bit PPM loads as RgbImage, not Frame: " + path.string());
    Frame frame(h.width, h.height, color ? PixelDepth::Bpp24
                                         : (wide ? PixelDepth::Bpp16 : PixelDepth::Bpp8));
    const unsigned samples = color ? 3 : 1;
    for (auto& p : frame.pixels) {
        std::uint32_t value = 0;
        for (unsigned s = 0; s < samples; ++s) {
            int b0 = in.get();
            if (b0 == EOF) throw IoError("truncated raster: " + path.string());
            std::uint32_t sample = static_cast<std::uint32_t>(b0);
            if (wide) {
                int b1 = in.get();
                if (b1 == EOF) throw IoError("truncated raster: " + path.string());
                sample = (sample << 8) | static_cast<std::uint32_t>(b1);
            }
            value |= sample << (8 * s);  // PPM samples land R low, B high
        }
        p = value;
    }
    return frame;
}

inline RgbImage read_ppm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    const auto h = detail::read_pnm_header(in, path.string());
    if (h.magic != "P6" || h.maxval != 65535)
        throw IoError("expected a 16-bit PPM: " + path.string());
    RgbImage image(h.width, h.height);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        for (auto* ch : {&image.r, &image.g, &image.b}) {
            const int b0 = in.get();
            const int b1 = in.get();
            if (b0 == EOF || b1 == EOF) throw IoError("truncated raster: " + path.string());
            (*ch)[i] = static_cast<std::uint16_t>((b0 << 8) | b1);
        }
    }
    return image;
}

}  // namespace coprosim
