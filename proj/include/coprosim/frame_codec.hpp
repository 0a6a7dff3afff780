#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coprosim/crc16.hpp"
#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"

namespace coprosim {

// Bit-exact conversion between frames, 32-bit bus words, and CRC-framed
// transmission payloads. Mirrors the CIF/LCD FSM word packing and the CRC
// trailer the FPGA appends to each transmitted frame.
//
// Wire contract (see docs/protocol.md):
//   * word packing is little-endian, lowest-index pixel in the lowest byte;
//     24 bpp uses one pixel per word with the top byte zero;
//   * multi-byte pixels serialize little-endian;
//   * the CRC trailer is one extra line whose first two serialized bytes
//     carry CRC-16/XMODEM of the body bytes, big-endian; the rest are zero.

/// A frame packed into 32-bit bus words.
struct WordStream {
    std::vector<std::uint32_t> words;
    PixelDepth depth = PixelDepth::Bpp8;
    std::size_t pixel_count = 0;
};

inline WordStream pixels_to_words(const Frame& frame) {
    frame.validate();
    const unsigned ppw = pixels_per_word(frame.depth);
    const unsigned slot_bits = 32u / ppw;
    WordStream out;
    out.depth = frame.depth;
    out.pixel_count = frame.pixel_count();
    out.words.assign((out.pixel_count + ppw - 1) / ppw, 0);
    for (std::size_t i = 0; i < frame.pixels.size(); ++i)
        out.words[i / ppw] |= frame.pixels[i] << (slot_bits * (i % ppw));
    return out;
}

/// Inverse of pixels_to_words. Throws ConfigError when the stream length is
/// inconsistent with the expected pixel count.
inline std::vector<std::uint32_t> words_to_pixels(const WordStream& stream,
                                                  std::size_t expected_pixels) {
    const unsigned ppw = pixels_per_word(stream.depth);
    const unsigned slot_bits = 32u / ppw;
    const std::uint32_t mask = pixel_value_mask(stream.depth);
    const std::size_t expected_words = (expected_pixels + ppw - 1) / ppw;
    if (stream.words.size() != expected_words)
        throw ConfigError("malformed word stream: have " + std::to_string(stream.words.size()) +
                          " words, expected " + std::to_string(expected_words));
    std::vector<std::uint32_t> pixels(expected_pixels);
    for (std::size_t i = 0; i < expected_pixels; ++i)
        pixels[i] = (stream.words[i / ppw] >> (slot_bits * (i % ppw))) & mask;
    return pixels;
}

namespace detail {

inline std::vector<std::uint8_t> line_to_bytes(std::span<const std::uint32_t> line,
                                               PixelDepth depth) {
    const unsigned bpp = bytes_per_pixel(depth);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(line.size() * bpp);
    for (std::uint32_t p : line)
        for (unsigned b = 0; b < bpp; ++b)
            bytes.push_back(static_cast<std::uint8_t>((p >> (8 * b)) & 0xFFu));
    return bytes;
}

inline std::vector<std::uint32_t> bytes_to_line(std::span<const std::uint8_t> bytes,
                                                PixelDepth depth) {
    const unsigned bpp = bytes_per_pixel(depth);
    std::vector<std::uint32_t> line(bytes.size() / bpp, 0);
    for (std::size_t i = 0; i < line.size(); ++i)
        for (unsigned b = 0; b < bpp; ++b)
            line[i] |= static_cast<std::uint32_t>(bytes[i * bpp + b]) << (8 * b);
    return line;
}

}  // namespace detail

/// A frame plus the one-line CRC trailer, as it travels over the bus.
struct FramedPayload {
    Frame body;
    std::vector<std::uint32_t> trailer;  // one line of body.width pixel values

    std::uint32_t total_lines() const { return body.height + 1; }

    bool operator==(const FramedPayload&) const = default;
};

/// CRC carried in the trailer's first two serialized bytes (big-endian).
inline std::uint16_t trailer_crc(const FramedPayload& payload) {
    const auto bytes = detail::line_to_bytes(payload.trailer, payload.body.depth);
    if (bytes.size() < 2)
        throw GeometryError("trailer line too short to carry a 16-bit CRC");
    return static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
}

/// Appends the CRC trailer line: CRC-16/XMODEM of the body's byte
/// serialization, big-endian in the first two trailer bytes, rest zero.
/// Throws GeometryError for frames whose trailer line cannot hold two bytes
/// (only possible for 8 bpp frames of width 1).
inline FramedPayload append_crc_trailer(const Frame& frame) {
    frame.validate();
    const unsigned line_bytes = frame.width * bytes_per_pixel(frame.depth);
    if (line_bytes < 2)
        throw GeometryError("frame line too narrow to carry the CRC trailer");
    const std::uint16_t crc = crc16_xmodem(frame_to_bytes(frame));
    std::vector<std::uint8_t> bytes(line_bytes, 0);
    bytes[0] = static_cast<std::uint8_t>(crc >> 8);
    bytes[1] = static_cast<std::uint8_t>(crc & 0xFFu);
    return FramedPayload{frame, detail::bytes_to_line(bytes, frame.depth)};
}

struct VerifiedFrame {
    Frame frame;
    bool crc_ok = false;
};

/// Recomputes the CRC over the body and compares with the trailer. The body
/// is returned regardless of the outcome; acting on a bad CRC is the
/// caller's policy. Nonzero trailer padding also clears crc_ok, so any
/// single-bit corruption of the payload is reported.
inline VerifiedFrame verify_and_strip(const FramedPayload& payload) {
    if (payload.trailer.size() != payload.body.width)
        throw GeometryError("trailer line width does not match body");
    if (payload.total_lines() < 2)
        throw GeometryError("payload must have at least 2 lines");
    const std::uint16_t computed = crc16_xmodem(frame_to_bytes(payload.body));
    const auto trailer_bytes = detail::line_to_bytes(payload.trailer, payload.body.depth);
    if (trailer_bytes.size() < 2)
        throw GeometryError("trailer line too short to carry a 16-bit CRC");
    const std::uint16_t stored =
        static_cast<std::uint16_t>((trailer_bytes[0] << 8) | trailer_bytes[1]);
    bool padding_clear = true;
    for (std::size_t i = 2; i < trailer_bytes.size(); ++i)
        if (trailer_bytes[i] != 0) padding_clear = false;
    return VerifiedFrame{payload.body, computed == stored && padding_clear};
}

}  // namespace coprosim
