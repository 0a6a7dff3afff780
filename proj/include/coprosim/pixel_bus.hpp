#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"
#include "coprosim/frame_codec.hpp"

namespace coprosim {

// Clock-accurate model of the CIF/LCD parallel pixel buses. A frame travels
// as an ordered stream of cycle-indexed events: one VSYNC_START, one
// HSYNC_START per line (sharing the cycle of that line's first pixel), one
// pixel per cycle during active lines, and a FRAME_END marker on the cycle
// after the last pixel. Blanking intervals are zero cycles, which matches
// the reference arithmetic: a 1024x1024 frame at 50 MHz takes 21.0 ms.

struct BusConfig {
    double frequency_hz = 50e6;
    PixelDepth depth = PixelDepth::Bpp8;
    std::uint32_t width = 0;   // pixels per line
    std::uint32_t height = 0;  // lines transmitted, trailer included when framed

    void validate() const {
        if (frequency_hz <= 0) throw ConfigError("bus frequency must be positive");
        if (width == 0 || height == 0) throw ConfigError("bus geometry must be at least 1x1");
    }
};

enum class BusEventKind : std::uint8_t { VsyncStart, HsyncStart, Pixel, FrameEnd };

inline const char* to_string(BusEventKind k) {
    switch (k) {
        case BusEventKind::VsyncStart: return "VSYNC_START";
        case BusEventKind::HsyncStart: return "HSYNC_START";
        case BusEventKind::Pixel: return "PIXEL";
        case BusEventKind::FrameEnd: return "FRAME_END";
    }
    return "?";
}

struct BusEvent {
    std::uint64_t cycle = 0;
    BusEventKind kind = BusEventKind::Pixel;
    std::uint32_t value = 0;  // pixel value; 0 for sync events

    bool operator==(const BusEvent&) const = default;
};

struct BusEventStream {
    std::vector<BusEvent> events;

    std::uint64_t final_cycle() const { return events.empty() ? 0 : events.back().cycle; }
    std::size_t pixel_events() const {
        return static_cast<std::size_t>(
            std::count_if(events.begin(), events.end(),
                          [](const BusEvent& e) { return e.kind == BusEventKind::Pixel; }));
    }

    bool operator==(const BusEventStream&) const = default;
};

/// Time to clock pixel_count pixels through the bus at one pixel per cycle.
inline double transfer_time_s(std::uint64_t pixel_count, double frequency_hz) {
    if (frequency_hz <= 0) throw ConfigError("bus frequency must be positive");
    return static_cast<double>(pixel_count) / frequency_hz;
}

/// CIF-Tx role: emits the framed payload as a bus event stream.
inline BusEventStream serialize_frame(const FramedPayload& payload, const BusConfig& config) {
    config.validate();
    payload.body.validate();
    if (payload.trailer.size() != payload.body.width)
        throw GeometryError("trailer line width does not match body");
    if (payload.body.width != config.width || payload.total_lines() != config.height ||
        payload.body.depth != config.depth)
        throw ConfigError("payload geometry does not match bus configuration");

    const std::uint32_t lines = config.height;
    BusEventStream stream;
    stream.events.reserve(static_cast<std::size_t>(config.width) * lines + lines + 2);
    std::uint64_t cycle = 0;
    stream.events.push_back({0, BusEventKind::VsyncStart, 0});
    for (std::uint32_t line = 0; line < lines; ++line) {
        stream.events.push_back({cycle, BusEventKind::HsyncStart, 0});
        const std::uint32_t* src = line < payload.body.height
                                       ? payload.body.pixels.data() +
                                             static_cast<std::size_t>(line) * config.width
                                       : payload.trailer.data();
        for (std::uint32_t x = 0; x < config.width; ++x)
            stream.events.push_back({cycle++, BusEventKind::Pixel, src[x]});
    }
    stream.events.push_back({cycle, BusEventKind::FrameEnd, 0});
    return stream;
}

/// LCD-Rx role: reconstructs the framed payload from a bus event stream.
/// Throws FramingError naming the first bad cycle on any sync violation.
inline FramedPayload deserialize_frame(const BusEventStream& stream, const BusConfig& config) {
    config.validate();
    if (config.height < 2) throw ConfigError("framed transfers need at least 2 lines");
    const auto& ev = stream.events;
    if (ev.empty()) throw FramingError("empty event stream", 0);

    std::size_t i = 0;
    if (ev[i].kind != BusEventKind::VsyncStart || ev[i].cycle != 0)
        throw FramingError("expected VSYNC_START at stream head", ev[i].cycle);
    ++i;

    const std::uint32_t mask = pixel_value_mask(config.depth);
    std::vector<std::uint32_t> lines;
    lines.reserve(static_cast<std::size_t>(config.width) * config.height);
    std::uint64_t cycle = 0;
    for (std::uint32_t line = 0; line < config.height; ++line) {
        if (i >= ev.size() || ev[i].kind != BusEventKind::HsyncStart)
            throw FramingError("missing HSYNC_START for line " + std::to_string(line),
                               i < ev.size() ? ev[i].cycle : cycle);
        if (ev[i].cycle != cycle)
            throw FramingError("HSYNC_START off its expected cycle", ev[i].cycle);
        ++i;
        for (std::uint32_t x = 0; x < config.width; ++x, ++cycle, ++i) {
            if (i >= ev.size() || ev[i].kind != BusEventKind::Pixel)
                throw FramingError("missing pixel event", i < ev.size() ? ev[i].cycle : cycle);
            if (ev[i].cycle != cycle)
                throw FramingError("pixel event off its expected cycle", ev[i].cycle);
            if (ev[i].value > mask)
                throw FramingError("pixel value exceeds bus width", ev[i].cycle);
            lines.push_back(ev[i].value);
        }
    }
    if (i >= ev.size() || ev[i].kind != BusEventKind::FrameEnd)
        throw FramingError("missing FRAME_END", i < ev.size() ? ev[i].cycle : cycle);
    if (ev[i].cycle != cycle)
        throw FramingError("FRAME_END off its expected cycle", ev[i].cycle);
    if (++i != ev.size())
        throw FramingError("trailing events after FRAME_END", ev[i].cycle);

    FramedPayload payload;
    payload.body.width = config.width;
    payload.body.height = config.height - 1;
    payload.body.depth = config.depth;
    payload.body.pixels.assign(lines.begin(),
                               lines.begin() + static_cast<std::size_t>(config.width) *
                                                   payload.body.height);
    payload.trailer.assign(lines.end() - config.width, lines.end());
    return payload;
}

/// Test-harness hook: flips single pixel bits in place on the wire.
struct BitFlip {
    std::uint64_t cycle = 0;
    unsigned bit = 0;
};

inline BusEventStream inject_errors(BusEventStream stream, std::span<const BitFlip> flips,
                                    PixelDepth depth) {
    for (const BitFlip& flip : flips) {
        if (flip.bit >= bits_per_pixel(depth))
            throw ConfigError("bit index " + std::to_string(flip.bit) +
                              " out of range for pixel depth");
        auto it = std::find_if(stream.events.begin(), stream.events.end(),
                               [&](const BusEvent& e) {
                                   return e.kind == BusEventKind::Pixel && e.cycle == flip.cycle;
                               });
        if (it == stream.events.end())
            throw ConfigError("no pixel event at cycle " + std::to_string(flip.cycle));
        it->value ^= 1u << flip.bit;
    }
    return stream;
}

/// Debug export, one `cycle,kind,value` row per event.
inline void write_event_csv(std::ostream& os, const BusEventStream& stream) {
    os << "cycle,kind,value\n";
    for (const BusEvent& e : stream.events)
        os << e.cycle << ',' << to_string(e.kind) << ',' << e.value << '\n';
}

}  // namespace coprosim
