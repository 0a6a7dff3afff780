#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coprosim/errors.hpp"

namespace coprosim {

// System-level timing engine. Per-frame stage durations feed two models:
// closed-form latency/throughput for the Unmasked (serial) and Masked
// (triple-buffered streaming) modes, and a discrete-event simulation of the
// same pipeline that must agree with the formulas. Event resolution is 1 us;
// sub-microsecond transfers round to 0.

using Micros = std::int64_t;

inline Micros ms_to_us(double ms) { return static_cast<Micros>(std::llround(ms * 1000.0)); }
inline double us_to_ms(Micros us) { return static_cast<double>(us) / 1000.0; }

enum class IoMode { Unmasked, Masked };

inline const char* to_string(IoMode m) { return m == IoMode::Unmasked ? "unmasked" : "masked"; }

/// Per-stage durations for one benchmark configuration. The buffer entries
/// are the DRAM staging copies the Masked mode adds on each side.
struct ComponentTimes {
    Micros cif = 0;         // input transfer, FPGA -> VPU
    Micros vpu = 0;         // compute
    Micros lcd = 0;         // output transfer, VPU -> FPGA
    Micros cif_buffer = 0;  // input staging copy
    Micros lcd_buffer = 0;  // output staging copy

    void validate() const {
        if (cif < 0 || vpu < 0 || lcd < 0 || cif_buffer < 0 || lcd_buffer < 0)
            throw ConfigError("component times must be non-negative");
    }
};

struct Metrics {
    Micros latency_us = 0;
    double throughput_fps = 0;
};

/// Unmasked mode: receive, process, transmit in series.
///   latency = cif + vpu + lcd, throughput = 1/latency.
inline Metrics unmasked_metrics(const ComponentTimes& t) {
    t.validate();
    const Micros latency = t.cif + t.vpu + t.lcd;
    if (latency <= 0) throw ConfigError("all-zero component times leave throughput undefined");
    return {latency, 1e6 / static_cast<double>(latency)};
}

/// Masked mode (triple-buffered streaming). With the serialized I/O chain
///   io = lcd_buffer + cif + cif_buffer + lcd
/// running in parallel with the compute process:
///   latency    = max{vpu - lcd_buffer, cif + cif_buffer + lcd}
///              + max{vpu, io} + io
///   throughput = 1 / max{vpu, io}
/// The first max's left operand floors at zero when lcd_buffer > vpu.
inline Metrics masked_metrics(const ComponentTimes& t) {
    t.validate();
    const Micros io_chain = t.lcd_buffer + t.cif + t.cif_buffer + t.lcd;
    const Micros period = std::max(t.vpu, io_chain);
    if (period <= 0) throw ConfigError("all-zero component times leave throughput undefined");
    const Micros first = std::max(std::max<Micros>(t.vpu - t.lcd_buffer, 0),
                                  t.cif + t.cif_buffer + t.lcd);
    return {first + period + io_chain, 1e6 / static_cast<double>(period)};
}

/// DRAM staging copy cost: pixel-count based, independent of bit depth.
/// One MPixel is 2^20 pixels (a 1024x1024 frame) and costs `ms_per_mpixel`.
struct BufferRate {
    double ms_per_mpixel = 42.0;

    void validate() const {
        if (ms_per_mpixel <= 0) throw ConfigError("buffer rate must be positive");
    }
};

inline Micros buffer_time(std::uint64_t pixel_count, const BufferRate& rate = {}) {
    rate.validate();
    return static_cast<Micros>(
        std::llround(static_cast<double>(pixel_count) / 1048576.0 * rate.ms_per_mpixel * 1000.0));
}

enum class Stage : std::uint8_t { CifIn, CifBuffer, Compute, LcdBuffer, LcdOut };

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::CifIn: return "cif_in";
        case Stage::CifBuffer: return "cif_buffer";
        case Stage::Compute: return "compute";
        case Stage::LcdBuffer: return "lcd_buffer";
        case Stage::LcdOut: return "lcd_out";
    }
    return "?";
}

struct StageInterval {
    std::uint32_t frame = 0;
    Stage stage = Stage::CifIn;
    Micros start = 0;
    Micros end = 0;
};

struct PipelineReport {
    IoMode mode = IoMode::Unmasked;
    Micros latency_us = 0;          // steady-state single-frame latency
    double throughput_fps = 0;      // 1 / steady-state period
    Micros steady_period_us = 0;    // inter-completion period once steady
    std::vector<StageInterval> timeline;
};

/// Discrete-event simulation of the streaming pipeline.
///
/// Unmasked: every frame runs receive -> compute -> transmit serially.
///
/// Masked: two processes run in parallel each frame cycle, rendezvousing at
/// cycle boundaries — the I/O process (buffer output n-1, receive and buffer
/// input n+1, transmit output n-1, in that order) and the compute process
/// (frame n). Input is assumed saturated (streaming), so the simulation
/// keeps two arrivals in flight beyond the reported frames; the reported
/// steady-state period and latency then match the closed-form metrics
/// exactly.
inline PipelineReport simulate_stream(const ComponentTimes& t, IoMode mode,
                                      std::uint32_t n_frames) {
    t.validate();
    if (n_frames < 3) throw ConfigError("steady-state measurement needs at least 3 frames");

    PipelineReport report;
    report.mode = mode;

    if (mode == IoMode::Unmasked) {
        const Metrics m = unmasked_metrics(t);
        Micros now = 0;
        std::vector<Micros> completions;
        for (std::uint32_t f = 0; f < n_frames; ++f) {
            report.timeline.push_back({f, Stage::CifIn, now, now + t.cif});
            now += t.cif;
            report.timeline.push_back({f, Stage::Compute, now, now + t.vpu});
            now += t.vpu;
            report.timeline.push_back({f, Stage::LcdOut, now, now + t.lcd});
            now += t.lcd;
            completions.push_back(now);
        }
        report.steady_period_us = completions[n_frames - 1] - completions[n_frames - 2];
        report.latency_us = m.latency_us;
        report.throughput_fps = 1e6 / static_cast<double>(report.steady_period_us);
        return report;
    }

    // Masked. Frame n is received in cycle n, computed in cycle n+1, and
    // buffered + transmitted in cycle n+2. Two extra arrivals keep the
    // final measured frames in full streaming cycles.
    const std::uint32_t total_frames = n_frames + 2;
    const std::uint32_t total_cycles = total_frames + 2;
    std::vector<Micros> cif_start(n_frames, 0), completion(n_frames, 0);
    Micros cycle_start = 0;
    auto record = [&](std::uint32_t frame, Stage stage, Micros start, Micros end) {
        if (frame < n_frames) report.timeline.push_back({frame, stage, start, end});
    };
    for (std::uint32_t c = 0; c < total_cycles; ++c) {
        Micros io_t = cycle_start;
        const bool has_output = c >= 2 && c - 2 < total_frames;   // frame c-2 leaves
        const bool has_input = c < total_frames;                  // frame c arrives
        const bool has_compute = c >= 1 && c - 1 < total_frames;  // frame c-1 computes
        if (has_output) {
            record(c - 2, Stage::LcdBuffer, io_t, io_t + t.lcd_buffer);
            io_t += t.lcd_buffer;
        }
        if (has_input) {
            if (c < n_frames) cif_start[c] = io_t;
            record(c, Stage::CifIn, io_t, io_t + t.cif);
            io_t += t.cif;
            record(c, Stage::CifBuffer, io_t, io_t + t.cif_buffer);
            io_t += t.cif_buffer;
        }
        if (has_output) {
            record(c - 2, Stage::LcdOut, io_t, io_t + t.lcd);
            io_t += t.lcd;
            if (c - 2 < n_frames) completion[c - 2] = io_t;
        }
        Micros compute_t = cycle_start;
        if (has_compute) {
            record(c - 1, Stage::Compute, compute_t, compute_t + t.vpu);
            compute_t += t.vpu;
        }
        cycle_start = std::max(io_t, compute_t);
    }
    report.steady_period_us = completion[n_frames - 1] - completion[n_frames - 2];
    report.latency_us = completion[n_frames - 1] - cif_start[n_frames - 1];
    if (report.steady_period_us <= 0)
        throw ConfigError("all-zero component times leave throughput undefined");
    report.throughput_fps = 1e6 / static_cast<double>(report.steady_period_us);
    return report;
}

/// Who vouches for a timing number.
enum class Provenance { Paper, MeasuredHost, Derived };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Paper: return "paper";
        case Provenance::MeasuredHost: return "measured-host";
        case Provenance::Derived: return "derived";
    }
    return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
    if (s == "paper") return Provenance::Paper;
    if (s == "measured-host") return Provenance::MeasuredHost;
    if (s == "derived") return Provenance::Derived;
    throw ConfigError("unknown provenance tag: " + s);
}

struct VpuTime {
    Micros value = 0;
    Provenance provenance = Provenance::Paper;
};

/// Pixel counts moved over the bus per frame, each direction.
struct BenchmarkIo {
    std::uint64_t input_pixels = 0;
    std::uint64_t output_pixels = 0;
};

/// Optional replacements for individual derived entries (e.g. the rendering
/// scenario pins its input-side buffer despite a 6-value input).
struct ComponentOverrides {
    std::optional<Micros> cif, lcd, cif_buffer, lcd_buffer;
};

/// Assembles ComponentTimes from first principles: transfer times from the
/// pixel counts and bus frequency, staging copies from the buffer rate. The
/// compute time cannot be derived on a desk machine and must be supplied.
inline ComponentTimes derive_component_times(const BenchmarkIo& io, double bus_frequency_hz,
                                             const BufferRate& rate,
                                             const std::optional<VpuTime>& vpu,
                                             const ComponentOverrides& overrides = {}) {
    if (bus_frequency_hz <= 0) throw ConfigError("bus frequency must be positive");
    rate.validate();
    if (!vpu) throw ConfigError("VPU processing time must be supplied (paper or measured)");
    auto transfer_us = [bus_frequency_hz](std::uint64_t pixels) {
        return static_cast<Micros>(
            std::llround(static_cast<double>(pixels) / bus_frequency_hz * 1e6));
    };
    ComponentTimes t;
    t.cif = overrides.cif.value_or(transfer_us(io.input_pixels));
    t.lcd = overrides.lcd.value_or(transfer_us(io.output_pixels));
    t.cif_buffer = overrides.cif_buffer.value_or(buffer_time(io.input_pixels, rate));
    t.lcd_buffer = overrides.lcd_buffer.value_or(buffer_time(io.output_pixels, rate));
    t.vpu = vpu->value;
    t.validate();
    return t;
}

}  // namespace coprosim
