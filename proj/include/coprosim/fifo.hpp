#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>

#include "coprosim/errors.hpp"

namespace coprosim {

/// Default FIFO sizing: two full lines, the minimum that smooths a clock
/// rate mismatch across the domain crossing. Configurable per instance.
constexpr std::size_t line_pair_capacity(std::uint32_t line_width) {
    return 2u * static_cast<std::size_t>(line_width);
}

/// Bounded FIFO bridging two clock domains, as used for the pixel and image
/// buffers on both bus directions. Push on full is rejected and counted,
/// never silently dropped; pop on empty signals emptiness and is counted.
class DualClockFifo {
public:
    DualClockFifo(std::size_t capacity, double write_clock_hz, double read_clock_hz)
        : capacity_(capacity), write_clock_hz_(write_clock_hz), read_clock_hz_(read_clock_hz) {
        if (capacity == 0) throw ConfigError("FIFO capacity must be positive");
        if (write_clock_hz <= 0 || read_clock_hz <= 0)
            throw ConfigError("FIFO clocks must be positive");
    }

    bool push(std::uint32_t item) {
        ++push_attempts_;
        if (items_.size() >= capacity_) {
            ++overflows_;
            return false;
        }
        items_.push_back(item);
        peak_occupancy_ = std::max(peak_occupancy_, items_.size());
        return true;
    }

    std::optional<std::uint32_t> pop() {
        if (items_.empty()) {
            ++underflows_;
            return std::nullopt;
        }
        const std::uint32_t item = items_.front();
        items_.pop_front();
        ++popped_;
        return item;
    }

    bool full() const { return items_.size() >= capacity_; }
    bool empty() const { return items_.empty(); }
    std::size_t occupancy() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t peak_occupancy() const { return peak_occupancy_; }

    std::uint64_t push_attempts() const { return push_attempts_; }
    std::uint64_t popped() const { return popped_; }
    std::uint64_t overflows() const { return overflows_; }
    std::uint64_t underflows() const { return underflows_; }

    double write_clock_hz() const { return write_clock_hz_; }
    double read_clock_hz() const { return read_clock_hz_; }

private:
    std::size_t capacity_;
    double write_clock_hz_;
    double read_clock_hz_;
    std::deque<std::uint32_t> items_;
    std::size_t peak_occupancy_ = 0;
    std::uint64_t push_attempts_ = 0;
    std::uint64_t popped_ = 0;
    std::uint64_t overflows_ = 0;
    std::uint64_t underflows_ = 0;
};

struct FifoRateReport {
    std::uint64_t delivered = 0;
    std::uint64_t overflows = 0;
    std::uint64_t producer_stall_cycles = 0;
    std::size_t peak_occupancy = 0;
    std::uint64_t duration_ps = 0;
};

/// Discrete-event simulation of one frame's worth of items crossing the
/// FIFO, each side advancing on its own clock grid in picoseconds. With
/// `producer_stalls_when_full` the producer honors the full flag the way the
/// FPGA-side FSM does and retries next write cycle; otherwise it pushes
/// blindly and overflowed items are lost (receiver-side behavior when the
/// drain is too slow). Ties between clock edges drain before filling.
/// Deterministic: identical inputs yield identical reports.
inline FifoRateReport run_rate_simulation(DualClockFifo& fifo, std::uint64_t item_count,
                                          bool producer_stalls_when_full) {
    const std::uint64_t write_period_ps =
        static_cast<std::uint64_t>(std::llround(1e12 / fifo.write_clock_hz()));
    const std::uint64_t read_period_ps =
        static_cast<std::uint64_t>(std::llround(1e12 / fifo.read_clock_hz()));

    FifoRateReport report;
    std::uint64_t produced = 0;
    std::uint64_t next_write = write_period_ps;
    std::uint64_t next_read = read_period_ps;
    std::uint64_t now = 0;

    while (produced < item_count || !fifo.empty()) {
        const bool producing = produced < item_count;
        if (!producing || next_read <= next_write) {
            now = next_read;
            if (!fifo.empty() && fifo.pop()) ++report.delivered;
            next_read += read_period_ps;
        } else {
            now = next_write;
            if (fifo.full() && producer_stalls_when_full) {
                ++report.producer_stall_cycles;
            } else {
                if (fifo.push(static_cast<std::uint32_t>(produced & 0xFFFFFFFFu)))
                    ++produced;
                else
                    ++produced;  // item lost on the wire
            }
            next_write += write_period_ps;
        }
    }
    report.overflows = fifo.overflows();
    report.peak_occupancy = fifo.peak_occupancy();
    report.duration_ps = now;
    return report;
}

}  // namespace coprosim
