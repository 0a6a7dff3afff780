#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coprosim/errors.hpp"

namespace coprosim {

// Horizontal band decomposition of an image across the 12 logical workers.
// STATIC hands out bands round-robin up front; DYNAMIC is a work queue where
// a worker pulls the next band when it finishes its previous one. Kernel
// output must be identical under either mode and any worker count.

enum class PartitionMode { Static, Dynamic };

inline constexpr std::uint32_t kDefaultWorkerCount = 12;

struct BandPartition {
    std::uint32_t image_height = 0;
    std::uint32_t n_workers = 0;
    PartitionMode mode = PartitionMode::Static;
    std::vector<std::uint32_t> band_begin;   // first line of each band
    std::vector<std::uint32_t> band_height;  // heights tile the image exactly
    // STATIC: worker -> band indices, fixed. DYNAMIC: filled by the
    // scheduler simulation; empty until then.
    std::vector<std::vector<std::uint32_t>> assignment;

    std::uint32_t n_bands() const { return static_cast<std::uint32_t>(band_height.size()); }
};

/// Splits `height` lines into `n_bands` near-equal bands (the first
/// height % n_bands bands get one extra line, so uneven heights such as the
/// 2048-line/36-band case still tile exactly).
inline BandPartition partition_bands(std::uint32_t height, std::uint32_t n_bands,
                                     std::uint32_t n_workers, PartitionMode mode) {
    if (n_bands == 0 || n_workers == 0)
        throw ConfigError("partition needs at least one band and one worker");
    if (n_bands > height)
        throw ConfigError("cannot split " + std::to_string(height) + " lines into " +
                          std::to_string(n_bands) + " bands");
    BandPartition p;
    p.image_height = height;
    p.n_workers = n_workers;
    p.mode = mode;
    const std::uint32_t base = height / n_bands;
    const std::uint32_t extra = height % n_bands;
    std::uint32_t line = 0;
    for (std::uint32_t b = 0; b < n_bands; ++b) {
        const std::uint32_t h = base + (b < extra ? 1 : 0);
        p.band_begin.push_back(line);
        p.band_height.push_back(h);
        line += h;
    }
    if (mode == PartitionMode::Static) {
        p.assignment.resize(n_workers);
        for (std::uint32_t b = 0; b < n_bands; ++b)
            p.assignment[b % n_workers].push_back(b);
    }
    return p;
}

struct ScheduleEvent {
    std::uint32_t band = 0;
    std::uint32_t worker = 0;
    double start = 0;
    double end = 0;
};

struct DynamicSchedule {
    std::vector<std::vector<std::uint32_t>> assignment;  // worker -> bands in pull order
    std::vector<ScheduleEvent> events;                   // in dispatch order
    double makespan = 0;
};

/// Simulates the dynamic work queue under a per-band cost model. Bands are
/// handed out in index order; the next free worker (lowest index on ties)
/// pulls the next band. Deterministic for identical inputs.
inline DynamicSchedule simulate_dynamic_schedule(const BandPartition& partition,
                                                 std::span<const double> band_costs) {
    if (band_costs.size() != partition.n_bands())
        throw ConfigError("cost model must cover every band");
    DynamicSchedule schedule;
    schedule.assignment.resize(partition.n_workers);
    std::vector<double> free_at(partition.n_workers, 0.0);
    for (std::uint32_t b = 0; b < partition.n_bands(); ++b) {
        std::uint32_t w = 0;
        for (std::uint32_t i = 1; i < partition.n_workers; ++i)
            if (free_at[i] < free_at[w]) w = i;
        const double start = free_at[w];
        const double end = start + band_costs[b];
        free_at[w] = end;
        schedule.assignment[w].push_back(b);
        schedule.events.push_back({b, w, start, end});
        schedule.makespan = std::max(schedule.makespan, end);
    }
    return schedule;
}

/// Band traversal order for executing a kernel: STATIC walks workers in
/// index order through their fixed bands; DYNAMIC uses a unit-cost pull
/// order. Output never depends on this order, only work accounting does.
inline std::vector<std::uint32_t> band_execution_order(const BandPartition& partition) {
    std::vector<std::uint32_t> order;
    order.reserve(partition.n_bands());
    if (partition.mode == PartitionMode::Static && !partition.assignment.empty()) {
        for (const auto& bands : partition.assignment)
            for (std::uint32_t b : bands) order.push_back(b);
    } else {
        std::vector<double> unit_costs(partition.n_bands(), 1.0);
        for (const auto& e : simulate_dynamic_schedule(partition, unit_costs).events)
            order.push_back(e.band);
    }
    return order;
}

}  // namespace coprosim
