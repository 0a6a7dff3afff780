// Sweeps the compute time for a fixed I/O configuration and prints where
// the masked mode starts to beat the unmasked mode.

#include <cstdio>

#include "coprosim/pipeline.hpp"

int main() {
    using namespace coprosim;

    // 1 MPixel in and out at 50 MHz with the default 42 ms/MPixel staging.
    const Micros transfer = ms_to_us(20.97);
    const Micros staging = ms_to_us(42.0);

    std::printf("%8s %14s %12s %14s %12s\n", "vpu_ms", "unmasked_ms", "unmasked_fps",
                "masked_ms", "masked_fps");
    for (double vpu_ms : {1.0, 8.0, 29.0, 114.0, 164.0, 300.0, 658.0}) {
        ComponentTimes t{transfer, ms_to_us(vpu_ms), transfer, staging, staging};
        const Metrics u = unmasked_metrics(t);
        const Metrics m = masked_metrics(t);
        std::printf("%8.1f %14.1f %12.2f %14.1f %12.2f%s\n", vpu_ms, us_to_ms(u.latency_us),
                    u.throughput_fps, us_to_ms(m.latency_us), m.throughput_fps,
                    m.throughput_fps > u.throughput_fps ? "  <- masking pays off" : "");
    }
    return 0;
}
