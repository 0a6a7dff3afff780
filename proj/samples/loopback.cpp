// Minimal loopback: push a small frame out one bus direction, receive it on
// the other, and dump the endpoint registers.

#include <iostream>

#include "coprosim/registers.hpp"

int main() {
    using namespace coprosim;

    Frame frame(8, 8, PixelDepth::Bpp8);
    for (std::uint32_t y = 0; y < 8; ++y)
        for (std::uint32_t x = 0; x < 8; ++x) frame.at(x, y) = (x + 8 * y) & 0xFF;

    BusLink link(BusConfig{50e6, PixelDepth::Bpp8, 8, 9});
    const BusEventStream wire = link.transmit(frame);
    const VerifiedFrame received = link.receive(wire);

    std::cout << "loopback crc_ok: " << std::boolalpha << received.crc_ok << "\n"
              << "identical: " << (received.frame == frame) << "\n"
              << link.registers().dump().dump(2) << "\n";
    return received.crc_ok ? 0 : 1;
}
