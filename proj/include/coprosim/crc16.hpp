#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace coprosim {

// CRC-16/XMODEM: polynomial 0x1021, initial value 0x0000, no input or
// output reflection, no final XOR. Check value: crc16("123456789") == 0x31C3.

namespace detail {

constexpr std::array<std::uint16_t, 256> make_crc16_table() {
    std::array<std::uint16_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        std::uint16_t crc = static_cast<std::uint16_t>(i << 8);
        for (int bit = 0; bit < 8; ++bit) {
            crc = (crc & 0x8000u) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021u)
                                  : static_cast<std::uint16_t>(crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

inline constexpr auto crc16_table = make_crc16_table();

}  // namespace detail

inline std::uint16_t crc16_xmodem(std::span<const std::uint8_t> data, std::uint16_t crc = 0) {
    for (std::uint8_t byte : data) {
        crc = static_cast<std::uint16_t>((crc << 8) ^
                                         detail::crc16_table[((crc >> 8) ^ byte) & 0xFFu]);
    }
    return crc;
}

}  // namespace coprosim
