#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "coprosim/crc16.hpp"
#include "oracles.hpp"

using oracles::crc16_bit_serial;

namespace {

std::vector<std::uint8_t> ascii(const char* s) {
    std::vector<std::uint8_t> v;
    while (*s) v.push_back(static_cast<std::uint8_t>(*s++));
    return v;
}

}  // namespace

TEST_CASE("standard check value") {
    const auto data = ascii("123456789");
    CHECK(crc16_bit_serial(data) == 0x31C3);
    CHECK(coprosim::crc16_xmodem(data) == 0x31C3);
}

TEST_CASE("empty input is the initial value") {
    CHECK(coprosim::crc16_xmodem({}) == 0x0000);
    CHECK(crc16_bit_serial({}) == 0x0000);
}

TEST_CASE("single zero byte") {
    const std::vector<std::uint8_t> zero{0x00};
    CHECK(crc16_bit_serial(zero) == 0x0000);  // zero state stays zero
    CHECK(coprosim::crc16_xmodem(zero) == crc16_bit_serial(zero));
}

TEST_CASE("table-driven implementation matches the bit-serial reference") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> len_dist(0, 257);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    for (int round = 0; round < 500; ++round) {
        std::vector<std::uint8_t> data(static_cast<std::size_t>(len_dist(rng)));
        for (auto& b : data) b = static_cast<std::uint8_t>(byte_dist(rng));
        REQUIRE(coprosim::crc16_xmodem(data) == crc16_bit_serial(data));
    }
}

TEST_CASE("seeded continuation composes") {
    const auto data = ascii("123456789");
    const std::span<const std::uint8_t> head(data.data(), 4);
    const std::span<const std::uint8_t> tail(data.data() + 4, 5);
    CHECK(coprosim::crc16_xmodem(tail, coprosim::crc16_xmodem(head)) == 0x31C3);
}
