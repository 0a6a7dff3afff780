#pragma once

#include <bit>
#include <cstdint>

namespace coprosim {

/// IEEE 754 binary16 value stored in a uint16_t. The VPU holds CNN weights
/// and activations in this format; arithmetic widens to float and narrows
/// back with round-to-nearest-even.
class Half {
public:
    Half() = default;

    static Half from_bits(std::uint16_t b) {
        Half h;
        h.bits_ = b;
        return h;
    }

    static Half from_float(float f) {
        const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
        const std::uint32_t sign = (u >> 16) & 0x8000u;
        const std::uint32_t exp = (u >> 23) & 0xFFu;
        std::uint32_t mant = u & 0x7FFFFFu;

        if (exp == 0xFFu)  // inf or nan
            return from_bits(static_cast<std::uint16_t>(sign | 0x7C00u | (mant ? 0x200u : 0u)));

        const int e = static_cast<int>(exp) - 127 + 15;
        if (e >= 0x1F)  // overflow
            return from_bits(static_cast<std::uint16_t>(sign | 0x7C00u));

        if (e <= 0) {  // subnormal or zero
            if (e < -10) return from_bits(static_cast<std::uint16_t>(sign));
            mant |= 0x800000u;
            const unsigned shift = static_cast<unsigned>(14 - e);
            std::uint32_t result = mant >> shift;
            const std::uint32_t rem = mant & ((1u << shift) - 1u);
            const std::uint32_t halfway = 1u << (shift - 1);
            if (rem > halfway || (rem == halfway && (result & 1u))) ++result;
            return from_bits(static_cast<std::uint16_t>(sign | result));
        }

        // normal: round 23-bit mantissa to 10 bits; a rounding carry into the
        // exponent field is correct, including the overflow-to-inf case
        std::uint32_t result = (static_cast<std::uint32_t>(e) << 10) | (mant >> 13);
        const std::uint32_t rem = mant & 0x1FFFu;
        if (rem > 0x1000u || (rem == 0x1000u && (result & 1u))) ++result;
        return from_bits(static_cast<std::uint16_t>(sign | result));
    }

    float to_float() const {
        const std::uint32_t sign = static_cast<std::uint32_t>(bits_ & 0x8000u) << 16;
        const std::uint32_t exp = (bits_ >> 10) & 0x1Fu;
        const std::uint32_t mant = bits_ & 0x3FFu;
        std::uint32_t u;
        if (exp == 0) {
            if (mant == 0) {
                u = sign;
            } else {  // subnormal: renormalize
                std::uint32_t m = mant;
                std::uint32_t shifts = 0;
                while (!(m & 0x400u)) {
                    m <<= 1;
                    ++shifts;
                }
                u = sign | ((113u - shifts) << 23) | ((m & 0x3FFu) << 13);
            }
        } else if (exp == 0x1Fu) {
            u = sign | 0x7F800000u | (mant << 13);
        } else {
            u = sign | ((exp + 112u) << 23) | (mant << 13);
        }
        return std::bit_cast<float>(u);
    }

    std::uint16_t bits() const { return bits_; }

    friend bool operator==(Half a, Half b) { return a.bits_ == b.bits_; }

private:
    std::uint16_t bits_ = 0;
};

}  // namespace coprosim
