#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "coprosim/errors.hpp"
#include "coprosim/frame_codec.hpp"
#include "coprosim/pixel_bus.hpp"

namespace coprosim {

// Control and status registers of one bus endpoint pair, mirroring the
// FPGA-side register block. Control writes are latched only at frame
// boundaries (the completion of a frame); status reflects the most recent
// completed frame.

struct ControlRegisters {
    std::uint32_t frame_width = 0;
    std::uint32_t frame_height = 0;  // lines on the wire, trailer included
    PixelDepth depth = PixelDepth::Bpp8;
};

struct StatusRegisters {
    std::uint16_t tx_crc = 0;
    std::uint16_t rx_crc = 0;
    bool crc_ok = false;
    std::uint64_t frames_transmitted = 0;
    std::uint64_t frames_received = 0;
};

class RegisterFile {
public:
    RegisterFile() = default;
    explicit RegisterFile(const ControlRegisters& initial)
        : active_(initial), pending_(initial) {}

    /// Named read over the full register set. Unknown name -> ConfigError.
    std::uint64_t read(std::string_view name) const {
        if (name == "frame_width") return active_.frame_width;
        if (name == "frame_height") return active_.frame_height;
        if (name == "bpp") return bits_per_pixel(active_.depth);
        if (name == "tx_crc") return status_.tx_crc;
        if (name == "rx_crc") return status_.rx_crc;
        if (name == "crc_ok") return status_.crc_ok ? 1 : 0;
        if (name == "frames_transmitted") return status_.frames_transmitted;
        if (name == "frames_received") return status_.frames_received;
        throw ConfigError("unknown register: " + std::string(name));
    }

    /// Named write; control registers only. The write lands in the pending
    /// bank and takes effect at the next frame boundary.
    void write(std::string_view name, std::uint64_t value) {
        if (name == "frame_width") {
            pending_.frame_width = static_cast<std::uint32_t>(value);
        } else if (name == "frame_height") {
            pending_.frame_height = static_cast<std::uint32_t>(value);
        } else if (name == "bpp") {
            pending_.depth = depth_from_bits(static_cast<unsigned>(value));
        } else if (name == "tx_crc" || name == "rx_crc" || name == "crc_ok" ||
                   name == "frames_transmitted" || name == "frames_received") {
            throw ConfigError("status register is read-only: " + std::string(name));
        } else {
            throw ConfigError("unknown register: " + std::string(name));
        }
    }

    /// Applies pending control writes. Called at every frame boundary; the
    /// system supervisor may also force it while the bus is idle.
    void latch_frame_boundary() { active_ = pending_; }

    const ControlRegisters& control() const { return active_; }
    const StatusRegisters& status() const { return status_; }

    void record_transmit(std::uint16_t crc) {
        status_.tx_crc = crc;
        ++status_.frames_transmitted;
    }

    void record_receive(std::uint16_t crc, bool crc_ok) {
        status_.rx_crc = crc;
        status_.crc_ok = crc_ok;
        ++status_.frames_received;
    }

    nlohmann::json dump() const {
        return {
            {"control",
             {{"frame_width", active_.frame_width},
              {"frame_height", active_.frame_height},
              {"bpp", bits_per_pixel(active_.depth)}}},
            {"pending_control",
             {{"frame_width", pending_.frame_width},
              {"frame_height", pending_.frame_height},
              {"bpp", bits_per_pixel(pending_.depth)}}},
            {"status",
             {{"tx_crc", status_.tx_crc},
              {"rx_crc", status_.rx_crc},
              {"crc_ok", status_.crc_ok},
              {"frames_transmitted", status_.frames_transmitted},
              {"frames_received", status_.frames_received}}},
        };
    }

private:
    ControlRegisters active_;
    ControlRegisters pending_;
    StatusRegisters status_;
};

/// One directional bus endpoint pair with its register block: frames go out
/// CRC-framed under the active control configuration, and incoming streams
/// are verified with the CRC result landing in the status registers.
class BusLink {
public:
    explicit BusLink(const BusConfig& initial) : frequency_hz_(initial.frequency_hz) {
        initial.validate();
        registers_ = RegisterFile(ControlRegisters{initial.width, initial.height, initial.depth});
    }

    RegisterFile& registers() { return registers_; }
    const RegisterFile& registers() const { return registers_; }

    BusConfig active_config() const {
        const auto& c = registers_.control();
        return BusConfig{frequency_hz_, c.depth, c.frame_width, c.frame_height};
    }

    /// Appends the CRC trailer and serializes under the active control
    /// configuration, then updates tx status and latches pending control.
    BusEventStream transmit(const Frame& frame) {
        const BusConfig config = active_config();
        if (frame.width != config.width || frame.height + 1 != config.height ||
            frame.depth != config.depth)
            throw ConfigError("frame geometry does not match active control registers");
        FramedPayload payload = append_crc_trailer(frame);
        BusEventStream stream = serialize_frame(payload, config);
        registers_.record_transmit(trailer_crc(payload));
        registers_.latch_frame_boundary();
        return stream;
    }

    /// Deserializes under the active control configuration, verifies the
    /// CRC, updates rx status, and latches pending control.
    VerifiedFrame receive(const BusEventStream& stream) {
        const BusConfig config = active_config();
        FramedPayload payload = deserialize_frame(stream, config);
        VerifiedFrame result = verify_and_strip(payload);
        registers_.record_receive(crc16_xmodem(frame_to_bytes(result.frame)), result.crc_ok);
        registers_.latch_frame_boundary();
        return result;
    }

private:
    double frequency_hz_;
    RegisterFile registers_;
};

}  // namespace coprosim
