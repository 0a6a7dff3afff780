#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coprosim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Frame/image dimensions or pixel values violate an invariant.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Bad parameter, unknown register, missing configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bus event stream is structurally invalid. Carries the first bad cycle.
class FramingError : public Error {
public:
    FramingError(const std::string& what, std::uint64_t cycle)
        : Error(what + " (cycle " + std::to_string(cycle) + ")"), cycle_(cycle) {}

    std::uint64_t cycle() const { return cycle_; }

private:
    std::uint64_t cycle_;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace coprosim
