#pragma once

#include <cmath>
#include <cstdint>

#include "gapfill/error.hpp"

namespace gapfill {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr std::uint32_t kCodePoints = 1u << 24;      // 256^3
inline constexpr double kCodeMax = 16777215.0;              // 256^3 - 1

/// Maps [0,1] onto the 2^24 RGB code points. Bijective with decode_rgb on code points.
inline Rgb encode_value(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("encode_value input must lie in [0,1]");
    const auto n = static_cast<std::uint32_t>(std::llround(v * kCodeMax));
    return Rgb{static_cast<std::uint8_t>(n >> 16),
               static_cast<std::uint8_t>((n >> 8) & 0xff),
               static_cast<std::uint8_t>(n & 0xff)};
}

inline double decode_rgb(const Rgb& c) {
    const std::uint32_t n = (static_cast<std::uint32_t>(c.r) << 16) |
                            (static_cast<std::uint32_t>(c.g) << 8) |
                            static_cast<std::uint32_t>(c.b);
    return static_cast<double>(n) / kCodeMax;
}

/// Worst-case scalar error introduced by one encode/decode round trip.
inline constexpr double kQuantizationStep = 0.5 / kCodeMax;

} // namespace gapfill
