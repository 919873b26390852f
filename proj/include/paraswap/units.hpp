#pragma once

#include <limits>
#include <numbers>

namespace paraswap {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Internal units are angular frequency (rad/s) and seconds. File and CLI
// boundaries use GHz/MHz/kHz and µs/ns.
namespace units {

constexpr double ghz(double v) { return kTwoPi * 1e9 * v; }
constexpr double mhz(double v) { return kTwoPi * 1e6 * v; }
constexpr double khz(double v) { return kTwoPi * 1e3 * v; }
constexpr double us(double v) { return 1e-6 * v; }
constexpr double ns(double v) { return 1e-9 * v; }

constexpr double to_ghz(double w) { return w / (kTwoPi * 1e9); }
constexpr double to_mhz(double w) { return w / (kTwoPi * 1e6); }
constexpr double to_khz(double w) { return w / (kTwoPi * 1e3); }
constexpr double to_us(double t) { return t * 1e6; }
constexpr double to_ns(double t) { return t * 1e9; }

}  // namespace units
}  // namespace paraswap
