#pragma once

#include <string>
#include <string_view>

namespace geomr {

// Canonical units are bytes and bytes/second. Suffixes are decimal SI
// (1 KB = 1000 B).
enum class Quantity { Data, Rate };

// Parses "150GB", "100 MBps", "2.5e3KBps" or a bare number (canonical
// units). Throws UnitError for an unknown or wrong-kind suffix.
double parse_quantity(std::string_view text, Quantity kind);

// Shortest text that parses back to exactly `value`, with the canonical
// suffix ("B" or "Bps").
std::string format_quantity(double value, Quantity kind);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

inline constexpr double kKB = 1e3;
inline constexpr double kMB = 1e6;
inline constexpr double kGB = 1e9;
inline constexpr double kTB = 1e12;

}  // namespace geomr
