#include "geomr/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "geomr/error.hpp"

namespace geomr {

namespace {

struct Suffix {
  std::string_view text;
  double scale;
};

constexpr std::array<Suffix, 5> kDataSuffixes{{
    {"B", 1.0}, {"KB", kKB}, {"MB", kMB}, {"GB", kGB}, {"TB", kTB}}};

constexpr std::array<Suffix, 5> kRateSuffixes{{
    {"Bps", 1.0}, {"KBps", kKB}, {"MBps", kMB}, {"GBps", kGB}, {"TBps", kTB}}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_quantity(std::string_view text, Quantity kind) {
  const std::string_view input = trim(text);
  double value = 0.0;
  const char* first = input.data();
  const char* last = input.data() + input.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first) {
    throw UnitError("cannot parse a number from \"" + std::string(text) + "\"");
  }
  if (!std::isfinite(value)) {
    throw UnitError("non-finite quantity \"" + std::string(text) + "\"");
  }
  const std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  if (suffix.empty()) return value;

  const auto& table = kind == Quantity::Data ? kDataSuffixes : kRateSuffixes;
  for (const auto& s : table) {
    if (s.text == suffix) return value * s.scale;
  }
  const char* expected = kind == Quantity::Data ? "B, KB, MB, GB, TB" : "Bps, KBps, MBps, GBps, TBps";
  throw UnitError("unknown unit suffix \"" + std::string(suffix) + "\" in \"" + std::string(text) +
                  "\" (expected one of " + expected + ")");
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_quantity(double value, Quantity kind) {
  return format_double(value) + (kind == Quantity::Data ? "B" : "Bps");
}

}  // namespace geomr
