#include "sdv/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdv {

double CounterRng::normal(std::uint64_t n) const noexcept {
  const std::uint64_t a = bits(n);
  const std::uint64_t b = mix64(a ^ 0xA0761D6478BD642Full);
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::index(std::uint64_t n) noexcept {
  // Lemire's multiply-shift; the bias is below 2^-64 * n and irrelevant here.
  __extension__ using u128 = unsigned __int128;
  const u128 product = static_cast<u128>(next_bits()) * static_cast<u128>(n);
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace sdv
