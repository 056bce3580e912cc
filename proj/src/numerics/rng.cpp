// SPDX-License-Identifier: Apache-2.0
#include "segalign/numerics/rng.hpp"

#include <cmath>
#include <numbers>

namespace segalign {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// FNV-1a, then mixed.
std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return mix64(h);
}

Rng::Rng(std::uint64_t seed) noexcept : seed_(seed), key_(mix64(seed + kGolden)) {}

Rng Rng::split(std::string_view tag) const noexcept {
  return Rng(seed_, mix64(key_ ^ hash_tag(tag)));
}

Rng Rng::split(std::uint64_t index) const noexcept {
  return Rng(seed_, mix64(key_ + mix64(index + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t Rng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ ^ mix64(counter_ * kGolden));
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // Rejection sampling avoids modulo bias.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace segalign
