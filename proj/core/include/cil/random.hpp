#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cil {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Derives a child seed from a parent seed and a stage tag, so that every
/// module gets its own stream while the whole run stays reproducible.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a,
                          std::uint64_t b = 0) noexcept;

}  // namespace cil
