#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace polyret {

/// 64-bit FNV-1a; stable across platforms and standard libraries.
[[nodiscard]] std::uint64_t stable_hash(std::string_view bytes) noexcept;

/// Seed for one (stage, key) pair under a global seed, so every query can
/// be processed independently and in any order with identical output.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage,
                                        std::string_view key) noexcept;

/// mt19937_64 plus an unbiased bounded draw. The engine sequence is fixed by
/// the standard; `below` avoids std::uniform_int_distribution, whose output
/// differs between standard library implementations.
class SeededRng {
   public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform real in [0, 1) with 53 bits of precision.
    double unit();

   private:
    std::mt19937_64 engine_;
};

} // namespace polyret
