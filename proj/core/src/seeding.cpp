#include "polyret/seeding.hpp"

namespace polyret {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

} // namespace

std::uint64_t stable_hash(std::string_view bytes) noexcept
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        hash ^= static_cast<std::uint8_t>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage, std::string_view key) noexcept
{
    std::uint64_t mixed = splitmix64(seed);
    mixed = splitmix64(mixed ^ stable_hash(stage));
    return splitmix64(mixed ^ stable_hash(key));
}

std::uint64_t SeededRng::below(std::uint64_t bound)
{
    // Rejection sampling on the top of the range keeps the draw unbiased.
    std::uint64_t const limit = UINT64_MAX - (UINT64_MAX % bound);
    while (true) {
        std::uint64_t const value = engine_();
        if (value < limit) {
            return value % bound;
        }
    }
}

double SeededRng::unit()
{
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
}

} // namespace polyret
