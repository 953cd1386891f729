#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace macsim
{

using Rng = std::mt19937_64;

// Consumer ids for substream derivation. Stations use their own id.
inline constexpr std::uint64_t kAdversaryStream = 0xad7e55a1ULL;
inline constexpr std::uint64_t kStationStreamBase = 0x57a710000ULL;

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream per consumer: adding consumers never shifts another's draws.
Rng derive_stream(std::uint64_t master_seed, std::uint64_t consumer_id);

// Uniform integer in [0, bound) by rejection; identical across standard libraries.
std::uint64_t uniform_below(Rng &rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng &rng);

// Exact Poisson(lambda) by sequential-search inversion. Throws for lambda <= 0.
std::uint64_t sample_poisson(Rng &rng, double lambda);

} // namespace macsim
