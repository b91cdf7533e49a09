#ifndef GDBN_RNG_HPP
#define GDBN_RNG_HPP

#include <cstdint>
#include <random>

namespace gdbn {

/// Engine used throughout the library. Distributions come from <random>, so
/// replay is bit-exact for a given standard library build.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive well-separated child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream `index` of the master seed. Chains, replicates and
/// folds each get their own stream so results do not depend on scheduling.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix_seed(mix_seed(master_seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL)));
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t sub_index) {
    return make_stream(mix_seed(master_seed ^ mix_seed(index)), sub_index);
}

}  // namespace gdbn

#endif  // GDBN_RNG_HPP
