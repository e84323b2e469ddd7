#pragma once

#include <cstdint>
#include <random>

namespace atorsion {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-task stream: (master seed, task index) -> independent engine. Results
// never depend on how tasks are scheduled.
inline std::mt19937_64 task_rng(std::uint64_t seed, std::uint64_t task) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (task * 0xd1b54a32d192ed03ULL)));
}

}  // namespace atorsion
