#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace qfc {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of trajectory `index` in an ensemble seeded with `master_seed`:
/// splitmix64(splitmix64(master_seed) ^ index).
constexpr std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ index);
}

/// Per-trajectory random source. The engine and both distributions have
/// fully specified algorithms, so a given seed yields the same stream on
/// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
    boost::random::uniform_01<double> uniform_;
};

}  // namespace qfc
