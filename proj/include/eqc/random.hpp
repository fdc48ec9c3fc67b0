#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace eqc {

/// Deterministic random stream keyed by a master seed and a list of indices
/// (replicate, grid point, ...). The same key always reproduces the same
/// draws, independent of how many other streams exist or which thread owns
/// them.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t index);
    RandomStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> indices);

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t bits() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace eqc
