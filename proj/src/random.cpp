#include "eqc/random.hpp"

#include <vector>

namespace eqc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t master_seed,
                            std::initializer_list<std::uint64_t> indices) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (indices.size() + 1));
    std::uint64_t chain = splitmix64(master_seed);
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(chain);
    for (std::uint64_t index : indices) {
        chain = splitmix64(chain ^ splitmix64(index + 0x632be59bd9b4e019ULL));
        push(chain);
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t index)
    : engine_(make_engine(master_seed, {index})) {}

RandomStream::RandomStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> indices)
    : engine_(make_engine(master_seed, indices)) {}

}  // namespace eqc
