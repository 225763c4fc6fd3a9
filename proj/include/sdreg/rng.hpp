#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sdreg {

std::uint64_t splitmix64(std::uint64_t x);

// Mixes a master seed with up to three stream identifiers so that every
// experiment cell gets its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// Single source of randomness for the whole library.  All draws are built
// from raw mt19937_64 output so that a given seed produces the same stream
// on every platform and standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform draw in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal();

    // Unbiased integer in [0, n); rejection sampling on the top range.
    std::uint64_t below(std::uint64_t n);

    // m distinct indices drawn uniformly from [0, n).  Order is a
    // deterministic function of the stream state.
    std::vector<int> sample_without_replacement(long n, int m);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sdreg
