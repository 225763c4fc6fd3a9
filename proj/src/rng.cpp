#include "sdreg/rng.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace sdreg {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    std::uint64_t x = splitmix64(master ^ 0xA5A5A5A5A5A5A5A5ULL);
    x = splitmix64(x ^ splitmix64(a));
    x = splitmix64(x ^ splitmix64(b));
    x = splitmix64(x ^ splitmix64(c));
    return x;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on two fresh uniforms; 1 - u keeps the log argument positive.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~0ULL - (~0ULL % n + 1) % n;
    std::uint64_t x = next_u64();
    while (x > limit) x = next_u64();
    return x % n;
}

std::vector<int> Rng::sample_without_replacement(long n, int m) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(m));
    if (m >= n) {
        for (long i = 0; i < n; ++i) out.push_back(static_cast<int>(i));
        return out;
    }
    // Floyd's algorithm: m draws, each from a growing prefix.
    std::unordered_set<long> seen;
    seen.reserve(static_cast<std::size_t>(m) * 2);
    for (long j = n - m; j < n; ++j) {
        long pick = static_cast<long>(below(static_cast<std::uint64_t>(j + 1)));
        if (seen.contains(pick)) pick = j;
        seen.insert(pick);
        out.push_back(static_cast<int>(pick));
    }
    return out;
}

}  // namespace sdreg
