#ifndef RI_RNG_HPP
#define RI_RNG_HPP

// Counter-based seeded random streams. Each (seed, stream) pair yields an
// independent, platform-stable sequence; draws depend only on the counter,
// never on library distributions, so identical seeds reproduce bitwise.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ri/common.hpp"

namespace ri {

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

class SeedStream {
  public:
    explicit SeedStream(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(detail::mix64(seed) ^ detail::mix64(detail::mix64(stream) + 0x1d8e4e27c47d124fULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe under log().
    double next_double_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes two words per draw.
    double next_gaussian() {
        double u1 = next_double_pos();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Index into a probability vector by inverse CDF.
    std::size_t next_categorical(const std::vector<double>& weights) {
        double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

  private:
    std::uint64_t state_;
};

}  // namespace ri

#endif  // RI_RNG_HPP
