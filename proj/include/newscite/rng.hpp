#pragma once

#include <cstdint>
#include <random>
#include <vector>

// Seeded randomness with portable draw helpers. std::mt19937_64 is fully
// specified by the standard; the std distributions are not, so we derive
// doubles and bounded integers ourselves to keep results reproducible
// across compilers.

namespace newscite::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    // Independent stream derived from (seed, stream); used to give each
    // tree / stratum its own deterministic sequence.
    Rng(std::uint64_t seed, std::uint64_t stream)
        : gen_(splitmix64(splitmix64(seed) ^ splitmix64(stream))) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). Modulo bias is negligible for the sizes used here.
    std::size_t next_index(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next_u64() % n); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace newscite::rng
