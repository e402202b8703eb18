#ifndef RIFT_RNG_HPP
#define RIFT_RNG_HPP

#include <cstdint>
#include <random>

namespace rift {

// Deterministic random source. std::mt19937_64 has a pinned algorithm, and
// the value transforms below are hand-rolled so streams are reproducible
// across standard libraries (std::*_distribution is not portable).
class Rng {
public:
    explicit Rng(uint64_t seed = 1) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Index in [0, n).
    uint64_t index(uint64_t n) { return n ? gen_() % n : 0; }

    // Standard normal via Box-Muller, one cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double kTwoPi = 6.283185307179586477;
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rift

#endif
