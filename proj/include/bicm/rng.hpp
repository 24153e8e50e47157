#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bicm {

// splitmix64 finalizer, used to derive well-separated stream seeds.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. Uniform/Gaussian conversion is done in-house
// (not via std::*_distribution, whose output is implementation-defined) so
// results are identical on any platform for a given seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t bits() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    uint64_t below(uint64_t n) { return eng_() % n; }

    bool coin() { return (eng_() >> 63) != 0; }

    // standard normal, Box-Muller (pairs cached)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Independent per-frame stream: key = (master seed, stream index).
inline Rng frame_rng(uint64_t master_seed, uint64_t stream_index) {
    return Rng(mix64(master_seed ^ mix64(stream_index)));
}

}  // namespace bicm
