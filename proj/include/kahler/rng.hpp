#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <vector>

namespace kahler {

/**
 * Deterministic random generator (xoshiro256** seeded through splitmix64).
 *
 * The standard-library distributions are implementation defined, so reports
 * produced from a fixed seed would differ between standard libraries.  This
 * generator plus the samplers below give bit-identical streams everywhere.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            // splitmix64 expansion of the user seed
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    /** Derive an independent stream for task `index` (stable under threading). */
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1b54a32d192ed03ULL));
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /** Uniform double in [0, 1). */
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /** Uniform double in [lo, hi). */
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /** Standard real normal (Box-Muller; no state caching so streams stay simple). */
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /** Standard complex normal: independent N(0,1/2) real and imaginary parts scaled to unit variance. */
    std::complex<double> cnormal() {
        return {normal() * 0.7071067811865475244, normal() * 0.7071067811865475244};
    }

    /** Uniform point on the unit sphere of C^m (Hermitian norm 1). */
    std::vector<std::complex<double>> unit_complex_vector(int m) {
        std::vector<std::complex<double>> z(static_cast<std::size_t>(m));
        double n2 = 0.0;
        for (;;) {
            n2 = 0.0;
            for (auto& zi : z) {
                zi = cnormal();
                n2 += std::norm(zi);
            }
            if (n2 > 1e-12) break;
        }
        const double s = 1.0 / std::sqrt(n2);
        for (auto& zi : z) zi *= s;
        return z;
    }

private:
    std::uint64_t state_[4] = {};
};

} // namespace kahler
