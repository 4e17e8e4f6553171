#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "lwadoa/types.hpp"

namespace lwadoa {

// splitmix64 step; used to whiten and combine seed material.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Combine seed material into a fresh stream seed. Each component is
/// whitened so that adding methods or sweep points does not perturb the
/// streams of existing (method, snr, trial) cells.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::int64_t a = 0, std::int64_t b = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ fnv1a(tag));
    h = splitmix64(h ^ static_cast<std::uint64_t>(a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(b));
    return h;
}

/// Deterministic random stream. mt19937_64 is fully specified by the
/// standard; uniforms and normals are derived by hand (no use of
/// implementation-defined std distributions) so that identical seeds give
/// bit-identical streams everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * kPi * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    /// Circular complex Gaussian with E|z|^2 = variance.
    Cplx cgaussian(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * normal();
        const double im = s * normal();
        return {re, im};
    }

    /// Unit-modulus complex number with uniform phase.
    Cplx unit_phase() {
        const double phi = 2.0 * kPi * uniform();
        return {std::cos(phi), std::sin(phi)};
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lwadoa
