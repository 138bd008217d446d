#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace frfid {

/// Seedable random source with a fixed, platform-independent mapping to
/// doubles. Engine: std::mt19937_64 (bit-exact by the C++ standard); the
/// uniform and Gaussian mappings below are hand-rolled so results do not
/// depend on the standard library's distribution implementations.
///
/// Generator name recorded in run metadata: "mt19937_64/boxmuller".
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/boxmuller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [0, 2*pi).
    double phase() { return uniform() * 6.283185307179586476925286766559; }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Derives an independent child seed (splitmix64 of master ^ index),
    /// used so parallel realizations are reproducible under any schedule.
    static std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
        std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace frfid
