#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "arti/geometry.hpp"

namespace arti {

/// Seeded random stream. Uniform/normal draws are generated from raw
/// mt19937_64 words instead of std distributions so that on-disk artifacts
/// are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) { // [0, n)
        return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    Vec3 uniform_in_box(const Box3& b) {
        return {uniform(b.lo.x(), b.hi.x()), uniform(b.lo.y(), b.hi.y()),
                uniform(b.lo.z(), b.hi.z())};
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace arti
