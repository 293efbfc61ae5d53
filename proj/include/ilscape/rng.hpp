#pragma once

#include <cstdint>
#include <random>

#include "ilscape/geom.hpp"

namespace ilscape {

// All randomness in the pipeline flows through this wrapper so a single
// seed fixes every downstream draw. Conversions to double avoid
// std::uniform_real_distribution, whose output is not pinned by the
// standard, keeping streams identical across compilers.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t raw() { return engine_(); }

    // Uniform in [0,1) with 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) {
        return a + (b - a) * uniform();
    }

    // Uniform integer in [0, n). n must be > 0.
    size_t uniform_index(size_t n) {
        return static_cast<size_t>(uniform() * static_cast<double>(n)) % n;
    }

    Vec3 in_box(const Box3& box) {
        return Vec3(uniform(box.min().x(), box.max().x()),
                    uniform(box.min().y(), box.max().y()),
                    uniform(box.min().z(), box.max().z()));
    }

    // Marsaglia-style rejection; no trig, exact on every platform.
    Vec3 on_unit_sphere() {
        for (;;) {
            const Vec3 v(uniform(-1.0, 1.0), uniform(-1.0, 1.0),
                         uniform(-1.0, 1.0));
            const double n2 = v.squaredNorm();
            if (n2 > 1e-12 && n2 <= 1.0) return v / std::sqrt(n2);
        }
    }

    // Derive an independent stream; offsets decouple call sites.
    Rng fork(uint64_t offset) {
        return Rng(engine_() ^ (0x9e3779b97f4a7c15ull * (offset + 1)));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ilscape
