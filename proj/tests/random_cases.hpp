#pragma once

// Seeded generators of inner functions and measures shared by the unit tests
// and the acceptance binary.

#include <cmath>
#include <random>
#include <vector>

#include "modelspace/inner.hpp"
#include "modelspace/measure.hpp"

namespace modelspace::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::vector<Complex> random_zeros(std::mt19937_64& rng, int n, double rmax) {
    std::vector<Complex> z;
    for (int i = 0; i < n; ++i) z.push_back(std::polar(rmax * std::sqrt(uniform(rng, 0.0, 1.0)), uniform(rng, 0.0, kTwoPi)));
    return z;
}

inline InnerFunction spiral_family(int n, double angle = 0.0) {
    return InnerFunction({}, {}, ZeroGenerator{"spiral", {{"base", 2.0}, {"twist", 1.0}, {"angle", angle}}, n});
}

inline InnerFunction radial_family(int n, double angle = 0.0) {
    return InnerFunction({}, {}, ZeroGenerator{"radial", {{"base", 2.0}, {"angle", angle}}, n});
}

// Monomials, finite products, a singular atom, and truncated zero families.
inline InnerFunction random_inner(std::mt19937_64& rng) {
    switch (uniform_int(rng, 0, 4)) {
        case 0: return InnerFunction::monomial(uniform_int(rng, 1, 4));
        case 1: return InnerFunction::blaschke(random_zeros(rng, uniform_int(rng, 1, 4), 0.95));
        case 2: return InnerFunction({}, {{uniform(rng, 0.0, kTwoPi), uniform(rng, 0.5, 2.0)}});
        case 3: return spiral_family(20, uniform(rng, 0.0, kTwoPi));
        default: return radial_family(20, uniform(rng, 0.0, kTwoPi));
    }
}

// Atoms inside and on the circle, optionally geometric masses running into a
// boundary spectrum point, and optionally a density piece.
inline DiscMeasure random_measure(std::mt19937_64& rng, const InnerFunction& theta) {
    std::vector<MeasureAtom> atoms;
    const int interior = uniform_int(rng, 0, 4);
    for (int i = 0; i < interior; ++i) {
        const double rho = 1.0 - std::ldexp(1.0, -uniform_int(rng, 1, 14)) * uniform(rng, 0.5, 1.0);
        atoms.push_back({std::polar(rho, uniform(rng, 0.0, kTwoPi)), uniform(rng, 0.01, 1.0)});
    }
    if (uniform_int(rng, 0, 3) == 0) {
        atoms.push_back({std::polar(1.0, uniform(rng, 0.0, kTwoPi)), uniform(rng, 0.01, 1.0)});
    }
    const auto& spec = theta.boundary_spectrum();
    if (!spec.empty() && uniform_int(rng, 0, 1) == 0) {
        const double t = spec.front();
        const double scale = uniform(rng, 0.1, 1.0);
        for (int k = 1; k <= 16; ++k) {
            atoms.push_back({std::polar(1.0 - std::ldexp(1.0, -k), t), scale * std::pow(4.0, -k)});
        }
    }
    std::vector<DensityPiece> density;
    if (uniform_int(rng, 0, 3) == 0) {
        const double start = uniform(rng, 0.0, kTwoPi);
        density.push_back({make_arc(start, start + uniform(rng, 0.1, 2.0)), uniform(rng, 0.1, 2.0)});
    }
    return DiscMeasure(std::move(atoms), std::move(density));
}

// Atoms strictly inside the disc.
inline DiscMeasure random_interior_measure(std::mt19937_64& rng, int count) {
    std::vector<MeasureAtom> atoms;
    for (int i = 0; i < count; ++i) {
        const double rho = (1.0 - std::ldexp(1.0, -uniform_int(rng, 1, 12))) * uniform(rng, 0.7, 1.0);
        atoms.push_back({std::polar(rho, uniform(rng, 0.0, kTwoPi)), uniform(rng, 0.01, 1.0)});
    }
    return DiscMeasure(std::move(atoms));
}

}  // namespace modelspace::testing
