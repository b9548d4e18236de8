#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lfm/log_polar.hpp"

namespace lfm {

// Deterministic across platforms and standard libraries: std:: distributions
// are implementation-defined, which would break byte-identical reports.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // derive an independent stream for a named sub-task
    SplitMix64 fork(std::uint64_t tag) {
        SplitMix64 r(state ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
        r.next();
        return r;
    }
};

// Euclidean radius of the hyperbolic disc D_R (curvature -1).
inline double disc_radius(double R) { return std::tanh(R / 2.0); }

// Samples of D_R, uniform w.r.t. hyperbolic area.
inline std::vector<cplx> hyperbolic_uniform_disc(double R, int n, SplitMix64& rng) {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n));
    const double factor = std::cosh(R) - 1.0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        double rho = std::acosh(1.0 + u * factor);
        double theta = rng.uniform() * two_pi;
        out.push_back(std::polar(std::tanh(rho / 2.0), theta));
    }
    return out;
}

// Deterministic low-discrepancy sample of D_R: golden-angle spiral in
// hyperbolic area, plus the two real axis endpoints of the boundary circle.
inline std::vector<cplx> hyperbolic_spiral_disc(double R, int n) {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n) + 2);
    const double factor = std::cosh(R) - 1.0;
    const double golden = 0.61803398874989484820;
    for (int i = 0; i < n; ++i) {
        double u = (i + 0.5) / n;
        double rho = std::acosh(1.0 + u * factor);
        double theta = two_pi * std::fmod(i * golden, 1.0);
        out.push_back(std::polar(std::tanh(rho / 2.0), theta));
    }
    double r = disc_radius(R);
    out.push_back(cplx(r, 0.0));
    out.push_back(cplx(-r, 0.0));
    return out;
}

// n points equidistributed on the boundary circle of D_R, starting at angle 0.
inline std::vector<cplx> hyperbolic_circle(double R, int n) {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n));
    double r = disc_radius(R);
    for (int i = 0; i < n; ++i) out.push_back(std::polar(r, two_pi * i / n));
    return out;
}

// Hyperbolic covering-radius estimate for an n-point sample of D_R: a disc of
// this radius around every point of an area-equidistributed sample covers D_R
// up to constants. Used to widen sampled suprema into conservative intervals.
inline double hyperbolic_fill_distance(double R, int n) {
    double area = two_pi * (std::cosh(R) - 1.0);
    double per_point = area / n;
    // solve 2*pi*(cosh h - 1) = per_point, doubled for safety
    return 2.0 * std::acosh(1.0 + per_point / two_pi);
}

} // namespace lfm
