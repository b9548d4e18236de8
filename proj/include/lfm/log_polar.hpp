#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

namespace lfm {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline double wrap_angle(double a) {
    double t = std::fmod(a, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    return t;
}

// A nonzero complex number stored as (log|z|, arg z). Log-moduli survive the
// doubly-exponentially small scales that underflow any fixed-width float.
struct LogPolar {
    double log_mod;
    double arg; // in [0, 2*pi)

    static LogPolar from_cartesian(cplx z) {
        return LogPolar{std::log(std::abs(z)), wrap_angle(std::arg(z))};
    }
    cplx to_cartesian() const { return std::polar(std::exp(log_mod), arg); }
};

// One coordinate of a point in the model: exactly zero, or a LogPolar value.
using Coord = std::optional<LogPolar>;

// |a - b| for two log-polar values, computed without leaving log space until
// the final magnitude. Stable when both moduli are tiny or when they differ
// by hundreds of orders of magnitude.
inline double log_polar_distance(const Coord& a, const Coord& b) {
    if (!a && !b) return 0.0;
    if (!a) return std::exp(b->log_mod);
    if (!b) return std::exp(a->log_mod);
    const LogPolar* big = &*a;
    const LogPolar* small = &*b;
    if (big->log_mod < small->log_mod) std::swap(big, small);
    // |a-b| = e^{lm_big} * |1 - e^{(lm_small-lm_big) + i(arg_small-arg_big)}|
    cplx w(small->log_mod - big->log_mod, small->arg - big->arg);
    return std::exp(big->log_mod) * std::abs(1.0 - std::exp(w));
}

// z1/z2 as a log-polar value (arg reduced mod 2*pi).
inline LogPolar log_polar_ratio(const LogPolar& z1, const LogPolar& z2) {
    return LogPolar{z1.log_mod - z2.log_mod, wrap_angle(z1.arg - z2.arg)};
}

// |z1/z2 - 1| evaluated from the log-polar ratio.
inline double ratio_deviation(const LogPolar& z1, const LogPolar& z2) {
    double dl = z1.log_mod - z2.log_mod;
    double da = z1.arg - z2.arg;
    if (da > 3.141592653589793) da -= two_pi;
    if (da < -3.141592653589793) da += two_pi;
    return std::abs(std::exp(cplx(dl, da)) - 1.0);
}

// log*(s) = 1 + |log s|
inline double log_star(double s) { return 1.0 + std::abs(std::log(s)); }
inline double log_star_from_log(double log_s) { return 1.0 + std::abs(log_s); }

// log(1 + z) without cancellation for small |z|
inline cplx clog1p(cplx z) {
    if (std::abs(z) >= 0.5) return std::log(1.0 + z);
    double re = 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
    double im = std::arg(1.0 + z);
    return cplx(re, im);
}

// e^z - 1 without cancellation for small |z|
inline cplx cexpm1(cplx z) {
    if (std::abs(z) >= 0.5) return std::exp(z) - 1.0;
    double ea = std::expm1(z.real());
    double sb = std::sin(z.imag());
    double hb = std::sin(0.5 * z.imag());
    return cplx(ea * std::cos(z.imag()) - 2.0 * hb * hb, (1.0 + ea) * sb);
}

} // namespace lfm
