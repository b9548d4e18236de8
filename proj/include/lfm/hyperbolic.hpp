#pragma once

#include <cmath>
#include <functional>
#include <variant>
#include <vector>

#include "lfm/errors.hpp"
#include "lfm/linear_model.hpp"
#include "lfm/rng.hpp"

namespace lfm {

// Metric convention, fixed project-wide: curvature -1, disc density
// 2/(1-|xi|^2), half-plane density 1/dist(.,boundary). Under this convention
// the two-sided comparison (1/2) d <= 1/density <= d against the boundary
// distance and the 1 - 2e^{-R} estimate for the Euclidean radius of D_R both
// hold literally.

struct MetricBound {
    double lo = 0.0;
    double hi = 0.0;
    enum Kind { ClosedForm, TwoSided } kind = TwoSided;

    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

inline MetricBound closed_form(double v) { return MetricBound{v, v, MetricBound::ClosedForm}; }

// Poincare distance in the unit disc: 2*artanh of the Mobius pseudo-distance.
inline double disc_distance(cplx xi, cplx zeta) {
    double m = std::abs(xi - zeta) / std::abs(1.0 - std::conj(xi) * zeta);
    if (m >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::atanh(m);
}

// hyperbolic density lambda(a) of the domain, bounded two-sided through the
// boundary distance d: lambda in [1/d, 2/d].
inline MetricBound density_bounds(const LeafChart& chart, cplx a) {
    double d = boundary_distance(chart, a);
    return MetricBound{1.0 / d, 2.0 / d, MetricBound::TwoSided};
}

// Closed-form densities for the three two-constraint shapes.
inline double shape_density(const Shape2& shape, cplx a) {
    if (std::holds_alternative<HalfPlaneShape>(shape)) {
        const auto& h = std::get<HalfPlaneShape>(shape);
        double d = h.side.signed_distance(a);
        if (!(d > 0.0)) throw PointOutsideChart("point outside half-plane");
        return 1.0 / d;
    }
    if (std::holds_alternative<StripShape>(shape)) {
        const auto& s = std::get<StripShape>(shape);
        double y = s.side1.signed_distance(a);
        if (!(y > 0.0 && y < s.width)) throw PointOutsideChart("point outside strip");
        double w = s.width;
        return (3.14159265358979323846 / w) / std::sin(3.14159265358979323846 * y / w);
    }
    const auto& wd = std::get<WedgeShape>(shape);
    cplx rel = (a - wd.vertex) * std::polar(1.0, -wd.orientation);
    double r = std::abs(rel);
    double psi = std::arg(rel);
    if (!(r > 0.0 && psi > 0.0 && psi < wd.opening)) throw PointOutsideChart("point outside wedge");
    double th = wd.opening;
    return (3.14159265358979323846 / th) / (r * std::sin(3.14159265358979323846 * psi / th));
}

inline MetricBound exact_density(const LeafChart& chart, cplx a) {
    if (!chart.shape2)
        throw ShapeUnavailable("no closed form: chart has more than two active constraints");
    if (!chart.contains(a)) throw PointOutsideChart("point outside chart");
    return closed_form(shape_density(*chart.shape2, a));
}

// ---------------------------------------------------------------------------
// The covering map tau: D -> Pi_x for two-constraint charts, as a closed-form
// conformal chain pinned by tau(0) = 0 and tau'(0) a positive real.
// ---------------------------------------------------------------------------

class CoveringMap2D {
public:
    explicit CoveringMap2D(const LeafChart& chart) {
        if (!chart.shape2)
            throw ShapeUnavailable("covering map needs a two-constraint chart");
        shape_ = *chart.shape2;
        if (const auto* w = std::get_if<WedgeShape>(&shape_)) {
            // recentered chain: exact at the base point, stable for far vertices
            cplx a0 = (-w->vertex) * std::polar(1.0, -w->orientation);
            wedge_.rho0 = std::abs(a0);
            wedge_.psi0 = std::arg(a0);
            double argh0 = (3.14159265358979323846 / w->opening) * wedge_.psi0;
            wedge_.h0hat = std::polar(1.0, argh0);
            wedge_.v0 = std::sin(argh0);
            wedge_.C = std::polar(1.0, w->orientation) * wedge_.rho0 * std::polar(1.0, wedge_.psi0);
        }
        xi0_ = canonical_inverse(cplx(0.0, 0.0));
        cplx d0 = canonical_derivative(xi0_) * (1.0 - std::norm(xi0_));
        deriv0_ = std::abs(d0);
        rot_in_ = std::conj(d0) / deriv0_;
    }

    cplx map(cplx xi) const { return canonical(mobius(rot_in_ * xi)); }

    cplx inverse(cplx z) const {
        cplx u = canonical_inverse(z);
        return std::conj(rot_in_) * (u - xi0_) / (1.0 - std::conj(xi0_) * u);
    }

    cplx derivative(cplx xi) const {
        cplx u = rot_in_ * xi;
        cplx den = 1.0 + std::conj(xi0_) * u;
        cplx mprime = (1.0 - std::norm(xi0_)) / (den * den);
        return canonical_derivative(mobius(u)) * mprime * rot_in_;
    }

    double derivative0() const { return deriv0_; } // positive real by construction

    const Shape2& shape() const { return shape_; }

private:
    Shape2 shape_;
    struct WedgeChain {
        double rho0 = 0.0; // |base - vertex|
        double psi0 = 0.0; // angle of the base point inside the wedge
        cplx h0hat;        // e^{i (pi/opening) psi0}, the base point in the half-plane model
        double v0 = 0.0;   // Im h0hat
        cplx C;            // e^{i orientation} rho0 e^{i psi0}
    } wedge_;
    cplx xi0_;
    cplx rot_in_;
    double deriv0_;

    static constexpr double pi_ = 3.14159265358979323846;

    cplx mobius(cplx u) const { return (u + xi0_) / (1.0 + std::conj(xi0_) * u); }

    // B: D -> shape, biholomorphic; maps 0 to the base point exactly for the
    // half-plane and wedge chains.
    cplx canonical(cplx xi) const {
        if (std::holds_alternative<HalfPlaneShape>(shape_)) {
            const auto& h = std::get<HalfPlaneShape>(shape_);
            double alpha = std::arg(h.side.lambda);
            return std::polar(1.0, -alpha) * (h.distance * 2.0 * xi / (1.0 + xi));
        }
        if (std::holds_alternative<StripShape>(shape_)) {
            const auto& s = std::get<StripShape>(shape_);
            double alpha = std::arg(s.side1.lambda);
            double ca = s.side1.chat(), cb = s.side2.chat();
            double mid = (ca - cb) / 2.0;
            cplx w = mid + (s.width / pi_) * cplx(0, 1) * std::log((1.0 + xi) / (1.0 - xi));
            return std::polar(1.0, -alpha) * w;
        }
        const auto& wd = std::get<WedgeShape>(shape_);
        cplx w2 = cplx(0, 2) * xi / (1.0 - xi); // H(xi) - i, H the Cayley map to the half-plane
        cplx q = wedge_.v0 * w2 / wedge_.h0hat;
        cplx G = (wd.opening / pi_) * clog1p(q);
        return wedge_.C * cexpm1(G);
    }

    cplx canonical_derivative(cplx xi) const {
        if (std::holds_alternative<HalfPlaneShape>(shape_)) {
            const auto& h = std::get<HalfPlaneShape>(shape_);
            double alpha = std::arg(h.side.lambda);
            cplx den = (1.0 + xi) * (1.0 + xi);
            return std::polar(1.0, -alpha) * (h.distance * 2.0 / den);
        }
        if (std::holds_alternative<StripShape>(shape_)) {
            const auto& s = std::get<StripShape>(shape_);
            double alpha = std::arg(s.side1.lambda);
            return std::polar(1.0, -alpha) * (s.width / pi_) * cplx(0, 1) * 2.0 / (1.0 - xi * xi);
        }
        const auto& wd = std::get<WedgeShape>(shape_);
        cplx w2 = cplx(0, 2) * xi / (1.0 - xi);
        cplx q = wedge_.v0 * w2 / wedge_.h0hat;
        cplx G = (wd.opening / pi_) * clog1p(q);
        cplx hprime = cplx(0, 2) / ((1.0 - xi) * (1.0 - xi));
        return wedge_.C * std::exp(G) * (wd.opening / pi_) * wedge_.v0 * hprime /
               (wedge_.h0hat * (1.0 + q));
    }

    cplx canonical_inverse(cplx z) const {
        if (std::holds_alternative<HalfPlaneShape>(shape_)) {
            const auto& h = std::get<HalfPlaneShape>(shape_);
            double alpha = std::arg(h.side.lambda);
            cplx q = std::polar(1.0, alpha) * z / h.distance;
            return q / (2.0 - q);
        }
        if (std::holds_alternative<StripShape>(shape_)) {
            const auto& s = std::get<StripShape>(shape_);
            double alpha = std::arg(s.side1.lambda);
            double ca = s.side1.chat(), cb = s.side2.chat();
            double mid = (ca - cb) / 2.0;
            cplx w = std::polar(1.0, alpha) * z;
            cplx L = (w - mid) * (pi_ / s.width);
            cplx r = std::exp(cplx(0, -1) * L);
            return (r - 1.0) / (r + 1.0);
        }
        const auto& wd = std::get<WedgeShape>(shape_);
        cplx G = (pi_ / wd.opening) * clog1p(z / wedge_.C);
        cplx w2 = wedge_.h0hat * cexpm1(G) / wedge_.v0; // = H - i
        return w2 / (w2 + cplx(0, 2));
    }
};

inline CoveringMap2D covering_map(const LeafChart& chart) { return CoveringMap2D(chart); }

// ---------------------------------------------------------------------------
// Distance in the chart domain.
// ---------------------------------------------------------------------------

// Exact hyperbolic distance inside the half-plane of one supporting constraint;
// a lower bound for the chart distance since the chart metric dominates.
inline double half_plane_distance(const ChartConstraint& cn, cplx a, cplx b) {
    double d1 = cn.signed_distance(a);
    double d2 = cn.signed_distance(b);
    double q = std::norm(a - b) / (2.0 * d1 * d2);
    return std::acosh(1.0 + q);
}

namespace detail {

struct SimpsonResult {
    double value;
    double error;
};

inline void adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                             double fa, double fm, double fb, double whole, double eps,
                             int depth, SimpsonResult& acc) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        acc.value += left + right + delta / 15.0;
        acc.error += std::abs(delta) / 15.0 + 1e-15 * std::abs(left + right);
        return;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1, acc);
    adaptive_simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1, acc);
}

inline SimpsonResult integrate(const std::function<double(double)>& f, double a, double b,
                               double eps) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    SimpsonResult acc{0.0, 0.0};
    adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 40, acc);
    return acc;
}

} // namespace detail

// Two-sided interval: lower = best supporting half-plane, upper = integral of
// the density upper bound 2/d along the segment, widened by the quadrature
// error so the interval stays conservative.
inline MetricBound domain_distance_interval(const LeafChart& chart, cplx a, cplx b) {
    boundary_distance(chart, a); // precondition: both inside
    boundary_distance(chart, b);
    if (a == b) return MetricBound{0.0, 0.0, MetricBound::TwoSided};
    double lo = 0.0;
    for (const auto& cn : chart.constraints) lo = std::max(lo, half_plane_distance(cn, a, b));
    cplx dir = b - a;
    double len = std::abs(dir);
    auto f = [&](double s) { return 2.0 / boundary_distance(chart, a + s * dir) * len; };
    auto res = detail::integrate(f, 0.0, 1.0, 1e-11 * std::max(1.0, lo));
    double hi = std::max(res.value + res.error, lo);
    return MetricBound{lo, hi, MetricBound::TwoSided};
}

// For two-constraint charts the covering map turns the distance into the disc
// distance of the preimages, a closed form; otherwise the interval is returned.
inline MetricBound domain_distance_bounds(const LeafChart& chart, cplx a, cplx b) {
    if (chart.shape2) {
        boundary_distance(chart, a);
        boundary_distance(chart, b);
        CoveringMap2D tau(chart);
        return closed_form(disc_distance(tau.inverse(a), tau.inverse(b)));
    }
    return domain_distance_interval(chart, a, b);
}

// ---------------------------------------------------------------------------
// eta_hat(x) = ||D phi_x(0)|| / density(0): the leafwise metric coefficient at
// x. Closed form whenever the chart has a shape, a two-sided interval
// otherwise; always inside [-|x|_1 log|x|_1/(2 lambda*), -k lambda* |x|_1 log|x|_1].
// ---------------------------------------------------------------------------

inline double leaf_speed_norm(const LinearVectorField& field, const ModelPoint& x) {
    double s = 0.0;
    for (int j = 0; j < x.k(); ++j) {
        if (!x.coords[j]) continue;
        double m = std::abs(field.lambdas[j]) * std::exp(x.coords[j]->log_mod);
        s += m * m;
    }
    return std::sqrt(s);
}

inline MetricBound eta_hat(const LinearVectorField& field, const ModelPoint& x) {
    if (x.is_origin()) throw AllCoordinatesZero("eta_hat requires x != 0");
    LeafChart chart = build_leaf_chart(field, x);
    double norm = leaf_speed_norm(field, x);
    if (chart.shape2) {
        double dens = shape_density(*chart.shape2, cplx(0.0, 0.0));
        return closed_form(norm / dens);
    }
    double d = chart.origin_distance;
    return MetricBound{norm * d / 2.0, norm * d, MetricBound::TwoSided};
}

// ---------------------------------------------------------------------------
// Sampling the hyperbolic R-ball of the chart around its base point.
// ---------------------------------------------------------------------------

struct BallSample {
    std::vector<cplx> points; // zeta-plane points with dist(0, zeta) <= R certified
    long proposals = 0;
    long accepted_conservative = 0; // certified hi <= R
    long accepted_optimistic = 0;   // lo <= R
    bool exact = false;             // pushforward through the covering map
};

inline BallSample hyperbolic_ball_sample(const LeafChart& chart, double R, int n,
                                         std::uint64_t seed) {
    if (!(R > 0.0) || n < 0) throw Error("ball sample needs R > 0, n >= 0");
    BallSample out;
    SplitMix64 rng(seed);
    if (chart.shape2) {
        CoveringMap2D tau(chart);
        auto xs = hyperbolic_uniform_disc(R, n, rng);
        out.points.reserve(xs.size());
        for (const auto& xi : xs) out.points.push_back(tau.map(xi));
        out.proposals = n;
        out.accepted_conservative = n;
        out.accepted_optimistic = n;
        out.exact = true;
        return out;
    }
    double d0 = chart.origin_distance;
    double reach = d0 * std::expm1(R) * 1.05;
    long cap = 1000L * std::max(n, 1);
    while (static_cast<int>(out.points.size()) < n && out.proposals < cap) {
        ++out.proposals;
        double r = reach * std::sqrt(rng.uniform());
        cplx zeta = std::polar(r, rng.uniform() * two_pi);
        if (!chart.contains(zeta)) continue;
        MetricBound d = domain_distance_interval(chart, cplx(0.0, 0.0), zeta);
        if (d.lo <= R) ++out.accepted_optimistic;
        if (d.hi <= R) {
            ++out.accepted_conservative;
            out.points.push_back(zeta);
        }
    }
    return out;
}

} // namespace lfm
