#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lfm/errors.hpp"
#include "lfm/log_polar.hpp"

namespace lfm {

// ---------------------------------------------------------------------------
// Vector field F(z) = sum_j lambda_j z_j d/dz_j with every lambda_j != 0.
// ---------------------------------------------------------------------------

struct LinearVectorField {
    std::vector<cplx> lambdas;
    double lambda_star = 1.0; // max|lambda| / min|lambda|

    int k() const { return static_cast<int>(lambdas.size()); }

    static LinearVectorField make(std::vector<cplx> ls) {
        LinearVectorField f;
        for (std::size_t j = 0; j < ls.size(); ++j)
            if (ls[j] == cplx(0.0, 0.0))
                throw ZeroEigenvalue("eigenvalue " + std::to_string(j + 1) + " is zero");
        f.lambdas = std::move(ls);
        double lo = std::abs(f.lambdas[0]), hi = lo;
        for (const auto& l : f.lambdas) {
            lo = std::min(lo, std::abs(l));
            hi = std::max(hi, std::abs(l));
        }
        f.lambda_star = hi / lo;
        return f;
    }

    bool normalized(double tol = 1e-12) const {
        double lo = std::abs(lambdas[0]);
        for (const auto& l : lambdas) lo = std::min(lo, std::abs(l));
        return std::abs(lo - 1.0) <= tol;
    }
};

// Rescale so min|lambda_j| = 1; the foliation (and all ratios) are unchanged.
// Idempotent.
inline LinearVectorField normalize(const LinearVectorField& field) {
    if (field.lambdas.empty()) throw ZeroEigenvalue("empty eigenvalue list");
    double lo = std::abs(field.lambdas[0]);
    for (const auto& l : field.lambdas) {
        if (l == cplx(0.0, 0.0)) throw ZeroEigenvalue("eigenvalue is zero");
        lo = std::min(lo, std::abs(l));
    }
    std::vector<cplx> out;
    out.reserve(field.lambdas.size());
    for (const auto& l : field.lambdas) out.push_back(l / lo);
    return LinearVectorField::make(std::move(out));
}

// ---------------------------------------------------------------------------
// Points of the polydisc in log-polar coordinates.
// ---------------------------------------------------------------------------

struct ModelPoint {
    std::vector<Coord> coords;
    double norm1_log = neg_inf; // max_j log|x_j|, -inf when all coordinates are zero

    int k() const { return static_cast<int>(coords.size()); }
    bool is_origin() const { return norm1_log == neg_inf; }

    static ModelPoint from_coords(std::vector<Coord> cs) {
        ModelPoint p;
        p.coords = std::move(cs);
        p.norm1_log = neg_inf;
        for (auto& c : p.coords) {
            if (!c) continue;
            if (!(c->log_mod < 0.0))
                throw Error("model point coordinate has log-modulus >= 0 (outside the open polydisc)");
            c->arg = wrap_angle(c->arg);
            p.norm1_log = std::max(p.norm1_log, c->log_mod);
        }
        return p;
    }

    static ModelPoint from_cartesian(std::span<const cplx> zs) {
        std::vector<Coord> cs;
        cs.reserve(zs.size());
        for (const auto& z : zs) {
            if (z == cplx(0.0, 0.0))
                cs.push_back(std::nullopt);
            else
                cs.push_back(LogPolar::from_cartesian(z));
        }
        return from_coords(std::move(cs));
    }

    std::vector<cplx> to_cartesian() const {
        std::vector<cplx> out;
        out.reserve(coords.size());
        for (const auto& c : coords) out.push_back(c ? c->to_cartesian() : cplx(0.0, 0.0));
        return out;
    }
};

// Result of evaluating a leaf parametrization; may lie outside the polydisc.
struct LeafSample {
    std::vector<Coord> coords;
    double norm1_log = neg_inf;
    bool inside_polydisc = true;

    int k() const { return static_cast<int>(coords.size()); }

    ModelPoint to_model_point() const {
        if (!inside_polydisc) throw Error("leaf sample lies outside the polydisc");
        return ModelPoint::from_coords(coords);
    }
    std::vector<cplx> to_cartesian() const {
        std::vector<cplx> out;
        out.reserve(coords.size());
        for (const auto& c : coords) out.push_back(c ? c->to_cartesian() : cplx(0.0, 0.0));
        return out;
    }

    static LeafSample of(const ModelPoint& p) {
        LeafSample s;
        s.coords = p.coords;
        s.norm1_log = p.norm1_log;
        s.inside_polydisc = true;
        return s;
    }
};

// Euclidean distance between two samples, assembled coordinate-wise from log
// space. Underflows gracefully to 0 at doubly-exponentially small scales.
inline double ambient_distance(const LeafSample& a, const LeafSample& b) {
    double s = 0.0;
    for (int j = 0; j < a.k(); ++j) {
        double d = log_polar_distance(a.coords[j], b.coords[j]);
        s += d * d;
    }
    return std::sqrt(s);
}

inline double ambient_norm2(const LeafSample& a) {
    double s = 0.0;
    for (const auto& c : a.coords) {
        if (!c) continue;
        double m = std::exp(c->log_mod);
        s += m * m;
    }
    return std::sqrt(s);
}

// phi_x(zeta) = (x_j e^{lambda_j zeta}); entire in zeta, evaluated in log space
// so |Re(lambda_j zeta)| up to ~1e8 cannot overflow. Zero coordinates stay zero.
inline LeafSample leaf_eval(const LinearVectorField& field, const ModelPoint& x, cplx zeta) {
    if (x.is_origin()) throw AllCoordinatesZero("leaf_eval requires x != 0");
    LeafSample s;
    s.coords.reserve(x.coords.size());
    s.norm1_log = neg_inf;
    s.inside_polydisc = true;
    for (int j = 0; j < x.k(); ++j) {
        const auto& c = x.coords[j];
        if (!c) {
            s.coords.push_back(std::nullopt);
            continue;
        }
        cplx lz = field.lambdas[j] * zeta;
        double lm = c->log_mod + lz.real();
        double ar = wrap_angle(c->arg + lz.imag());
        s.coords.push_back(LogPolar{lm, ar});
        s.norm1_log = std::max(s.norm1_log, lm);
        if (!(lm < 0.0)) s.inside_polydisc = false;
    }
    return s;
}

// ---------------------------------------------------------------------------
// The leaf domain Pi_x = { zeta : Re(lambda_j zeta) < c_j } with c_j = -log|x_j|,
// one constraint per nonvanishing coordinate. Convex, contains 0.
// ---------------------------------------------------------------------------

struct ChartConstraint {
    cplx lambda;  // Re(lambda * zeta) < c
    double c;     // > 0
    int coordinate;

    double chat() const { return c / std::abs(lambda); } // dist(0, boundary line)
    double signed_distance(cplx a) const { return (c - (lambda * a).real()) / std::abs(lambda); }
};

struct HalfPlaneShape {
    ChartConstraint side; // the binding constraint
    double distance;      // dist(0, boundary)
};

struct StripShape {
    ChartConstraint side1, side2; // antiparallel boundary normals
    double width;                 // chat1 + chat2
    double offset;                // dist(0, side1)
};

struct WedgeShape {
    cplx vertex;
    double opening;     // interior angle in (0, pi)
    double orientation; // region = vertex + e^{i*orientation} * {0 < arg < opening}
};

using Shape2 = std::variant<HalfPlaneShape, StripShape, WedgeShape>;

struct LeafChart {
    std::vector<ChartConstraint> constraints;
    std::optional<Shape2> shape2;
    double origin_distance = 0.0; // dist(0, boundary) = min_j c_j / |lambda_j|

    bool contains(cplx a) const {
        for (const auto& cn : constraints)
            if (!((cn.lambda * a).real() < cn.c)) return false;
        return true;
    }
};

// Two boundary lines count as parallel when the sine of their angle is below
// this; smaller skews are beyond the conditioning of the closed-form maps.
inline constexpr double parallel_sin_tol = 1e-12;

namespace detail {

inline Shape2 classify_shape2(const ChartConstraint& a, const ChartConstraint& b) {
    cplx n1 = std::conj(a.lambda) / std::abs(a.lambda); // outward unit normal
    cplx n2 = std::conj(b.lambda) / std::abs(b.lambda);
    double cross = (std::conj(n1) * n2).imag();
    double dot = (std::conj(n1) * n2).real();
    if (std::abs(cross) < parallel_sin_tol) {
        if (dot > 0.0) {
            // same direction: the tighter constraint wins
            const ChartConstraint& bind = (a.chat() <= b.chat()) ? a : b;
            return HalfPlaneShape{bind, bind.chat()};
        }
        return StripShape{a, b, a.chat() + b.chat(), a.chat()};
    }
    // boundary lines cross: solve Re(lambda_a V) = c_a, Re(lambda_b V) = c_b
    double s1 = a.lambda.real(), t1 = a.lambda.imag();
    double s2 = b.lambda.real(), t2 = b.lambda.imag();
    double det = -s1 * t2 + t1 * s2;
    double u = (-t2 * a.c + t1 * b.c) / det;
    double v = (-s2 * a.c + s1 * b.c) / det;
    cplx vertex(u, v);
    double opening = 3.14159265358979323846 - std::atan2(std::abs(cross), dot);
    // boundary ray directions from the vertex, each on the side allowed by the
    // other constraint
    cplx d1 = cplx(0, 1) * n1;
    if ((b.lambda * d1).real() >= 0.0) d1 = -d1;
    cplx d2 = cplx(0, 1) * n2;
    if ((a.lambda * d2).real() >= 0.0) d2 = -d2;
    double orientation = ((std::conj(d1) * d2).imag() > 0.0) ? std::arg(d1) : std::arg(d2);
    return WedgeShape{vertex, opening, orientation};
}

} // namespace detail

inline LeafChart build_leaf_chart(const LinearVectorField& field, const ModelPoint& x) {
    if (x.is_origin()) throw AllCoordinatesZero("chart requires x != 0");
    LeafChart chart;
    for (int j = 0; j < x.k(); ++j) {
        const auto& c = x.coords[j];
        if (!c) continue;
        chart.constraints.push_back(ChartConstraint{field.lambdas[j], -c->log_mod, j});
    }
    chart.origin_distance = chart.constraints[0].chat();
    for (const auto& cn : chart.constraints)
        chart.origin_distance = std::min(chart.origin_distance, cn.chat());
    if (chart.constraints.size() == 1) {
        const auto& cn = chart.constraints[0];
        chart.shape2 = HalfPlaneShape{cn, cn.chat()};
    } else if (chart.constraints.size() == 2) {
        chart.shape2 = detail::classify_shape2(chart.constraints[0], chart.constraints[1]);
    }
    return chart;
}

// min over constraints of the signed distance to the boundary line.
inline double boundary_distance(const LeafChart& chart, cplx a) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& cn : chart.constraints) {
        double sd = cn.signed_distance(a);
        if (sd < 0.0)
            throw PointOutsideChart("point violates a chart constraint by " + std::to_string(-sd));
        d = std::min(d, sd);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Omega_x: the chart shrunk by a margin in every constraint and capped in
// modulus. Paper-mode margin/cap are e^{-20 lambda R} and e^{20 lambda R};
// callers may scale both.
// ---------------------------------------------------------------------------

struct RegionOmega {
    LeafChart parent;
    double margin; // constraint slack required (in the raw Re(lambda z) < c form)
    double cap;    // |zeta| bound
};

inline bool omega_membership(const RegionOmega& region, cplx zeta) {
    if (!(std::abs(zeta) <= region.cap)) return false;
    for (const auto& cn : region.parent.constraints)
        if (!((cn.lambda * zeta).real() < cn.c - region.margin)) return false;
    return true;
}

// Minimum slack of zeta in Omega (negative when outside); the cap enters as
// (cap - |zeta|) so a histogram of margins covers both failure modes.
inline double omega_slack(const RegionOmega& region, cplx zeta) {
    double s = region.cap - std::abs(zeta);
    for (const auto& cn : region.parent.constraints)
        s = std::min(s, (cn.c - region.margin) - (cn.lambda * zeta).real());
    return s;
}

} // namespace lfm
