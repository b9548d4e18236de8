#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfm/constants.hpp"
#include "lfm/errors.hpp"
#include "lfm/linear_model.hpp"

namespace lfm {

// ---------------------------------------------------------------------------
// The log-radial x angular lattice on the disc: rings of log-radius
// r_min_log + i*growth_log and n_rays equidistributed half-lines. Cells are
// half-open in both directions; the inner disc is a single CENTER cell.
// ---------------------------------------------------------------------------

struct SigmaLattice {
    double r_min_log;  // log of the inner radius, < 0
    double growth_log; // log of the ring ratio, > 0
    std::int64_t n_rings;
    std::int64_t n_rays;

    static SigmaLattice make(double r_min_log, double growth_log, std::int64_t n_rings,
                             std::int64_t n_rays) {
        if (!(r_min_log < 0.0)) throw ConfigInvalid("lattice: r_min_log must be < 0");
        if (!(growth_log > 0.0)) throw ConfigInvalid("lattice: growth_log must be > 0");
        if (n_rays < 8) throw ConfigInvalid("lattice: n_rays must be >= 8");
        if (n_rings < 1) throw ConfigInvalid("lattice: n_rings must be >= 1");
        if (!(r_min_log + n_rings * growth_log <= 1e-12))
            throw ConfigInvalid("lattice: outermost ring log-radius must be <= 0");
        return SigmaLattice{r_min_log, growth_log, n_rings, n_rays};
    }

    double sector_step() const { return two_pi / static_cast<double>(n_rays); }
    double ring_log(std::int64_t ring) const { return r_min_log + ring * growth_log; }
    double ray_angle(std::int64_t sector) const { return sector * sector_step(); }
};

struct CellCoord {
    bool center = false;
    std::int64_t ring = 0;
    std::int64_t sector = 0;

    bool operator==(const CellCoord& o) const {
        if (center != o.center) return false;
        return center || (ring == o.ring && sector == o.sector);
    }
};

struct CellIndex {
    std::vector<CellCoord> coords;
    bool operator==(const CellIndex& o) const { return coords == o.coords; }
};

namespace detail {

// floor((v - lo)/step) with a fix-up so that v == lo + i*step (the exact double
// produced by the vertex) lands in bucket i. Keeps cell_of(cell_vertex) exact.
inline std::int64_t bucket(double v, double lo, double step) {
    auto i = static_cast<std::int64_t>(std::floor((v - lo) / step));
    while (lo + static_cast<double>(i + 1) * step <= v) ++i;
    while (lo + static_cast<double>(i) * step > v) --i;
    return i;
}

} // namespace detail

inline CellIndex cell_of(const SigmaLattice& lat, const ModelPoint& x) {
    CellIndex idx;
    idx.coords.reserve(x.coords.size());
    for (const auto& c : x.coords) {
        if (!c || c->log_mod < lat.r_min_log) {
            idx.coords.push_back(CellCoord{true, 0, 0});
            continue;
        }
        std::int64_t ring = detail::bucket(c->log_mod, lat.r_min_log, lat.growth_log);
        if (ring >= lat.n_rings) ring = lat.n_rings - 1; // beyond the outermost ring circle
        std::int64_t sector = detail::bucket(c->arg, 0.0, lat.sector_step());
        if (sector < 0) sector = 0;
        if (sector >= lat.n_rays) sector = lat.n_rays - 1;
        idx.coords.push_back(CellCoord{false, ring, sector});
    }
    return idx;
}

inline ModelPoint cell_vertex(const SigmaLattice& lat, const CellIndex& idx) {
    std::vector<Coord> cs;
    cs.reserve(idx.coords.size());
    for (const auto& cc : idx.coords) {
        if (cc.center) {
            cs.push_back(std::nullopt);
            continue;
        }
        if (cc.ring < 0 || cc.ring >= lat.n_rings || cc.sector < 0 || cc.sector >= lat.n_rays)
            throw MalformedIndex("cell index out of range");
        cs.push_back(LogPolar{lat.ring_log(cc.ring), lat.ray_angle(cc.sector)});
    }
    return ModelPoint::from_coords(std::move(cs));
}

// (n_rings*n_rays + 1)^k, exact.
inline std::uint64_t cell_count(const SigmaLattice& lat, int k) {
    auto base = static_cast<std::uint64_t>(lat.n_rings) * static_cast<std::uint64_t>(lat.n_rays) + 1;
    std::uint64_t out = 1;
    for (int i = 0; i < k; ++i) {
        if (out > std::numeric_limits<std::uint64_t>::max() / base)
            throw Error("cell_count overflows 64 bits");
        out *= base;
    }
    return out;
}

// Paper-mode lattices (n_rings = e^{46 lambda R}, n_rays = e^{23 lambda R}) are
// never materialized; the count certificate runs in log space.
struct PaperLatticeSpec {
    double lambda, R;
    double r_min_log;   // -e^{23 lambda R}
    double growth_log;  // e^{-23 lambda R}
    double n_rings_log; // 46 lambda R
    double n_rays_log;  // 23 lambda R

    static PaperLatticeSpec from(double lambda, double R) {
        if (lambda * R > 8.0) throw ConfigInvalid("lambda*R > 8 overflows the paper lattice logs");
        double e23 = std::exp(23.0 * lambda * R);
        return PaperLatticeSpec{lambda, R, -e23, 1.0 / e23, 46.0 * lambda * R, 23.0 * lambda * R};
    }

    // log of (n_rings*n_rays + 1)^k
    double cell_count_log(int k) const {
        double s = n_rings_log + n_rays_log;
        return k * (s + std::log1p(std::exp(-s)));
    }

    bool count_certified(int k) const { return cell_count_log(k) <= 70.0 * lambda * k * R; }
};

// ---------------------------------------------------------------------------
// Displacement maps J_l: follow the leaf from a lattice vertex for time
// -t log|x|_1 e^{2 pi i l / p} and snap the endpoint back to a vertex.
// ---------------------------------------------------------------------------

struct JMapResult {
    cplx zeta;            // the displacement applied in the leaf parameter
    LeafSample displaced; // z^l = phi_x(zeta)
    bool left_polydisc = false;
    std::optional<CellIndex> cell;   // absent when the displacement left the polydisc
    std::optional<ModelPoint> vertex;
};

inline JMapResult j_map(const LinearVectorField& field, const SigmaLattice& lat,
                        const ModelPoint& x, std::int64_t l, const PaperConstants& constants) {
    if (x.is_origin()) throw AllCoordinatesZero("j_map requires x != 0");
    if (l < 0 || l >= constants.p) throw Error("j_map: direction index out of [0, p)");
    JMapResult out;
    double angle = two_pi * static_cast<double>(l) / static_cast<double>(constants.p);
    out.zeta = -constants.t * x.norm1_log * std::polar(1.0, angle);
    out.displaced = leaf_eval(field, x, out.zeta);
    if (!out.displaced.inside_polydisc) {
        out.left_polydisc = true; // flagged, not fatal; paper-mode constants prevent it
        return out;
    }
    ModelPoint z = out.displaced.to_model_point();
    out.cell = cell_of(lat, z);
    out.vertex = cell_vertex(lat, *out.cell);
    return out;
}

struct PreimageCount {
    long count = 0;
    std::vector<std::size_t> witnesses; // indices into the sample
};

// Count sample points x with j_map(x, l) landing on the vertex of y's cell.
inline PreimageCount preimage_count(const LinearVectorField& field, const SigmaLattice& lat,
                                    const ModelPoint& y, std::int64_t l,
                                    std::span<const ModelPoint> sample,
                                    const PaperConstants& constants) {
    for (const auto& c : y.coords)
        if (!c || c->log_mod <= constants.alpha1_log)
            throw PreconditionViolated("preimage_count needs |y_j| > alpha1 for every j");
    CellIndex target = cell_of(lat, y);
    PreimageCount out;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        JMapResult r = j_map(field, lat, sample[i], l, constants);
        if (!r.left_polydisc && *r.cell == target) {
            ++out.count;
            out.witnesses.push_back(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plaque intersection: solve phi_z(zeta) first coordinate = target for the
// branch of smallest |zeta|. Closed form: zeta = (log w1 - log z1)/lambda_1
// with the argument difference wrapped to (-pi, pi].
// ---------------------------------------------------------------------------

struct PlaqueIntersection {
    cplx zeta;
    LeafSample point;                     // w^l = phi_z(zeta)
    std::vector<double> log_deviations;   // |lambda_j zeta| per coordinate
    std::vector<double> ratio_deviations; // |z_j / w^l_j - 1| per coordinate
};

inline PlaqueIntersection plaque_intersect(const LinearVectorField& field, const ModelPoint& z,
                                           const LogPolar& w1_target, double zeta_max) {
    if (z.is_origin() || !z.coords[0])
        throw AllCoordinatesZero("plaque_intersect requires z_1 != 0");
    double dl = w1_target.log_mod - z.coords[0]->log_mod;
    double da = w1_target.arg - z.coords[0]->arg;
    if (da > 3.14159265358979323846) da -= two_pi;
    if (da < -3.14159265358979323846) da += two_pi;
    PlaqueIntersection out;
    out.zeta = cplx(dl, da) / field.lambdas[0];
    if (std::abs(out.zeta) > zeta_max)
        throw NoSmallSolution("plaque parameter |zeta| = " + std::to_string(std::abs(out.zeta)) +
                              " exceeds the plaque radius " + std::to_string(zeta_max));
    out.point = leaf_eval(field, z, out.zeta);
    out.log_deviations.reserve(z.coords.size());
    out.ratio_deviations.reserve(z.coords.size());
    for (int j = 0; j < z.k(); ++j) {
        if (!z.coords[j]) {
            out.log_deviations.push_back(0.0);
            out.ratio_deviations.push_back(0.0);
            continue;
        }
        cplx lz = field.lambdas[j] * out.zeta;
        out.log_deviations.push_back(std::abs(lz));
        out.ratio_deviations.push_back(std::abs(std::exp(-lz) - 1.0));
    }
    return out;
}

// Largest ratio deviation over growth_log: the empirical stand-in for the
// plaque lemma's unnamed constant.
inline double plaque_gamma_hat(const PlaqueIntersection& pi, double growth_log) {
    double m = 0.0;
    for (double d : pi.ratio_deviations) m = std::max(m, d);
    return m / growth_log;
}

} // namespace lfm
