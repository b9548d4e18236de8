#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lfm/constants.hpp"
#include "lfm/errors.hpp"
#include "lfm/hyperbolic.hpp"
#include "lfm/linear_model.hpp"
#include "lfm/report.hpp"

namespace lfm {

// ---------------------------------------------------------------------------
// Psi_{x,y}(z) = (y_j/x_j * z_j): the linear map taking L_x to L_y. Exact in
// log space, so the functorial identity Psi(phi_x(zeta)) = phi_y(zeta) holds to
// rounding.
// ---------------------------------------------------------------------------

inline LeafSample linear_leaf_map(const ModelPoint& x, const ModelPoint& y, const LeafSample& z) {
    LeafSample out;
    out.coords.reserve(z.coords.size());
    out.norm1_log = neg_inf;
    out.inside_polydisc = true;
    for (int j = 0; j < z.k(); ++j) {
        if (!z.coords[j]) {
            out.coords.push_back(std::nullopt);
            continue;
        }
        if (!x.coords[j] || !y.coords[j])
            throw ZeroCoordinate("linear leaf map needs x_j, y_j != 0 for coordinate " +
                                 std::to_string(j + 1));
        double lm = z.coords[j]->log_mod + (y.coords[j]->log_mod - x.coords[j]->log_mod);
        double ar = wrap_angle(z.coords[j]->arg + y.coords[j]->arg - x.coords[j]->arg);
        out.coords.push_back(LogPolar{lm, ar});
        out.norm1_log = std::max(out.norm1_log, lm);
        if (!(lm < 0.0)) out.inside_polydisc = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local orthogonal projection onto a leaf: Gauss-Newton on
// zeta |-> || phi_y(zeta) - z ||^2. The Jacobian is a complex k-vector, so a
// step costs one inner product.
// ---------------------------------------------------------------------------

struct ProjectOptions {
    int max_iterations = 50;
    double gradient_tol = 1e-12;
    double plaque_radius = 0.15; // |zeta - zeta0| bound; LeftPlaque beyond it
};

struct ProjectionResult {
    cplx zeta = 0.0;
    LeafSample point;       // phi_y(zeta)
    int iterations = 0;
    double gradient_norm = 0.0;
    double displacement = 0.0; // || phi_y(zeta) - z ||
};

inline ProjectionResult orthogonal_project(const LinearVectorField& field, const ModelPoint& y,
                                           std::span<const cplx> z, cplx zeta0,
                                           const ProjectOptions& opts = {}) {
    if (y.is_origin()) throw AllCoordinatesZero("projection target leaf needs y != 0");
    const int k = y.k();
    double znorm = 0.0;
    for (const auto& c : z) znorm += std::norm(c);
    znorm = std::sqrt(znorm);

    cplx zeta = zeta0;
    ProjectionResult out;
    for (int it = 0; it <= opts.max_iterations; ++it) {
        std::vector<cplx> w(static_cast<std::size_t>(k));
        std::vector<cplx> jac(static_cast<std::size_t>(k));
        double jn2 = 0.0;
        cplx g(0.0, 0.0);
        double disp2 = 0.0;
        for (int j = 0; j < k; ++j) {
            if (!y.coords[j]) {
                w[j] = 0.0;
                jac[j] = 0.0;
            } else {
                cplx lz = field.lambdas[j] * zeta;
                double lm = y.coords[j]->log_mod + lz.real();
                w[j] = std::polar(std::exp(lm), y.coords[j]->arg + lz.imag());
                jac[j] = field.lambdas[j] * w[j];
            }
            cplx r = w[j] - z[j];
            disp2 += std::norm(r);
            jn2 += std::norm(jac[j]);
            g += std::conj(jac[j]) * r;
        }
        double scale = std::sqrt(jn2) * std::max(1.0, znorm);
        out.iterations = it;
        out.gradient_norm = 2.0 * std::abs(g);
        out.displacement = std::sqrt(disp2);
        if (out.gradient_norm <= opts.gradient_tol * scale) {
            out.zeta = zeta;
            out.point = leaf_eval(field, y, zeta);
            if (std::abs(zeta - zeta0) > opts.plaque_radius)
                throw LeftPlaque("projection wandered |zeta - zeta0| = " +
                                 std::to_string(std::abs(zeta - zeta0)));
            return out;
        }
        if (it == opts.max_iterations) break;
        zeta -= g / jn2;
        if (std::abs(zeta - zeta0) > 4.0 * opts.plaque_radius)
            throw LeftPlaque("projection iterate left the plaque neighborhood");
    }
    throw NoConvergence("orthogonal projection: no convergence after " +
                        std::to_string(opts.max_iterations) + " iterations");
}

// ---------------------------------------------------------------------------
// Leaf-to-leaf projection report: project a probe set seeded through the Psi
// correspondence (probes are given as zeta parameters on L_x, for which
// Psi(phi_x(zeta)) = phi_y(zeta) supplies the exact seed).
// ---------------------------------------------------------------------------

struct LeafMapReport {
    double c0_deviation = 0.0;
    std::optional<double> c2_deviation;
    bool holomorphic_region_flag = false;
    int probe_count = 0;
    double max_overlap_disagreement = 0.0;
    bool c0_bound_pass = true;
    long failed_probes = 0;
};

struct GlobalProjection {
    LeafMapReport report;
    std::vector<cplx> zetas;         // stationary parameters on L_y
    std::vector<LeafSample> images;  // projected points
};

inline GlobalProjection global_projection(const LinearVectorField& field, const ModelPoint& x,
                                          const ModelPoint& y, std::span<const cplx> probe_zetas,
                                          const ProjectOptions& opts = {},
                                          double ratio_hypothesis = 0.0) {
    for (int j = 0; j < x.k(); ++j) {
        if (!y.coords[j]) throw ZeroCoordinate("global projection needs y_j != 0");
        if (!x.coords[j]) throw ZeroCoordinate("global projection needs x_j != 0");
    }
    double ratio_dev = 0.0;
    for (int j = 0; j < x.k(); ++j)
        ratio_dev = std::max(ratio_dev, ratio_deviation(*x.coords[j], *y.coords[j]));
    if (ratio_hypothesis > 0.0 && ratio_dev > ratio_hypothesis)
        throw PreconditionViolated("|x_j/y_j - 1| exceeds the projection hypothesis " +
                                   std::to_string(ratio_hypothesis));

    GlobalProjection out;
    out.report.probe_count = static_cast<int>(probe_zetas.size());
    double h = 1e-4; // stencil for the finite-difference C^2 proxy
    double c2 = 0.0;
    bool c2_ok = probe_zetas.size() >= 1;

    auto project_at = [&](cplx zeta) -> ProjectionResult {
        LeafSample zs = leaf_eval(field, x, zeta);
        auto zc = zs.to_cartesian();
        return orthogonal_project(field, y, zc, zeta, opts);
    };

    for (std::size_t i = 0; i < probe_zetas.size(); ++i) {
        cplx zeta = probe_zetas[i];
        try {
            ProjectionResult pr = project_at(zeta);
            out.zetas.push_back(pr.zeta);
            out.images.push_back(pr.point);
            out.report.c0_deviation = std::max(out.report.c0_deviation, pr.displacement);

            // second differences of g = Phi - id along both axes
            double second = 0.0, first = 0.0;
            for (cplx dir : {cplx(h, 0.0), cplx(0.0, h)}) {
                ProjectionResult pp = project_at(zeta + dir);
                ProjectionResult pm = project_at(zeta - dir);
                auto g = [&](const ProjectionResult& q, cplx at) {
                    LeafSample base = leaf_eval(field, x, at);
                    return ambient_distance(q.point, base);
                };
                double gp = g(pp, zeta + dir), gm = g(pm, zeta - dir), g0 = pr.displacement;
                second = std::max(second, std::abs(gp + gm - 2.0 * g0) / (h * h));
                first = std::max(first, std::abs(gp - gm) / (2.0 * h));
            }
            c2 = std::max(c2, pr.displacement + first + second);

            // overlapping projections must agree: reseed from a displaced start
            ProjectionResult alt = orthogonal_project(
                field, y, leaf_eval(field, x, zeta).to_cartesian(), zeta + cplx(h, h), opts);
            out.report.max_overlap_disagreement =
                std::max(out.report.max_overlap_disagreement, std::abs(alt.zeta - pr.zeta));
        } catch (const Error&) {
            ++out.report.failed_probes;
            out.zetas.push_back(zeta);
            out.images.push_back(leaf_eval(field, x, zeta));
        }
    }
    if (c2_ok) out.report.c2_deviation = c2;
    out.report.c0_bound_pass = out.report.c0_deviation <= 10.0 * ratio_dev;
    out.report.holomorphic_region_flag = false; // orthogonal projections are not conformal
    return out;
}

// ---------------------------------------------------------------------------
// The blended map: equal to Psi deep inside the polydisc, to the orthogonal
// projection outside, glued by a smooth cutoff of the smoothed max-norm.
// ---------------------------------------------------------------------------

struct BlendCutoff {
    double inner_log;  // chi = 0 for smoothed log-norm <= inner_log
    double outer_log;  // chi = 1 for >= outer_log
    double sharpness;  // log-sum-exp parameter

    static BlendCutoff make(double inner_log, double outer_log) {
        if (!(inner_log < outer_log)) throw ConfigInvalid("cutoff: inner_log must be < outer_log");
        return BlendCutoff{inner_log, outer_log, 64.0 / (outer_log - inner_log)};
    }

    // smoothed max of the coordinate log-moduli
    double smoothed_norm_log(const LeafSample& z) const {
        double m = neg_inf;
        for (const auto& c : z.coords)
            if (c) m = std::max(m, c->log_mod);
        if (m == neg_inf) return m;
        double s = 0.0;
        for (const auto& c : z.coords)
            if (c) s += std::exp(sharpness * (c->log_mod - m));
        return m + std::log(s) / sharpness;
    }

    double chi(const LeafSample& z) const {
        double t = (smoothed_norm_log(z) - inner_log) / (outer_log - inner_log);
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); // quintic smoothstep
    }
};

struct BlendedMapResult {
    LeafSample point;
    double chi = 0.0;
    double leaf_criterion_residual = 0.0; // max |lambda_j log(w'_i/w_i) - lambda_i log(w'_j/w_j)|
};

inline BlendedMapResult blended_map(const LinearVectorField& field, const ModelPoint& x,
                                    const ModelPoint& y, const BlendCutoff& cutoff, cplx zeta,
                                    const ProjectOptions& opts = {}) {
    LeafSample z = leaf_eval(field, x, zeta);
    LeafSample w = linear_leaf_map(x, y, z);
    BlendedMapResult out;
    out.chi = cutoff.chi(z);
    if (out.chi == 0.0) {
        out.point = w; // bitwise the Psi output
        return out;
    }
    ProjectionResult pr = orthogonal_project(field, y, z.to_cartesian(), zeta, opts);
    if (out.chi == 1.0) {
        out.point = pr.point; // bitwise the projection output
        return out;
    }
    const int k = z.k();
    std::vector<cplx> logs(static_cast<std::size_t>(k)); // log(z'_i / w_i), branch nearest 0
    for (int j = 0; j < k; ++j) {
        if (!w.coords[j] || !pr.point.coords[j])
            throw ZeroCoordinate("blended map: zero coordinate in the blend zone");
        LogPolar r = log_polar_ratio(*pr.point.coords[j], *w.coords[j]);
        double dev = ratio_deviation(*pr.point.coords[j], *w.coords[j]);
        if (dev >= 0.5)
            throw BranchAmbiguity("blended map: |z'_i/w_i - 1| = " + std::to_string(dev) +
                                  " >= 0.5, log branch undefined");
        double da = r.arg > 3.14159265358979323846 ? r.arg - two_pi : r.arg;
        logs[j] = cplx(r.log_mod, da);
    }
    out.point.coords.resize(static_cast<std::size_t>(k));
    out.point.norm1_log = neg_inf;
    for (int j = 0; j < k; ++j) {
        cplx chi_j = out.chi * logs[j];
        double lm = w.coords[j]->log_mod + chi_j.real();
        double ar = wrap_angle(w.coords[j]->arg + chi_j.imag());
        out.point.coords[j] = LogPolar{lm, ar};
        out.point.norm1_log = std::max(out.point.norm1_log, lm);
        if (!(lm < 0.0)) out.point.inside_polydisc = false;
    }
    // leaf criterion: lambda_j log(w'_i/w_i) = lambda_i log(w'_j/w_j)
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            cplx li = out.chi * logs[i], lj = out.chi * logs[j];
            out.leaf_criterion_residual = std::max(
                out.leaf_criterion_residual, std::abs(field.lambdas[j] * li - field.lambdas[i] * lj));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Beltrami coefficient of a disc correspondence by central differences with a
// Richardson error estimate.
// ---------------------------------------------------------------------------

struct BeltramiEstimate {
    cplx mu;
    double error;     // Richardson estimate
    double dtau_abs;  // |d tau|, reported bounded away from 0
};

inline BeltramiEstimate beltrami_estimate(const std::function<cplx(cplx)>& tau, cplx xi, double h) {
    auto mu_at = [&](double step) {
        cplx du = (tau(xi + step) - tau(xi - step)) / (2.0 * step);
        cplx dv = (tau(xi + cplx(0.0, step)) - tau(xi - cplx(0.0, step))) / (2.0 * step);
        cplx d = 0.5 * (du - cplx(0.0, 1.0) * dv);     // d tau
        cplx dbar = 0.5 * (du + cplx(0.0, 1.0) * dv);  // dbar tau
        return std::pair<cplx, cplx>(d, dbar);
    };
    auto [d1, b1] = mu_at(h);
    auto [d2, b2] = mu_at(h / 2.0);
    double derr = (std::abs(d2 - d1) + std::abs(b2 - b1)) / 3.0;
    BeltramiEstimate out;
    out.dtau_abs = std::abs(d2);
    if (out.dtau_abs < 10.0 * derr)
        throw DegenerateDerivative("beltrami: |d tau| = " + std::to_string(out.dtau_abs) +
                                   " not separated from the finite-difference error " +
                                   std::to_string(derr));
    out.mu = b2 / d2;
    out.error = derr / out.dtau_abs * (1.0 + std::abs(out.mu));
    return out;
}

// ---------------------------------------------------------------------------
// Chain projection: walk a geodesic [0, xi] on L_x in steps of ambient size
// dist(x^j, 0) * eps1, projecting each step point onto L_y.
// ---------------------------------------------------------------------------

struct ChainStep {
    cplx xi;           // disc parameter on L_x
    double dist_e;     // dist(x^j, E) = ||x^j||_2
    double deviation;  // ||y^j - x^j||
    double ratio;      // deviation / dist_e^6
};

struct ChainReport {
    std::vector<ChainStep> steps;
    double kappa_hat = 0.0; // max step ratio r_{j+1}/r_j
    int n = 0;
    bool completed = false;
    double bound_shape = 0.0; // log*(dist(x,E)) * R * e^{c R} comparison value
};

inline ChainReport chain_project(const LinearVectorField& field, const ModelPoint& x,
                                 const ModelPoint& y, cplx xi_target, double eps1,
                                 const PaperConstants& constants, const ProjectOptions& popts = {}) {
    LeafChart chart = build_leaf_chart(field, x);
    CoveringMap2D tau(chart);
    if (!(eps1 > 0.0) || eps1 >= constants.eps0)
        throw ChainBroken("chain step fraction eps1 must lie in (0, eps0)", 0);

    ChainReport rep;
    auto sample_at = [&](double s) { return leaf_eval(field, x, tau.map(s * xi_target)); };

    double s = 0.0;
    cplx zeta_y, prev_zeta_x = tau.map(cplx(0.0, 0.0));
    {
        // y^0: the projection of x onto L_y (y is assumed at or near it)
        LeafSample xs = sample_at(0.0);
        auto pr = orthogonal_project(field, y, xs.to_cartesian(), cplx(0.0, 0.0), popts);
        zeta_y = pr.zeta;
        double de = ambient_norm2(xs);
        rep.steps.push_back(ChainStep{0.0, de, pr.displacement, pr.displacement / std::pow(de, 6)});
    }

    const int hard_cap = 100000;
    for (int j = 0; j < hard_cap && s < 1.0; ++j) {
        LeafSample base = sample_at(s);
        double target = ambient_norm2(base) * eps1;
        // first parameter past s where the ambient step reaches the target size
        double hi = 1.0;
        if (ambient_distance(sample_at(1.0), base) > target) {
            double lo = s;
            double step = (1.0 - s) / 64.0;
            double probe = s + step;
            while (probe < 1.0 && ambient_distance(sample_at(probe), base) < target) {
                lo = probe;
                probe += step;
            }
            hi = std::min(probe, 1.0);
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                if (ambient_distance(sample_at(mid), base) < target)
                    lo = mid;
                else
                    hi = mid;
            }
        }
        s = hi;
        LeafSample xn = sample_at(s);
        cplx zeta_xn = tau.map(s * xi_target);
        try {
            cplx seed = zeta_y + (zeta_xn - prev_zeta_x); // transport by the x-side increment
            auto pr = orthogonal_project(field, y, xn.to_cartesian(), seed, popts);
            zeta_y = pr.zeta;
            prev_zeta_x = zeta_xn;
            double den = ambient_norm2(xn);
            double ratio = pr.displacement / std::pow(den, 6);
            if (rep.steps.back().ratio > 0.0)
                rep.kappa_hat = std::max(rep.kappa_hat, ratio / rep.steps.back().ratio);
            rep.steps.push_back(ChainStep{s * xi_target, den, pr.displacement, ratio});
        } catch (const Error& e) {
            throw ChainBroken(std::string("chain projection failed: ") + e.what(),
                              static_cast<int>(rep.steps.size()));
        }
    }
    rep.n = static_cast<int>(rep.steps.size()) - 1;
    rep.completed = s >= 1.0;
    double dist_e0 = ambient_norm2(LeafSample::of(x));
    rep.bound_shape = log_star(dist_e0) * constants.R * std::exp(constants.c5 * constants.R);
    return rep;
}

} // namespace lfm
