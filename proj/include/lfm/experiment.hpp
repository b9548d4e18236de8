#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfm/bowen.hpp"
#include "lfm/cells.hpp"
#include "lfm/config.hpp"
#include "lfm/covering.hpp"
#include "lfm/hyperbolic.hpp"
#include "lfm/linear_model.hpp"
#include "lfm/projections.hpp"
#include "lfm/report.hpp"

namespace lfm {

struct Report {
    std::string config_canonical;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version = "0.1.0";
    std::vector<VerifyReport> ops;
    std::vector<EntropyRow> entropy_rows;
    double wall_seconds = 0.0; // summary only, never in the machine format

    bool all_pass() const {
        for (const auto& r : ops)
            if (!r.pass) return false;
        return true;
    }
};

namespace detail {

inline ModelPoint random_point(SplitMix64& rng, int k, double lo_log, double hi_log) {
    std::vector<Coord> cs;
    cs.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        cs.push_back(LogPolar{rng.uniform(lo_log, hi_log), rng.uniform() * two_pi});
    return ModelPoint::from_coords(std::move(cs));
}

inline LinearVectorField random_field2(SplitMix64& rng) {
    cplx l2 = std::polar(rng.uniform(1.0, 2.2), rng.uniform() * two_pi);
    return normalize(LinearVectorField::make({cplx(1.0, 0.0), l2}));
}

inline std::vector<ModelPoint> real_grid2(int n, double lo, double hi) {
    std::vector<ModelPoint> pts;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a = lo + (hi - lo) * i / (n - 1);
            double b = lo + (hi - lo) * j / (n - 1);
            if (a == 0.0 || b == 0.0) continue;
            pts.push_back(ModelPoint::from_cartesian(std::vector<cplx>{cplx(a, 0), cplx(b, 0)}));
        }
    return pts;
}

// a same-cell pair jittered within the sector/ring cell and within the (S2)
// ratio budget
inline std::pair<ModelPoint, ModelPoint> same_cell_pair(SplitMix64& rng, const SigmaLattice& lat,
                                                        double base_log_mod) {
    std::vector<Coord> a, b;
    for (int j = 0; j < 2; ++j) {
        std::int64_t ring = static_cast<std::int64_t>(
            std::floor((base_log_mod - lat.r_min_log) / lat.growth_log));
        std::int64_t sector =
            static_cast<std::int64_t>(rng.uniform(0.0, static_cast<double>(lat.n_rays))) %
            lat.n_rays;
        double lm_mid = lat.ring_log(ring) + lat.growth_log / 2.0;
        double ar_mid = lat.ray_angle(sector) + lat.sector_step() / 2.0;
        double jl = 0.45 * lat.growth_log, ja = 0.45 * lat.sector_step();
        a.push_back(LogPolar{lm_mid + rng.uniform(-jl, jl), wrap_angle(ar_mid + rng.uniform(-ja, ja))});
        b.push_back(LogPolar{lm_mid + rng.uniform(-jl, jl), wrap_angle(ar_mid + rng.uniform(-ja, ja))});
    }
    return {ModelPoint::from_coords(std::move(a)), ModelPoint::from_coords(std::move(b))};
}

inline std::uint64_t op_tag(const std::string& op) {
    return fnv1a_hash("op:" + op);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Operation drivers: each builds deterministic inputs from (config, seed) and
// runs the corresponding verification.
// ---------------------------------------------------------------------------

inline VerifyReport run_op_model(const ExperimentConfig& cfg) {
    VerifyReport rep;
    rep.op = "model";
    rep.anchor = "leaf-chart-geometry";
    auto pv = cfg.raw.get_complexes("point.values");
    if (pv.empty()) pv = {cplx(0.5, 0.0), cplx(0.5, 0.0)};
    ModelPoint x = ModelPoint::from_cartesian(pv);
    LeafChart chart = build_leaf_chart(cfg.field, x);
    rep.metric("constraints", static_cast<double>(chart.constraints.size()));
    rep.metric("origin_distance", chart.origin_distance);
    rep.metric("norm1_log", x.norm1_log);
    double bd = boundary_distance(chart, cplx(0.0, 0.0));
    rep.metric("boundary_distance_0", bd);
    rep.check("distance-formula", std::abs(bd - chart.origin_distance) <= 1e-12, bd,
              chart.origin_distance);
    // the paper bracket -log|x|_1 / lambda* <= dist <= -log|x|_1
    rep.check("distance-bracket",
              bd >= -x.norm1_log / cfg.field.lambda_star - 1e-12 && bd <= -x.norm1_log + 1e-12,
              bd, -x.norm1_log);
    if (chart.shape2) {
        rep.metric("shape2_kind", static_cast<double>(chart.shape2->index()));
        MetricBound eta = eta_hat(cfg.field, x);
        rep.metric("eta_hat", eta.lo);
    }
    return rep;
}

inline VerifyReport run_op_metric(const ExperimentConfig& cfg) {
    VerifyReport rep;
    rep.op = "metric";
    rep.anchor = "vartheta-two-sided";
    auto pv = cfg.raw.get_complexes("point.values");
    if (pv.empty()) pv = {cplx(0.5, 0.0), cplx(0.5, 0.0)};
    ModelPoint x = ModelPoint::from_cartesian(pv);
    LeafChart chart = build_leaf_chart(cfg.field, x);
    MetricBound db = density_bounds(chart, cplx(0.0, 0.0));
    rep.metric("density_lo", db.lo);
    rep.metric("density_hi", db.hi);
    if (chart.shape2) {
        MetricBound ex = exact_density(chart, cplx(0.0, 0.0));
        rep.metric("density_exact", ex.lo);
        rep.check("exact-in-two-sided", db.contains(ex.lo, 1e-9 * ex.lo), ex.lo, db.hi);
        CoveringMap2D tau(chart);
        rep.metric("covering_derivative0", tau.derivative0());
        rep.check("pullback-density", std::abs(2.0 / tau.derivative0() - ex.lo) <= 1e-9 * ex.lo,
                  2.0 / tau.derivative0(), ex.lo);
    }
    MetricBound eta = eta_hat(cfg.field, x);
    double n1 = std::exp(x.norm1_log);
    double lo_b = -n1 * x.norm1_log / (2.0 * cfg.field.lambda_star);
    double hi_b = -cfg.field.k() * cfg.field.lambda_star * n1 * x.norm1_log;
    rep.metric("eta_lo", eta.lo);
    rep.metric("eta_hi", eta.hi);
    rep.check("eta-bracket", eta.lo >= lo_b - 1e-12 && eta.hi <= hi_b + 1e-12, eta.lo, hi_b);
    return rep;
}

inline VerifyReport run_op_entropy(const ExperimentConfig& cfg, std::vector<EntropyRow>& rows_out) {
    VerifyReport rep;
    rep.op = "entropy";
    rep.anchor = "local-entropy-bound";
    int n = static_cast<int>(cfg.raw.get_int("grid.n", 10));
    double lo = cfg.raw.get_double("grid.lo", -0.475);
    double hi = cfg.raw.get_double("grid.hi", 0.475);
    auto K = detail::real_grid2(n, lo, hi);
    auto R_list = cfg.raw.get_doubles("entropy.R_list");
    if (R_list.empty()) R_list = {1.0, 2.0};
    std::vector<double> eps_list = cfg.raw.get_doubles("entropy.eps_list");
    BowenParams bp{cfg.constants.R, 0.1, cfg.samples, cfg.rotations, cfg.seed};
    double bound = 70.0 * cfg.field.k() * cfg.field.lambda_star;
    std::vector<ModelPoint> pts = K;
    std::sort(pts.begin(), pts.end(), lexicographic_less);
    for (double R : R_list) {
        std::vector<double> epss = eps_list.empty() ? std::vector<double>{std::exp(-R)} : eps_list;
        for (double eps : epss) {
            SeparatedSet s = separated_set(cfg.field, pts, R, eps, bp);
            long N = static_cast<long>(s.kept.size());
            double rate = std::log(static_cast<double>(N)) / R;
            rows_out.push_back(EntropyRow{R, eps, N, rate});
            rep.check_le("rate-R" + std::to_string(R), rate, bound);
        }
    }
    rep.metric("points", static_cast<double>(pts.size()));
    rep.metric("bound", bound);
    return rep;
}

inline VerifyReport run_op_3R(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("3R"));
    int n_points = static_cast<int>(cfg.raw.get_int("verify.points", 8));
    double rho = cfg.raw.get_double("verify.rho", 0.75);
    VerifyReport agg;
    agg.op = "3R";
    agg.anchor = "omega-7R-containment";
    agg.margin_hist = Histogram::make(0.0, cfg.constants.omega_cap(), 32);
    double min_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_points; ++i) {
        double lo = std::max(cfg.constants.alpha1_log, -20.0);
        ModelPoint x = detail::random_point(rng, cfg.field.k(), lo, std::log(rho / 2.0));
        VerifyReport r = verify_lemma_3R(cfg.field, x, cfg.constants, cfg.samples, rng.next(), rho);
        agg.violations += r.violations;
        min_slack = std::min(min_slack, r.metric_value("min_slack"));
        for (const auto& b : r.margin_hist.counts) (void)b;
    }
    agg.metric("points", n_points);
    agg.metric("min_slack", min_slack);
    agg.check("omega-membership-violations", agg.violations == 0,
              static_cast<double>(agg.violations), 0.0);
    agg.pass = agg.violations == 0;
    return agg;
}

inline VerifyReport run_op_flatten(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("flatten"));
    VerifyReport agg;
    agg.op = "flatten";
    agg.anchor = "coordinate-flattening-3R";
    int n_points = static_cast<int>(cfg.raw.get_int("verify.points", 4));
    for (int i = 0; i < n_points; ++i) {
        std::vector<Coord> cs;
        cs.push_back(LogPolar{rng.uniform(-2.0, -0.5), rng.uniform() * two_pi});
        for (int j = 1; j < cfg.field.k(); ++j)
            cs.push_back(LogPolar{cfg.constants.alpha2_log + rng.uniform(-1.0, std::log(2.0)),
                                  rng.uniform() * two_pi});
        ModelPoint x = ModelPoint::from_coords(std::move(cs));
        BowenParams bp{cfg.constants.R, 0.1, cfg.samples, cfg.rotations, rng.next()};
        FlatteningReport fr = verify_flattening(cfg.field, x, 1, cfg.constants, bp);
        agg.violations += fr.report.violations;
        for (const auto& c : fr.report.checks) agg.check(c.name, c.pass, c.value, c.bound);
    }
    agg.metric("points", n_points);
    return agg;
}

inline VerifyReport run_op_near0(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("near0"));
    VerifyReport agg;
    agg.op = "near0";
    agg.anchor = "near-origin-closeness";
    int n_pairs = static_cast<int>(cfg.raw.get_int("verify.points", 4));
    for (int i = 0; i < n_pairs; ++i) {
        double cap = std::log(2.0) + cfg.constants.alpha1_log;
        ModelPoint x = detail::random_point(rng, cfg.field.k(), 1.5 * cfg.constants.alpha1_log, cap);
        ModelPoint y = detail::random_point(rng, cfg.field.k(), 1.5 * cfg.constants.alpha1_log, cap);
        BowenParams bp{cfg.constants.R, 0.1, cfg.samples, cfg.rotations, rng.next()};
        NearZeroReport nr = verify_near_zero(cfg.field, x, y, cfg.constants, bp);
        agg.violations += nr.report.violations;
        for (const auto& c : nr.report.checks) agg.check(c.name, c.pass, c.value, c.bound);
    }
    agg.metric("pairs", n_pairs);
    return agg;
}

inline VerifyReport run_op_cellclose(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("cellclose"));
    VerifyReport agg;
    agg.op = "cellclose";
    agg.anchor = "same-cell-closeness";
    int n_pairs = static_cast<int>(cfg.raw.get_int("cellclose.pairs", 1000));
    double tol = cfg.raw.get_double(
        "cellclose.s2_tol",
        2.0 * std::sqrt(cfg.lattice.growth_log * cfg.lattice.growth_log +
                        cfg.lattice.sector_step() * cfg.lattice.sector_step()));
    BowenParams bp{cfg.constants.R, 0.1, cfg.samples, cfg.rotations, cfg.seed};
    double eps_analog = std::exp(-cfg.constants.R);
    long violations = 0;
    double max_hi = 0.0, max_psi = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        auto [x, y] = detail::same_cell_pair(rng, cfg.lattice, rng.uniform(-1.2, -0.4));
        CellCloseReport cr = verify_cell_closeness(cfg.field, x, y, cfg.constants, bp, tol);
        max_hi = std::max(max_hi, cr.distance.bound.hi);
        max_psi = std::max(max_psi, cr.psi_deviation);
        if (!(cr.distance.bound.hi <= eps_analog)) ++violations;
    }
    agg.violations = violations;
    agg.metric("pairs", n_pairs);
    agg.metric("s2_tol_standin", tol);
    agg.metric("s2_tol_paper", cfg.constants.s2_tolerance());
    agg.metric("max_bowen_hi", max_hi);
    agg.metric("max_psi_deviation", max_psi);
    agg.check_le("bowen-hi-vs-eps-analog", max_hi, eps_analog);
    agg.notes.push_back("stand-in tolerance; paper form e^{-22 lambda R}");
    return agg;
}

inline VerifyReport run_op_escape(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("escape"));
    VerifyReport agg;
    agg.op = "escape";
    agg.anchor = "escape-speed";
    // closed-form case: lambda = (1,1), radial point
    auto f11 = LinearVectorField::make({cplx(1, 0), cplx(1, 0)});
    ModelPoint xr = ModelPoint::from_cartesian(std::vector<cplx>{cplx(0.5, 0), cplx(0.5, 0)});
    EscapeSpeedReport base =
        verify_escape_speed(f11, xr, EscapeMode::Speed, cfg.constants.R, cfg.samples, 0);
    agg.metric("c2_hat_halfplane", base.c2_hat);
    agg.check("halfplane-c2-exact", std::abs(base.c2_hat - 1.0) <= 1e-6, base.c2_hat, 1.0);
    int n_fields = static_cast<int>(cfg.raw.get_int("verify.points", 6));
    double worst = 0.0;
    for (int i = 0; i < n_fields; ++i) {
        LinearVectorField f = detail::random_field2(rng);
        ModelPoint x = detail::random_point(rng, 2, -1.5, -0.5);
        EscapeSpeedReport er =
            verify_escape_speed(f, x, EscapeMode::Speed, cfg.constants.R, cfg.samples, 0);
        worst = std::max(worst, er.c2_hat);
        if (!std::isfinite(er.c2_hat)) ++agg.violations;
        EscapeSpeedReport dr =
            verify_escape_speed(f, x, EscapeMode::Depth, cfg.constants.R, cfg.samples, 0);
        if (!std::isfinite(dr.c3_hat)) ++agg.violations;
    }
    agg.metric("c2_hat", worst);
    agg.check("random-c2-finite", agg.violations == 0, worst, 0.0);
    return agg;
}

inline VerifyReport run_op_holder(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("holder"));
    VerifyReport agg;
    agg.op = "holder";
    agg.anchor = "eta-holder-continuity";
    std::vector<std::pair<ModelPoint, ModelPoint>> pairs;
    for (double dist : {1e-3, 1e-4, 1e-5}) {
        for (int i = 0; i < 24; ++i) {
            double m = rng.uniform(0.3, 0.6);
            double ang = rng.uniform() * two_pi;
            std::vector<cplx> a{std::polar(m, ang), std::polar(m, wrap_angle(ang + 1.0))};
            std::vector<cplx> b = a;
            b[0] += std::polar(dist, rng.uniform() * two_pi);
            pairs.emplace_back(ModelPoint::from_cartesian(a), ModelPoint::from_cartesian(b));
        }
    }
    HolderProbeReport hr = eta_holder_probe(cfg.field, pairs, 0.0, std::log(0.05));
    agg.metrics = hr.report.metrics;
    agg.checks = hr.report.checks;
    for (const auto& c : agg.checks)
        if (!c.pass) {
            agg.pass = false;
            ++agg.violations;
        }
    return agg;
}

inline VerifyReport run_op_jl(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("jl"));
    VerifyReport agg;
    agg.op = "jl";
    agg.anchor = "jl-preimage-count";
    // lattice refinement study around a known preimage
    SigmaLattice base = SigmaLattice::make(-8.0, 0.02, 400, 512);
    ModelPoint x0 = detail::random_point(rng, cfg.field.k(), -1.2, -0.6);
    std::vector<long> counts;
    for (int scale : {1, 2, 4}) {
        SigmaLattice lat = SigmaLattice::make(base.r_min_log, base.growth_log, base.n_rings,
                                              base.n_rays * scale);
        ModelPoint xv = cell_vertex(lat, cell_of(lat, x0));
        JMapResult target = j_map(cfg.field, lat, xv, 0, cfg.constants);
        if (target.left_polydisc || !target.vertex) continue;
        // lattice vertices around x0's cell
        CellIndex c0 = cell_of(lat, x0);
        std::vector<ModelPoint> sample;
        int w = 3;
        for (int dr1 = -w; dr1 <= w; ++dr1)
            for (int ds1 = -w; ds1 <= w; ++ds1)
                for (int dr2 = -w; dr2 <= w; ++dr2)
                    for (int ds2 = -w; ds2 <= w; ++ds2) {
                        CellIndex ci = c0;
                        ci.coords[0].ring += dr1;
                        ci.coords[0].sector = (ci.coords[0].sector + ds1 + lat.n_rays) % lat.n_rays;
                        ci.coords[1].ring += dr2;
                        ci.coords[1].sector = (ci.coords[1].sector + ds2 + lat.n_rays) % lat.n_rays;
                        sample.push_back(cell_vertex(lat, ci));
                    }
        PreimageCount pc =
            preimage_count(cfg.field, lat, *target.vertex, 0, sample, cfg.constants);
        counts.push_back(pc.count);
    }
    if (counts.size() == 3) {
        long mx = std::max({counts[0], counts[1], counts[2]});
        long mn = std::min({counts[0], counts[1], counts[2]});
        agg.metric("m_hat", static_cast<double>(mx));
        agg.metric("count_1x", static_cast<double>(counts[0]));
        agg.metric("count_2x", static_cast<double>(counts[1]));
        agg.metric("count_4x", static_cast<double>(counts[2]));
        agg.check("refinement-stable", mn > 0 && mx <= 4 * mn, static_cast<double>(mx),
                  static_cast<double>(4 * mn));
    } else {
        agg.check("refinement-study-ran", false, static_cast<double>(counts.size()), 3.0);
    }
    return agg;
}

inline VerifyReport run_op_plaque(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("plaque"));
    VerifyReport agg;
    agg.op = "plaque";
    agg.anchor = "plaque-intersection";
    double g = cfg.raw.get_double("plaque.growth_log", 1e-3);
    double gamma_hat = 0.0;
    int n = static_cast<int>(cfg.raw.get_int("verify.points", 32));
    for (int i = 0; i < n; ++i) {
        ModelPoint z = detail::random_point(rng, cfg.field.k(), -1.5, -0.3);
        LogPolar target{z.coords[0]->log_mod + rng.uniform(-g, g),
                        wrap_angle(z.coords[0]->arg + rng.uniform(-g, g))};
        PlaqueIntersection pi =
            plaque_intersect(cfg.field, z, target, cfg.constants.eps0 / cfg.field.lambda_star);
        gamma_hat = std::max(gamma_hat, plaque_gamma_hat(pi, g));
    }
    agg.metric("gamma_hat", gamma_hat);
    agg.check("gamma-hat-finite", std::isfinite(gamma_hat), gamma_hat, 0.0);
    return agg;
}

inline VerifyReport run_op_projE(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("projE"));
    VerifyReport agg;
    agg.op = "projE";
    agg.anchor = "global-projection-c0";
    double jitter = cfg.raw.get_double("proj.ratio_jitter", 1e-8);
    int n_probes = static_cast<int>(cfg.raw.get_int("proj.probes", 100));
    ModelPoint x = detail::random_point(rng, cfg.field.k(), -1.4, -0.6);
    std::vector<Coord> yc = x.coords;
    for (auto& c : yc) c->log_mod += rng.uniform(-jitter, jitter);
    ModelPoint y = ModelPoint::from_coords(std::move(yc));
    LeafChart chart = build_leaf_chart(cfg.field, x);
    BallSample ball = hyperbolic_ball_sample(chart, 1.0, n_probes, rng.next());
    std::vector<cplx> probes;
    for (const auto& zeta : ball.points)
        if (leaf_eval(cfg.field, x, zeta).norm1_log < std::log(0.75)) probes.push_back(zeta);
    GlobalProjection gp = global_projection(cfg.field, x, y, probes);
    agg.metric("probes", static_cast<double>(probes.size()));
    agg.metric("c0_deviation", gp.report.c0_deviation);
    if (gp.report.c2_deviation) agg.metric("c2_deviation", *gp.report.c2_deviation);
    agg.metric("overlap_disagreement", gp.report.max_overlap_disagreement);
    agg.check("c0-within-10x-ratio", gp.report.c0_bound_pass, gp.report.c0_deviation,
              10.0 * jitter);
    agg.check_le("overlap-consistency", gp.report.max_overlap_disagreement, 1e-10);
    agg.check("all-probes-converged", gp.report.failed_probes == 0,
              static_cast<double>(gp.report.failed_probes), 0.0);
    return agg;
}

inline VerifyReport run_op_projHol(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("projHol"));
    VerifyReport agg;
    agg.op = "projHol";
    agg.anchor = "blended-map-holomorphic";
    double jitter = cfg.raw.get_double("proj.ratio_jitter", 1e-8);
    ModelPoint x = detail::random_point(rng, cfg.field.k(), -1.1, -0.8);
    std::vector<Coord> yc = x.coords;
    for (auto& c : yc) c->log_mod += rng.uniform(-jitter, jitter);
    ModelPoint y = ModelPoint::from_coords(std::move(yc));
    BlendCutoff cutoff = BlendCutoff::make(std::log(0.25), std::log(0.5));
    LeafChart chart = build_leaf_chart(cfg.field, x);
    CoveringMap2D tau(chart);
    double max_resid = 0.0, max_chi = 0.0, min_chi = 1.0;
    int n = static_cast<int>(cfg.raw.get_int("proj.probes", 64));
    SplitMix64 prng(rng.next());
    auto xis = hyperbolic_uniform_disc(2.0, n, prng);
    long mid_zone = 0;
    for (const auto& xi : xis) {
        BlendedMapResult bm = blended_map(cfg.field, x, y, cutoff, tau.map(xi));
        max_resid = std::max(max_resid, bm.leaf_criterion_residual);
        max_chi = std::max(max_chi, bm.chi);
        min_chi = std::min(min_chi, bm.chi);
        if (bm.chi > 0.0 && bm.chi < 1.0) ++mid_zone;
    }
    agg.metric("probes", static_cast<double>(xis.size()));
    agg.metric("mid_zone_probes", static_cast<double>(mid_zone));
    agg.metric("leaf_criterion_residual", max_resid);
    agg.check_le("leaf-criterion-residual", max_resid, 1e-8);
    return agg;
}

inline VerifyReport run_op_chain(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("chain"));
    VerifyReport agg;
    agg.op = "chain";
    agg.anchor = "chain-projection-contraction";
    int n_pairs = static_cast<int>(cfg.raw.get_int("chain.pairs", 20));
    double offset = cfg.raw.get_double("chain.offset", 1e-9);
    std::vector<double> kappas;
    long completed = 0;
    for (int i = 0; i < n_pairs; ++i) {
        ModelPoint x = detail::random_point(rng, cfg.field.k(), -1.2, -0.5);
        std::vector<Coord> yc = x.coords;
        for (auto& c : yc) c->log_mod += rng.uniform(-offset, offset);
        ModelPoint y = ModelPoint::from_coords(std::move(yc));
        cplx xi_target = std::polar(disc_radius(1.0), rng.uniform() * two_pi);
        try {
            ChainReport cr =
                chain_project(cfg.field, x, y, xi_target, cfg.constants.eps1, cfg.constants);
            if (cr.completed) ++completed;
            if (cr.kappa_hat > 0.0) kappas.push_back(cr.kappa_hat);
        } catch (const ChainBroken&) {
            ++agg.violations;
        }
    }
    std::sort(kappas.begin(), kappas.end());
    double median = kappas.empty() ? 0.0 : kappas[kappas.size() / 2];
    agg.metric("pairs", n_pairs);
    agg.metric("completed", static_cast<double>(completed));
    agg.metric("kappa_hat", median);
    agg.check("all-chains-complete", completed == n_pairs, static_cast<double>(completed),
              static_cast<double>(n_pairs));
    return agg;
}

inline VerifyReport run_op_disccount(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("disccount"));
    VerifyReport agg;
    agg.op = "disccount";
    agg.anchor = "disc-refinement-200";
    int instances = static_cast<int>(cfg.raw.get_int("refine.instances", 20));
    long worst_count = 0;
    for (int inst = 0; inst < instances; ++inst) {
        int npts = 10 + static_cast<int>(rng.uniform() * 40);
        std::vector<cplx> K;
        for (int i = 0; i < npts; ++i)
            K.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        int n_cov = 1 + static_cast<int>(rng.uniform() * 3.0);
        int M = 50;
        std::vector<std::vector<Disc>> covs;
        for (int c = 0; c < n_cov; ++c) {
            std::vector<Disc> discs;
            std::vector<bool> covered(K.size(), false);
            while (true) {
                int uncovered = -1;
                for (std::size_t i = 0; i < K.size(); ++i)
                    if (!covered[i]) {
                        uncovered = static_cast<int>(i);
                        break;
                    }
                if (uncovered < 0) break;
                Disc d{K[static_cast<std::size_t>(uncovered)] +
                           cplx(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)),
                       rng.uniform(0.1, 0.6)};
                discs.push_back(d);
                for (std::size_t i = 0; i < K.size(); ++i)
                    if (d.contains(K[i])) covered[i] = true;
                if (static_cast<int>(discs.size()) >= M) break;
            }
            covs.push_back(std::move(discs));
        }
        try {
            RefinementResult r = refine(K, covs, M);
            verify_refinement(K, covs, M, r);
            worst_count = std::max(worst_count, static_cast<long>(r.discs.size()));
        } catch (const Error&) {
            ++agg.violations;
        }
    }
    agg.metric("instances", instances);
    agg.metric("worst_count", static_cast<double>(worst_count));
    agg.check("all-instances-verified", agg.violations == 0, static_cast<double>(agg.violations),
              0.0);
    return agg;
}

inline VerifyReport run_op_coverD(const ExperimentConfig& cfg) {
    VerifyReport agg;
    agg.op = "coverD";
    agg.anchor = "sector-disc-cover";
    int m1 = static_cast<int>(cfg.raw.get_int("cover.m1", 5));
    double hbar = cfg.raw.get_double("cover.hbar", 0.01);
    int n_samples = static_cast<int>(cfg.raw.get_int("cover.samples", 100000));
    std::vector<cplx> xi;
    for (int j = 0; j < 40 * m1; ++j) {
        double ang = (j + 0.5) * two_pi / (40.0 * m1);
        xi.push_back(std::polar(disc_radius(0.5 * (3.0 + m1) * hbar), ang));
    }
    long total_violations = 0;
    for (int m = 2 * m1; m <= 4 * m1; m += 2) {
        CoverCheckReport cc = sector_cover_check(m, m1, hbar, xi, n_samples, cfg.seed + m);
        total_violations += cc.violations;
    }
    // negative control: drop one sector point
    std::vector<cplx> xi_missing = xi;
    xi_missing[7] = xi[6];
    long control = 0;
    try {
        know_control:;
        CoverCheckReport cc = sector_cover_check(2 * m1, m1, hbar, xi_missing, n_samples, cfg.seed);
        control = cc.violations;
    } catch (const BadSectorAssignment&) {
        control = 1; // the dropped sector is itself detected
    }
    agg.violations = total_violations;
    agg.metric("violations", static_cast<double>(total_violations));
    agg.metric("negative_control_violations", static_cast<double>(control));
    agg.check("cover-violations", total_violations == 0, static_cast<double>(total_violations),
              0.0);
    agg.check("negative-control-detects", control > 0, static_cast<double>(control), 1.0);
    return agg;
}

inline VerifyReport run_op_gamma(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("gamma"));
    VerifyReport agg;
    ModelPoint x = detail::random_point(rng, cfg.field.k(), -1.2, -0.6);
    GammaReport gr = verify_gamma(cfg.field, x, cfg.constants.t, cfg.constants,
                                  static_cast<int>(cfg.raw.get_int("gamma.dense", 4096)),
                                  static_cast<int>(cfg.raw.get_int("gamma.arcs", 512)));
    agg = gr.report;
    return agg;
}

inline VerifyReport run_op_tree(const ExperimentConfig& cfg) {
    SplitMix64 rng(cfg.seed ^ detail::op_tag("tree"));
    VerifyReport agg;
    agg.op = "tree";
    agg.anchor = "discrete-leaf-containment";
    ModelPoint x = detail::random_point(rng, cfg.field.k(), -1.0, -0.5);
    std::vector<std::int64_t> dirs;
    for (int i = 0; i < 4; ++i) dirs.push_back(i * (cfg.constants.p / 4));
    BranchOracle oracle = local_model_oracle(cfg.field, x, dirs, cfg.constants);
    LeafTree tree = build_tree(cplx(0.0, 0.0), oracle, 3, cfg.constants.p);
    DiscreteLeafReport dr =
        verify_discrete_leaf(tree, cfg.constants.m1, cfg.constants.hbar, cfg.constants.p,
                             static_cast<int>(cfg.raw.get_int("tree.samples", 2000)), rng.next());
    agg.violations = dr.containment_violations;
    agg.metric("vertices", static_cast<double>(tree.verts.size()));
    agg.metric("max_level_radius", dr.max_level_radius);
    agg.metric("max_edge_length", dr.max_edge_length);
    agg.check("level-containment", dr.containment_violations == 0,
              static_cast<double>(dr.containment_violations), 0.0);
    return agg;
}

// ---------------------------------------------------------------------------

inline Report run_experiment(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.config_canonical = cfg.raw.canonical();
    rep.config_hash = cfg.hash();
    rep.seed = cfg.seed;
    for (const auto& op : cfg.ops) {
        if (op == "model") rep.ops.push_back(run_op_model(cfg));
        else if (op == "metric") rep.ops.push_back(run_op_metric(cfg));
        else if (op == "entropy") rep.ops.push_back(run_op_entropy(cfg, rep.entropy_rows));
        else if (op == "3R") rep.ops.push_back(run_op_3R(cfg));
        else if (op == "flatten") rep.ops.push_back(run_op_flatten(cfg));
        else if (op == "near0") rep.ops.push_back(run_op_near0(cfg));
        else if (op == "cellclose") rep.ops.push_back(run_op_cellclose(cfg));
        else if (op == "escape") rep.ops.push_back(run_op_escape(cfg));
        else if (op == "holder") rep.ops.push_back(run_op_holder(cfg));
        else if (op == "jl") rep.ops.push_back(run_op_jl(cfg));
        else if (op == "plaque") rep.ops.push_back(run_op_plaque(cfg));
        else if (op == "projE") rep.ops.push_back(run_op_projE(cfg));
        else if (op == "projHol") rep.ops.push_back(run_op_projHol(cfg));
        else if (op == "chain") rep.ops.push_back(run_op_chain(cfg));
        else if (op == "disccount") rep.ops.push_back(run_op_disccount(cfg));
        else if (op == "coverD") rep.ops.push_back(run_op_coverD(cfg));
        else if (op == "gamma") rep.ops.push_back(run_op_gamma(cfg));
        else if (op == "tree") rep.ops.push_back(run_op_tree(cfg));
        else throw ConfigInvalid("unknown op in run.ops: " + op);
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization. The machine format is line-delimited JSON, one record per
// assertion, with no timing data so identical (config, seed) runs are
// byte-identical.
// ---------------------------------------------------------------------------

inline std::string machine_serialize(const Report& rep) {
    std::string out;
    nlohmann::ordered_json meta;
    meta["type"] = "meta";
    meta["config_hash"] = rep.config_hash;
    meta["seed"] = rep.seed;
    meta["version"] = rep.version;
    out += meta.dump() + "\n";
    for (const auto& op : rep.ops) {
        nlohmann::ordered_json j;
        j["type"] = "op";
        j["op"] = op.op;
        j["anchor"] = op.anchor.empty() ? "plumbing" : op.anchor;
        j["pass"] = op.pass;
        j["violations"] = op.violations;
        out += j.dump() + "\n";
        for (const auto& c : op.checks) {
            nlohmann::ordered_json jc;
            jc["type"] = "check";
            jc["op"] = op.op;
            jc["anchor"] = op.anchor.empty() ? "plumbing" : op.anchor;
            jc["name"] = c.name;
            jc["pass"] = c.pass;
            jc["value"] = c.value;
            jc["bound"] = c.bound;
            out += jc.dump() + "\n";
        }
        for (const auto& [k, v] : op.metrics) {
            nlohmann::ordered_json jm;
            jm["type"] = "metric";
            jm["op"] = op.op;
            jm["anchor"] = op.anchor.empty() ? "plumbing" : op.anchor;
            jm["name"] = k;
            jm["value"] = v;
            out += jm.dump() + "\n";
        }
    }
    for (const auto& row : rep.entropy_rows) {
        nlohmann::ordered_json je;
        je["type"] = "entropy";
        je["anchor"] = "local-entropy-bound";
        je["R"] = row.R;
        je["eps"] = row.eps;
        je["N"] = row.N;
        je["rate"] = row.rate;
        out += je.dump() + "\n";
    }
    return out;
}

inline std::string summary_text(const Report& rep) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "config_hash=%llu seed=%llu version=%s wall=%.3fs\n",
                  static_cast<unsigned long long>(rep.config_hash),
                  static_cast<unsigned long long>(rep.seed), rep.version.c_str(),
                  rep.wall_seconds);
    out += buf;
    for (const auto& op : rep.ops) {
        std::snprintf(buf, sizeof buf, "[%s] %s  %s  violations=%ld\n",
                      op.pass ? "PASS" : "FAIL", op.op.c_str(), op.anchor.c_str(), op.violations);
        out += buf;
        for (const auto& c : op.checks) {
            std::snprintf(buf, sizeof buf, "  %-40s %s  value=%.6g bound=%.6g\n", c.name.c_str(),
                          c.pass ? "ok" : "VIOLATED", c.value, c.bound);
            out += buf;
        }
    }
    if (!rep.entropy_rows.empty()) {
        out += "entropy table (R, eps, N, logN/R):\n";
        for (const auto& r : rep.entropy_rows) {
            std::snprintf(buf, sizeof buf, "  %-8.4g %-12.6g %-6ld %-10.6g\n", r.R, r.eps, r.N,
                          r.rate);
            out += buf;
        }
    }
    return out;
}

inline std::string render_table(const Report& rep, const std::string& selector) {
    char buf[256];
    std::string out;
    if (selector == "entropy") {
        out += "R\teps\tN\trate\n";
        for (const auto& r : rep.entropy_rows) {
            std::snprintf(buf, sizeof buf, "%.6g\t%.6g\t%ld\t%.6g\n", r.R, r.eps, r.N, r.rate);
            out += buf;
        }
        return out;
    }
    if (selector == "margins") {
        out += "op\tmin\tmedian\tmax\n";
        for (const auto& op : rep.ops) {
            std::vector<double> vals;
            for (const auto& c : op.checks) vals.push_back(c.value);
            if (vals.empty()) continue;
            std::sort(vals.begin(), vals.end());
            std::snprintf(buf, sizeof buf, "%s\t%.6g\t%.6g\t%.6g\n", op.op.c_str(), vals.front(),
                          vals[vals.size() / 2], vals.back());
            out += buf;
        }
        return out;
    }
    if (selector == "constants") {
        out += "op\tname\tvalue\n";
        for (const auto& op : rep.ops)
            for (const auto& [k, v] : op.metrics)
                if (k == "c2_hat" || k == "c3_hat" || k == "gamma_hat" || k == "kappa_hat" ||
                    k == "m_hat") {
                    std::snprintf(buf, sizeof buf, "%s\t%s\t%.10g\n", op.op.c_str(), k.c_str(), v);
                    out += buf;
                }
        return out;
    }
    throw UnknownSelector("unknown table selector: " + selector);
}

} // namespace lfm
