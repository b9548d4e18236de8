#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lfm/cells.hpp"
#include "lfm/constants.hpp"
#include "lfm/errors.hpp"
#include "lfm/hyperbolic.hpp"
#include "lfm/linear_model.hpp"
#include "lfm/projections.hpp"
#include "lfm/report.hpp"
#include "lfm/rng.hpp"

namespace lfm {

struct BowenParams {
    double R = 2.0;
    double epsilon = 0.1;
    int n_samples = 64;
    int n_rotations = 16;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_samples < 64) throw ConfigInvalid("bowen: n_samples must be >= 64");
        if (n_rotations < 16) throw ConfigInvalid("bowen: n_rotations must be >= 16");
        if (!(R > 0.0) || !(epsilon > 0.0)) throw ConfigInvalid("bowen: R, epsilon must be > 0");
    }
};

// True when all pairwise eigenvalue ratios are real rational within tol; the
// leaves are then annuli and rotation-only minimization misses deck moves.
inline bool annular_leaves(const LinearVectorField& field, double tol = 1e-12) {
    for (std::size_t i = 0; i + 1 < field.lambdas.size(); ++i) {
        cplx q = field.lambdas[i + 1] / field.lambdas[i];
        if (std::abs(q.imag()) > tol * std::abs(q)) return false;
        // continued-fraction rational test on the real part
        double v = std::abs(q.real());
        double a = v;
        long long pk = 1, pk1 = 0, qk = 0, qk1 = 1;
        bool rational = false;
        for (int it = 0; it < 64; ++it) {
            double fl = std::floor(a);
            if (fl > 1e15) break;
            long long ai = static_cast<long long>(fl);
            long long pn = ai * pk + pk1, qn = ai * qk + qk1;
            pk1 = pk; pk = pn; qk1 = qk; qk = qn;
            if (qk > 0 && std::abs(v - static_cast<double>(pk) / static_cast<double>(qk)) <= tol) {
                rational = true;
                break;
            }
            double frac = a - fl;
            if (frac < 1e-15) { rational = true; break; }
            a = 1.0 / frac;
            if (qk > 1000000) break;
        }
        if (!rational) return false;
    }
    return true;
}

struct BowenDistance {
    MetricBound bound;        // [estimate - rotation slack, estimate + fill resolution]
    double estimate = 0.0;    // min over rotations of the sampled sup
    double resolution = 0.0;  // fill-distance widening of the sup
    double rotation_slack = 0.0;
    double best_rotation = 0.0;
    cplx witness_xi = 0.0;    // sample achieving the sup at the best rotation
    bool annular_warning = false;
};

// Cached per-point data so net construction reuses the x-side images.
class BowenEvaluator {
public:
    struct PointData {
        ModelPoint x;
        LeafChart chart;
        CoveringMap2D map;
        std::vector<LeafSample> images; // phi-hat at the shared sample set
        double max_speed = 0.0;         // ambient speed per unit hyperbolic length
    };

    BowenEvaluator(const LinearVectorField& field, double R, const BowenParams& params)
        : field_(field), R_(R), params_(params) {
        params_.validate();
        samples_ = hyperbolic_spiral_disc(R, params.n_samples);
        fill_ = hyperbolic_fill_distance(R, static_cast<int>(samples_.size()));
        annular_ = annular_leaves(field);
    }

    const std::vector<cplx>& samples() const { return samples_; }
    bool annular() const { return annular_; }

    PointData prepare(const ModelPoint& x) const {
        LeafChart chart = build_leaf_chart(field_, x);
        PointData d{x, chart, CoveringMap2D(chart), {}, 0.0};
        d.images.reserve(samples_.size());
        for (const auto& xi : samples_) {
            LeafSample z = leaf_eval(field_, x, d.map.map(xi));
            d.max_speed = std::max(d.max_speed, speed_of(d, z, xi));
            d.images.push_back(std::move(z));
        }
        return d;
    }

    // ambient displacement per unit hyperbolic length at xi
    double speed_of(const PointData& d, const LeafSample& z, cplx xi) const {
        double n = 0.0;
        for (int j = 0; j < z.k(); ++j) {
            if (!z.coords[j]) continue;
            double m = std::abs(field_.lambdas[j]) * std::exp(z.coords[j]->log_mod);
            n += m * m;
        }
        return std::sqrt(n) * std::abs(d.map.derivative(xi)) * (1.0 - std::norm(xi)) / 2.0;
    }

    // sup over the sample set at rotation theta; aborts early past `abort_at`
    double sup_at(const PointData& a, const PointData& b, double theta, double abort_at,
                  cplx* witness = nullptr) const {
        double m = 0.0;
        cplx rot = std::polar(1.0, theta);
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            LeafSample bz = leaf_eval(field_, b.x, b.map.map(rot * samples_[i]));
            double d = ambient_distance(a.images[i], bz);
            if (d > m) {
                m = d;
                if (witness) *witness = samples_[i];
            }
            if (m > abort_at) return m;
        }
        return m;
    }

    // inf over rotations (grid, then golden-section) of the sampled sup. In
    // decision mode (close_shortcut > 0) the search stops as soon as some
    // rotation certifies sup + resolution <= close_shortcut, and the golden
    // refinement is skipped: callers only need the certified-close verdict.
    BowenDistance distance(const PointData& a, const PointData& b,
                           double close_shortcut = 0.0) const {
        BowenDistance out;
        out.annular_warning = annular_;
        double res = fill_ * (a.max_speed + b.max_speed);
        out.resolution = res;

        double best = std::numeric_limits<double>::infinity();
        double best_theta = 0.0;
        cplx best_witness = 0.0;
        const int K = params_.n_rotations;
        bool certified = false;
        for (int k = 0; k < K; ++k) {
            double theta = two_pi * k / K;
            cplx w;
            double g = sup_at(a, b, theta, best, &w);
            if (g < best) {
                best = g;
                best_theta = theta;
                best_witness = w;
            }
            if (close_shortcut > 0.0 && best + res <= close_shortcut) {
                certified = true;
                break;
            }
        }
        double bracket = two_pi / K;
        if (close_shortcut == 0.0 && !certified) {
            // golden-section refinement around the grid minimum
            const double gr = 0.61803398874989484820;
            double lo = best_theta - bracket, hi = best_theta + bracket;
            double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
            double fc = sup_at(a, b, c, std::numeric_limits<double>::infinity());
            double fd = sup_at(a, b, d, std::numeric_limits<double>::infinity());
            for (int it = 0; it < 25; ++it) {
                if (fc < fd) {
                    hi = d; d = c; fd = fc;
                    c = hi - gr * (hi - lo);
                    fc = sup_at(a, b, c, std::numeric_limits<double>::infinity());
                } else {
                    lo = c; c = d; fc = fd;
                    d = lo + gr * (hi - lo);
                    fd = sup_at(a, b, d, std::numeric_limits<double>::infinity());
                }
            }
            double mid = 0.5 * (lo + hi);
            cplx w;
            double g = sup_at(a, b, mid, std::numeric_limits<double>::infinity(), &w);
            if (g < best) {
                best = g;
                best_theta = mid;
                best_witness = w;
            }
            bracket = hi - lo;
        }
        double ltheta = b.max_speed * std::sinh(std::min(R_, 30.0));
        out.rotation_slack = ltheta * bracket;
        out.estimate = best;
        out.best_rotation = wrap_angle(best_theta);
        out.witness_xi = best_witness;
        out.bound = MetricBound{std::max(0.0, best - out.rotation_slack), best + res,
                                MetricBound::TwoSided};
        return out;
    }

private:
    const LinearVectorField& field_;
    double R_;
    BowenParams params_;
    std::vector<cplx> samples_;
    double fill_ = 0.0;
    bool annular_ = false;
};

inline BowenDistance bowen_distance(const LinearVectorField& field, const ModelPoint& x,
                                    const ModelPoint& y, double R, const BowenParams& params) {
    if (x.is_origin() || y.is_origin()) throw AllCoordinatesZero("bowen distance needs x, y != 0");
    BowenEvaluator ev(field, R, params);
    auto a = ev.prepare(x);
    auto b = ev.prepare(y);
    return ev.distance(a, b);
}

// ---------------------------------------------------------------------------
// Greedy separated sets and entropy tables.
// ---------------------------------------------------------------------------

struct SeparationCertificate {
    std::size_t i, j;   // indices into the retained sequence
    cplx witness_xi;    // sample where the best-rotation distance is attained
    double distance;    // sampled value there
    double resolution;
};

struct SeparatedSet {
    std::vector<std::size_t> kept; // indices into the input sample, scan order
    std::vector<ModelPoint> points;
    std::vector<SeparationCertificate> certificates;
    double resolution = 0.0;
    std::vector<long> rejected_by; // per input index: retained slot that absorbed it, else -1
};

// Certified-close verdict used by the greedy scan and by exhaustive oracles.
// The sup at xi = 0 equals the ambient |x - y| exactly and for every rotation,
// so ambient-far pairs are separated with a rigorous xi = 0 witness and no
// rotation search at all.
inline bool bowen_close(const BowenEvaluator& ev, const BowenEvaluator::PointData& a,
                        const BowenEvaluator::PointData& b, double eps,
                        SeparationCertificate* cert = nullptr, double* resolution = nullptr) {
    double amb = ambient_distance(LeafSample::of(a.x), LeafSample::of(b.x));
    if (amb > eps) {
        if (cert) *cert = SeparationCertificate{0, 0, cplx(0.0, 0.0), amb, 0.0};
        return false;
    }
    BowenDistance d = ev.distance(a, b, eps);
    if (resolution) *resolution = std::max(*resolution, d.resolution);
    if (d.bound.hi <= eps) return true;
    if (cert) *cert = SeparationCertificate{0, 0, d.witness_xi, d.estimate, d.resolution};
    return false;
}

// Greedy maximal subset in input order: a candidate is rejected exactly when
// some retained point is certifiably within eps (distance hi <= eps). Retained
// points are tested in order of ambient proximity to the candidate.
inline SeparatedSet separated_set(const LinearVectorField& field,
                                  std::span<const ModelPoint> sample, double R, double eps,
                                  const BowenParams& params) {
    BowenEvaluator ev(field, R, params);
    std::vector<BowenEvaluator::PointData> kept_data;
    SeparatedSet out;
    out.rejected_by.assign(sample.size(), -1);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        auto cand = ev.prepare(sample[i]);
        LeafSample cs = LeafSample::of(cand.x);
        std::vector<std::size_t> order(kept_data.size());
        for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
        std::vector<double> amb(kept_data.size());
        for (std::size_t r = 0; r < order.size(); ++r)
            amb[r] = ambient_distance(LeafSample::of(kept_data[r].x), cs);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t p, std::size_t q) { return amb[p] < amb[q]; });
        bool rejected = false;
        std::vector<SeparationCertificate> certs;
        for (std::size_t r : order) {
            SeparationCertificate cert;
            if (bowen_close(ev, kept_data[r], cand, eps, &cert, &out.resolution)) {
                out.rejected_by[i] = static_cast<long>(r);
                rejected = true;
                break;
            }
            cert.i = r;
            cert.j = out.kept.size();
            certs.push_back(cert);
        }
        if (!rejected) {
            out.kept.push_back(i);
            out.points.push_back(sample[i]);
            kept_data.push_back(std::move(cand));
            for (auto& c : certs) out.certificates.push_back(c);
        }
    }
    return out;
}

inline bool lexicographic_less(const ModelPoint& a, const ModelPoint& b) {
    if (a.k() != b.k()) return a.k() < b.k();
    for (int j = 0; j < a.k(); ++j) {
        bool az = !a.coords[j], bz = !b.coords[j];
        if (az != bz) return az;
        if (az) continue;
        if (a.coords[j]->log_mod != b.coords[j]->log_mod)
            return a.coords[j]->log_mod < b.coords[j]->log_mod;
        if (a.coords[j]->arg != b.coords[j]->arg) return a.coords[j]->arg < b.coords[j]->arg;
    }
    return false;
}

struct EntropyRow {
    double R;
    double eps;
    long N;
    double rate; // log(N) / R
};

inline std::vector<EntropyRow> entropy_estimate(const LinearVectorField& field,
                                                std::span<const ModelPoint> K,
                                                std::span<const double> R_list,
                                                std::span<const double> eps_list,
                                                const BowenParams& params) {
    if (R_list.empty() || eps_list.empty()) throw ConfigInvalid("entropy: empty R or eps list");
    std::vector<ModelPoint> pts(K.begin(), K.end());
    std::sort(pts.begin(), pts.end(), lexicographic_less);
    std::vector<EntropyRow> rows;
    for (double R : R_list)
        for (double eps : eps_list) {
            SeparatedSet s = separated_set(field, pts, R, eps, params);
            long N = static_cast<long>(s.kept.size());
            rows.push_back(EntropyRow{R, eps, N, std::log(static_cast<double>(N)) / R});
        }
    return rows;
}

// ---------------------------------------------------------------------------
// Lemma verification runs. Every report records the inputs it asserted and the
// sampled margins; scaled stand-ins are named alongside the paper forms.
// ---------------------------------------------------------------------------

inline VerifyReport verify_lemma_3R(const LinearVectorField& field, const ModelPoint& x,
                                    const PaperConstants& constants, int n, std::uint64_t seed,
                                    double rho = 0.75) {
    VerifyReport rep;
    rep.op = "3R";
    rep.anchor = "omega-7R-containment";
    if (!(x.norm1_log >= constants.alpha1_log && x.norm1_log <= std::log(rho)))
        throw PreconditionViolated("verify_lemma_3R needs alpha1 <= |x|_1 <= rho (log-space)");
    LeafChart chart = build_leaf_chart(field, x);
    RegionOmega omega{chart, constants.omega_margin(), constants.omega_cap()};
    BallSample ball = hyperbolic_ball_sample(chart, 7.0 * constants.R, n, seed);
    rep.margin_hist = Histogram::make(0.0, omega.cap, 32);
    long violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    double max_norm_log = neg_inf;
    for (const auto& zeta : ball.points) {
        double slack = omega_slack(omega, zeta);
        rep.margin_hist.add(slack);
        worst = std::min(worst, slack);
        if (!omega_membership(omega, zeta)) ++violations;
        max_norm_log = std::max(max_norm_log, leaf_eval(field, x, zeta).norm1_log);
    }
    rep.violations = violations;
    rep.pass = violations == 0;
    rep.metric("samples", static_cast<double>(ball.points.size()));
    rep.metric("min_slack", worst);
    rep.metric("omega_margin", omega.margin);
    rep.metric("omega_cap", omega.cap);
    rep.metric("rho_prime_log", -std::exp(-21.0 * constants.lambda * constants.R));
    rep.metric("max_image_norm1_log", max_norm_log);
    rep.check("omega-membership-violations", violations == 0, static_cast<double>(violations), 0.0);
    return rep;
}

struct FlatteningReport {
    VerifyReport report;
    BowenDistance flattened_distance;
};

inline FlatteningReport verify_flattening(const LinearVectorField& field, const ModelPoint& x,
                                          int m, const PaperConstants& constants,
                                          const BowenParams& params) {
    if (!(x.norm1_log > constants.alpha1_log))
        throw PreconditionViolated("verify_flattening needs |x|_1 > alpha1");
    for (int j = m; j < x.k(); ++j)
        if (x.coords[j] && !(x.coords[j]->log_mod <= std::log(2.0) + constants.alpha2_log))
            throw PreconditionViolated("verify_flattening needs |x_j| <= 2 alpha2 for j > m");

    FlatteningReport out;
    out.report.op = "flatten";
    out.report.anchor = "coordinate-flattening-3R";
    LeafChart chart = build_leaf_chart(field, x);
    BallSample ball = hyperbolic_ball_sample(chart, 7.0 * constants.R, params.n_samples, params.seed);
    long violations = 0;
    double max_tail = neg_inf;
    for (const auto& zeta : ball.points) {
        LeafSample s = leaf_eval(field, x, zeta);
        for (int j = m; j < x.k(); ++j) {
            if (!s.coords[j]) continue;
            max_tail = std::max(max_tail, s.coords[j]->log_mod);
            if (!(s.coords[j]->log_mod < -3.0 * constants.R)) ++violations;
        }
    }
    std::vector<Coord> flat = x.coords;
    for (int j = m; j < x.k(); ++j) flat[j] = std::nullopt;
    ModelPoint xprime = ModelPoint::from_coords(std::move(flat));
    out.flattened_distance = bowen_distance(field, x, xprime, constants.R, params);

    out.report.violations = violations;
    out.report.metric("samples", static_cast<double>(ball.points.size()));
    out.report.metric("max_tail_log_mod", max_tail);
    out.report.metric("bowen_hi", out.flattened_distance.bound.hi);
    out.report.check("tail-coordinates-below-e^-3R", violations == 0,
                     static_cast<double>(violations), 0.0);
    out.report.check_le("flattened-bowen-distance", out.flattened_distance.bound.hi,
                        std::exp(-2.0 * constants.R));
    return out;
}

struct NearZeroReport {
    VerifyReport report;
    BowenDistance distance;
};

inline NearZeroReport verify_near_zero(const LinearVectorField& field, const ModelPoint& x,
                                       const ModelPoint& y, const PaperConstants& constants,
                                       const BowenParams& params) {
    double bound = std::log(2.0) + constants.alpha1_log;
    if (!(x.norm1_log <= bound && y.norm1_log <= bound))
        throw PreconditionViolated("verify_near_zero needs |x|_1, |y|_1 <= 2 alpha1");
    NearZeroReport out;
    out.report.op = "near0";
    out.report.anchor = "near-origin-closeness";
    long violations = 0;
    double max_norm = neg_inf;
    for (const ModelPoint* p : {&x, &y}) {
        LeafChart chart = build_leaf_chart(field, *p);
        BallSample ball = hyperbolic_ball_sample(chart, constants.R, params.n_samples, params.seed);
        for (const auto& zeta : ball.points) {
            LeafSample s = leaf_eval(field, *p, zeta);
            max_norm = std::max(max_norm, s.norm1_log);
            if (!(s.norm1_log <= -2.0 * constants.R)) ++violations;
        }
    }
    out.distance = bowen_distance(field, x, y, constants.R, params);
    out.report.violations = violations;
    out.report.metric("max_image_norm1_log", max_norm);
    out.report.metric("bowen_hi", out.distance.bound.hi);
    out.report.check("images-inside-e^-2R-polydisc", violations == 0,
                     static_cast<double>(violations), 0.0);
    out.report.check_le("bowen-distance", out.distance.bound.hi, std::exp(-constants.R));
    return out;
}

struct CellCloseReport {
    VerifyReport report;
    BowenDistance distance;
    double psi_deviation = 0.0; // sup || Psi o phi-hat_x - phi-hat_x ||
};

// Clause check: per coordinate either (S1) both below alpha2, or (S2) both
// mutual ratio deviations below the tolerance. s2_tol = 0 uses the paper form
// e^{-22 lambda R} from the constants.
inline CellCloseReport verify_cell_closeness(const LinearVectorField& field, const ModelPoint& x,
                                             const ModelPoint& y, const PaperConstants& constants,
                                             const BowenParams& params, double s2_tol = 0.0) {
    double tol = s2_tol > 0.0 ? s2_tol : constants.s2_tolerance();
    bool all_nonzero = true;
    for (int j = 0; j < x.k(); ++j) {
        bool s1 = (!x.coords[j] || x.coords[j]->log_mod < constants.alpha2_log) &&
                  (!y.coords[j] || y.coords[j]->log_mod < constants.alpha2_log);
        bool s2 = false;
        if (x.coords[j] && y.coords[j]) {
            double d1 = ratio_deviation(*x.coords[j], *y.coords[j]);
            double d2 = ratio_deviation(*y.coords[j], *x.coords[j]);
            s2 = d1 < tol && d2 < tol;
        }
        if (!x.coords[j] || !y.coords[j]) all_nonzero = false;
        if (!s1 && !s2)
            throw ConditionUnmet("coordinate " + std::to_string(j + 1) +
                                 " satisfies neither closeness clause",
                                 j, x.coords[j] && y.coords[j] ? "S2" : "S1");
    }
    CellCloseReport out;
    out.report.op = "cellclose";
    out.report.anchor = "same-cell-closeness";
    out.report.metric("s2_tol_used", tol);
    out.report.metric("s2_tol_paper", constants.s2_tolerance());
    out.distance = bowen_distance(field, x, y, constants.R, params);
    if (all_nonzero) {
        LeafChart chart = build_leaf_chart(field, x);
        CoveringMap2D tau(chart);
        for (const auto& xi : hyperbolic_spiral_disc(constants.R, params.n_samples)) {
            LeafSample z = leaf_eval(field, x, tau.map(xi));
            out.psi_deviation = std::max(out.psi_deviation,
                                         ambient_distance(z, linear_leaf_map(x, y, z)));
        }
    }
    out.report.metric("bowen_hi", out.distance.bound.hi);
    out.report.metric("psi_deviation", out.psi_deviation);
    out.report.check_le("bowen-distance", out.distance.bound.hi, std::exp(-constants.R));
    return out;
}

// ---------------------------------------------------------------------------
// Escape-speed fits.
// ---------------------------------------------------------------------------

struct EscapeSpeedReport {
    VerifyReport report;
    double c2_hat = 0.0;      // speed mode: max |log(log|y|/log|x|)| / R
    double c3_hat = 0.0;      // depth mode: deepest-excursion exponent
    double min_depth_log = 0.0;
};

enum class EscapeMode { Speed, Depth };

inline EscapeSpeedReport verify_escape_speed(const LinearVectorField& field, const ModelPoint& x,
                                             EscapeMode mode, double R, int n,
                                             std::uint64_t /*seed: sampling is deterministic*/) {
    LeafChart chart = build_leaf_chart(field, x);
    CoveringMap2D tau(chart);
    EscapeSpeedReport out;
    out.report.op = "escape";
    out.report.anchor = mode == EscapeMode::Speed ? "escape-speed" : "escape-depth";

    std::vector<cplx> xis;
    if (mode == EscapeMode::Speed) {
        int m = n + (n % 2); // even, so both real boundary points are present
        xis = hyperbolic_circle(R, std::max(m, 8));
        if (std::holds_alternative<HalfPlaneShape>(*chart.shape2)) {
            // the normal extremes realize the exact speed; add their preimages
            const auto& h = std::get<HalfPlaneShape>(*chart.shape2);
            cplx nrm = std::conj(h.side.lambda) / std::abs(h.side.lambda);
            double chat = h.distance;
            xis.push_back(tau.inverse(-nrm * chat * std::expm1(R)));
            xis.push_back(tau.inverse(nrm * chat * (1.0 - std::exp(-R))));
        }
    } else {
        xis = hyperbolic_spiral_disc(R, n);
    }

    double max_exp = 0.0;
    double deepest = 0.0;
    for (const auto& xi : xis) {
        LeafSample ysm = leaf_eval(field, x, tau.map(xi));
        if (mode == EscapeMode::Speed) {
            double q = ysm.norm1_log / x.norm1_log;
            max_exp = std::max(max_exp, std::abs(std::log(q)) / R);
        } else {
            deepest = std::min(deepest, std::log(ambient_norm2(ysm)));
        }
    }
    if (mode == EscapeMode::Speed) {
        out.c2_hat = max_exp;
        out.report.metric("c2_hat", out.c2_hat);
        out.report.check("c2-finite", std::isfinite(out.c2_hat), out.c2_hat, 0.0);
    } else {
        out.min_depth_log = deepest;
        double s = ambient_norm2(LeafSample::of(x));
        out.c3_hat = std::log(std::max(-deepest, 1e-300) / log_star(s)) / R;
        out.report.metric("c3_hat", out.c3_hat);
        out.report.metric("min_depth_log", deepest);
        out.report.check("c3-finite", std::isfinite(out.c3_hat), out.c3_hat, 0.0);
    }
    out.report.metric("samples", static_cast<double>(xis.size()));
    return out;
}

// Explicit-path variant; throws PathLeavesChart when the path exits the chart.
inline EscapeSpeedReport verify_escape_speed(const LinearVectorField& field, const ModelPoint& x,
                                             std::span<const cplx> zeta_path) {
    LeafChart chart = build_leaf_chart(field, x);
    EscapeSpeedReport out;
    out.report.op = "escape";
    out.report.anchor = "escape-speed";
    double max_exp = 0.0;
    for (const auto& zeta : zeta_path) {
        if (!chart.contains(zeta)) throw PathLeavesChart("path point outside the leaf chart");
        if (zeta == cplx(0.0, 0.0)) continue;
        double dist = domain_distance_bounds(chart, cplx(0.0, 0.0), zeta).hi;
        LeafSample ysm = leaf_eval(field, x, zeta);
        double q = ysm.norm1_log / x.norm1_log;
        max_exp = std::max(max_exp, std::abs(std::log(q)) / dist);
    }
    out.c2_hat = max_exp;
    out.report.metric("c2_hat", out.c2_hat);
    out.report.check("c2-finite", std::isfinite(out.c2_hat), out.c2_hat, 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Holder-continuity probe for eta-hat away from the coordinate hyperplanes.
// ---------------------------------------------------------------------------

struct HolderProbeReport {
    VerifyReport report;
    double alpha = 0.0;
    double max_ratio = 0.0;
    std::vector<std::pair<double, double>> decade_max; // (log10 decade, max ratio)
    bool nonincreasing_trend = true;
};

inline HolderProbeReport eta_holder_probe(const LinearVectorField& field,
                                          std::span<const std::pair<ModelPoint, ModelPoint>> pairs,
                                          double alpha, double min_log_mod) {
    HolderProbeReport out;
    out.alpha = alpha > 0.0 ? alpha : 1.0 / (6.0 * field.lambda_star);
    out.report.op = "holder";
    out.report.anchor = "eta-holder-continuity";
    std::vector<std::pair<int, double>> buckets;
    for (const auto& [x, y] : pairs) {
        for (const ModelPoint* p : {&x, &y})
            for (const auto& c : p->coords)
                if (!c || c->log_mod < min_log_mod)
                    throw PairTooCloseToHyperplane("probe pair has a coordinate below the floor");
        double dist = ambient_distance(LeafSample::of(x), LeafSample::of(y));
        if (dist == 0.0) continue;
        MetricBound ex = eta_hat(field, x), ey = eta_hat(field, y);
        double dh = std::abs(0.5 * (ex.lo + ex.hi) - 0.5 * (ey.lo + ey.hi));
        double ratio = dh / std::pow(dist, out.alpha);
        out.max_ratio = std::max(out.max_ratio, ratio);
        int dec = static_cast<int>(std::floor(std::log10(dist)));
        bool found = false;
        for (auto& [d, m] : buckets)
            if (d == dec) {
                m = std::max(m, ratio);
                found = true;
            }
        if (!found) buckets.emplace_back(dec, ratio);
    }
    std::sort(buckets.begin(), buckets.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 1; i < buckets.size(); ++i)
        if (buckets[i].second > buckets[i - 1].second * 1.05) out.nonincreasing_trend = false;
    for (const auto& [d, m] : buckets) out.decade_max.emplace_back(d, m);
    out.report.metric("alpha", out.alpha);
    out.report.metric("max_ratio", out.max_ratio);
    out.report.check("ratio-finite", std::isfinite(out.max_ratio), out.max_ratio, 0.0);
    out.report.check("no-blowup-trend", out.nonincreasing_trend, out.max_ratio, 0.0);
    return out;
}

} // namespace lfm
