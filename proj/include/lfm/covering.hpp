#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lfm/constants.hpp"
#include "lfm/errors.hpp"
#include "lfm/hyperbolic.hpp"
#include "lfm/linear_model.hpp"
#include "lfm/report.hpp"
#include "lfm/rng.hpp"

namespace lfm {

struct Disc {
    cplx center;
    double radius;

    bool contains(cplx p) const { return std::abs(p - center) <= radius; }
    Disc doubled() const { return Disc{center, 2.0 * radius}; }
};

// 2D subset 2D' as an exact circle check: |c - c'| + 2r <= 2r'.
inline bool doubled_inside(const Disc& d, const Disc& witness) {
    return std::abs(d.center - witness.center) + 2.0 * d.radius <= 2.0 * witness.radius;
}

struct Covering {
    std::vector<cplx> target;
    std::vector<Disc> discs;

    void validate(int index_for_error = 0) const {
        for (const auto& p : target) {
            bool covered = false;
            for (const auto& d : discs)
                if (d.contains(p)) {
                    covered = true;
                    break;
                }
            if (!covered)
                throw NotACovering("covering misses a target point", index_for_error);
        }
    }
};

// ---------------------------------------------------------------------------
// Refinement: produce one covering finer than n input coverings, every output
// disc carrying one witness per input with the doubled disc contained in the
// witness's doubled disc. Output size stays under 200^n * M.
// ---------------------------------------------------------------------------

struct RefinementResult {
    std::vector<Disc> discs;
    std::vector<std::vector<Disc>> witnesses; // per output disc, one per input covering
};

namespace detail {

struct DiscKey {
    long long ix, iy;
    double rho;
    bool operator<(const DiscKey& o) const {
        if (ix != o.ix) return ix < o.ix;
        if (iy != o.iy) return iy < o.iy;
        return rho < o.rho;
    }
};

// Pairwise refinement. Two kinds of output discs:
//   kind 1: a disc of the second covering whose doubled disc already fits in a
//           doubled first-covering disc (checked directly, not via the radius
//           ratio, so the containment invariant is exact in floating point);
//   kind 2: lattice discs of radius min(r1, r2)/3 anchored at the chart
//           origin, meeting both discs and passing both containment checks.
// Every target point q in D1 cap D2 is caught by the lattice disc centered at
// the rounding of q, which passes all checks with margin >= 0.09 min(r1, r2),
// so dropping marginal lattice discs cannot break coverage. Per smaller disc
// at most 49 lattice discs survive deduplication, so the output stays below
// 99 M <= 200 M discs.
inline RefinementResult pair_refine(std::span<const cplx> K, const std::vector<Disc>& v1,
                                    const std::vector<std::vector<Disc>>& w1,
                                    const std::vector<Disc>& v2) {
    RefinementResult out;
    std::map<DiscKey, std::size_t> lattice_seen;
    std::vector<bool> kind1_emitted(v2.size(), false);

    for (std::size_t i = 0; i < v1.size(); ++i) {
        for (std::size_t j = 0; j < v2.size(); ++j) {
            const Disc& d1 = v1[i];
            const Disc& d2 = v2[j];
            double sep = std::abs(d1.center - d2.center);
            if (sep > d1.radius + d2.radius) continue;
            if (!kind1_emitted[j] && doubled_inside(d2, d1)) {
                kind1_emitted[j] = true;
                out.discs.push_back(d2);
                auto w = w1[i];
                w.push_back(d2);
                out.witnesses.push_back(std::move(w));
                continue;
            }
            double rho = std::min(d1.radius, d2.radius) / 3.0;
            const Disc& small = d1.radius <= d2.radius ? d1 : d2;
            auto lo_x = static_cast<long long>(std::floor((small.center.real() - small.radius - rho) / rho));
            auto hi_x = static_cast<long long>(std::ceil((small.center.real() + small.radius + rho) / rho));
            auto lo_y = static_cast<long long>(std::floor((small.center.imag() - small.radius - rho) / rho));
            auto hi_y = static_cast<long long>(std::ceil((small.center.imag() + small.radius + rho) / rho));
            for (long long ix = lo_x; ix <= hi_x; ++ix)
                for (long long iy = lo_y; iy <= hi_y; ++iy) {
                    cplx c(ix * rho, iy * rho);
                    Disc d{c, rho};
                    if (std::abs(c - d1.center) > rho + d1.radius) continue;
                    if (std::abs(c - d2.center) > rho + d2.radius) continue;
                    if (!doubled_inside(d, d1) || !doubled_inside(d, d2)) continue;
                    DiscKey key{ix, iy, rho};
                    if (lattice_seen.count(key)) continue;
                    lattice_seen[key] = out.discs.size();
                    out.discs.push_back(d);
                    auto w = w1[i];
                    w.push_back(d2);
                    out.witnesses.push_back(std::move(w));
                }
        }
    }
    (void)K;
    return out;
}

} // namespace detail

inline RefinementResult refine(std::span<const cplx> K,
                               std::span<const std::vector<Disc>> coverings, int M) {
    if (coverings.empty()) throw Error("refine needs at least one covering");
    for (std::size_t i = 0; i < coverings.size(); ++i) {
        if (static_cast<int>(coverings[i].size()) > M)
            throw NotACovering("covering exceeds the disc budget M", static_cast<int>(i));
        Covering c{std::vector<cplx>(K.begin(), K.end()), coverings[i]};
        c.validate(static_cast<int>(i));
    }
    RefinementResult acc;
    acc.discs = coverings[0];
    acc.witnesses.assign(acc.discs.size(), {});
    for (std::size_t i = 0; i < acc.discs.size(); ++i) acc.witnesses[i] = {acc.discs[i]};
    for (std::size_t n = 1; n < coverings.size(); ++n)
        acc = detail::pair_refine(K, acc.discs, acc.witnesses, coverings[n]);
    return acc;
}

// Exhaustive invariant check: count bound, exact doubled containments, coverage.
inline void verify_refinement(std::span<const cplx> K,
                              std::span<const std::vector<Disc>> coverings, int M,
                              const RefinementResult& r) {
    double bound = static_cast<double>(M);
    for (std::size_t i = 0; i < coverings.size(); ++i) bound *= 200.0;
    if (static_cast<double>(r.discs.size()) > bound)
        throw Error("refinement exceeded the 200^n M disc bound");
    for (std::size_t i = 0; i < r.discs.size(); ++i) {
        if (r.witnesses[i].size() != coverings.size())
            throw Error("refinement witness tuple has the wrong arity");
        for (const auto& w : r.witnesses[i])
            if (!doubled_inside(r.discs[i], w))
                throw Error("refinement doubled-containment violated");
    }
    for (const auto& p : K) {
        bool covered = false;
        for (const auto& d : r.discs)
            if (d.contains(p)) {
                covered = true;
                break;
            }
        if (!covered) throw Error("refinement output misses a target point");
    }
}

// ---------------------------------------------------------------------------
// Satellites: 100 discs of radius r/10 at distance 1.05 r around D'. Together
// with D' they cover (11/10) D', and each doubled satellite stays inside 2D'
// (1.05 r + 0.2 r = 1.25 r <= 2 r, exact arithmetic).
// ---------------------------------------------------------------------------

inline std::vector<Disc> satellites(const Disc& d) {
    if (!(d.radius > 0.0)) throw Error("satellites need a positive radius");
    std::vector<Disc> out;
    out.reserve(100);
    for (int n = 0; n < 100; ++n) {
        double ang = two_pi * n / 100.0;
        out.push_back(Disc{d.center + std::polar(1.05 * d.radius, ang), d.radius / 10.0});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quasi-roundness: candidate D' with samples of the image set; true when every
// sample fits in (11/10) D' and a grid of D' lies inside the sample hull.
// ---------------------------------------------------------------------------

struct QuasiRoundResult {
    bool quasi_round = false;
    double outer_margin = 0.0; // min over samples of 1.1 r - |s - c|
    double inner_margin = 0.0; // min signed hull distance over the D' grid
};

namespace detail {

inline std::vector<cplx> convex_hull(std::vector<cplx> pts) {
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](cplx o, cplx a, cplx b) {
        return (std::conj(a - o) * (b - o)).imag();
    };
    std::vector<cplx> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (auto it = pts.rbegin() + 1, t = pts.rend(); it != t; ++it) {
        std::size_t low = k + 1;
        while (k >= low && cross(h[k - 2], h[k - 1], *it) <= 0) --k;
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h;
}

// signed distance to the hull boundary: positive inside
inline double hull_signed_distance(const std::vector<cplx>& hull, cplx p) {
    if (hull.size() < 3) return -std::abs(p - (hull.empty() ? cplx(0) : hull[0]));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        cplx a = hull[i], b = hull[(i + 1) % hull.size()];
        cplx ab = b - a;
        double side = (std::conj(ab) * (p - a)).imag() / std::abs(ab);
        best = std::min(best, side);
    }
    return best;
}

} // namespace detail

inline QuasiRoundResult quasi_round_check(std::span<const cplx> image_samples,
                                          const Disc& candidate, int grid_n = 24) {
    QuasiRoundResult out;
    out.outer_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : image_samples)
        out.outer_margin = std::min(out.outer_margin,
                                    1.1 * candidate.radius - std::abs(s - candidate.center));
    auto hull = detail::convex_hull(std::vector<cplx>(image_samples.begin(), image_samples.end()));
    out.inner_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            cplx p = candidate.center +
                     cplx((2.0 * i / (grid_n - 1) - 1.0), (2.0 * j / (grid_n - 1) - 1.0)) *
                         candidate.radius;
            if (std::abs(p - candidate.center) > candidate.radius) continue;
            out.inner_margin = std::min(out.inner_margin, detail::hull_signed_distance(hull, p));
        }
    out.quasi_round = out.outer_margin >= 0.0 && out.inner_margin >= 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Hyperbolic disc-cover checks on the Poincare disc.
// ---------------------------------------------------------------------------

struct CoverCheckReport {
    VerifyReport report;
    long violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    std::vector<cplx> violating_samples; // capped
};

// Sector mode: D(0, (m-1) hbar) and one D(xi_j, (m-2) hbar) per sector of the
// annulus D_{m1 hbar} \ D_{3 hbar} (40 m1 sectors) must cover D_{m hbar},
// m >= 2 m1.
inline CoverCheckReport sector_cover_check(int m, int m1, double hbar,
                                           std::span<const cplx> sector_points, int n_samples,
                                           std::uint64_t seed) {
    if (static_cast<int>(sector_points.size()) != 40 * m1)
        throw BadSectorAssignment("expected one point per sector: 40*m1 points");
    double step = two_pi / (40.0 * m1);
    for (int j = 0; j < 40 * m1; ++j) {
        cplx xi = sector_points[j];
        double rho = disc_distance(cplx(0.0, 0.0), xi);
        if (!(rho >= 3.0 * hbar && rho <= m1 * hbar))
            throw BadSectorAssignment("sector point outside the annulus D_{m1 hbar} \\ D_{3 hbar}");
        double ang = wrap_angle(std::arg(xi));
        if (!(ang >= j * step - 1e-12 && ang <= (j + 1) * step + 1e-12))
            throw BadSectorAssignment("sector point lies in the wrong angular sector");
    }
    CoverCheckReport out;
    out.report.op = "coverD";
    out.report.anchor = "sector-disc-cover";
    SplitMix64 rng(seed);
    auto samples = hyperbolic_uniform_disc(m * hbar, n_samples, rng);
    for (const auto& s : samples) {
        double slack = (m - 1) * hbar - disc_distance(cplx(0.0, 0.0), s);
        for (const auto& xi : sector_points) {
            if (slack >= 0.0) break;
            slack = std::max(slack, (m - 2) * hbar - disc_distance(xi, s));
        }
        out.min_slack = std::min(out.min_slack, slack);
        if (slack < 0.0) {
            ++out.violations;
            if (out.violating_samples.size() < 16) out.violating_samples.push_back(s);
        }
    }
    out.report.violations = out.violations;
    out.report.metric("m", m);
    out.report.metric("samples", n_samples);
    out.report.metric("min_slack", out.min_slack);
    out.report.check("cover-violations", out.violations == 0, static_cast<double>(out.violations),
                     0.0);
    return out;
}

inline double polyline_winding(std::span<const cplx> gamma, cplx around) {
    double total = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        cplx a = gamma[i] - around;
        cplx b = gamma[(i + 1) % gamma.size()] - around;
        total += std::arg(b / a);
    }
    return total / two_pi;
}

// Gamma mode: a closed curve in the annulus D_{m1 hbar} \ D_{4 hbar} whose p
// arcs are short; the discs D(0, (m-1) hbar) and D(xi'_j, (m-1) hbar) at the
// perturbed arc endpoints must cover D_{m hbar}.
inline CoverCheckReport gamma_cover_check(int m, int m1, double hbar,
                                          std::span<const cplx> gamma,
                                          std::span<const cplx> arc_endpoints,
                                          std::span<const cplx> perturbed, int n_samples,
                                          std::uint64_t seed) {
    if (arc_endpoints.size() != perturbed.size())
        throw BadSectorAssignment("arc endpoints and perturbed points must pair up");
    for (const auto& g : gamma) {
        double rho = disc_distance(cplx(0.0, 0.0), g);
        if (!(rho > 4.0 * hbar && rho < m1 * hbar))
            throw BadSectorAssignment("gamma leaves the annulus D_{m1 hbar} \\ D_{4 hbar}");
    }
    if (std::abs(polyline_winding(gamma, cplx(0.0, 0.0))) < 0.5)
        throw WindingCheckFailed("0 lies in the unbounded component of the gamma complement");
    double tol = hbar / (static_cast<double>(m1) * m1);
    for (std::size_t j = 0; j < arc_endpoints.size(); ++j)
        if (!(disc_distance(arc_endpoints[j], perturbed[j]) <= tol + 1e-12))
            throw BadSectorAssignment("perturbed point strays farther than m1^{-2} hbar");

    CoverCheckReport out;
    out.report.op = "coverD";
    out.report.anchor = "gamma-disc-cover";
    SplitMix64 rng(seed);
    auto samples = hyperbolic_uniform_disc(m * hbar, n_samples, rng);
    for (const auto& s : samples) {
        double slack = (m - 1) * hbar - disc_distance(cplx(0.0, 0.0), s);
        for (const auto& xi : perturbed) {
            if (slack >= 0.0) break;
            slack = std::max(slack, (m - 1) * hbar - disc_distance(xi, s));
        }
        out.min_slack = std::min(out.min_slack, slack);
        if (slack < 0.0) {
            ++out.violations;
            if (out.violating_samples.size() < 16) out.violating_samples.push_back(s);
        }
    }
    out.report.violations = out.violations;
    out.report.metric("m", m);
    out.report.metric("samples", n_samples);
    out.report.metric("min_slack", out.min_slack);
    out.report.check("cover-violations", out.violations == 0, static_cast<double>(out.violations),
                     0.0);
    return out;
}

// ---------------------------------------------------------------------------
// The curve Gamma of a model point: image under the inverse covering map of
// the circle |zeta| = -t log|x|_1, with its p arc endpoints.
// ---------------------------------------------------------------------------

struct GammaReport {
    VerifyReport report;
    double inner_margin = 0.0;  // min dist_P(gamma) - 4 hbar
    double outer_margin = 0.0;  // m1 hbar - max dist_P(gamma)
    double max_arc_length = 0.0;
    long arcs_checked = 0;
};

inline GammaReport verify_gamma(const LinearVectorField& field, const ModelPoint& x, double t,
                                const PaperConstants& constants, int n_dense = 4096,
                                int max_arcs = 2048) {
    LeafChart chart = build_leaf_chart(field, x);
    CoveringMap2D tau(chart); // throws ShapeUnavailable beyond two constraints
    GammaReport out;
    out.report.op = "gamma";
    out.report.anchor = "gamma-curve-containment";
    double radius = -t * x.norm1_log;
    if (!chart.contains(std::polar(radius, 0.0)))
        throw PreconditionViolated("the circle |zeta| = -t log|x|_1 leaves the chart");

    double min_rho = std::numeric_limits<double>::infinity(), max_rho = 0.0;
    for (int i = 0; i < n_dense; ++i) {
        cplx zeta = std::polar(radius, two_pi * i / n_dense);
        double rho = disc_distance(cplx(0.0, 0.0), tau.inverse(zeta));
        min_rho = std::min(min_rho, rho);
        max_rho = std::max(max_rho, rho);
    }
    out.inner_margin = min_rho - 4.0 * constants.hbar;
    out.outer_margin = constants.m1 * constants.hbar - max_rho;

    // arc lengths: the p = m1^4 arcs are sampled (p is astronomically large at
    // paper constants); each sampled arc is subdivided 8- and 16-fold and the
    // chord sums Richardson-extrapolated.
    long stride = std::max<std::int64_t>(1, constants.p / max_arcs);
    double arc_tol = constants.hbar / (static_cast<double>(constants.m1) * constants.m1);
    for (std::int64_t l = 0; l < constants.p; l += stride) {
        auto chord_sum = [&](int pieces) {
            double sum = 0.0;
            cplx prev = tau.inverse(std::polar(radius, two_pi * static_cast<double>(l) /
                                                           static_cast<double>(constants.p)));
            for (int q = 1; q <= pieces; ++q) {
                double ang = two_pi * (static_cast<double>(l) + static_cast<double>(q) / pieces) /
                             static_cast<double>(constants.p);
                cplx cur = tau.inverse(std::polar(radius, ang));
                sum += disc_distance(prev, cur);
                prev = cur;
            }
            return sum;
        };
        double s8 = chord_sum(8), s16 = chord_sum(16);
        double len = s16 + (s16 - s8) / 3.0;
        out.max_arc_length = std::max(out.max_arc_length, len);
        ++out.arcs_checked;
    }
    out.report.metric("p", static_cast<double>(constants.p));
    out.report.metric("arcs_checked", static_cast<double>(out.arcs_checked));
    out.report.metric("inner_margin", out.inner_margin);
    out.report.metric("outer_margin", out.outer_margin);
    out.report.metric("max_arc_length", out.max_arc_length);
    out.report.check_ge("gamma-outside-4hbar", out.inner_margin, 0.0);
    out.report.check_ge("gamma-inside-m1hbar", out.outer_margin, 0.0);
    out.report.check_le("arc-poincare-length", out.max_arc_length, arc_tol);
    return out;
}

// ---------------------------------------------------------------------------
// Trees: F_D (disc labels) and F_x (disc-coordinate labels in D).
// ---------------------------------------------------------------------------

using TreeLabel = std::variant<Disc, cplx>;

struct LeafTree {
    struct Vertex {
        TreeLabel label;
        int parent; // -1 at the root
        int level;
    };
    std::vector<Vertex> verts;
    std::vector<std::vector<int>> levels;

    int root() const { return 0; }
    std::vector<int> children(int v) const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(verts.size()); ++i)
            if (verts[i].parent == v) out.push_back(i);
        return out;
    }
};

using BranchOracle = std::function<std::vector<TreeLabel>(const TreeLabel&, int level)>;

// Level-synchronous construction; the oracle yields at most p children per
// vertex, or none for exceptional vertices.
inline LeafTree build_tree(const TreeLabel& root, const BranchOracle& oracle, int depth,
                           std::int64_t p) {
    LeafTree t;
    t.verts.push_back(LeafTree::Vertex{root, -1, 0});
    t.levels.push_back({0});
    for (int m = 1; m <= depth; ++m) {
        std::vector<int> level;
        for (int v : t.levels[static_cast<std::size_t>(m - 1)]) {
            std::vector<TreeLabel> kids;
            try {
                kids = oracle(t.verts[static_cast<std::size_t>(v)].label, m);
            } catch (const std::exception& e) {
                throw OracleFailure("branching oracle failed at vertex " + std::to_string(v) +
                                    ": " + e.what());
            }
            if (static_cast<std::int64_t>(kids.size()) > p)
                throw OracleFailure("branching oracle returned more than p children");
            for (auto& k : kids) {
                level.push_back(static_cast<int>(t.verts.size()));
                t.verts.push_back(LeafTree::Vertex{std::move(k), v, m});
            }
        }
        t.levels.push_back(std::move(level));
    }
    return t;
}

// Branching oracle of the local model: from a disc coordinate xi on the leaf
// of x, displace along the given directions of the J-map family and pull the
// endpoints back through the covering map.
inline BranchOracle local_model_oracle(const LinearVectorField& field, const ModelPoint& x,
                                       std::vector<std::int64_t> directions,
                                       const PaperConstants& constants) {
    LeafChart chart = build_leaf_chart(field, x);
    auto tau = std::make_shared<CoveringMap2D>(chart);
    auto chart_ptr = std::make_shared<LeafChart>(chart);
    return [=, &field](const TreeLabel& label, int) -> std::vector<TreeLabel> {
        cplx xi = std::get<cplx>(label);
        cplx zeta = tau->map(xi);
        LeafSample z = leaf_eval(field, x, zeta);
        if (!z.inside_polydisc) return {};
        std::vector<TreeLabel> kids;
        for (std::int64_t l : directions) {
            double ang = two_pi * static_cast<double>(l) / static_cast<double>(constants.p);
            cplx dz = -constants.t * z.norm1_log * std::polar(1.0, ang);
            cplx target = zeta + dz;
            if (!chart_ptr->contains(target)) continue; // exceptional direction
            kids.push_back(tau->inverse(target));
        }
        return kids;
    };
}

struct DiscreteLeafReport {
    VerifyReport report;
    long containment_violations = 0;
    long cover_violations = 0;
    double max_level_radius = 0.0;
    double max_edge_length = 0.0;
};

// First assertion: level-m vertices stay in D_{m1 m hbar} (exact per-vertex
// check). Second: around every fully branched vertex, the discs of radius
// (m-1) hbar at the vertex and its children cover D(a, m hbar); checked by
// sampling for m in a small ladder above 2 m1.
inline DiscreteLeafReport verify_discrete_leaf(const LeafTree& tree, int m1, double hbar,
                                               std::int64_t p, int n_samples,
                                               std::uint64_t seed) {
    DiscreteLeafReport out;
    out.report.op = "tree";
    out.report.anchor = "discrete-leaf-containment";
    for (std::size_t lvl = 0; lvl < tree.levels.size(); ++lvl) {
        for (int v : tree.levels[lvl]) {
            const auto& vert = tree.verts[static_cast<std::size_t>(v)];
            cplx a = std::get<cplx>(vert.label);
            double rho = disc_distance(cplx(0.0, 0.0), a);
            out.max_level_radius = std::max(out.max_level_radius, rho);
            if (lvl > 0 && !(rho <= m1 * static_cast<double>(lvl) * hbar)) ++out.containment_violations;
            if (vert.parent >= 0) {
                cplx pa = std::get<cplx>(tree.verts[static_cast<std::size_t>(vert.parent)].label);
                out.max_edge_length = std::max(out.max_edge_length, disc_distance(pa, a));
            }
        }
    }
    SplitMix64 rng(seed);
    for (int v = 0; v < static_cast<int>(tree.verts.size()); ++v) {
        auto kids = tree.children(v);
        if (static_cast<std::int64_t>(kids.size()) != p) continue; // only fully branched vertices
        cplx a = std::get<cplx>(tree.verts[static_cast<std::size_t>(v)].label);
        for (int m : {2 * m1, 2 * m1 + 3, 4 * m1}) {
            auto local = hyperbolic_uniform_disc(m * hbar, n_samples, rng);
            for (const auto& off : local) {
                // recenter the sample at a by a disc automorphism
                cplx s = (off + a) / (1.0 + std::conj(a) * off);
                double slack = (m - 1) * hbar - disc_distance(a, s);
                for (int kid : kids) {
                    if (slack >= 0.0) break;
                    cplx b = std::get<cplx>(tree.verts[static_cast<std::size_t>(kid)].label);
                    slack = std::max(slack, (m - 1) * hbar - disc_distance(b, s));
                }
                if (slack < 0.0) ++out.cover_violations;
            }
        }
    }
    out.report.violations = out.containment_violations + out.cover_violations;
    out.report.metric("max_level_radius", out.max_level_radius);
    out.report.metric("max_edge_length", out.max_edge_length);
    out.report.check("level-containment", out.containment_violations == 0,
                     static_cast<double>(out.containment_violations), 0.0);
    out.report.check("child-disc-cover", out.cover_violations == 0,
                     static_cast<double>(out.cover_violations), 0.0);
    return out;
}

} // namespace lfm
