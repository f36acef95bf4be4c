#pragma once
// Randomized invariant checks shared by the test suite, the acceptance run and
// the `verify` command. Every check draws from one seeded generator.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wjn/closed_form.hpp"
#include "wjn/extremizer.hpp"
#include "wjn/oracle.hpp"
#include "wjn/piecewise.hpp"
#include "wjn/strip.hpp"

namespace wjn {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t default_seed = 20240607;

struct CheckResult {
    std::string name;
    std::size_t samples = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // largest violation seen
    double tolerance = 0.0;
    bool skipped = false;

    bool passed() const { return skipped || failures == 0; }

    void add(double violation) {
        ++samples;
        if (!(violation <= tolerance))
            ++failures;
        if (!(violation <= worst))
            worst = violation;  // NaN sticks
    }
};

inline CheckResult make_check(std::string name, double tol) {
    CheckResult c;
    c.name = std::move(name);
    c.tolerance = tol;
    return c;
}

// ---------------------------------------------------------------------------
// Samplers

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

inline double default_half_width(const Params& p) { return std::fabs(p.lambda) + 3.0 * p.eps; }

/// Uniform in x1 over [-w, w] and in normalized height over [y_lo, y_hi].
inline StripPoint random_strip_point(Rng& rng, const Params& p, double w, double y_lo = 0.0, double y_hi = 1.0) {
    return from_height(uniform(rng, -w, w), uniform(rng, y_lo, y_hi), p);
}

inline StripPoint random_strip_point(Rng& rng, const Params& p) {
    return random_strip_point(rng, p, default_half_width(p));
}

struct Chord {
    StripPoint a;
    StripPoint b;

    StripPoint midpoint() const { return {0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)}; }
};

/// A random segment contained in the closed strip: a random line through a
/// random point, cut at random fractions of its two exit distances.
inline Chord random_chord(Rng& rng, const Params& p, double w) {
    for (;;) {
        const StripPoint c = random_strip_point(rng, p, w);
        const double th = uniform(rng, 0.0, std::numbers::pi);
        const double d1 = std::cos(th), d2 = 2.0 * c.x1 * d1 + p.eps * std::sin(th);
        const double tp = exit_length(c, d1, d2, p);
        const double tm = exit_length(c, -d1, -d2, p);
        if (!(tp + tm > 0.0) || !std::isfinite(tp) || !std::isfinite(tm))
            continue;
        const double u = uniform(rng, 0.0, 1.0), v = uniform(rng, 0.0, 1.0);
        Chord ch{{c.x1 + u * tp * d1, c.x2 + u * tp * d2}, {c.x1 - v * tm * d1, c.x2 - v * tm * d2}};
        if (in_strip(ch.a, p) && in_strip(ch.b, p))
            return ch;
    }
}

/// Rejection sampler for points of the weak layout in region `index`, both signs of x1.
inline StripPoint random_point_in_weak_region(Rng& rng, const Params& p, int index, double y_lo = 0.0,
                                              double y_hi = 1.0) {
    const Regime rg = regime(p);
    // Region supports are contained in |x1| <= lambda + 2 eps except Omega1.
    const double w = p.lambda + 3.0 * p.eps;
    for (int tries = 0; tries < 10000000; ++tries) {
        const StripPoint x = random_strip_point(rng, p, w, y_lo, y_hi);
        if (detail::classify_weak_raw(x, p, rg).index == index)
            return x;
    }
    throw domain_error("region " + std::to_string(index) + " could not be sampled");
}

// ---------------------------------------------------------------------------
// Internal region boundaries

struct BoundaryPiece {
    std::string name;
    Region a;
    Region b;
    double s_lo = 0.0;
    double s_hi = 0.0;
    std::function<double(double)> curve;  // x2 as a function of |x1| (weak) or x1 (one-jump)
};

/// Internal boundaries of the weak layout on the side x1 >= 0.
inline std::vector<BoundaryPiece> weak_boundaries(const Params& p) {
    const double l = p.lambda, e = p.eps;
    std::vector<BoundaryPiece> out;
    auto R = [p](double s) { return right_line(s, p); };
    auto L = [p](double s) { return left_line(s, p); };
    auto reg = [](int i, Side sd, Layout lay) { return Region{i, sd, lay}; };
    constexpr Side C = Side::Center, P = Side::Plus;
    switch (regime(p)) {
    case Regime::Small: {
        if (l == 0.0)
            break;
        const Layout y = Layout::WeakSmall;
        out.push_back({"Omega1|Omega2", reg(1, C, y), reg(2, C, y), 0.0, l, [l](double) { return l * l; }});
        out.push_back({"Omega2|Omega3", reg(2, C, y), reg(3, P, y), 0.0, l, [l](double s) { return l * s; }});
        break;
    }
    case Regime::Medium: {
        const Layout y = Layout::WeakMedium;
        out.push_back({"Omega1|Omega2", reg(1, P, y), reg(2, P, y), l, l + e, R});
        out.push_back({"Omega2|Omega4", reg(2, P, y), reg(4, C, y), l - e, l, L});
        out.push_back({"Omega3|Omega4", reg(3, P, y), reg(4, C, y), 0.0, l, [l](double s) { return l * s; }});
        break;
    }
    case Regime::Large: {
        const Layout y = Layout::WeakLarge;
        out.push_back({"Omega1|Omega2", reg(1, P, y), reg(2, P, y), l, l + e, R});
        out.push_back({"Omega2|Omega3", reg(2, P, y), reg(3, P, y), l - e, l, L});
        out.push_back({"Omega3|Omega4", reg(3, P, y), reg(4, P, y), l - 2.0 * e, l - e, L});
        out.push_back({"Omega5|Omega4", reg(5, C, y), reg(4, P, y), 0.0, e, [e](double s) { return 2.0 * e * s; }});
        break;
    }
    }
    return out;
}

inline std::vector<BoundaryPiece> one_jump_boundaries(const Params& p) {
    const double l = p.lambda, e = p.eps;
    auto R = [p](double t) { return right_line(t, p); };
    auto L = [p](double t) { return left_line(t, p); };
    auto reg = [](int i) { return Region{i, Side::Center, Layout::OneJump}; };
    return {
        {"Omega1|Omega2", reg(1), reg(2), l + e, l + 2.0 * e, R},
        {"Omega2|Omega3", reg(2), reg(3), l, l + e, R},
        {"Omega3|Omega4", reg(3), reg(4), l - e, l, L},
        {"Omega4|Omega5", reg(4), reg(5), l - 2.0 * e, l - e, L},
    };
}

namespace detail {

inline Region mirrored(Region r) {
    if (r.side == Side::Plus)
        r.side = Side::Minus;
    return r;
}

// Midpoints of n equal cells of the parameter range.
inline double boundary_parameter(const BoundaryPiece& b, int k, int n) {
    return b.s_lo + (b.s_hi - b.s_lo) * (k + 0.5) / n;
}

inline double max_abs_diff(const Gradient& g, const Gradient& h) {
    return std::max(std::fabs(g.d1 - h.d1), std::fabs(g.d2 - h.d2));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checks

/// Every point gets a region of its layout, and the mirror point gets the same index.
inline CheckResult check_partition(const Params& p, int n, Rng& rng) {
    auto c = make_check("partition", 0.0);
    const int top = regime(p) == Regime::Small ? 3 : regime(p) == Regime::Medium ? 4 : 5;
    for (int k = 0; k < n; ++k) {
        const StripPoint x = random_strip_point(rng, p);
        const Region r = classify_weak(x, p);
        const Region m = classify_weak({-x.x1, x.x2}, p);
        bool ok = r.index >= 1 && r.index <= top && r.layout == weak_layout(regime(p)) && m.index == r.index;
        if (r.side != Side::Center && x.x1 != 0.0)
            ok = ok && (r.side == Side::Plus) == (x.x1 > 0.0);
        c.add(ok ? 0.0 : 1.0);
    }
    return c;
}

inline CheckResult check_range(const Params& p, int n, Rng& rng) {
    auto c = make_check("range", 0.0);
    for (int k = 0; k < n; ++k) {
        const StripPoint x = random_strip_point(rng, p);
        const double v = eval_b(x, p).value;
        c.add(std::isfinite(v) ? std::max({0.0, -v, v - 1.0}) : 1.0);
    }
    return c;
}

inline CheckResult check_symmetry(const Params& p, int n, Rng& rng) {
    auto c = make_check("symmetry", 0.0);
    for (int k = 0; k < n; ++k) {
        const StripPoint x = random_strip_point(rng, p);
        c.add(std::fabs(eval_b(x, p).value - eval_b({-x.x1, x.x2}, p).value));
    }
    return c;
}

/// Bmin(x1, x2; lambda) = 1 - Bmax(-x1, x2; -lambda) away from (lambda, lambda^2).
inline CheckResult check_reflection(const Params& p, int n, Rng& rng) {
    auto c = make_check("reflection", 1e-12);
    const Params q{-p.lambda, p.eps};
    const double w = default_half_width(p);
    while (c.samples < static_cast<std::size_t>(n)) {
        const StripPoint x = random_strip_point(rng, p, w);
        if (std::hypot(x.x1 - p.lambda, x.x2 - p.lambda * p.lambda) < 1e-9)
            continue;
        c.add(std::fabs(eval_bmin(x, p).value - (1.0 - eval_bmax({-x.x1, x.x2}, q).value)));
    }
    return c;
}

enum class BellmanKind { Weak, Max, Min };

inline double eval_kind(BellmanKind k, const StripPoint& x, const Params& p) {
    switch (k) {
    case BellmanKind::Weak: return eval_b(x, p).value;
    case BellmanKind::Max: return eval_bmax(x, p).value;
    case BellmanKind::Min: return eval_bmin(x, p).value;
    }
    return 0.0;
}

/// Midpoint concavity along random chords inside the strip (convexity for Bmin).
inline CheckResult check_midpoint_concavity(const Params& p, int n, Rng& rng, BellmanKind kind = BellmanKind::Weak) {
    const char* names[] = {"concavity_b", "concavity_bmax", "convexity_bmin"};
    auto c = make_check(names[static_cast<int>(kind)], 1e-10);
    const double w = default_half_width(p);
    for (int k = 0; k < n; ++k) {
        const Chord ch = random_chord(rng, p, w);
        const double mid = eval_kind(kind, ch.midpoint(), p);
        const double avg = 0.5 * (eval_kind(kind, ch.a, p) + eval_kind(kind, ch.b, p));
        c.add(kind == BellmanKind::Min ? mid - avg : avg - mid);
    }
    return c;
}

/// Analytic gradient against central differences with step h, relative to
/// max(|g|, 1e-3) per component, at points at least 1e-4 inside a region.
inline CheckResult check_gradient(const Params& p, int n, Rng& rng, BellmanKind kind = BellmanKind::Weak,
                                  double h = 1e-5) {
    auto c = make_check(kind == BellmanKind::Weak ? "gradient_b" : "gradient_bmax", 1e-5);
    const double w = default_half_width(p);
    while (c.samples < static_cast<std::size_t>(n)) {
        const StripPoint x = random_strip_point(rng, p, w, 0.02, 0.98);
        Gradient g;
        try {
            g = kind == BellmanKind::Weak ? grad_b(x, p, 1e-4) : grad_bmax(x, p, 1e-4);
        } catch (const domain_error&) {
            continue;
        }
        auto f = [&](double a, double b) { return eval_kind(kind, {a, b}, p); };
        const double fd1 = (f(x.x1 + h, x.x2) - f(x.x1 - h, x.x2)) / (2.0 * h);
        const double fd2 = (f(x.x1, x.x2 + h) - f(x.x1, x.x2 - h)) / (2.0 * h);
        const double e1 = std::fabs(g.d1 - fd1) / std::max(std::fabs(g.d1), 1e-3);
        const double e2 = std::fabs(g.d2 - fd2) / std::max(std::fabs(g.d2), 1e-3);
        c.add(std::max(e1, e2));
    }
    return c;
}

/// Largest Hessian eigenvalue, and |det| on the logarithmic region of the
/// large regime, at region-interior points off the two parabolas.
inline std::vector<CheckResult> check_hessian(const Params& p, int n, Rng& rng) {
    auto eig = make_check("hessian_eigenvalue", 1e-9);
    auto det = make_check("hessian_det_omega4", 1e-9);
    const double w = default_half_width(p);
    while (eig.samples < static_cast<std::size_t>(n)) {
        const StripPoint x = random_strip_point(rng, p, w, 1e-3, 1.0 - 1e-3);
        Hessian H;
        try {
            H = hessian_b(x, p, 1e-6);
        } catch (const domain_error&) {
            continue;
        }
        eig.add(H.max_eigenvalue());
        const Region r = classify_weak(x, p);
        if (r.layout == Layout::WeakLarge && r.index == 4)
            det.add(std::fabs(H.det()));
    }
    if (det.samples == 0)
        det.skipped = true;
    return {eig, det};
}

/// Continuity of the adjacent formulas on every internal boundary, checked on
/// the formulas themselves and on the dispatcher just above and below each
/// boundary point. For the large regime also C1 gluing across Omega5|Omega4
/// and Omega3|Omega4, and the sign of the x2-derivative across the
/// boundaries of Omega2 (negative inside, nonnegative outside).
inline std::vector<CheckResult> check_gluing(const Params& p, int n) {
    std::vector<CheckResult> out;
    const Regime rg = regime(p);
    for (const auto& b : weak_boundaries(p)) {
        auto val = make_check("continuity:" + b.name, 1e-8);
        const bool c1 = rg == Regime::Large && (b.name == "Omega5|Omega4" || b.name == "Omega3|Omega4");
        auto grad = make_check("c1:" + b.name, 1e-6);
        const bool omega2 = rg != Regime::Small && (b.a.index == 2 || b.b.index == 2);
        auto sign = make_check("bx2_sign:" + b.name, 1e-12);
        for (int k = 0; k < n; ++k) {
            const double s = detail::boundary_parameter(b, k, n);
            for (double sg : {1.0, -1.0}) {
                const StripPoint x{sg * s, b.curve(s)};
                const Region ra = sg > 0 ? b.a : detail::mirrored(b.a);
                const Region rb = sg > 0 ? b.b : detail::mirrored(b.b);
                double v = std::fabs(weak_region_value(ra, x, p) - weak_region_value(rb, x, p));
                const double d = 1e-12 * (1.0 + std::fabs(x.x2));
                const StripPoint up{x.x1, x.x2 + d}, dn{x.x1, x.x2 - d};
                if (in_strip(up, p, 0.0) && in_strip(dn, p, 0.0))
                    v = std::max(v, std::fabs(eval_b(up, p).value - eval_b(dn, p).value));
                val.add(v);
                if (c1)
                    grad.add(detail::max_abs_diff(weak_region_gradient(ra, x, p), weak_region_gradient(rb, x, p)));
                if (omega2) {
                    const Region in = ra.index == 2 ? ra : rb, outr = ra.index == 2 ? rb : ra;
                    const double gin = weak_region_gradient(in, x, p).d2;
                    const double gout = weak_region_gradient(outr, x, p).d2;
                    sign.add(std::max(gin >= 0.0 ? 1.0 : 0.0, std::max(0.0, -gout)));
                }
            }
        }
        out.push_back(val);
        if (c1)
            out.push_back(grad);
        if (omega2)
            out.push_back(sign);
    }
    return out;
}

/// Continuity of Bmax and Bmin across the one-jump boundaries.
inline std::vector<CheckResult> check_one_jump_gluing(const Params& p, int n) {
    std::vector<CheckResult> out;
    for (const auto& b : one_jump_boundaries(p)) {
        auto c = make_check("one_jump_continuity:" + b.name, 1e-8);
        for (int k = 0; k < n; ++k) {
            const double t = detail::boundary_parameter(b, k, n);
            const StripPoint x{t, b.curve(t)};
            c.add(std::max(std::fabs(bmax_region_value(b.a.index, x, p) - bmax_region_value(b.b.index, x, p)),
                           std::fabs(bmin_region_value(b.a.index, x, p) - bmin_region_value(b.b.index, x, p))));
        }
        out.push_back(c);
    }
    return out;
}

/// At lambda = eps the small and medium formulas agree, at lambda = 2 eps the
/// medium and large ones.
inline std::vector<CheckResult> check_regime_gluing(double eps, int n, Rng& rng) {
    std::vector<CheckResult> out;
    const std::pair<Regime, Regime> pairs[] = {{Regime::Small, Regime::Medium}, {Regime::Medium, Regime::Large}};
    const double levels[] = {eps, 2.0 * eps};
    for (int i = 0; i < 2; ++i) {
        const Params p{levels[i], eps};
        auto c = make_check(i == 0 ? "regime_gluing:small|medium" : "regime_gluing:medium|large", 1e-12);
        for (int k = 0; k < n; ++k) {
            const StripPoint x = random_strip_point(rng, p);
            const auto [r1, r2] = pairs[i];
            c.add(std::fabs(weak_region_value(detail::classify_weak_raw(x, p, r1), x, p) -
                            weak_region_value(detail::classify_weak_raw(x, p, r2), x, p)));
        }
        out.push_back(c);
    }
    return out;
}

/// t -> B(0, t) is nondecreasing on [0, eps^2].
inline CheckResult check_center_monotone(const Params& p, int n) {
    auto c = make_check("center_monotone", 0.0);
    double prev = eval_b({0.0, 0.0}, p).value;
    for (int k = 1; k <= n; ++k) {
        const double v = eval_b({0.0, p.eps * p.eps * k / n}, p).value;
        c.add(std::max(0.0, prev - v));
        prev = v;
    }
    return c;
}

/// Lower-boundary values: 1 for |x1| >= lambda, 0 otherwise.
inline CheckResult check_normalization(const Params& p, int n, Rng& rng) {
    auto c = make_check("normalization", 0.0);
    const double w = default_half_width(p);
    for (int k = 0; k < n; ++k) {
        const double t = uniform(rng, -w, w);
        const double expect = std::fabs(t) >= p.lambda ? 1.0 : 0.0;
        c.add(std::fabs(eval_b({t, t * t}, p).value - expect));
    }
    return c;
}

inline CheckResult check_bound_identity(const Params& p) {
    auto c = make_check("bound_equals_center_value", 1e-12);
    c.add(std::fabs(weak_jn_bound(p) - eval_b({0.0, p.eps * p.eps}, p).value));
    return c;
}

struct ExtremizerChecks {
    CheckResult moments = make_check("extremizer_moments", 1e-9);
    CheckResult measure = make_check("extremizer_measure", 1e-9);
    CheckResult norm = make_check("extremizer_norm_upper", 1e-6);
    CheckResult norm_omega1 = make_check("extremizer_norm_omega1_lower", 1e-3);
    CheckResult delivery = make_check("extremizer_delivery", 1e-9);
    CheckResult omega4 = make_check("extremizer_omega4_identity", 1e-12);

    std::vector<CheckResult> all() const { return {moments, measure, norm, norm_omega1, delivery, omega4}; }
};

/// Extremizer round trip at `per_region` random points of each large-regime
/// region (both signs of x1). Skipped outside the large regime.
inline ExtremizerChecks check_extremizers(const Params& p, int per_region, Rng& rng, int norm_resolution = 512,
                                          int curve_samples = 200) {
    ExtremizerChecks c;
    if (regime(p) != Regime::Large) {
        for (auto* r : {&c.moments, &c.measure, &c.norm, &c.norm_omega1, &c.delivery, &c.omega4})
            r->skipped = true;
        return c;
    }
    for (int index = 1; index <= 5; ++index) {
        for (int k = 0; k < per_region; ++k) {
            const StripPoint x = random_point_in_weak_region(rng, p, index);
            const PiecewiseFunction phi = build_extremizer(x, p);
            validate(phi);
            const auto [m1, m2] = moments(phi, {0.0, 1.0});
            c.moments.add(std::max(std::fabs(m1 - x.x1), std::fabs(m2 - x.x2)));
            const double b = eval_b(x, p).value;
            c.measure.add(std::fabs(superlevel_measure(phi, p.lambda, LevelMode::Absolute) - b));
            const double nrm = bmo_norm(phi, norm_resolution);
            c.norm.add(std::max(0.0, nrm - p.eps));
            if (index == 1)
                c.norm_omega1.add(std::max(0.0, p.eps - nrm));
            c.delivery.add(delivery_curve(phi, curve_samples).max_violation);
            if (index == 4)
                c.omega4.add(std::fabs(phi.segments.front().t_hi - b));
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Oracle against a closed form

struct FieldComparison {
    double sup_gap = 0.0;        // over nodes at least `margin` away from the x1 edges
    double max_overshoot = 0.0;  // max(field - reference) over all nodes, at least 0
    int worst_i = 0;
    int worst_j = 0;
};

inline FieldComparison compare_field(const GridField& f, const std::function<double(const StripPoint&)>& reference,
                                     double margin) {
    FieldComparison c;
    const StripGrid& g = f.grid;
    for (int i = 0; i < g.n1; ++i) {
        const double x1 = g.x1(i);
        const bool inner = x1 >= g.x1_min + margin - 1e-12 && x1 <= g.x1_max - margin + 1e-12;
        for (int j = 0; j < g.n2; ++j) {
            const double d = f.at(i, j) - reference(g.point(i, j));
            c.max_overshoot = std::max(c.max_overshoot, d);
            if (inner && std::fabs(d) > c.sup_gap) {
                c.sup_gap = std::fabs(d);
                c.worst_i = i;
                c.worst_j = j;
            }
        }
    }
    return c;
}

/// Value of the field at the grid column nearest to x1 = 0 on the upper parabola.
inline double field_center_value(const GridField& f) {
    const StripGrid& g = f.grid;
    int best = 0;
    for (int i = 1; i < g.n1; ++i)
        if (std::fabs(g.x1(i)) < std::fabs(g.x1(best)))
            best = i;
    return f.at(best, g.n2 - 1);
}

struct VerifyOptions {
    int points = 1000;
    std::uint64_t seed = default_seed;
    int norm_resolution = 512;
    int extremizer_points_per_region = 200;
};

struct VerifyReport {
    Params params;
    std::uint64_t seed = default_seed;
    std::vector<CheckResult> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed())
                return false;
        return true;
    }
};

/// The whole invariant suite for one parameter pair.
inline VerifyReport run_invariant_suite(const Params& p, const VerifyOptions& opt = {}) {
    regime(p);
    VerifyReport rep;
    rep.params = p;
    rep.seed = opt.seed;
    Rng rng(opt.seed);
    const int n = opt.points;
    auto push = [&](CheckResult c) { rep.checks.push_back(std::move(c)); };
    auto push_all = [&](const std::vector<CheckResult>& cs) {
        for (const auto& c : cs)
            push(c);
    };
    push(check_partition(p, n, rng));
    push(check_range(p, n, rng));
    push(check_symmetry(p, n, rng));
    push(check_normalization(p, n, rng));
    push(check_center_monotone(p, n));
    push(check_bound_identity(p));
    push(check_reflection(p, n, rng));
    push(check_midpoint_concavity(p, n, rng, BellmanKind::Weak));
    push(check_midpoint_concavity(p, n, rng, BellmanKind::Max));
    push(check_midpoint_concavity(p, n, rng, BellmanKind::Min));
    push(check_gradient(p, n, rng, BellmanKind::Weak));
    push(check_gradient(p, n, rng, BellmanKind::Max));
    push_all(check_hessian(p, n, rng));
    push_all(check_gluing(p, n));
    push_all(check_one_jump_gluing(p, n));
    push_all(check_regime_gluing(p.eps, n, rng));
    push_all(check_extremizers(p, opt.extremizer_points_per_region, rng, opt.norm_resolution).all());
    return rep;
}

}  // namespace wjn
