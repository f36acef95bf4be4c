#pragma once
// Optimal test functions for the weak inequality in the large-level regime
// (lambda > 2 eps). Each one has Bellman point x on [0, 1] and a superlevel
// set {|phi| >= lambda} of measure B(x).

#include <cmath>
#include <numbers>
#include <vector>

#include "wjn/closed_form.hpp"
#include "wjn/piecewise.hpp"
#include "wjn/strip.hpp"

namespace wjn {

namespace detail {

inline void push_nonempty(std::vector<Segment>& out, Segment s) {
    if (s.t_hi > s.t_lo)
        out.push_back(s);
}

inline PiecewiseFunction make_function(std::vector<Segment> segs, const StripPoint& x, const Params& p,
                                       const Region& r) {
    PiecewiseFunction f;
    f.segments = std::move(segs);
    f.params = p;
    f.origin = x;
    f.region = r;
    return f;
}

// Two steps u- < u+ with jump 2 eps; the chord is tangent to the upper parabola.
inline std::vector<Segment> build_region1(double x1, double x2, const Params& p) {
    const double e = p.eps;
    const double g = upper_gap(x1, x2, e);
    const double um = x1 - e + g, up = x1 + e + g;
    const double split = (up - x1) / (2.0 * e);
    std::vector<Segment> s;
    push_nonempty(s, Segment::constant(0.0, split, um));
    push_nonempty(s, Segment::constant(split, 1.0, up));
    return s;
}

// Steps lambda and u on the line through (lambda, lambda^2).
inline std::vector<Segment> build_region3(double x1, double x2, const Params& p) {
    const double l = p.lambda;
    const double a = ratio_value(x1, x2, l);
    const double u = (l * x1 - x2) / (l - x1);
    std::vector<Segment> s;
    push_nonempty(s, Segment::constant(0.0, a, l));
    push_nonempty(s, Segment::constant(a, 1.0, u));
    return s;
}

// Three steps lambda - 2 eps, lambda, lambda + 2 eps.
inline std::vector<Segment> build_region2(double x1, double x2, const Params& p) {
    const double l = p.lambda, e = p.eps;
    const double q = x2 + l * l - 2.0 * l * x1;
    const double a = (q - 2.0 * e * (x1 - l)) / (8.0 * e * e);
    const double b = 1.0 - (q + 2.0 * e * (x1 - l)) / (8.0 * e * e);
    std::vector<Segment> s;
    push_nonempty(s, Segment::constant(0.0, a, l - 2.0 * e));
    push_nonempty(s, Segment::constant(a, b, l));
    push_nonempty(s, Segment::constant(b, 1.0, l + 2.0 * e));
    return s;
}

// lambda on (0, a), lambda - 2 eps on (a, 2a), a logarithmic descent on
// (2a, b) and the constant u = x1 - eps + sqrt(eps^2 - x2 + x1^2) on (b, 1).
inline std::vector<Segment> build_region4(double x1, double x2, const Params& p) {
    const double l = p.lambda, e = p.eps;
    const double w = upper_gap(x1, x2, e) / e;
    const double a = log_value(x1, x2, l, e);
    const double b = 1.0 - w;
    const double low = l - 2.0 * e;
    std::vector<Segment> s;
    push_nonempty(s, Segment::constant(0.0, a, l));
    push_nonempty(s, Segment::constant(a, 2.0 * a, low));
    if (b > 2.0 * a) {
        push_nonempty(s, Segment::log_left(2.0 * a, b, low, e, 2.0 * a));
        push_nonempty(s, Segment::constant(b, 1.0, low + e * std::log(2.0 * a / b)));
    } else {
        push_nonempty(s, Segment::constant(2.0 * a, 1.0, low));
    }
    return s;
}

// Monotone seven-piece function: the concatenation of the two mirrored
// logarithmic constructions with a zero plateau in the middle.
inline std::vector<Segment> build_region5(double x1, double x2, const Params& p) {
    const double l = p.lambda, e = p.eps;
    const double bm = (x2 - 2.0 * e * x1) / (4.0 * e * e);
    const double bp = (x2 + 2.0 * e * x1) / (4.0 * e * e);
    const double k = std::exp(2.0 - l / e);
    const double am = 0.5 * bm * k, ap = 0.5 * bp * k;
    std::vector<Segment> s;
    push_nonempty(s, Segment::constant(0.0, am, -l));
    push_nonempty(s, Segment::constant(am, 2.0 * am, -l + 2.0 * e));
    push_nonempty(s, Segment::log_left(2.0 * am, bm, -l + 2.0 * e, -e, 2.0 * am));
    push_nonempty(s, Segment::constant(bm, 1.0 - bp, 0.0));
    push_nonempty(s, Segment::log_right(1.0 - bp, 1.0 - 2.0 * ap, l - 2.0 * e, e, 2.0 * ap));
    push_nonempty(s, Segment::constant(1.0 - 2.0 * ap, 1.0 - ap, l - 2.0 * e));
    push_nonempty(s, Segment::constant(1.0 - ap, 1.0, l));
    return s;
}

}  // namespace detail

/// Extremal test function for B at x (large regime only).
///
/// Points with x1 < 0 are handled by building the extremizer of (-x1, x2)
/// and negating it. At (lambda, lambda^2) the constant lambda is returned.
inline PiecewiseFunction build_extremizer(const StripPoint& x, const Params& p) {
    if (regime(p) != Regime::Large)
        throw domain_error("extremizers are constructed for lambda > 2 eps only");
    const Region region = classify_weak(x, p);
    const bool flip = x.x1 < 0.0;
    const double x1 = std::fabs(x.x1), x2 = x.x2;

    std::vector<Segment> segs;
    if (x1 == p.lambda && x2 == p.lambda * p.lambda) {
        segs.push_back(Segment::constant(0.0, 1.0, p.lambda));
    } else {
        switch (region.index) {
        case 1: segs = detail::build_region1(x1, x2, p); break;
        case 2: segs = detail::build_region2(x1, x2, p); break;
        case 3: segs = detail::build_region3(x1, x2, p); break;
        case 4: segs = detail::build_region4(x1, x2, p); break;
        case 5: segs = detail::build_region5(x1, x2, p); break;
        default: throw domain_error("unexpected region");
        }
    }
    if (flip)
        for (auto& s : segs)
            s = s.negated();
    // Close tiny round-off gaps so the segment list covers [0, 1] exactly.
    segs.front().t_lo = 0.0;
    segs.back().t_hi = 1.0;
    for (std::size_t i = 1; i < segs.size(); ++i)
        segs[i].t_lo = segs[i - 1].t_hi;
    return detail::make_function(std::move(segs), x, p, region);
}

}  // namespace wjn
