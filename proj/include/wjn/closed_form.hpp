#pragma once
// Closed-form Bellman functions for the weak John-Nirenberg problem on the
// parabolic strip, together with their first and second derivatives.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "wjn/strip.hpp"

namespace wjn {

struct Gradient {
    double d1 = 0.0;  // with respect to x1
    double d2 = 0.0;  // with respect to x2
};

/// Symmetric 2x2 matrix [[h11, h12], [h12, h22]].
struct Hessian {
    double h11 = 0.0;
    double h12 = 0.0;
    double h22 = 0.0;

    double det() const { return h11 * h22 - h12 * h12; }
    double trace() const { return h11 + h22; }
    double max_eigenvalue() const {
        const double m = 0.5 * (h11 + h22);
        const double d = std::hypot(0.5 * (h11 - h22), h12);
        return m + d;
    }
};

struct BellmanValue {
    double value = 0.0;
    Region region;
    std::optional<Gradient> gradient;
    std::optional<Hessian> hessian;
};

namespace detail {

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// (x2 - t^2) / (x2 + l^2 - 2 l t): the two-step family whose extremal lines
// pass through (l, l^2). `t` is the (possibly reflected) first coordinate.
inline double ratio_value(double t, double x2, double l) {
    return (x2 - t * t) / (x2 + l * l - 2.0 * l * t);
}

inline Gradient ratio_grad(double t, double x2, double l) {
    const double d = x2 + l * l - 2.0 * l * t;
    return {2.0 * (x2 - l * t) * (l - t) / (d * d), (t - l) * (t - l) / (d * d)};
}

inline Hessian ratio_hess(double t, double x2, double l) {
    const double d = x2 + l * l - 2.0 * l * t;
    const double d3 = d * d * d;
    const double a = l * l - x2, b = l - t;
    return {-2.0 * a * a / d3, 2.0 * a * b / d3, -2.0 * b * b / d3};
}

// sqrt(eps^2 - x2 + t^2), clamped at zero against upper-parabola round-off.
inline double upper_gap(double t, double x2, double eps) {
    return std::sqrt(std::max(0.0, eps * eps - x2 + t * t));
}

// (e/2) (1 - w) exp((t - l)/eps + w), w = sqrt(1 - (x2 - t^2)/eps^2): the
// logarithmic family foliated by tangents to the upper parabola.
inline double log_value(double t, double x2, double l, double eps) {
    const double w = upper_gap(t, x2, eps) / eps;
    return 0.5 * std::numbers::e * (1.0 - w) * std::exp((t - l) / eps + w);
}

inline Gradient log_grad(double t, double x2, double l, double eps) {
    const double g = upper_gap(t, x2, eps);
    const double ex = std::exp((t - l) / eps + g / eps);
    const double e2 = eps * eps;
    return {0.5 * std::numbers::e * (eps - t - g) / e2 * ex, std::numbers::e / (4.0 * e2) * ex};
}

inline Hessian log_hess(double t, double x2, double l, double eps) {
    const double g = upper_gap(t, x2, eps);
    const double r = (t + g) / eps;
    const double c = std::exp(1.0 + r - l / eps) / (8.0 * eps * eps * eps * g);
    return {-4.0 * eps * eps * r * r * c, 2.0 * eps * r * c, -c};
}

// Reflect derivatives taken with respect to s = |x1| back to x1.
inline Gradient from_abs(Gradient g, double sign) { return {g.d1 * sign, g.d2}; }
inline Hessian from_abs(Hessian h, double sign) { return {h.h11, h.h12 * sign, h.h22}; }

}  // namespace detail

/// Value of the weak-inequality formula attached to region `r`, evaluated at `x`
/// whether or not `x` belongs to that region. Used for gluing checks.
inline double weak_region_value(const Region& r, const StripPoint& x, const Params& p) {
    const double s = std::fabs(x.x1);
    const double l = p.lambda, e = p.eps;
    switch (r.layout) {
    case Layout::WeakSmall:
        switch (r.index) {
        case 1: return 1.0;
        case 2: return x.x2 / (l * l);
        case 3: return detail::ratio_value(s, x.x2, l);
        }
        break;
    case Layout::WeakMedium:
        switch (r.index) {
        case 1: return 1.0;
        case 2:
            return (2.0 * (l * l - e * e) * s - (l - e) * x.x2 + l * (2.0 * e * e + e * l - l * l)) /
                   (2.0 * e * l * l);
        case 3: return detail::ratio_value(s, x.x2, l);
        case 4: return x.x2 / (l * l);
        }
        break;
    case Layout::WeakLarge:
        switch (r.index) {
        case 1: return 1.0;
        case 2: return 1.0 - (x.x2 - 2.0 * (l + e) * s + l * l + 2.0 * e * l) / (8.0 * e * e);
        case 3: return detail::ratio_value(s, x.x2, l);
        case 4: return detail::log_value(s, x.x2, l, e);
        case 5: return x.x2 / (4.0 * e * e) * std::exp(2.0 - l / e);
        }
        break;
    case Layout::OneJump:
        break;
    }
    throw domain_error("not a weak-layout region: " + region_name(r));
}

inline Gradient weak_region_gradient(const Region& r, const StripPoint& x, const Params& p) {
    const double s = std::fabs(x.x1), sg = detail::sgn(x.x1);
    const double l = p.lambda, e = p.eps;
    switch (r.layout) {
    case Layout::WeakSmall:
        switch (r.index) {
        case 1: return {0.0, 0.0};
        case 2: return {0.0, 1.0 / (l * l)};
        case 3: return detail::from_abs(detail::ratio_grad(s, x.x2, l), sg);
        }
        break;
    case Layout::WeakMedium:
        switch (r.index) {
        case 1: return {0.0, 0.0};
        case 2: return {sg * (l * l - e * e) / (e * l * l), -(l - e) / (2.0 * e * l * l)};
        case 3: return detail::from_abs(detail::ratio_grad(s, x.x2, l), sg);
        case 4: return {0.0, 1.0 / (l * l)};
        }
        break;
    case Layout::WeakLarge:
        switch (r.index) {
        case 1: return {0.0, 0.0};
        case 2: return {sg * (l + e) / (4.0 * e * e), -1.0 / (8.0 * e * e)};
        case 3: return detail::from_abs(detail::ratio_grad(s, x.x2, l), sg);
        case 4: return detail::from_abs(detail::log_grad(s, x.x2, l, e), sg);
        case 5: return {0.0, std::exp(2.0 - l / e) / (4.0 * e * e)};
        }
        break;
    case Layout::OneJump:
        break;
    }
    throw domain_error("not a weak-layout region: " + region_name(r));
}

inline Hessian weak_region_hessian(const Region& r, const StripPoint& x, const Params& p) {
    const double s = std::fabs(x.x1), sg = detail::sgn(x.x1);
    if (r.index == 3)
        return detail::from_abs(detail::ratio_hess(s, x.x2, p.lambda), sg);
    if (r.layout == Layout::WeakLarge && r.index == 4)
        return detail::from_abs(detail::log_hess(s, x.x2, p.lambda, p.eps), sg);
    return {};
}

/// Upper Bellman function for the one-sided set {phi >= lambda}, region by region.
inline double bmax_region_value(int index, const StripPoint& x, const Params& p) {
    const double l = p.lambda, e = p.eps;
    switch (index) {
    case 1:
    case 2: return 1.0;
    case 3: return 1.0 - (x.x2 - 2.0 * (l + e) * x.x1 + l * l + 2.0 * e * l) / (8.0 * e * e);
    case 4: return detail::ratio_value(x.x1, x.x2, l);
    case 5: return detail::log_value(x.x1, x.x2, l, e);
    }
    throw domain_error("one-jump region index out of range");
}

inline Gradient bmax_region_gradient(int index, const StripPoint& x, const Params& p) {
    const double l = p.lambda, e = p.eps;
    switch (index) {
    case 1:
    case 2: return {0.0, 0.0};
    case 3: return {(l + e) / (4.0 * e * e), -1.0 / (8.0 * e * e)};
    case 4: return detail::ratio_grad(x.x1, x.x2, l);
    case 5: return detail::log_grad(x.x1, x.x2, l, e);
    }
    throw domain_error("one-jump region index out of range");
}

/// Lower Bellman function, region by region.
inline double bmin_region_value(int index, const StripPoint& x, const Params& p) {
    const double l = p.lambda, e = p.eps;
    switch (index) {
    case 4:
    case 5: return 0.0;
    case 3: return (x.x2 - 2.0 * (l - e) * x.x1 + l * l - 2.0 * e * l) / (8.0 * e * e);
    case 2: return 1.0 - detail::ratio_value(x.x1, x.x2, l);
    case 1: return 1.0 - detail::log_value(-x.x1, x.x2, -l, e);
    }
    throw domain_error("one-jump region index out of range");
}

namespace detail {

inline bool is_singular_point(const StripPoint& x, const Params& p) {
    return x.x1 == p.lambda && x.x2 == p.lambda * p.lambda;
}

// True when some axis probe at distance `margin` lands in a different region.
template <typename Classify>
bool near_region_boundary(const StripPoint& x, const Params& p, const Region& r, double margin,
                          Classify&& classify) {
    const StripPoint probes[] = {{x.x1 + margin, x.x2},
                                 {x.x1 - margin, x.x2},
                                 {x.x1, x.x2 + margin},
                                 {x.x1, x.x2 - margin}};
    for (const auto& q : probes) {
        if (!in_strip(q, p, 0.0))
            continue;
        if (!(classify(q) == r))
            return true;
    }
    return false;
}

inline double default_margin(const StripPoint& x) {
    return 1e-9 * (1.0 + std::fabs(x.x1) + std::fabs(x.x2));
}

}  // namespace detail

/// Sharp upper bound for |{|phi| >= lambda}| over test functions with Bellman point x.
inline BellmanValue eval_b(const StripPoint& x, const Params& p) {
    const Region r = classify_weak(x, p);
    return {weak_region_value(r, x, p), r, std::nullopt, std::nullopt};
}

/// Sharp upper bound for |{phi >= lambda}|.
inline BellmanValue eval_bmax(const StripPoint& x, const Params& p) {
    const Region r = classify_one_jump(x, p);
    return {bmax_region_value(r.index, x, p), r, std::nullopt, std::nullopt};
}

/// Sharp lower bound for |{phi >= lambda}|. At (lambda, lambda^2) only the
/// constant test function exists, so the value there is 1.
inline BellmanValue eval_bmin(const StripPoint& x, const Params& p) {
    const Region r = classify_one_jump(x, p);
    if (detail::is_singular_point(x, p))
        return {1.0, r, std::nullopt, std::nullopt};
    return {bmin_region_value(r.index, x, p), r, std::nullopt, std::nullopt};
}

/// Gradient of B in the interior of a region. Throws when an axis probe at
/// distance `margin` changes the region.
inline Gradient grad_b(const StripPoint& x, const Params& p, double margin) {
    const Region r = classify_weak(x, p);
    const Regime rg = regime(p);
    if (detail::near_region_boundary(x, p, r, margin, [&](const StripPoint& q) {
            return detail::classify_weak_raw(q, p, rg);
        }))
        throw domain_error("gradient requested on a region boundary (" + region_name(r) + ")");
    return weak_region_gradient(r, x, p);
}

inline Gradient grad_b(const StripPoint& x, const Params& p) {
    return grad_b(x, p, detail::default_margin(x));
}

inline Hessian hessian_b(const StripPoint& x, const Params& p, double margin) {
    const Region r = classify_weak(x, p);
    const Regime rg = regime(p);
    if (detail::near_region_boundary(x, p, r, margin, [&](const StripPoint& q) {
            return detail::classify_weak_raw(q, p, rg);
        }))
        throw domain_error("Hessian requested on a region boundary (" + region_name(r) + ")");
    if (r.layout == Layout::WeakLarge && r.index == 4 && detail::upper_gap(x.x1, x.x2, p.eps) == 0.0)
        throw domain_error("Hessian is unbounded on the upper parabola");
    return weak_region_hessian(r, x, p);
}

inline Hessian hessian_b(const StripPoint& x, const Params& p) {
    return hessian_b(x, p, detail::default_margin(x));
}

inline Gradient grad_bmax(const StripPoint& x, const Params& p, double margin) {
    const Region r = classify_one_jump(x, p);
    if (detail::near_region_boundary(x, p, r, margin, [&](const StripPoint& q) {
            return detail::classify_one_jump_raw(q, p);
        }))
        throw domain_error("gradient requested on a region boundary (" + region_name(r) + ")");
    return bmax_region_gradient(r.index, x, p);
}

inline Gradient grad_bmax(const StripPoint& x, const Params& p) {
    return grad_bmax(x, p, detail::default_margin(x));
}

/// Sharp constant in |{|phi - <phi>| >= lambda}| <= bound for phi in BMO_eps.
inline double weak_jn_bound(const Params& p) {
    switch (regime(p)) {
    case Regime::Small: return 1.0;
    case Regime::Medium: return p.eps * p.eps / (p.lambda * p.lambda);
    case Regime::Large:
        return std::numbers::e * std::numbers::e / 4.0 * std::exp(-p.lambda / p.eps);
    }
    return 1.0;
}

}  // namespace wjn
